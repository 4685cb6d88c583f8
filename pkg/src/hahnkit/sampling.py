"""Deterministic sample generation for the verification suites.

Given (seed, q, count) the generated list is identical across runs: a fixed
block of edge cases (0, 1, t, t^-1, t^(1/p), t^(-1/p), 1+t, and u+t for every
nonzero residue constant u) followed by `count` seeded random series with
support size 0-4, exponent numerators bounded by 6, and denominators drawn
from {1, 2, 3, p, 2p}.  All samples are exact (infinite precision).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .finite_field import FqContext
from .hahn import HahnSeries, monomial, one, series, zero


@dataclass(frozen=True)
class SampleSpec:
    q: int
    count: int = 200
    seed: int = 42
    max_support: int = 4
    max_numerator: int = 6

    def rng(self, salt: int = 0) -> random.Random:
        return random.Random(self.seed * 1_000_003 + self.q * 101 + salt)


def edge_cases(ctx: FqContext) -> list[HahnSeries]:
    p = ctx.p
    out = [
        zero(ctx),
        one(ctx),
        monomial(ctx, 1),
        monomial(ctx, -1),
        monomial(ctx, Fraction(1, p)),
        monomial(ctx, Fraction(-1, p)),
        series(ctx, [(Fraction(0), ctx.one), (Fraction(1), ctx.one)]),
    ]
    for u in range(1, ctx.q):
        out.append(series(ctx, [(Fraction(0), ctx.el(u)), (Fraction(1), ctx.one)]))
    return out


def random_series(
    ctx: FqContext,
    rng: random.Random,
    max_support: int = 4,
    max_numerator: int = 6,
    exponent_floor: Fraction | None = None,
) -> HahnSeries:
    terms = []
    denominators = [1, 2, 3, ctx.p, 2 * ctx.p]
    for _ in range(rng.randint(0, max_support)):
        e = Fraction(
            rng.randint(-max_numerator, max_numerator), rng.choice(denominators)
        )
        if exponent_floor is not None and e <= exponent_floor:
            continue
        terms.append((e, ctx.el(rng.randrange(1, ctx.q))))
    return series(ctx, terms)


def generate(spec: SampleSpec, ctx: FqContext | None = None) -> list[HahnSeries]:
    ctx = ctx or FqContext(spec.q)
    rng = spec.rng()
    out = edge_cases(ctx)
    for _ in range(spec.count):
        out.append(random_series(ctx, rng, spec.max_support, spec.max_numerator))
    return out


def generate_in_ideal(spec: SampleSpec, count: int, ctx: FqContext) -> list[HahnSeries]:
    """Nonzero-valuation samples (elements of the valuation ideal)."""
    rng = spec.rng(salt=7)
    out = []
    while len(out) < count:
        x = random_series(ctx, rng, spec.max_support, spec.max_numerator,
                          exponent_floor=Fraction(0))
        out.append(x)
    return out


def generate_in_ring(spec: SampleSpec, count: int, ctx: FqContext) -> list[HahnSeries]:
    """Nonnegative-valuation samples (elements of the valuation ring)."""
    rng = spec.rng(salt=13)
    out = []
    while len(out) < count:
        x = random_series(ctx, rng, spec.max_support, spec.max_numerator,
                          exponent_floor=Fraction(-1))
        x = series(ctx, [(e, c) for e, c in x.support if e >= 0])
        out.append(x)
    return out
