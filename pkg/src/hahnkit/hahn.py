"""Precision-tracked arithmetic in the Hahn series field over GF(q) with
rational exponents.

A series is a finite ascending support of (exponent, coefficient) pairs plus
a precision bound `prec`: the element is known modulo terms of valuation
>= prec.  `prec == INF` means the element is exactly the stored finite sum.
Exponents are `fractions.Fraction` (always in lowest terms); `INF` is the
float infinity, which compares and adds correctly against Fractions and never
leaks into exponents.

All values are immutable; operations are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    CannotInvert,
    ContextMismatch,
    InsufficientPrecision,
    NotIntegral,
    PrecisionRequired,
    UnboundVariable,
)
from .finite_field import FqContext, FqElem, format_fq

INF = float("inf")

Exp = Fraction
PrecType = Fraction | float


@dataclass(frozen=True, slots=True)
class ValBound:
    """What is known about the valuation of a series.

    known(g): the valuation is exactly g (nonzero coefficient at g).
    at_least(g): all that is known is v >= g (empty support, finite prec).
    infinite(): the exact zero element.
    """

    kind: str
    gamma: Fraction | None

    @classmethod
    def known(cls, gamma: Fraction) -> "ValBound":
        return cls("known", gamma)

    @classmethod
    def at_least(cls, gamma: Fraction) -> "ValBound":
        return cls("atleast", gamma)

    @classmethod
    def infinite(cls) -> "ValBound":
        return cls("infinite", None)

    @property
    def is_known(self) -> bool:
        return self.kind == "known"

    @property
    def lower(self) -> PrecType:
        return INF if self.gamma is None else self.gamma

    def __str__(self) -> str:
        if self.kind == "known":
            return f"v = {self.gamma}"
        if self.kind == "atleast":
            return f"v >= {self.gamma}"
        return "v = +inf"


@dataclass(frozen=True, slots=True)
class HahnSeries:
    """Finitely-supported approximation of a Hahn series element.

    Invariants: support exponents strictly increasing, all coefficients
    nonzero, every exponent < prec.  Use :func:`series` (or the arithmetic
    operators) rather than the raw constructor.
    """

    ctx: FqContext
    support: tuple[tuple[Fraction, FqElem], ...]
    prec: PrecType

    # -- interrogation

    def is_exact(self) -> bool:
        return self.prec == INF

    def is_exact_zero(self) -> bool:
        return not self.support and self.prec == INF

    def valuation(self) -> ValBound:
        if self.support:
            return ValBound.known(self.support[0][0])
        if self.prec == INF:
            return ValBound.infinite()
        return ValBound.at_least(self.prec)

    def val_lower(self) -> PrecType:
        """Certified lower bound for the valuation (INF for exact zero)."""
        if self.support:
            return self.support[0][0]
        return self.prec

    def coeff(self, e: Fraction) -> FqElem:
        for exp, c in self.support:
            if exp == e:
                return c
        return self.ctx.zero

    def leading(self) -> tuple[Fraction, FqElem]:
        if not self.support:
            raise CannotInvert("series has empty support")
        return self.support[0]

    # -- arithmetic

    def _check(self, other: "HahnSeries") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other: "HahnSeries") -> "HahnSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        if not self.support:
            return other.truncate(prec)
        if not other.support:
            return self.truncate(prec)
        # both supports are sorted: merge directly
        a, b = self.support, other.support
        add_t = self.ctx.add_t
        out = []
        i = j = 0
        while i < len(a) and j < len(b):
            e1, e2 = a[i][0], b[j][0]
            if e1 < e2:
                out.append(a[i])
                i += 1
            elif e2 < e1:
                out.append(b[j])
                j += 1
            else:
                idx = add_t[a[i][1].idx][b[j][1].idx]
                if idx:
                    out.append((e1, FqElem(self.ctx, idx)))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        if prec == INF:
            return HahnSeries(self.ctx, tuple(out), prec)
        return HahnSeries(
            self.ctx, tuple((e, c) for e, c in out if e < prec), prec
        )

    def __sub__(self, other: "HahnSeries") -> "HahnSeries":
        return self + (-other)

    def __neg__(self) -> "HahnSeries":
        return HahnSeries(self.ctx, tuple((e, -c) for e, c in self.support), self.prec)

    def __mul__(self, other: "HahnSeries") -> "HahnSeries":
        self._check(other)
        if self.is_exact_zero() or other.is_exact_zero():
            return zero(self.ctx)
        prec = min(self.prec + other.val_lower(), other.prec + self.val_lower())
        ctx = self.ctx
        if len(self.support) == 1 or len(other.support) == 1:
            single, multi = (
                (self, other) if len(self.support) == 1 else (other, self)
            )
            e0, c0 = single.support[0]
            row = ctx.mul_t[c0.idx]
            out = []
            unbounded = prec == INF
            for e, c in multi.support:
                es = e0 + e
                if not unbounded and es >= prec:
                    break  # support is ascending
                idx = row[c.idx]
                if idx:
                    out.append((es, FqElem(ctx, idx)))
            return HahnSeries(ctx, tuple(out), prec)
        # convolve over a common exponent denominator so the inner loop is
        # pure integer + table-index work
        den = 1
        for e, _ in self.support:
            den = den * e.denominator // math.gcd(den, e.denominator)
        for e, _ in other.support:
            den = den * e.denominator // math.gcd(den, e.denominator)
        bound = prec * den
        a = [(e.numerator * (den // e.denominator), c.idx) for e, c in self.support]
        b = [(e.numerator * (den // e.denominator), c.idx) for e, c in other.support]
        mul_t, add_t = ctx.mul_t, ctx.add_t
        acc: dict[int, int] = {}
        for e1, i1 in a:
            row = mul_t[i1]
            for e2, i2 in b:
                e = e1 + e2
                if e >= bound:
                    continue
                v = row[i2]
                prev = acc.get(e)
                acc[e] = v if prev is None else add_t[prev][v]
        support = tuple(
            (Fraction(e, den), FqElem(ctx, i)) for e, i in sorted(acc.items()) if i
        )
        return HahnSeries(ctx, support, prec)

    def frobenius_power(self) -> "HahnSeries":
        """x^p in O(support): coefficients by Frobenius, exponents scaled.
        Precision multiplies too: (x + O(t^a))^p = x^p + O(t^(p*a))."""
        p = self.ctx.p
        return HahnSeries(
            self.ctx,
            tuple((e * p, c.frobenius()) for e, c in self.support),
            INF if self.prec == INF else self.prec * p,
        )

    def __pow__(self, n: int) -> "HahnSeries":
        if n < 0:
            raise ValueError("negative powers: use inverse() explicitly")
        p = self.ctx.p
        result = one(self.ctx)
        base = self
        while n:
            if n % p == 0:
                base = base.frobenius_power()
                n //= p
                continue
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.frobenius_power() if p == 2 else base * base
        return result

    def scale(self, c: FqElem) -> "HahnSeries":
        if c.is_zero():
            return HahnSeries(self.ctx, (), self.prec)
        return HahnSeries(self.ctx, tuple((e, k * c) for e, k in self.support), self.prec)

    def shift(self, e: Fraction) -> "HahnSeries":
        """Multiply by the exact monomial t^e."""
        e = Fraction(e)
        return HahnSeries(
            self.ctx, tuple((exp + e, c) for exp, c in self.support), self.prec + e
        )

    def truncate(self, prec: PrecType) -> "HahnSeries":
        """Forget information beyond valuation `prec` (never adds any)."""
        if prec >= self.prec:
            return self
        return HahnSeries(
            self.ctx, tuple((e, c) for e, c in self.support if e < prec), prec
        )

    def inverse(self, prec: PrecType | None = None) -> "HahnSeries":
        """Multiplicative inverse to precision.

        The natural output precision is prec(x) - 2*v(x); `prec` caps it in
        absolute terms.  Exact monomials invert exactly.  An exact series
        with more than one term has an inverse with infinite support, so a
        cap is mandatory there.
        """
        if not self.support:
            raise CannotInvert(
                "cannot invert: zero series (exactly zero, or zero to precision "
                f"{self.prec})"
            )
        gamma, lead = self.support[0]
        natural = self.prec - 2 * gamma
        target = natural if prec is None else min(natural, prec)
        if len(self.support) == 1:
            # exact up to the natural precision; the cap only bounds work
            out = monomial(self.ctx, -gamma, lead.inverse())
            return out if natural == INF else out.truncate(natural)
        if target == INF:
            raise PrecisionRequired(
                "inverse of an exact non-monomial series has infinite support; "
                "pass a precision cap"
            )
        # Newton iteration z <- z(2 - xz), doubling the correct relative length.
        two = series(self.ctx, [(Fraction(0), self.ctx.from_int(2))])
        z = monomial(self.ctx, -gamma, lead.inverse())
        x = self.truncate(target + 2 * gamma)
        while True:
            err = one(self.ctx) - x * z
            if err.val_lower() + (-gamma) >= target:
                break
            z = (z * (two - x * z)).truncate(target)
        return z.truncate(target)

    def residue(self) -> FqElem:
        """Coefficient at exponent 0 (the residue map on the valuation ring)."""
        if self.support and self.support[0][0] < 0:
            raise NotIntegral(f"valuation {self.support[0][0]} < 0 has no residue")
        if self.prec <= 0:
            raise InsufficientPrecision(
                f"precision {self.prec} <= 0 cannot certify the residue"
            )
        return self.coeff(Fraction(0))

    def pth_root(self) -> "HahnSeries":
        """The unique p-th root: exponents /p, coefficients by Frobenius inverse."""
        p = self.ctx.p
        return HahnSeries(
            self.ctx,
            tuple((e / p, c.frobenius_inv()) for e, c in self.support),
            INF if self.prec == INF else self.prec / p,
        )

    def agrees_with(self, other: "HahnSeries") -> bool:
        """Equality to shared precision (exact equality when both exact)."""
        self._check(other)
        return not (self - other).support

    def __str__(self) -> str:
        return format_series(self)

    def __repr__(self) -> str:
        return f"HahnSeries({format_series(self)!r})"


def series(
    ctx: FqContext,
    terms: Iterable[tuple[Fraction | int, FqElem]],
    prec: PrecType = INF,
) -> HahnSeries:
    """Canonicalize arbitrary terms: merge, sort, drop zeros and out-of-range
    exponents."""
    acc: dict[Fraction, FqElem] = {}
    for e, c in terms:
        e = Fraction(e)
        prev = acc.get(e)
        acc[e] = c if prev is None else prev + c
    support = tuple(
        (e, c) for e, c in sorted(acc.items()) if not c.is_zero() and e < prec
    )
    return HahnSeries(ctx, support, prec)


def zero(ctx: FqContext) -> HahnSeries:
    return HahnSeries(ctx, (), INF)


def one(ctx: FqContext) -> HahnSeries:
    return HahnSeries(ctx, ((Fraction(0), ctx.one),), INF)


def monomial(ctx: FqContext, e: Fraction | int, c: FqElem | int = 1) -> HahnSeries:
    if isinstance(c, int):
        c = ctx.from_int(c)
    if c.is_zero():
        return zero(ctx)
    return HahnSeries(ctx, ((Fraction(e), c),), INF)


def from_fq(c: FqElem) -> HahnSeries:
    return monomial(c.ctx, 0, c)


def from_int(ctx: FqContext, n: int) -> HahnSeries:
    return monomial(ctx, 0, ctx.from_int(n))


def big_o(ctx: FqContext, prec: Fraction | int) -> HahnSeries:
    """The zero-with-finite-precision value O(t^prec)."""
    return HahnSeries(ctx, (), Fraction(prec))


def format_series(x: HahnSeries) -> str:
    """Render in the literal grammar, e.g. `2*t^(-1/3) + (a+1)*t + O(t^(5/2))`."""
    parts = []
    for e, c in x.support:
        cs = format_fq(c)
        if x.ctx.ell > 1 and c.idx >= x.ctx.p:
            cs = f"({cs})"
        if e == 0:
            parts.append(cs)
        else:
            mono = "t" if e == 1 else f"t^({e})"
            parts.append(mono if cs == "1" else f"{cs}*{mono}")
    if x.prec != INF:
        mono = "t" if x.prec == 1 else f"t^({x.prec})"
        parts.append(f"O({mono})")
    return " + ".join(parts) if parts else "0"


def eval_poly(
    monomials: Mapping[tuple[tuple[str, int], ...], int | FqElem | HahnSeries],
    assignment: Mapping[str, HahnSeries],
    ctx: FqContext,
) -> HahnSeries:
    """Evaluate a multivariate polynomial given as {((var, exp), ...): coeff}.

    Coefficients may be integers (reduced mod p), field elements, or series.
    """
    total = zero(ctx)
    for mono, coeff in monomials.items():
        if isinstance(coeff, int):
            term = from_int(ctx, coeff)
        elif isinstance(coeff, FqElem):
            term = from_fq(coeff)
        else:
            term = coeff
        for var, exp in mono:
            if var not in assignment:
                raise UnboundVariable(f"variable {var!r} is not assigned")
            val = assignment[var]
            if val.ctx != ctx:
                raise ContextMismatch(f"{val.ctx} vs {ctx}")
            term = term * val**exp
        total = total + term
    return total
