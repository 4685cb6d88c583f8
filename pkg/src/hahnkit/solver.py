"""Root solving for univariate polynomials over the Hahn series field.

Three layers:

* `UPoly` - dense univariate polynomials with series coefficients.
* `newton_polygon` / `hensel_lift` - the two classical primitives.  The
  polygon's orientation is fixed so that Y^2 - t yields root valuation 1/2
  (root valuation = minus the segment slope).
* `puiseux_roots` / `has_root_to_precision` - budgeted Newton-Puiseux
  expansion: per polygon segment, solve the residue equation exhaustively
  over F_q, substitute Y = c*t^mu + Y' and recurse; switch to Hensel lifting
  once a branch pins a single root and the convergence condition holds;
  apply the p-power reduction g = g1^p whenever g' vanishes identically.

Verdicts are three-valued.  `Yes` always carries witnesses whose
back-substituted residual valuation reached the target (checked here,
unconditionally).  `No` is only reported when every branch died on exact
input.  Budget or precision exhaustion degrades to `Inconclusive`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    CannotInvert,
    ContextMismatch,
    InsufficientPrecision,
    NotHenselReady,
    NotMonic,
    ZeroPolynomial,
)
from .finite_field import FqContext, FqElem, poly_roots
from .hahn import INF, HahnSeries, PrecType, from_fq, from_int, monomial, zero

ROOT_FOUND = "root-found"
BRANCH_DEAD = "branch-dead"
BUDGET_EXHAUSTED = "budget-exhausted"

VERDICT_YES = "yes"
VERDICT_NO = "no"
VERDICT_INCONCLUSIVE = "inconclusive"

DEFAULT_BUDGET = 32


@dataclass(frozen=True, slots=True)
class UPoly:
    """Dense univariate polynomial, coefficient i multiplying Y^i."""

    ctx: FqContext
    coeffs: tuple[HahnSeries, ...]

    @classmethod
    def make(
        cls, ctx: FqContext, coeffs: Iterable[HahnSeries | FqElem | int]
    ) -> "UPoly":
        out: list[HahnSeries] = []
        for c in coeffs:
            if isinstance(c, int):
                c = from_int(ctx, c)
            elif isinstance(c, FqElem):
                c = from_fq(c)
            if c.ctx != ctx:
                raise ContextMismatch(f"{c.ctx} vs {ctx}")
            out.append(c)
        while out and out[-1].is_exact_zero():
            out.pop()
        return cls(ctx, tuple(out))

    @classmethod
    def from_int_poly(cls, ctx: FqContext, ints: Sequence[int]) -> "UPoly":
        return cls.make(ctx, list(ints))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs)

    def __call__(self, x: HahnSeries) -> HahnSeries:
        acc = zero(self.ctx)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UPoly":
        ctx = self.ctx
        return UPoly.make(
            ctx,
            [c.scale(ctx.from_int(i)) for i, c in enumerate(self.coeffs) if i >= 1],
        )

    def shifted(self, s: HahnSeries) -> "UPoly":
        """g(s + Y), via binomial (Hasse) expansion; valid in any characteristic."""
        n = self.degree
        if n < 0:
            return self
        p = self.ctx.p
        s_pows = [from_int(self.ctx, 1)]
        for _ in range(n):
            s_pows.append(s_pows[-1] * s)
        out = []
        for j in range(n + 1):
            acc = zero(self.ctx)
            for i in range(j, n + 1):
                b = math.comb(i, j) % p
                if b == 0:
                    continue
                term = self.coeffs[i] * s_pows[i - j]
                if b != 1:
                    term = term.scale(self.ctx.from_int(b))
                acc = acc + term
            out.append(acc)
        return UPoly(self.ctx, tuple(out))

    def derivative_vanishes(self) -> bool:
        """True iff the formal derivative is exactly zero (p-power shape)."""
        p = self.ctx.p
        return all(
            c.is_exact_zero() for i, c in enumerate(self.coeffs) if i % p != 0 and i >= 1
        )

    def p_power_reduce(self) -> "UPoly":
        """When g' == 0, the unique g1 with g1^p = g (coefficient p-th roots)."""
        p = self.ctx.p
        return UPoly.make(
            self.ctx, [self.coeffs[i].pth_root() for i in range(0, len(self.coeffs), p)]
        )

    # -- ring operations (used by the formula evaluator and the parsers)

    def __add__(self, other: "UPoly") -> "UPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        z = zero(self.ctx)
        out = [
            (self.coeffs[i] if i < len(self.coeffs) else z)
            + (other.coeffs[i] if i < len(other.coeffs) else z)
            for i in range(n)
        ]
        return UPoly.make(self.ctx, out)

    def __neg__(self) -> "UPoly":
        return UPoly(self.ctx, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UPoly") -> "UPoly":
        return self + (-other)

    def __mul__(self, other: "UPoly") -> "UPoly":
        if self.is_zero() or other.is_zero():
            return UPoly(self.ctx, ())
        out = [zero(self.ctx)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_exact_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UPoly.make(self.ctx, out)

    def frobenius_power(self) -> "UPoly":
        """g^p in char p: coefficient p-th powers at p-fold indices."""
        p = self.ctx.p
        out = [zero(self.ctx)] * (p * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[p * i] = c.frobenius_power()
        return UPoly(self.ctx, tuple(out))

    def __pow__(self, n: int) -> "UPoly":
        p = self.ctx.p
        result = UPoly.make(self.ctx, [1])
        base = self
        while n:
            if n % p == 0 and not base.is_zero():
                base = base.frobenius_power()
                n //= p
                continue
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.frobenius_power() if p == 2 else base * base
        return result

    def scale_series(self, s: HahnSeries) -> "UPoly":
        return UPoly.make(self.ctx, [c * s for c in self.coeffs])

    def __repr__(self) -> str:
        inside = ", ".join(str(c) for c in self.coeffs)
        return f"UPoly({self.ctx!r}, [{inside}])"


@dataclass(frozen=True, slots=True)
class NPSegment:
    slope: Fraction
    length: int
    i_start: int
    i_end: int

    @property
    def root_valuation(self) -> Fraction:
        return -self.slope


@dataclass(frozen=True, slots=True)
class NewtonPolygon:
    points: tuple[tuple[int, Fraction], ...]
    vertices: tuple[tuple[int, Fraction], ...]
    segments: tuple[NPSegment, ...]


def newton_polygon(g: UPoly) -> NewtonPolygon:
    """Lower convex hull of {(i, v(c_i)) : c_i != 0}.

    Coefficients that are zero only to finite precision are tolerated as long
    as their precision bound lies strictly above the hull; otherwise the hull
    is underdetermined and InsufficientPrecision is raised.
    """
    if g.is_zero():
        raise ZeroPolynomial("the zero polynomial has no Newton polygon")
    points: list[tuple[int, Fraction]] = []
    unknown: list[tuple[int, PrecType]] = []
    for i, c in enumerate(g.coeffs):
        v = c.valuation()
        if v.is_known:
            points.append((i, v.gamma))
        elif v.kind == "atleast":
            unknown.append((i, v.gamma))
    if not points:
        raise InsufficientPrecision("no coefficient has a known valuation")
    lead = g.degree
    if not g.coeffs[lead].valuation().is_known:
        raise InsufficientPrecision(
            f"leading coefficient (degree {lead}) has no known valuation"
        )

    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)

    def hull_height(i: int) -> Fraction | float:
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= i <= x2:
                return y1 + Fraction(y2 - y1, x2 - x1) * (i - x1)
        return -INF if len(hull) > 1 else hull[0][1]

    for i, bound in unknown:
        if i < hull[0][0]:
            raise InsufficientPrecision(
                f"coefficient {i} is O(t^{bound}) left of the first known point"
            )
        if i <= hull[-1][0] and bound <= hull_height(i):
            raise InsufficientPrecision(
                f"coefficient {i} is O(t^{bound}), at or below the hull"
            )

    segments = [
        NPSegment(Fraction(y2 - y1, x2 - x1), x2 - x1, x1, x2)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    ]
    return NewtonPolygon(tuple(points), tuple(hull), tuple(segments))


def residue_equation(g: UPoly, seg: NPSegment) -> list[FqElem]:
    """Leading coefficients of the points on a segment, as an F_q polynomial
    in the residue unknown (indexed from the segment start)."""
    ctx = g.ctx
    out = [ctx.zero] * (seg.length + 1)
    base = g.coeffs[seg.i_start].valuation().gamma
    for i in range(seg.i_start, seg.i_end + 1):
        v = g.coeffs[i].valuation()
        if v.is_known and v.gamma == base + seg.slope * (i - seg.i_start):
            out[i - seg.i_start] = g.coeffs[i].leading()[1]
    return out


def hensel_lift(
    g: UPoly,
    y0: HahnSeries,
    target: PrecType,
    trace: list | None = None,
    max_iter: int = 64,
) -> HahnSeries:
    """Newton iteration y <- y - g(y)/g'(y) from y0 until v(g(y)) >= target.

    Requires v(g(y0)) > 2*v(g'(y0)) with the derivative valuation known.
    The returned series is truncated to the target when that keeps the
    residual certified.
    """
    gp = g.derivative()

    def eval_pair(y: HahnSeries) -> tuple[HahnSeries, HahnSeries]:
        # one shared power ladder for g(y) and g'(y)
        pows = [from_int(g.ctx, 1)]
        for _ in range(max(g.degree, gp.degree)):
            pows.append(pows[-1] * y)
        gy_ = zero(g.ctx)
        for i, c in enumerate(g.coeffs):
            gy_ = gy_ + c * pows[i]
        gpy_ = zero(g.ctx)
        for i, c in enumerate(gp.coeffs):
            gpy_ = gpy_ + c * pows[i]
        return gy_, gpy_

    gy, gpy = eval_pair(y0)
    vgp = gpy.valuation()
    if gy.is_exact_zero():
        return y0
    if not vgp.is_known:
        raise NotHenselReady("v(g'(y0)) is not known")
    if not gy.val_lower() > 2 * vgp.gamma:
        raise NotHenselReady(
            f"v(g(y0)) = {gy.valuation()} must exceed 2*v(g'(y0)) = {2 * vgp.gamma}"
        )
    y_low = y0.val_lower()
    slack = 2 * abs(vgp.gamma) + max(0, -(y_low if y_low != INF else 0)) + 4
    work = target + slack
    y = y0
    if trace is not None:
        trace.append(gy.val_lower())
    for _ in range(max_iter):
        if gy.is_exact_zero() or gy.val_lower() >= target:
            break
        try:
            inv_gpy = gpy.inverse(work - gy.val_lower() + 2 * abs(vgp.gamma) + 2)
        except CannotInvert as exc:
            raise InsufficientPrecision(
                "derivative became zero to the working precision"
            ) from exc
        y = y - gy * inv_gpy
        # bound the support at the working precision: nothing the final
        # certificate needs lives above it; exact iterates are only cut once
        # terms actually spill past the window, so terminating exact cases
        # (linear polynomials, p-power monomials) stay exact
        if y.prec != INF or (y.support and y.support[-1][0] >= work):
            y = y.truncate(work)
        gy, gpy = eval_pair(y)
        if trace is not None:
            trace.append(gy.val_lower())
    else:
        raise InsufficientPrecision(
            f"Hensel iteration did not certify residual valuation {target}"
        )
    if not gy.is_exact_zero():
        y_t = y.truncate(target)
        if g(y_t).val_lower() >= target:
            return y_t
    return y


@dataclass(frozen=True, slots=True)
class Witness:
    value: HahnSeries
    residual: PrecType
    exact: bool


@dataclass(frozen=True, slots=True)
class BranchNode:
    partial_root: HahnSeries
    status: str | None  # None for interior nodes
    residual: PrecType | None
    note: str
    children: tuple["BranchNode", ...] = ()

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True, slots=True)
class BranchReport:
    verdict: str
    witnesses: tuple[Witness, ...]
    root: BranchNode
    exact_input: bool
    complete: bool
    target: PrecType
    budget: int


class _Search:
    def __init__(self, g: UPoly, target: PrecType, first_only: bool):
        self.g = g
        self.target = target
        self.first_only = first_only
        self.witnesses: list[Witness] = []

    def _leaf_found(self, s: HahnSeries, residual: PrecType, note: str = "") -> BranchNode:
        self.witnesses.append(Witness(s, residual, residual == INF))
        return BranchNode(s, ROOT_FOUND, residual, note)

    def expand(
        self,
        h: UPoly,
        s: HahnSeries,
        mu_prev: Fraction | None,
        depth: int,
    ) -> BranchNode:
        children: list[BranchNode] = []
        r0 = h.coeffs[0] if h.coeffs else zero(self.g.ctx)

        if r0.is_exact_zero():
            children.append(self._leaf_found(s, INF, "exact root"))
            if self.first_only:
                return BranchNode(s, None, None, "", tuple(children))
        elif r0.val_lower() >= self.target:
            return self._leaf_found(
                s, r0.val_lower(), "residual valuation reached the target"
            )

        while h.degree >= 1 and not h.coeffs[0].is_exact_zero() and h.derivative_vanishes():
            h = h.p_power_reduce()

        try:
            np_ = newton_polygon(h)
        except InsufficientPrecision as exc:
            children.append(BranchNode(s, BUDGET_EXHAUSTED, None, f"precision: {exc}"))
            return self._wrap(s, children)

        pending = [
            seg
            for seg in np_.segments
            if mu_prev is None or seg.root_valuation > mu_prev
        ]
        if not pending:
            if not children:
                return BranchNode(s, BRANCH_DEAD, None, "no admissible polygon segment")
            return self._wrap(s, children)

        if sum(seg.length for seg in pending) == 1 and not r0.is_exact_zero():
            hp0 = h.derivative()(zero(self.g.ctx))
            vhp = hp0.valuation()
            # the lifted root has valuation >= v(h(0)) - v(h'(0)); requiring
            # that to exceed mu_prev pins it to the single pending root
            if (
                vhp.is_known
                and r0.val_lower() > 2 * vhp.gamma
                and (mu_prev is None or r0.val_lower() - vhp.gamma > mu_prev)
            ):
                try:
                    y = hensel_lift(h, zero(self.g.ctx), self.target)
                    w = s + y
                    resid = self.g(w).val_lower()
                    if resid >= self.target:
                        children.append(
                            self._leaf_found(w, resid, "hensel lift")
                        )
                        return self._wrap(s, children)
                except (NotHenselReady, InsufficientPrecision, CannotInvert):
                    pass

        if depth <= 0:
            children.append(
                BranchNode(s, BUDGET_EXHAUSTED, None, "polygon budget exhausted")
            )
            return self._wrap(s, children)

        for seg in sorted(pending, key=lambda sg: sg.root_valuation, reverse=True):
            mu = seg.root_valuation
            req = residue_equation(h, seg)
            roots = poly_roots(req, self.g.ctx)
            roots = [c for c in roots if not c.is_zero()]
            if not roots:
                children.append(
                    BranchNode(
                        s,
                        BRANCH_DEAD,
                        None,
                        f"residue equation rootless at slope {seg.slope}",
                    )
                )
                continue
            for c in sorted(roots, key=lambda r: r.idx):
                step = monomial(self.g.ctx, mu, c)
                child = self.expand(h.shifted(step), s + step, mu, depth - 1)
                children.append(child)
                if self.first_only and self.witnesses:
                    return self._wrap(s, children)
        return self._wrap(s, children)

    def _wrap(self, s: HahnSeries, children: list[BranchNode]) -> BranchNode:
        if len(children) == 1 and not children[0].children:
            return children[0]
        return BranchNode(s, None, None, "", tuple(children))


def puiseux_roots(
    g: UPoly,
    target: PrecType,
    depth_budget: int = DEFAULT_BUDGET,
    first_only: bool = False,
) -> BranchReport:
    """Newton-Puiseux expansion of the roots of g to the target residual
    valuation, with a per-branch polygon budget."""
    if g.is_zero():
        raise ZeroPolynomial("cannot search for roots of the zero polynomial")
    if g.degree < 1:
        root = BranchNode(zero(g.ctx), BRANCH_DEAD, None, "constant polynomial")
        return BranchReport(
            VERDICT_NO if g.is_exact() else VERDICT_INCONCLUSIVE,
            (),
            root,
            g.is_exact(),
            True,
            target,
            depth_budget,
        )
    if not g.coeffs[-1].valuation().is_known:
        raise NotMonic(
            "leading coefficient has no known valuation; cannot normalize"
        )
    gamma, lead = g.coeffs[-1].leading()
    if gamma != 0 or not (lead == g.ctx.one):
        # normalize by the exact monomial inverse of the leading term: roots
        # are unchanged and residual targets become monic-consistent without
        # losing any precision
        g = g.scale_series(monomial(g.ctx, -gamma, lead.inverse()))
    search = _Search(g, target, first_only)
    root = search.expand(g, zero(g.ctx), None, depth_budget)
    statuses = [n.status for n in root.walk() if n.status is not None]
    # a first-witness search that stopped early has not explored its
    # siblings, so it cannot claim exhaustiveness
    complete = BUDGET_EXHAUSTED not in statuses and not (
        first_only and search.witnesses
    )
    exact_input = g.is_exact()
    if search.witnesses:
        verdict = VERDICT_YES
    elif complete and exact_input:
        verdict = VERDICT_NO
    else:
        verdict = VERDICT_INCONCLUSIVE
    return BranchReport(
        verdict,
        tuple(search.witnesses),
        root,
        exact_input,
        complete,
        target,
        depth_budget,
    )


def has_root_to_precision(
    g: UPoly, target: PrecType, budget: int = DEFAULT_BUDGET
) -> BranchReport:
    """Existence form of `puiseux_roots`: stops at the first witness."""
    return puiseux_roots(g, target, budget, first_only=True)
