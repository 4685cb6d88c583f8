import random
from fractions import Fraction

import pytest

from hahnkit.errors import InsufficientPrecision, NotHenselReady, ZeroPolynomial
from hahnkit.finite_field import FqContext
from hahnkit.hahn import INF, from_int, monomial, one, series, zero
from hahnkit.solver import (
    BRANCH_DEAD,
    BUDGET_EXHAUSTED,
    ROOT_FOUND,
    UPoly,
    VERDICT_INCONCLUSIVE,
    VERDICT_NO,
    VERDICT_YES,
    hensel_lift,
    has_root_to_precision,
    newton_polygon,
    puiseux_roots,
)

F2 = FqContext(2)
F3 = FqContext(3)
F5 = FqContext(5)

QS = [2, 3, 4, 5, 8, 9]


def artin_schreier_poly(ctx, q=None, shift=0):
    """Y^q - Y - shift as a UPoly."""
    q = q or ctx.q
    coeffs = [from_int(ctx, -shift), from_int(ctx, -1)] + [zero(ctx)] * (q - 2)
    coeffs.append(one(ctx))
    return UPoly.make(ctx, coeffs)


# -- Newton polygon


def test_polygon_anchor_y2_minus_t():
    g = UPoly.make(F2, [monomial(F2, 1, F2.from_int(-1)), 0, 1])
    np_ = newton_polygon(g)
    assert np_.vertices == ((0, Fraction(1)), (2, Fraction(0)))
    assert len(np_.segments) == 1
    seg = np_.segments[0]
    assert seg.root_valuation == Fraction(1, 2)
    assert seg.length == 2


def test_polygon_artin_schreier_reconciled_by_brute_force():
    # Y^2 - Y - t^(-1) over F_2: the point (1, 0) lies strictly above the
    # chord from (0, -1) to (2, 0), so the lower hull is a single segment
    # and both candidate roots have valuation -1/2.
    g = UPoly.make(F2, [monomial(F2, -1), one(F2), one(F2)])
    np_ = newton_polygon(g)
    assert np_.vertices == ((0, Fraction(-1)), (2, Fraction(0)))
    assert [s.root_valuation for s in np_.segments] == [Fraction(-1, 2)]
    assert np_.segments[0].length == 2
    # brute-force reconciliation: the truncated sum of t^(-1/2^n) really is
    # an approximate root, and its valuation really is -1/2
    s = series(F2, [(Fraction(-1, 2**n), F2.one) for n in range(1, 7)])
    assert s.valuation().gamma == Fraction(-1, 2)
    assert g(s).val_lower() == Fraction(-1, 2**6)


def test_polygon_degenerate_zero_constant_term():
    # Y*(Y-1): points (1,0) and (2,0) only; the zero root is handled by the
    # solver as an exact root, the polygon covers the unit root
    g = UPoly.make(F2, [0, 1, 1])
    np_ = newton_polygon(g)
    assert np_.vertices == ((1, Fraction(0)), (2, Fraction(0)))
    assert [s.root_valuation for s in np_.segments] == [Fraction(0)]


def test_polygon_insufficient_precision():
    from hahnkit.hahn import big_o

    g = UPoly.make(F2, [big_o(F2, 0), 0, 1])  # O(t^0) constant term
    with pytest.raises(InsufficientPrecision):
        newton_polygon(g)


def test_polygon_zero_polynomial():
    with pytest.raises(ZeroPolynomial):
        newton_polygon(UPoly.make(F2, []))


# -- Hensel lifting


def test_hensel_square_root_of_1_plus_t_over_f3():
    g = UPoly.make(F3, [series(F3, [(0, F3.from_int(-1)), (1, F3.from_int(-1))]), 0, 1])
    y = hensel_lift(g, one(F3), Fraction(3))
    # oracle: square the result and check the residual valuation
    assert (y * y - series(F3, [(0, F3.one), (1, F3.one)])).val_lower() >= 3
    assert y.coeff(Fraction(0)) == F3.one
    assert y.coeff(Fraction(1)) == F3.from_int(2)
    assert y.coeff(Fraction(2)) == F3.one


def test_hensel_paper_auxiliary_polynomial_q3():
    # f(Y) = AS(w+Y) - u - inv(-inv(u) + x) with u=1, w=0, x=t over F_3:
    # f(0) is in the valuation ideal and f'(0) = -1, so a root in the ideal
    # exists; check by back-substitution.
    u = from_int(F3, 1)
    x = monomial(F3, 1)
    c = (u.scale(F3.from_int(-1)) + x).inverse(Fraction(12))
    g = artin_schreier_poly(F3) + UPoly.make(F3, [(-u - c)])
    assert g.coeffs[0].val_lower() > 0
    y = hensel_lift(g, zero(F3), Fraction(5))
    assert y.val_lower() > 0
    assert g(y).val_lower() >= 5


def test_hensel_linear_polynomial_returns_exact_root():
    g = UPoly.make(F2, [monomial(F2, 1, F2.from_int(-1)), 1])  # Y - t
    y = hensel_lift(g, zero(F2), Fraction(100))
    assert y == monomial(F2, 1)
    assert y.is_exact()


def test_hensel_rejects_bad_precondition():
    # v(g(0)) = 0 is not > 2*v(g'(0)) = 0
    g = UPoly.make(F3, [1, 1])
    with pytest.raises(NotHenselReady):
        hensel_lift(g, zero(F3), Fraction(5))


def test_hensel_residual_at_least_doubles():
    rng = random.Random(23)
    count = 0
    while count < 100:
        ctx = FqContext(rng.choice(QS))
        # plant g = (Y - a) * m(Y) with v(a) > 0 and m(0) a unit
        a = series(
            ctx,
            [
                (Fraction(rng.randint(1, 4), rng.choice([1, 2, ctx.p])), ctx.el(rng.randrange(1, ctx.q)))
                for _ in range(rng.randint(1, 2))
            ],
        )
        if a.is_exact_zero():
            continue
        m = UPoly.make(ctx, [ctx.el(rng.randrange(1, ctx.q)), ctx.el(rng.randrange(ctx.q))])
        g = UPoly.make(ctx, [-a, 1]) * m
        trace: list = []
        hensel_lift(g, zero(ctx), Fraction(10), trace=trace)
        vgp = g.derivative()(zero(ctx)).valuation().gamma
        for before, after in zip(trace, trace[1:]):
            if before == INF or after == INF:
                continue
            # doubling holds until the target is certified
            assert after >= min(2 * before - 2 * vgp, Fraction(10))
        count += 1


# -- Puiseux expansion and verdicts


def test_puiseux_y2_minus_t_exact_witness():
    g = UPoly.make(F2, [monomial(F2, 1, F2.from_int(-1)), 0, 1])
    rep = puiseux_roots(g, Fraction(5))
    assert rep.verdict == VERDICT_YES
    assert any(w.exact and w.value == monomial(F2, Fraction(1, 2)) for w in rep.witnesses)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_puiseux_artin_schreier_laurent_witness(p):
    ctx = FqContext(p)
    g = artin_schreier_poly(ctx) + UPoly.make(ctx, [monomial(ctx, -1, ctx.from_int(-1))])
    target = Fraction(-1, p**4)
    rep = puiseux_roots(g, target, depth_budget=8, first_only=True)
    assert rep.verdict == VERDICT_YES
    w = rep.witnesses[0]
    # oracle: the truncated sum of t^(-1/p^n) back-substitutes to residual
    # valuation exactly -1/p^4
    s = series(ctx, [(Fraction(-1, p**n), ctx.one) for n in range(1, 5)])
    assert g(s).val_lower() == target
    assert w.residual >= target
    assert g(w.value).val_lower() >= target


def test_puiseux_no_by_rootless_residue_equation():
    g = UPoly.make(F2, [1, 1, 1])  # Y^2 + Y + 1 over F_2
    rep = puiseux_roots(g, Fraction(5))
    assert rep.verdict == VERDICT_NO
    # cross-validate: X^2 + X + 1 really has no root in F_2
    from hahnkit.finite_field import poly_from_ints, poly_roots

    assert poly_roots(poly_from_ints([1, 1, 1], F2), F2) == []
    statuses = {n.status for n in rep.root.walk() if n.status}
    assert statuses == {BRANCH_DEAD}


@pytest.mark.parametrize("q", QS)
def test_has_root_artin_schreier_minus_one_is_no(q):
    ctx = FqContext(q)
    rep = has_root_to_precision(artin_schreier_poly(ctx, shift=1), Fraction(10))
    assert rep.verdict == VERDICT_NO


def test_has_root_hensel_case_yes():
    g = UPoly.make(F3, [series(F3, [(0, F3.from_int(-1)), (1, F3.from_int(-1))]), 0, 1])
    rep = has_root_to_precision(g, Fraction(3))
    assert rep.verdict == VERDICT_YES
    w = rep.witnesses[0]
    assert g(w.value).val_lower() >= 3


def test_budget_zero_inconclusive():
    g = UPoly.make(F2, [monomial(F2, 1), 1, 1])  # Y^2 + Y + t, needs recursion
    rep = puiseux_roots(g, Fraction(5), depth_budget=0)
    assert rep.verdict == VERDICT_INCONCLUSIVE
    assert any(n.status == BUDGET_EXHAUSTED for n in rep.root.walk())
    # raising the budget resolves it without flipping any definite verdict
    rep2 = puiseux_roots(g, Fraction(5), depth_budget=8)
    assert rep2.verdict == VERDICT_YES


def test_zero_and_constant_polynomials():
    with pytest.raises(ZeroPolynomial):
        puiseux_roots(UPoly.make(F2, []), Fraction(5))
    rep = puiseux_roots(UPoly.make(F2, [1]), Fraction(5))
    assert rep.verdict == VERDICT_NO


def test_p_power_reduction_quartic():
    # Y^4 - t = ((Y^2 - t^(1/2)))^2 over F_2; root t^(1/4)
    g = UPoly.make(F2, [monomial(F2, 1, F2.from_int(-1)), 0, 0, 0, 1])
    rep = puiseux_roots(g, Fraction(6))
    assert rep.verdict == VERDICT_YES
    assert any(w.value == monomial(F2, Fraction(1, 4)) and w.exact for w in rep.witnesses)


def test_p_power_reduction_matches_planted_roots():
    rng = random.Random(29)
    for _ in range(20):
        ctx = FqContext(rng.choice([2, 3]))
        r = series(
            ctx,
            [(Fraction(rng.randint(-2, 3), rng.choice([1, 2])), ctx.el(rng.randrange(1, ctx.q)))],
        )
        g1 = UPoly.make(ctx, [-r, 1])
        g = g1**ctx.p
        assert g.derivative_vanishes()
        rep = puiseux_roots(g, Fraction(10))
        assert rep.verdict == VERDICT_YES
        assert any(g1(w.value).val_lower() >= 10 for w in rep.witnesses)


def rand_planted_root(ctx, rng):
    terms = []
    for _ in range(rng.randint(0, 3)):
        e = Fraction(rng.randint(-3, 3), rng.choice([1, 2, ctx.p]))
        terms.append((e, ctx.el(rng.randrange(1, ctx.q))))
    return series(ctx, terms)


def test_round_trip_recovers_planted_roots():
    rng = random.Random(31)
    trips = 0
    while trips < 60:
        ctx = FqContext(rng.choice(QS))
        roots = [rand_planted_root(ctx, rng) for _ in range(rng.randint(1, 3))]
        g = UPoly.make(ctx, [1])
        for r in roots:
            g = g * UPoly.make(ctx, [-r, 1])
        rep = puiseux_roots(g, Fraction(10), depth_budget=48)
        assert rep.verdict == VERDICT_YES
        for r in roots:
            assert any(
                (w.value - r).support == () or (w.value - r).val_lower() >= 10
                for w in rep.witnesses
            ), f"root {r} not recovered among {[str(w.value) for w in rep.witnesses]}"
        trips += 1


def test_witness_soundness_is_checked_inside():
    # every Yes witness back-substitutes to residual valuation >= target
    rng = random.Random(37)
    for _ in range(40):
        ctx = FqContext(rng.choice(QS))
        roots = [rand_planted_root(ctx, rng) for _ in range(rng.randint(1, 2))]
        g = UPoly.make(ctx, [1])
        for r in roots:
            g = g * UPoly.make(ctx, [-r, 1])
        rep = puiseux_roots(g, Fraction(10), depth_budget=48)
        for w in rep.witnesses:
            assert g(w.value).val_lower() >= 10


def no_verdict_desk_oracle(g, ctx, target):
    """Exhaustive search over truncations supported on the half-integer grid
    [-3, 3]: no candidate may have residual valuation >= target."""
    grid = [Fraction(n, 2) for n in range(-6, 7)]
    candidates = [zero(ctx)]
    for e in grid:
        for c in range(1, ctx.q):
            candidates.append(monomial(ctx, e, ctx.el(c)))
    for e1 in grid:
        for e2 in grid:
            if e1 >= e2:
                continue
            for c1 in range(1, ctx.q):
                for c2 in range(1, ctx.q):
                    candidates.append(
                        series(ctx, [(e1, ctx.el(c1)), (e2, ctx.el(c2))])
                    )
    return all(g(c).val_lower() < target for c in candidates)


def test_no_verdicts_agree_with_desk_oracle():
    rng = random.Random(41)
    found_no = 0
    attempts = 0
    while found_no < 12 and attempts < 400:
        attempts += 1
        ctx = FqContext(rng.choice([2, 3]))
        coeffs = []
        for _ in range(rng.randint(1, 3)):
            terms = [
                (Fraction(rng.randint(-3, 3), rng.choice([1, 2])), ctx.el(rng.randrange(1, ctx.q)))
                for _ in range(rng.randint(0, 2))
            ]
            coeffs.append(series(ctx, terms))
        coeffs.append(one(ctx))
        g = UPoly.make(ctx, coeffs)
        rep = puiseux_roots(g, Fraction(2), depth_budget=24)
        if rep.verdict != VERDICT_NO:
            continue
        assert no_verdict_desk_oracle(g, ctx, Fraction(2))
        found_no += 1
    assert found_no >= 5


def test_budget_monotonicity_never_flips_definite_verdicts():
    rng = random.Random(43)
    for _ in range(25):
        ctx = FqContext(rng.choice([2, 3, 4]))
        coeffs = [rand_planted_root(ctx, rng) for _ in range(rng.randint(1, 2))] + [one(ctx)]
        g = UPoly.make(ctx, coeffs)
        low = puiseux_roots(g, Fraction(6), depth_budget=2)
        high = puiseux_roots(g, Fraction(6), depth_budget=24)
        if low.verdict in (VERDICT_YES, VERDICT_NO):
            assert high.verdict == low.verdict


def test_no_downgrades_to_inconclusive_on_inexact_input():
    # all branches die, but a coefficient is only known to finite precision
    from hahnkit.hahn import big_o

    c0 = one(F2) + big_o(F2, 5)
    g = UPoly.make(F2, [c0, one(F2), one(F2)])
    rep = puiseux_roots(g, Fraction(3))
    assert rep.verdict == VERDICT_INCONCLUSIVE
    assert not rep.exact_input
