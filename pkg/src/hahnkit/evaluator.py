"""Semantics: evaluate terms and positive formulas at Hahn series points.

Atoms compare to shared precision; an equation counts as true when the
difference is zero to at least the configured target precision, false when
the difference has a nonzero term, and unknown otherwise.  Conjunction and
disjunction use Kleene three-valued logic, so unknown only propagates when
it could change the verdict.

Existential quantifiers over a single variable specialize the atom to a
univariate polynomial and call the root solver.  Field-language atoms are
first cleared of formal inverses by a case split on which inverse arguments
vanish (the inv(0) = 0 convention makes the split exact).  Nested
existentials are handled by pinning strategies (solve a linear conjunct
symbolically, enumerate the roots of a univariate conjunct, or try residue
field constants); when no strategy applies the verdict degrades to unknown
rather than guessing.

Also provides the exhaustive finite-field evaluator used for truth tables
and the valuation-membership ground truths the definability formulas are
compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import (
    CannotInvert,
    HahnkitError,
    InsufficientPrecision,
    UnboundVariable,
)
from .finite_field import FqContext, FqElem
from .formulas import (
    Add,
    And,
    Const,
    Eq,
    Exists,
    FalseF,
    Formula,
    Inv,
    Mul,
    Neg,
    Or,
    Pow,
    Sub,
    Term,
    TrueF,
    Var,
    free_vars,
    subst_formula,
    term_vars,
)
from .hahn import INF, HahnSeries, from_fq, from_int, one, zero
from .solver import (
    UPoly,
    VERDICT_NO,
    VERDICT_YES,
    has_root_to_precision,
    puiseux_roots,
)

TRUE_KIND = "true"
FALSE_KIND = "false"
UNKNOWN_KIND = "unknown"


@dataclass(frozen=True)
class EvalConfig:
    prec: Fraction = Fraction(10)
    budget: int = 32
    mode: str = "ring"


@dataclass(frozen=True)
class EvalVerdict:
    kind: str
    witnesses: tuple[tuple[str, HahnSeries], ...] = ()
    reason: str | None = None

    @property
    def is_true(self) -> bool:
        return self.kind == TRUE_KIND

    @property
    def is_false(self) -> bool:
        return self.kind == FALSE_KIND

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN_KIND

    def __bool__(self) -> bool:
        if self.is_unknown:
            raise HahnkitError(f"verdict is unknown: {self.reason}")
        return self.is_true


def _true(witnesses=()) -> EvalVerdict:
    return EvalVerdict(TRUE_KIND, tuple(witnesses))


def _false() -> EvalVerdict:
    return EvalVerdict(FALSE_KIND)


def _unknown(reason: str) -> EvalVerdict:
    return EvalVerdict(UNKNOWN_KIND, (), reason)


# -- term evaluation


def eval_term(
    t: Term,
    assign: Mapping[str, HahnSeries],
    ctx: FqContext,
    cfg: EvalConfig,
) -> HahnSeries:
    if isinstance(t, Const):
        return from_int(ctx, t.value)
    if isinstance(t, Var):
        if t.name not in assign:
            raise UnboundVariable(f"variable {t.name!r} is not assigned")
        return assign[t.name]
    if isinstance(t, Neg):
        return -eval_term(t.arg, assign, ctx, cfg)
    if isinstance(t, Add):
        return eval_term(t.left, assign, ctx, cfg) + eval_term(t.right, assign, ctx, cfg)
    if isinstance(t, Sub):
        return eval_term(t.left, assign, ctx, cfg) - eval_term(t.right, assign, ctx, cfg)
    if isinstance(t, Mul):
        return eval_term(t.left, assign, ctx, cfg) * eval_term(t.right, assign, ctx, cfg)
    if isinstance(t, Pow):
        return eval_term(t.base, assign, ctx, cfg) ** t.exponent
    if isinstance(t, Inv):
        v = eval_term(t.arg, assign, ctx, cfg)
        if v.is_exact_zero():
            return zero(ctx)  # the formal-inverse convention
        if not v.support:
            raise InsufficientPrecision(
                f"inverse of a series that is zero to precision {v.prec}"
            )
        return v.inverse(cfg.prec)
    raise TypeError(f"not a term: {t!r}")


def eval_beta(
    f, y: HahnSeries, ctx: FqContext, prec: Fraction | None = None
) -> HahnSeries:
    """(f(0) - f(y)) / (f(y) f(0)), the rational map behind the ring formula."""
    from .formulas import poly_int_eval

    cap = prec if prec is not None else Fraction(10)
    fy = UPoly.from_int_poly(ctx, list(f))(y)
    f0 = from_int(ctx, poly_int_eval(list(f), 0))
    if not fy.support:
        raise CannotInvert("f(y) is zero to the available precision")
    return (f0 - fy) * (fy * f0).inverse(cap)


# -- ground truth oracles


def ground_truth_O(x: HahnSeries) -> bool:
    v = x.valuation()
    if v.kind == "infinite":
        return True
    if v.kind == "known":
        return v.gamma >= 0
    if v.gamma >= 0:
        return True
    raise InsufficientPrecision(f"only v >= {v.gamma} is known; threshold is 0")


def ground_truth_m(x: HahnSeries) -> bool:
    v = x.valuation()
    if v.kind == "infinite":
        return True
    if v.kind == "known":
        return v.gamma > 0
    if v.gamma > 0:
        return True
    raise InsufficientPrecision(f"only v >= {v.gamma} is known; threshold is 0")


# -- univariate specialization


class _NeedsCaseSplit(HahnkitError):
    pass


def term_to_upoly(
    t: Term,
    var: str,
    assign: Mapping[str, HahnSeries],
    ctx: FqContext,
    cfg: EvalConfig,
) -> UPoly:
    """Interpret a term as a polynomial in `var` with series coefficients.
    Raises _NeedsCaseSplit when `var` occurs under a formal inverse."""
    if isinstance(t, Var) and t.name == var:
        return UPoly(ctx, (zero(ctx), one(ctx)))
    if isinstance(t, (Const, Var)):
        return UPoly.make(ctx, [eval_term(t, assign, ctx, cfg)])
    if isinstance(t, Neg):
        return -term_to_upoly(t.arg, var, assign, ctx, cfg)
    if isinstance(t, Add):
        return term_to_upoly(t.left, var, assign, ctx, cfg) + term_to_upoly(
            t.right, var, assign, ctx, cfg
        )
    if isinstance(t, Sub):
        return term_to_upoly(t.left, var, assign, ctx, cfg) - term_to_upoly(
            t.right, var, assign, ctx, cfg
        )
    if isinstance(t, Mul):
        return term_to_upoly(t.left, var, assign, ctx, cfg) * term_to_upoly(
            t.right, var, assign, ctx, cfg
        )
    if isinstance(t, Pow):
        return term_to_upoly(t.base, var, assign, ctx, cfg) ** t.exponent
    if isinstance(t, Inv):
        if var in term_vars(t.arg):
            raise _NeedsCaseSplit(f"{var} occurs under a formal inverse")
        return UPoly.make(ctx, [eval_term(t, assign, ctx, cfg)])
    raise TypeError(f"not a term: {t!r}")


def _atom_diff_verdict(d: HahnSeries, cfg: EvalConfig) -> EvalVerdict:
    if d.support:
        return _false()
    if d.prec == INF or d.prec >= cfg.prec:
        return _true()
    return _unknown(f"equal only to precision {d.prec}, target {cfg.prec}")


# -- the rationalizer for field-language atoms


def _rationalize(
    t: Term,
    var: str,
    assumptions: Mapping[Term, bool],
    assign,
    ctx,
    cfg,
) -> tuple[UPoly, UPoly, list[UPoly]]:
    """Return (num, den, zero_constraints) of `t` as a rational function of
    `var`, under an assumption map {inv-subterm: is_nonzero}."""
    one_p = UPoly.make(ctx, [1])
    if isinstance(t, Inv) and var in term_vars(t.arg):
        n, d, cons = _rationalize(t.arg, var, assumptions, assign, ctx, cfg)
        if assumptions[t]:
            return d, n, cons
        return UPoly(ctx, ()), one_p, cons + [n]
    if isinstance(t, (Const, Var)) or not (var in term_vars(t)):
        return term_to_upoly(t, var, assign, ctx, cfg), one_p, []
    if isinstance(t, Neg):
        n, d, cons = _rationalize(t.arg, var, assumptions, assign, ctx, cfg)
        return -n, d, cons
    if isinstance(t, Pow):
        n, d, cons = _rationalize(t.base, var, assumptions, assign, ctx, cfg)
        return n**t.exponent, d**t.exponent, cons
    if isinstance(t, (Add, Sub, Mul)):
        n1, d1, c1 = _rationalize(t.left, var, assumptions, assign, ctx, cfg)
        n2, d2, c2 = _rationalize(t.right, var, assumptions, assign, ctx, cfg)
        if isinstance(t, Mul):
            return n1 * n2, d1 * d2, c1 + c2
        n2 = -n2 if isinstance(t, Sub) else n2
        return n1 * d2 + n2 * d1, d1 * d2, c1 + c2
    raise TypeError(f"not a term: {t!r}")


def _inv_subterms(t: Term, var: str, acc: list[Term]) -> None:
    if isinstance(t, Inv):
        if var in term_vars(t.arg) and t not in acc:
            acc.append(t)
        _inv_subterms(t.arg, var, acc)
    elif isinstance(t, (Neg,)):
        _inv_subterms(t.arg, var, acc)
    elif isinstance(t, Pow):
        _inv_subterms(t.base, var, acc)
    elif isinstance(t, (Add, Sub, Mul)):
        _inv_subterms(t.left, var, acc)
        _inv_subterms(t.right, var, acc)


class Evaluator:
    def __init__(self, ctx: FqContext, cfg: EvalConfig | None = None):
        self.ctx = ctx
        self.cfg = cfg or EvalConfig()

    # public entry points

    def term(self, t: Term, assign: Mapping[str, HahnSeries]) -> HahnSeries:
        return eval_term(t, assign, self.ctx, self.cfg)

    def formula(self, phi: Formula, assign: Mapping[str, HahnSeries]) -> EvalVerdict:
        if isinstance(phi, TrueF):
            return _true()
        if isinstance(phi, FalseF):
            return _false()
        if isinstance(phi, Eq):
            return self._atom(phi, assign)
        if isinstance(phi, And):
            left = self.formula(phi.left, assign)
            if left.is_false:
                return left
            right = self.formula(phi.right, assign)
            if right.is_false:
                return right
            if left.is_unknown or right.is_unknown:
                return left if left.is_unknown else right
            return _true(left.witnesses + right.witnesses)
        if isinstance(phi, Or):
            left = self.formula(phi.left, assign)
            if left.is_true:
                return left
            right = self.formula(phi.right, assign)
            if right.is_true:
                return right
            if left.is_unknown or right.is_unknown:
                return left if left.is_unknown else right
            return _false()
        if isinstance(phi, Exists):
            binders = []
            body = phi
            while isinstance(body, Exists):
                binders.append(body.var)
                body = body.body
            return self._exists(binders, body, assign)
        raise TypeError(f"not a formula: {phi!r}")

    # internals

    def _atom(self, eq: Eq, assign) -> EvalVerdict:
        try:
            l = self.term(eq.lhs, assign)
            r = self.term(eq.rhs, assign)
        except InsufficientPrecision as exc:
            return _unknown(str(exc))
        return _atom_diff_verdict(l - r, self.cfg)

    def _exists(self, binders: list[str], body: Formula, assign) -> EvalVerdict:
        if isinstance(body, Or):
            left = self._exists(binders, body.left, assign)
            if left.is_true:
                return left
            right = self._exists(binders, body.right, assign)
            if right.is_true:
                return right
            if left.is_unknown or right.is_unknown:
                return left if left.is_unknown else right
            return _false()

        if not binders:
            return self.formula(body, assign)

        if len(binders) == 1 and isinstance(body, Eq):
            return self._solve_single(binders[0], body, assign)

        conjuncts = _conjuncts(body)

        pinned = self._try_linear_pin(binders, conjuncts, assign)
        if pinned is not None:
            return pinned

        enumerated = self._try_enumerate_pin(binders, conjuncts, assign)
        if enumerated is not None:
            return enumerated

        if len(binders) <= 2:
            return self._trial_pins(binders, body, assign)
        return _unknown("no strategy for this multi-variable existential")

    def _solve_single(self, var: str, eq: Eq, assign) -> EvalVerdict:
        diff = Sub(eq.lhs, eq.rhs)
        try:
            g = term_to_upoly(diff, var, assign, self.ctx, self.cfg)
        except _NeedsCaseSplit:
            return self._solve_single_field(var, eq, assign)
        except InsufficientPrecision as exc:
            return _unknown(str(exc))
        if g.is_zero():
            return _true([(var, zero(self.ctx))])
        if g.degree == 0:
            v = _atom_diff_verdict(g.coeffs[0], self.cfg)
            return _true([(var, zero(self.ctx))]) if v.is_true else v
        rep = has_root_to_precision(g, self.cfg.prec, self.cfg.budget)
        if rep.verdict == VERDICT_YES:
            return _true([(var, rep.witnesses[0].value)])
        if rep.verdict == VERDICT_NO:
            return _false()
        return _unknown("root search was inconclusive (budget or precision)")

    def _solve_single_field(self, var: str, eq: Eq, assign) -> EvalVerdict:
        """Case split over which inverse arguments vanish; candidates are
        gathered from the cleared numerators and verified against the
        original atom under the exact inv(0)=0 semantics."""
        diff = Sub(eq.lhs, eq.rhs)
        nodes: list[Term] = []
        _inv_subterms(diff, var, nodes)
        candidates: list[HahnSeries] = [zero(self.ctx)]
        for c in self.ctx.elements():
            candidates.append(from_fq(c))
        covered = True
        for mask in range(1 << len(nodes)):
            assumptions = {
                node: bool(mask & (1 << i)) for i, node in enumerate(nodes)
            }
            try:
                num, _den, constraints = _rationalize(
                    diff, var, assumptions, assign, self.ctx, self.cfg
                )
            except InsufficientPrecision:
                covered = False
                continue
            equations = [num] + constraints
            solvable = [g for g in equations if not g.is_zero() and g.degree >= 1]
            has_false_eq = any(
                g.degree == 0 and g.coeffs[0].support for g in equations
            )
            if has_false_eq:
                continue  # this case is unsatisfiable
            if not solvable:
                covered = False  # equations vanish identically; rely on trials
                continue
            rep = puiseux_roots(solvable[0], self.cfg.prec, self.cfg.budget)
            if rep.verdict == VERDICT_NO:
                continue
            if rep.verdict != VERDICT_YES or not rep.complete:
                covered = False
            for w in rep.witnesses:
                if not w.exact:
                    covered = False
                candidates.append(w.value)
        saw_unknown = False
        for cand in candidates:
            verdict = self._atom(eq, {**assign, var: cand})
            if verdict.is_true:
                return _true([(var, cand)])
            if verdict.is_unknown:
                saw_unknown = True
        if covered and not saw_unknown:
            return _false()
        return _unknown("formal-inverse case split not exhaustive at this precision")

    def _try_linear_pin(self, binders, conjuncts, assign) -> EvalVerdict | None:
        for i, conj in enumerate(conjuncts):
            if not isinstance(conj, Eq):
                continue
            for var in binders:
                sol = _solve_linear(conj, var)
                if sol is None:
                    continue
                rest = [
                    subst_formula(c, {var: sol}) for j, c in enumerate(conjuncts)
                ]
                body = _conjoin(rest)
                inner = self._exists([b for b in binders if b != var], body, assign)
                if inner.is_true:
                    try:
                        value = self.term(sol, {**assign, **dict(inner.witnesses)})
                        return _true(inner.witnesses + ((var, value),))
                    except HahnkitError:
                        return _true(inner.witnesses)
                return inner
        return None

    def _try_enumerate_pin(self, binders, conjuncts, assign) -> EvalVerdict | None:
        bset = set(binders)
        for i, conj in enumerate(conjuncts):
            if not isinstance(conj, Eq):
                continue
            used = free_vars(conj) & bset
            if len(used) != 1:
                continue
            var = next(iter(used))
            try:
                g = term_to_upoly(
                    Sub(conj.lhs, conj.rhs), var, assign, self.ctx, self.cfg
                )
            except (_NeedsCaseSplit, InsufficientPrecision):
                continue
            if g.is_zero() or g.degree < 1:
                continue
            rep = puiseux_roots(g, self.cfg.prec, self.cfg.budget)
            if rep.verdict == VERDICT_NO:
                return _false()
            if rep.verdict != VERDICT_YES:
                continue
            exhaustive = rep.complete and all(w.exact for w in rep.witnesses)
            saw_unknown = False
            for w in rep.witnesses:
                rest = _conjoin([c for j, c in enumerate(conjuncts) if j != i])
                inner = self._exists(
                    [b for b in binders if b != var],
                    rest,
                    {**assign, var: w.value},
                )
                if inner.is_true:
                    return _true(inner.witnesses + ((var, w.value),))
                if inner.is_unknown:
                    saw_unknown = True
            if exhaustive and not saw_unknown:
                return _false()
            return _unknown("enumeration of a pinned variable was not exhaustive")
        return None

    def _trial_pins(self, binders, body, assign) -> EvalVerdict:
        var = binders[-1]
        for c in self.ctx.elements():
            inner = self._exists(
                [b for b in binders if b != var],
                body,
                {**assign, var: from_fq(c)},
            )
            if inner.is_true:
                return _true(inner.witnesses + ((var, from_fq(c)),))
        return _unknown(
            "multi-variable existential: residue-constant trials found no witness"
        )


def _conjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        return _conjuncts(phi.left) + _conjuncts(phi.right)
    return [phi]


def _conjoin(parts: list[Formula]) -> Formula:
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _mk_add(a: Term, b: Term) -> Term:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a == Const(0):
        return b
    if b == Const(0):
        return a
    return Add(a, b)


def _mk_sub(a: Term, b: Term) -> Term:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if b == Const(0):
        return a
    return Sub(a, b)


def _mk_mul(a: Term, b: Term) -> Term:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a == Const(0) or b == Const(0):
        return Const(0)
    if a == Const(1):
        return b
    if b == Const(1):
        return a
    return Mul(a, b)


def _mk_neg(a: Term) -> Term:
    return Const(-a.value) if isinstance(a, Const) else Neg(a)


def _symbolic_poly(t: Term, var: str) -> list[Term] | None:
    """Coefficients of `t` as a polynomial in `var`, with Term coefficients
    (constant-folded so that unit leading coefficients are recognizable)."""
    if isinstance(t, Var) and t.name == var:
        return [Const(0), Const(1)]
    if isinstance(t, (Const, Var)):
        return [t]
    if isinstance(t, Inv):
        return None if var in term_vars(t.arg) else [t]
    if isinstance(t, Neg):
        inner = _symbolic_poly(t.arg, var)
        return None if inner is None else [_mk_neg(c) for c in inner]
    if isinstance(t, (Add, Sub)):
        a = _symbolic_poly(t.left, var)
        b = _symbolic_poly(t.right, var)
        if a is None or b is None:
            return None
        mk = _mk_add if isinstance(t, Add) else _mk_sub
        out: list[Term] = []
        for i in range(max(len(a), len(b))):
            ca = a[i] if i < len(a) else Const(0)
            cb = b[i] if i < len(b) else Const(0)
            out.append(mk(ca, cb))
        return out
    if isinstance(t, Mul):
        a = _symbolic_poly(t.left, var)
        b = _symbolic_poly(t.right, var)
        if a is None or b is None:
            return None
        out = [Const(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] = _mk_add(out[i + j], _mk_mul(ca, cb))
        return out
    if isinstance(t, Pow):
        base = _symbolic_poly(t.base, var)
        if base is None:
            return None
        acc: list[Term] = [Const(1)]
        for _ in range(t.exponent):
            new = [Const(0)] * (len(acc) + len(base) - 1)
            for i, ca in enumerate(acc):
                for j, cb in enumerate(base):
                    new[i + j] = _mk_add(new[i + j], _mk_mul(ca, cb))
            acc = new
        return acc
    return None


def _is_syntactic_zero(t: Term) -> bool:
    return t == Const(0) or (isinstance(t, Neg) and _is_syntactic_zero(t.arg))


def _solve_linear(eq: Eq, var: str) -> Term | None:
    """When eq is linear in var with coefficient +-1, return the solution."""
    coeffs = _symbolic_poly(Sub(eq.lhs, eq.rhs), var)
    if coeffs is None:
        return None
    while coeffs and coeffs[-1] == Const(0):
        coeffs.pop()
    if len(coeffs) != 2:
        return None
    c0, c1 = coeffs
    if c1 == Const(1):
        return Neg(c0)
    if c1 == Neg(Const(1)) or c1 == Const(-1):
        return c0
    return None


# -- exhaustive evaluation over the residue field (truth-table oracle)


def eval_term_fq(t: Term, assign: Mapping[str, FqElem], ctx: FqContext) -> FqElem:
    if isinstance(t, Const):
        return ctx.from_int(t.value)
    if isinstance(t, Var):
        if t.name not in assign:
            raise UnboundVariable(f"variable {t.name!r} is not assigned")
        return assign[t.name]
    if isinstance(t, Neg):
        return -eval_term_fq(t.arg, assign, ctx)
    if isinstance(t, Add):
        return eval_term_fq(t.left, assign, ctx) + eval_term_fq(t.right, assign, ctx)
    if isinstance(t, Sub):
        return eval_term_fq(t.left, assign, ctx) - eval_term_fq(t.right, assign, ctx)
    if isinstance(t, Mul):
        return eval_term_fq(t.left, assign, ctx) * eval_term_fq(t.right, assign, ctx)
    if isinstance(t, Pow):
        return eval_term_fq(t.base, assign, ctx) ** t.exponent
    if isinstance(t, Inv):
        v = eval_term_fq(t.arg, assign, ctx)
        return v if v.is_zero() else v.inverse()
    raise TypeError(f"not a term: {t!r}")


def eval_formula_fq(phi: Formula, assign: Mapping[str, FqElem], ctx: FqContext) -> bool:
    if isinstance(phi, TrueF):
        return True
    if isinstance(phi, FalseF):
        return False
    if isinstance(phi, Eq):
        return eval_term_fq(phi.lhs, assign, ctx) == eval_term_fq(phi.rhs, assign, ctx)
    if isinstance(phi, And):
        return eval_formula_fq(phi.left, assign, ctx) and eval_formula_fq(
            phi.right, assign, ctx
        )
    if isinstance(phi, Or):
        return eval_formula_fq(phi.left, assign, ctx) or eval_formula_fq(
            phi.right, assign, ctx
        )
    if isinstance(phi, Exists):
        return any(
            eval_formula_fq(phi.body, {**assign, phi.var: c}, ctx)
            for c in ctx.elements()
        )
    raise TypeError(f"not a formula: {phi!r}")
