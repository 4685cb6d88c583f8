"""AST and constructors for the existential-positive formula fragments.

Terms are ring terms (integer constants, variables, +, -, *, nonnegative
powers) plus an optional formal-inverse node for the field language, where
inv(0) = 0 by convention.  Formulas are positive: equations, conjunction,
disjunction, single-variable existentials, and the constants true/false.

The constructors build the explicit definability formulas for the valuation
ring and ideal of henselian valued fields with residue field F_q, plus the
Kochen-style operators and the quantifier-collapse maps that turn positive
combinations of one-existential formulas back into a single existential.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import BadUnit, InvalidF, NotMonic, ShapeError
from .finite_field import FqContext, factor_prime_power, validate_f


# -- terms


@dataclass(frozen=True, slots=True)
class Term:
    pass


@dataclass(frozen=True, slots=True)
class Const(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Sub(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Neg(Term):
    arg: Term


@dataclass(frozen=True, slots=True)
class Pow(Term):
    base: Term
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("powers in ring terms are nonnegative")


@dataclass(frozen=True, slots=True)
class Inv(Term):
    arg: Term


# -- formulas


@dataclass(frozen=True, slots=True)
class Formula:
    pass


@dataclass(frozen=True, slots=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True, slots=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


TRUE = TrueF()
FALSE = FalseF()


def int_term(n: int) -> Term:
    return Neg(Const(-n)) if n < 0 else Const(n)


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    if isinstance(t, (Neg, Inv)):
        return term_vars(t.arg)
    if isinstance(t, Pow):
        return term_vars(t.base)
    return term_vars(t.left) | term_vars(t.right)


def term_has_inv(t: Term) -> bool:
    if isinstance(t, Inv):
        return True
    if isinstance(t, (Const, Var)):
        return False
    if isinstance(t, Neg):
        return term_has_inv(t.arg)
    if isinstance(t, Pow):
        return term_has_inv(t.base)
    return term_has_inv(t.left) or term_has_inv(t.right)


def free_vars(phi: Formula) -> set[str]:
    if isinstance(phi, (TrueF, FalseF)):
        return set()
    if isinstance(phi, Eq):
        return term_vars(phi.lhs) | term_vars(phi.rhs)
    if isinstance(phi, (And, Or)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Exists):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def subst_term(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, Neg):
        return Neg(subst_term(t.arg, mapping))
    if isinstance(t, Inv):
        return Inv(subst_term(t.arg, mapping))
    if isinstance(t, Pow):
        return Pow(subst_term(t.base, mapping), t.exponent)
    return type(t)(subst_term(t.left, mapping), subst_term(t.right, mapping))


def subst_formula(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Capture-naive substitution; callers rename bound variables apart first."""
    if isinstance(phi, (TrueF, FalseF)):
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.lhs, mapping), subst_term(phi.rhs, mapping))
    if isinstance(phi, (And, Or)):
        return type(phi)(
            subst_formula(phi.left, mapping), subst_formula(phi.right, mapping)
        )
    if isinstance(phi, Exists):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        return Exists(phi.var, subst_formula(phi.body, inner))
    raise TypeError(f"not a formula: {phi!r}")


# -- shape predicates


def is_eplus(phi: Formula) -> bool:
    """Exactly one existential at the root over one atomic equation."""
    return isinstance(phi, Exists) and isinstance(phi.body, Eq)


def is_feplus(phi: Formula) -> bool:
    """Positive boolean combination of one-existential formulas and atoms."""
    if isinstance(phi, (TrueF, FalseF, Eq)):
        return True
    if is_eplus(phi):
        return True
    if isinstance(phi, (And, Or)):
        return is_feplus(phi.left) and is_feplus(phi.right)
    return False


# -- term builders


def poly_term(coeffs: Sequence[int], x: Term) -> Term:
    """sum(c_i * x^i) rendered highest degree first, Horner-free."""
    parts: list[tuple[int, int]] = [
        (i, c) for i, c in enumerate(coeffs) if c != 0
    ]
    if not parts:
        return Const(0)
    acc: Term | None = None
    for i, c in reversed(parts):
        if i == 0:
            piece = int_term(c)
        else:
            base = x if i == 1 else Pow(x, i)
            piece = base if c == 1 else Mul(int_term(abs(c)), base)
            if c < 0:
                piece = Neg(piece) if c != -1 else Neg(base)
        if acc is None:
            acc = piece
        elif c < 0 and i != 0:
            acc = Sub(acc, piece.arg if isinstance(piece, Neg) else piece)
        elif isinstance(piece, Neg):
            acc = Sub(acc, piece.arg)
        else:
            acc = Add(acc, piece)
    return acc


def artin_schreier_term(x: Term, q: int) -> Term:
    return Sub(Pow(x, q), x)


def pow_term(base: Term, n: int) -> Term:
    if n == 0:
        return Const(1)
    return base if n == 1 else Pow(base, n)


def poly_int_eval(coeffs: Sequence[int], a: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = acc * a + c
    return acc


def default_f(q: int) -> list[int]:
    """X^q - X - 1: monic, residue rootless over F_q, derivative -1 at 0."""
    return [-1, -1] + [0] * (q - 2) + [1]


def _require_valid_f(f: Sequence[int], q: int) -> None:
    ctx = FqContext(q)
    try:
        ok = validate_f(f, ctx)
    except NotMonic as exc:
        raise InvalidF(str(exc)) from exc
    if not ok:
        raise InvalidF(
            f"f = {list(f)} must be residue-rootless over F_{q} with f'(0) != 0"
        )


# -- definability formula constructors


def mk_phi(f: Sequence[int], a: int = 0, two_witness: bool = False) -> Formula:
    """The inverse-difference set formulas: with one point parameter,
    exists y: f(y)*f(a)*x = f(a) - f(y); in the two-witness variant,
    exists y, z: f(y)*f(z)*x = f(z) - f(y)."""
    if len(f) < 2 or f[-1] != 1:
        raise NotMonic("f must be monic of degree >= 1")
    fy = poly_term(f, Var("y"))
    x = Var("x")
    if two_witness:
        fz = poly_term(f, Var("z"))
        atom = Eq(Mul(Mul(fy, fz), x), Sub(fz, fy))
        return Exists("y", Exists("z", atom))
    fa = int_term(poly_int_eval(f, a))
    return Exists("y", Eq(Mul(Mul(fy, fa), x), Sub(fa, fy)))


def mk_zeta(q: int, f: Sequence[int] | None = None) -> Formula:
    """Defines the valuation ring: the point formula precomposed with the
    Artin-Schreier polynomial of x."""
    if f is None:
        f = default_f(q)
    _require_valid_f(f, q)
    phi = mk_phi(f, 0)
    return subst_formula(phi, {"x": artin_schreier_term(Var("x"), q)})


def mk_epsilon(q: int, f: Sequence[int] | None = None) -> Formula:
    """Defines the valuation ideal: x is an Artin-Schreier value of the
    rational function (f(0)-f(y))/(f(y)f(0)), with denominators cleared:

        (f(y)f(0))^q * x = (f(0)-f(y))^q - (f(0)-f(y))*(f(y)f(0))^(q-1)
    """
    if f is None:
        f = default_f(q)
    _require_valid_f(f, q)
    fy = poly_term(f, Var("y"))
    f0 = int_term(poly_int_eval(f, 0))
    prod = Mul(fy, f0)
    diff = Sub(f0, fy)
    lhs = Mul(Pow(prod, q), Var("x"))
    rhs = Sub(Pow(diff, q), Mul(diff, pow_term(prod, q - 1)))
    return Exists("y", Eq(lhs, rhs))


def mk_eta(q: int, f: Sequence[int] | None = None) -> Formula:
    """The two-binder comparison formula:
    exists r, s: (x = r + s  and  phi_f(r)  and  s^q - s = 0)."""
    if f is None:
        f = default_f(q)
    _require_valid_f(f, q)
    phi_f = mk_phi(f, two_witness=True)
    part1 = Eq(Var("x"), Add(Var("r"), Var("s")))
    part2 = subst_formula(phi_f, {"x": Var("r")})
    part3 = Eq(artin_schreier_term(Var("s"), q), Const(0))
    return Exists("r", Exists("s", And(And(part1, part2), part3)))


def mk_alpha(q: int, u: int, var: str = "y") -> Term:
    """The reciprocal operator inv(AS_q(y) - u), as a field-language term."""
    p, _ = factor_prime_power(q)
    if u % p == 0:
        raise BadUnit(f"u = {u} is divisible by the characteristic {p}")
    asy = artin_schreier_term(Var(var), q)
    inner = Sub(asy, Const(u)) if u > 0 else Add(asy, Const(-u))
    return Inv(inner)


def mk_kochen(q: int, u: int = 1) -> Formula:
    """exists y: x = inv(AS(y)-u) + inv(AS(y)+u), defining the valuation
    ideal for odd characteristic.  Constructs with a warning when p = 2."""
    p, _ = factor_prime_power(q)
    formula = Exists("y", Eq(Var("x"), Add(mk_alpha(q, u), mk_alpha(q, -u))))
    if p == 2:
        warnings.warn(
            "the ideal-image property of this operator assumes odd characteristic",
            stacklevel=2,
        )
    return formula


# display forms (field language, used by the CLI --simplify path)


def zeta_display(q: int) -> Formula:
    """exists y: AS(x) = inv(AS(y) - 1) + 1.

    The constant is -1/f(0) = +1 for f = AS - 1; writing -1 instead is
    correct only in characteristic 2, where the two coincide.
    """
    inner = Inv(Sub(artin_schreier_term(Var("y"), q), Const(1)))
    return Exists("y", Eq(artin_schreier_term(Var("x"), q), Add(inner, Const(1))))


def epsilon_display(q: int) -> Formula:
    """exists y: x = AS(inv(AS(y) - 1))."""
    inner = Inv(Sub(artin_schreier_term(Var("y"), q), Const(1)))
    return Exists("y", Eq(Var("x"), artin_schreier_term(inner, q)))


def kochen_display(q: int, u: int) -> str:
    """The classically scaled form (1/p) * AS(y) / (AS(y)^2 - u^2)."""
    p, _ = factor_prime_power(q)
    return f"(1/{p}) * (y^{q}-y) / ((y^{q}-y)^2 - {u * u})"


# -- quantifier collapse


def _atom_poly(g: Formula) -> Term:
    if not isinstance(g, Eq):
        raise ShapeError(f"expected an atomic equation, got {type(g).__name__}")
    if g.rhs == Const(0):
        return g.lhs
    return Sub(g.lhs, g.rhs)


def collapse_or(g1: Formula, g2: Formula) -> Formula:
    """g1 = 0 or g2 = 0  <=>  g1*g2 = 0, pointwise over any field."""
    return Eq(Mul(_atom_poly(g1), _atom_poly(g2)), Const(0))


def _check_collapse_f(f: Sequence[int]) -> None:
    if len(f) < 2 or f[-1] != 1:
        raise InvalidF("f must be monic of degree >= 1")
    if f[0] == 0:
        raise InvalidF("f must have a nonzero constant term")


def collapse_and(g1: Formula, g2: Formula, f: Sequence[int]) -> Formula:
    """g1 = 0 and g2 = 0  <=>  sum(c_i * g1^i * g2^(n-i)) = 0, pointwise over
    any field in which f = sum(c_i X^i) has no root."""
    _check_collapse_f(f)
    p1, p2 = _atom_poly(g1), _atom_poly(g2)
    n = len(f) - 1
    acc: Term | None = None
    for i, c in enumerate(f):
        if c == 0:
            continue
        factors: list[Term] = []
        if i > 0:
            factors.append(p1 if i == 1 else Pow(p1, i))
        if n - i > 0:
            factors.append(p2 if n - i == 1 else Pow(p2, n - i))
        piece: Term = factors[0] if factors else Const(1)
        for extra in factors[1:]:
            piece = Mul(piece, extra)
        if c != 1:
            piece = Mul(int_term(c), piece)
        acc = piece if acc is None else Add(acc, piece)
    return Eq(acc if acc is not None else Const(0), Const(0))


@dataclass(frozen=True)
class CollapseResult:
    formula: Formula
    mode: str
    single_exists: bool
    binders_merged: int = 0
    notes: tuple[str, ...] = ()


class _FreshNames:
    def __init__(self, avoid: set[str]):
        self.avoid = set(avoid)
        self.counter = 0

    def take(self) -> str:
        while True:
            self.counter += 1
            name = f"z{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def _normalize(
    phi: Formula, fresh: _FreshNames
) -> tuple[list[str], list[Eq]]:
    """Prenex form (binders, conjunction of atoms) of an FE+ formula.

    Disjunction renames both sides onto a shared binder list and collapses
    the distributed atom pairs with `collapse_or` (valid pointwise), so the
    matrix stays a conjunction of atoms throughout.
    """
    if isinstance(phi, TrueF):
        return [], [Eq(Const(0), Const(0))]
    if isinstance(phi, FalseF):
        return [], [Eq(Const(0), Const(1))]
    if isinstance(phi, Eq):
        return [], [phi]
    if isinstance(phi, Exists):
        binders, atoms = _normalize(phi.body, fresh)
        name = fresh.take()
        atoms = [subst_formula(a, {phi.var: Var(name)}) for a in atoms]
        return [name] + binders, atoms
    if isinstance(phi, And):
        bl, al = _normalize(phi.left, fresh)
        br, ar = _normalize(phi.right, fresh)
        return bl + br, al + ar
    if isinstance(phi, Or):
        bl, al = _normalize(phi.left, fresh)
        br, ar = _normalize(phi.right, fresh)
        shared = [fresh.take() for _ in range(max(len(bl), len(br)))]
        al = [
            subst_formula(a, {o: Var(n) for o, n in zip(bl, shared)}) for a in al
        ]
        ar = [
            subst_formula(a, {o: Var(n) for o, n in zip(br, shared)}) for a in ar
        ]
        return shared, [collapse_or(a, b) for a in al for b in ar]
    raise ShapeError(f"not in the positive fragment: {type(phi).__name__}")


def fe_to_e(phi: Formula, f: Sequence[int], mode: str = "sound") -> CollapseResult:
    """Collapse a positive combination of one-existential formulas toward a
    single existential, modulo fields where f has no root.

    Mode "sound": disjunctions are collapsed (valid pointwise) and
    conjunctions of atoms are combined only when the atoms share the same
    bound variables; a conjunction over distinct binders is returned as a
    multi-existential and flagged.  Mode "paper" additionally identifies all
    binders into one variable before combining, which is *not*
    truth-preserving when the original witnesses must differ.
    """
    if mode not in ("sound", "paper"):
        raise ValueError(f"unknown mode {mode!r}")
    if not is_feplus(phi):
        raise ShapeError("input is not a positive combination of single-existential formulas")
    _check_collapse_f(f)
    fresh = _FreshNames(free_vars(phi))
    binders, atoms = _normalize(phi, fresh)
    notes: list[str] = []
    merged = 0

    if mode == "paper" and len(binders) > 1:
        target = binders[0]
        mapping = {b: Var(target) for b in binders[1:]}
        atoms = [subst_formula(a, mapping) for a in atoms]
        merged = len(binders) - 1
        binders = [target]
        notes.append(
            f"identified {merged + 1} existential variables; equivalence can "
            "fail when the original witnesses differ"
        )

    def combine(group: list[Eq]) -> Eq:
        acc = group[0]
        for nxt in group[1:]:
            acc = collapse_and(acc, nxt, f)
        return acc

    if mode == "paper":
        atoms = [combine(atoms)]
    else:
        by_binders: dict[frozenset[str], list[Eq]] = {}
        order: list[frozenset[str]] = []
        bset = set(binders)
        for a in atoms:
            key = frozenset(free_vars(a) & bset)
            if key not in by_binders:
                by_binders[key] = []
                order.append(key)
            by_binders[key].append(a)
        atoms = [combine(by_binders[k]) for k in order]

    used = set().union(*(free_vars(a) for a in atoms)) if atoms else set()
    binders = [b for b in binders if b in used]
    if not binders:
        binders = [fresh.take()]
    if len(binders) == 1 and "z" not in fresh.avoid:
        atoms = [subst_formula(a, {binders[0]: Var("z")}) for a in atoms]
        binders = ["z"]

    matrix: Formula = atoms[0]
    for a in atoms[1:]:
        matrix = And(matrix, a)
    out: Formula = matrix
    for b in reversed(binders):
        out = Exists(b, out)
    single = len(binders) == 1 and isinstance(matrix, Eq)
    if not single:
        notes.append("NotSingleExists: conjunction of distinct existentials remains")
    return CollapseResult(out, mode, single, merged, tuple(notes))
