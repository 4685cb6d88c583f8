"""Exact arithmetic in GF(p^l) with table-backed elements.

Elements are residues modulo a fixed monic irreducible polynomial over the
prime field.  An element is stored as its integer index sum(c_i * p^i), and
every context precomputes full operation tables at construction time, so all
field operations are O(1) lookups.  This is deliberate: the package only ever
works with desk-scale fields (q <= a few hundred), where exhaustive tables
double as the correctness oracle.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import (
    ContextMismatch,
    DivisionByZero,
    HahnkitError,
    NotMonic,
    ZeroPolynomial,
)

_TABLE_LIMIT = 1024  # fields beyond this are out of scope


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, l) with q = p^l, or raise if q is not a prime power."""
    if q < 2:
        raise HahnkitError(f"{q} is not a prime power")
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        p = q
    ell = 0
    m = q
    while m % p == 0:
        m //= p
        ell += 1
    if m != 1:
        raise HahnkitError(f"{q} is not a prime power")
    return p, ell


# -- polynomial helpers over F_p, coefficients as plain int lists (low degree
#    first, reduced mod p).  Only used for modulus selection and validation.

def _fp_trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _fp_divmod(num: list[int], den: list[int], p: int) -> tuple[list[int], list[int]]:
    num = [x % p for x in num]
    den = [x % p for x in den]
    _fp_trim(den)
    if not den:
        raise ZeroDivisionError("division by the zero polynomial")
    inv_lead = pow(den[-1], p - 2, p) if den[-1] != 1 else 1
    quot = [0] * max(0, len(num) - len(den) + 1)
    rem = list(num)
    _fp_trim(rem)
    while len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = (rem[-1] * inv_lead) % p
        quot[shift] = factor
        for i, d in enumerate(den):
            rem[shift + i] = (rem[shift + i] - factor * d) % p
        _fp_trim(rem)
    return quot, rem


def _fp_is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg/2."""
    coeffs = [c % p for c in coeffs]
    deg = len(coeffs) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for code in range(p**d):
            div = _int_to_digits(code, p, d) + [1]
            _, rem = _fp_divmod(list(coeffs), div, p)
            if not rem:
                return False
    return True


def _int_to_digits(n: int, p: int, width: int) -> list[int]:
    digits = []
    for _ in range(width):
        n, r = divmod(n, p)
        digits.append(r)
    return digits


def default_modulus(p: int, ell: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ell over F_p.

    "Smallest" means least integer encoding sum(c_i * p^i) with c_ell = 1,
    i.e. lexicographically least on (c_{ell-1}, ..., c_0).  Deterministic
    across runs by construction.
    """
    if ell == 1:
        return (0, 1)  # X itself
    for code in range(p**ell):
        cand = _int_to_digits(code, p, ell) + [1]
        if _fp_is_irreducible(cand, p):
            return tuple(cand)
    raise HahnkitError(f"no irreducible polynomial of degree {ell} over F_{p}")


class FqContext:
    """A concrete presentation of GF(p^l).

    Carries the modulus and full operation tables.  Immutable after
    construction and safe to share across threads.
    """

    def __init__(self, q: int, modulus: Sequence[int] | None = None):
        p, ell = factor_prime_power(q)
        if q > _TABLE_LIMIT:
            raise HahnkitError(f"field size {q} exceeds the desk-scale limit {_TABLE_LIMIT}")
        self.q = q
        self.p = p
        self.ell = ell
        if modulus is None:
            modulus = default_modulus(p, ell)
        modulus = tuple(c % p for c in modulus)
        if len(modulus) != ell + 1 or modulus[-1] != 1:
            raise NotMonic(f"modulus must be monic of degree {ell}")
        if ell > 1 and not _fp_is_irreducible(modulus, p):
            raise HahnkitError(f"modulus {modulus} is reducible over F_{p}")
        self.modulus = modulus
        self._build_tables()

    def _build_tables(self) -> None:
        p, ell, q = self.p, self.ell, self.q
        red = [-c % p for c in self.modulus[:-1]]  # X^ell = red as a vector

        def mul_vec(a: list[int], b: list[int]) -> list[int]:
            prod = [0] * (2 * ell - 1) if ell > 1 else [0]
            for i, ai in enumerate(a):
                if ai:
                    for j, bj in enumerate(b):
                        prod[i + j] = (prod[i + j] + ai * bj) % p
            for k in range(len(prod) - 1, ell - 1, -1):
                c = prod[k]
                if c:
                    prod[k] = 0
                    for i, r in enumerate(red):
                        prod[k - ell + i] = (prod[k - ell + i] + c * r) % p
            return prod[:ell]

        def to_idx(vec: Sequence[int]) -> int:
            n = 0
            for c in reversed(vec):
                n = n * p + c
            return n

        vecs = [_int_to_digits(i, p, ell) for i in range(q)]
        self.add_t = [
            tuple(to_idx([(a + b) % p for a, b in zip(vecs[i], vecs[j])]) for j in range(q))
            for i in range(q)
        ]
        self.mul_t = [
            tuple(to_idx(mul_vec(vecs[i], vecs[j])) for j in range(q)) for i in range(q)
        ]
        self.neg_t = tuple(to_idx([(-a) % p for a in vecs[i]]) for i in range(q))
        inv = [0] * q
        for i in range(1, q):
            row = self.mul_t[i]
            inv[i] = row.index(1)
        self.inv_t = tuple(inv)
        frob = [0] * q
        for i in range(q):
            acc = i
            for _ in range(p - 1):
                acc = self.mul_t[acc][i]
            frob[i] = acc
        self.frob_t = tuple(frob)
        frob_inv = [0] * q
        for i in range(q):
            frob_inv[frob[i]] = i
        self.frob_inv_t = tuple(frob_inv)

    # -- element constructors

    def el(self, idx: int) -> "FqElem":
        return FqElem(self, idx % self.q)

    def from_int(self, n: int) -> "FqElem":
        """Embed an integer via reduction mod p (prime subfield)."""
        return FqElem(self, n % self.p)

    def from_coeffs(self, coeffs: Iterable[int]) -> "FqElem":
        vec = [c % self.p for c in coeffs]
        if len(vec) > self.ell:
            raise HahnkitError("representative degree exceeds the extension degree")
        vec += [0] * (self.ell - len(vec))
        n = 0
        for c in reversed(vec):
            n = n * self.p + c
        return FqElem(self, n)

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, 0)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, 1)

    @property
    def gen(self) -> "FqElem":
        """The residue of X, printed as `a`."""
        if self.ell == 1:
            raise HahnkitError("prime fields have no extension generator")
        return FqElem(self, self.p)

    def elements(self) -> list["FqElem"]:
        return [FqElem(self, i) for i in range(self.q)]

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FqContext):
            return NotImplemented
        return self.q == other.q and self.modulus == other.modulus

    def __hash__(self) -> int:
        return hash((self.q, self.modulus))


class FqElem:
    """An element of a fixed FqContext, stored by integer index."""

    __slots__ = ("ctx", "idx")

    def __init__(self, ctx: FqContext, idx: int):
        self.ctx = ctx
        self.idx = idx

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(_int_to_digits(self.idx, self.ctx.p, self.ctx.ell))

    def _check(self, other: "FqElem") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.add_t[self.idx][other.idx])

    def __sub__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.add_t[self.idx][self.ctx.neg_t[other.idx]])

    def __mul__(self, other: "FqElem") -> "FqElem":
        self._check(other)
        return FqElem(self.ctx, self.ctx.mul_t[self.idx][other.idx])

    def __neg__(self) -> "FqElem":
        return FqElem(self.ctx, self.ctx.neg_t[self.idx])

    def __pow__(self, n: int) -> "FqElem":
        if n < 0:
            return self.inverse() ** (-n)
        result = self.ctx.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FqElem":
        if self.idx == 0:
            raise DivisionByZero("inverse of 0 in " + repr(self.ctx))
        return FqElem(self.ctx, self.ctx.inv_t[self.idx])

    def frobenius(self) -> "FqElem":
        return FqElem(self.ctx, self.ctx.frob_t[self.idx])

    def frobenius_inv(self) -> "FqElem":
        """The unique p-th root, i.e. x^(p^(l-1))."""
        return FqElem(self.ctx, self.ctx.frob_inv_t[self.idx])

    def is_zero(self) -> bool:
        return self.idx == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.ctx == other.ctx and self.idx == other.idx

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.idx))

    def __repr__(self) -> str:
        return f"FqElem({self.ctx!r}, {format_fq(self)})"

    def __str__(self) -> str:
        return format_fq(self)


def format_fq(x: FqElem) -> str:
    """Render an element: integers for prime fields, polynomials in `a` else."""
    if x.ctx.ell == 1:
        return str(x.idx)
    parts = []
    for i in range(x.ctx.ell - 1, -1, -1):
        c = x.coeffs[i]
        if c == 0:
            continue
        if i == 0:
            parts.append(str(c))
        else:
            var = "a" if i == 1 else f"a^{i}"
            parts.append(var if c == 1 else f"{c}*{var}")
    return "+".join(parts) if parts else "0"


def artin_schreier(x: FqElem, q: int | None = None) -> FqElem:
    """The Artin-Schreier value x^q - x; q defaults to the context size."""
    if q is None:
        q = x.ctx.q
    return x**q - x


# -- dense univariate polynomials over F_q, low degree first

def poly_trim(coeffs: Sequence[FqElem]) -> list[FqElem]:
    out = list(coeffs)
    while out and out[-1].is_zero():
        out.pop()
    return out


def poly_add(a: Sequence[FqElem], b: Sequence[FqElem], ctx: FqContext) -> list[FqElem]:
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        x = a[i] if i < len(a) else ctx.zero
        y = b[i] if i < len(b) else ctx.zero
        out.append(x + y)
    return poly_trim(out)


def poly_neg(a: Sequence[FqElem]) -> list[FqElem]:
    return [-c for c in a]


def poly_mul(a: Sequence[FqElem], b: Sequence[FqElem], ctx: FqContext) -> list[FqElem]:
    if not a or not b:
        return []
    out = [ctx.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_scale(a: Sequence[FqElem], s: FqElem) -> list[FqElem]:
    return poly_trim([c * s for c in a])


def poly_eval(a: Sequence[FqElem], x: FqElem, ctx: FqContext) -> FqElem:
    acc = ctx.zero
    for c in reversed(list(a)):
        acc = acc * x + c
    return acc


def poly_derivative(a: Sequence[FqElem], ctx: FqContext) -> list[FqElem]:
    out = []
    for i in range(1, len(a)):
        out.append(ctx.from_int(i) * a[i])
    return poly_trim(out)


def poly_from_ints(coeffs: Sequence[int], ctx: FqContext) -> list[FqElem]:
    """Reduce an integer polynomial into F_q coefficient by coefficient."""
    return poly_trim([ctx.from_int(c) for c in coeffs])


def poly_roots(g: Sequence[FqElem], ctx: FqContext) -> list[FqElem]:
    """Exact root set by exhaustive evaluation over all q elements."""
    if not poly_trim(g):
        raise ZeroPolynomial("root set of the zero polynomial is everything")
    return [x for x in ctx.elements() if poly_eval(g, x, ctx).is_zero()]


def root_multiplicity(g: Sequence[FqElem], c: FqElem, ctx: FqContext) -> int:
    """Multiplicity of c as a root of g, by repeated synthetic division."""
    coeffs = poly_trim(g)
    mult = 0
    while len(coeffs) >= 2 and poly_eval(coeffs, c, ctx).is_zero():
        n = len(coeffs) - 1
        quot = [ctx.zero] * n
        quot[n - 1] = coeffs[n]
        for i in range(n - 1, 0, -1):
            quot[i - 1] = coeffs[i] + c * quot[i]
        coeffs = poly_trim(quot)
        mult += 1
    return mult


def validate_f(f: Sequence[int], ctx: FqContext) -> bool:
    """True iff monic integer f reduces mod p to a polynomial with no root
    in F_q whose derivative does not vanish at 0."""
    if len(f) < 2 or f[-1] != 1:
        raise NotMonic("f must be a monic integer polynomial of degree >= 1")
    fbar = [ctx.from_int(c) for c in f]
    if any(poly_eval(fbar, x, ctx).is_zero() for x in ctx.elements()):
        return False
    deriv_at_0 = ctx.from_int(f[1])
    return not deriv_at_0.is_zero()
