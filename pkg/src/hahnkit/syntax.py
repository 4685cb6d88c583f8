"""Parsers and printers for the textual grammars: formulas, ring/field terms,
series literals, univariate polynomial literals, and field-context headers.

Formula grammar:
    formula := 'exists' IDENT '.' formula | disj
    disj    := conj ('|' conj)*
    conj    := prim ('&' prim)*
    prim    := term '=' term | '(' formula ')' | 'true' | 'false'
    term    := ring terms with + - * ^ and integer literals; inv(...) is
               accepted only in field mode

Series literal examples: `2*t^(-1/3) + (a+1)*t + O(t^(5/2))`.
Polynomial literal example: `y^2 - (1+t)*y + t^(1/2)`.
Context headers: `GF(9)`, `GF(4;a^2+a+1)`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .errors import HahnkitError, ParseError
from .finite_field import FqContext, factor_prime_power
from .formulas import (
    Add,
    And,
    Const,
    Eq,
    Exists,
    FALSE,
    FalseF,
    Formula,
    Inv,
    Mul,
    Neg,
    Or,
    Pow,
    Sub,
    Term,
    TRUE,
    TrueF,
    Var,
)
from .hahn import HahnSeries, big_o, monomial
from .solver import UPoly

_KEYWORDS = {"exists", "true", "false", "inv"}


class _Tok(NamedTuple):
    kind: str  # int | ident | sym | end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(_Tok("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Tok("ident", text[i:j], i))
            i = j
            continue
        if ch in "+-*^=().&|;<>/,":
            toks.append(_Tok("sym", ch, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.next()

    def at_end(self) -> bool:
        return self.peek().kind == "end"

    def fail(self, msg: str):
        raise ParseError(msg, self.peek().pos)


# -- formula and ring/field term parsing


class _FormulaParser(_Parser):
    def __init__(self, text: str, mode: str):
        super().__init__(text)
        if mode not in ("ring", "field"):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode

    def formula(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "exists":
            self.next()
            var = self.peek()
            if var.kind != "ident" or var.text in _KEYWORDS:
                self.fail("expected a variable name after 'exists'")
            self.next()
            self.expect(".")
            return Exists(var.text, self.formula())
        return self.disj()

    def disj(self) -> Formula:
        out = self.conj()
        while self.peek().text == "|":
            self.next()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.prim()
        while self.peek().text == "&":
            self.next()
            out = And(out, self.prim())
        return out

    def prim(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "true":
            self.next()
            return TRUE
        if tok.kind == "ident" and tok.text == "false":
            self.next()
            return FALSE
        mark = self.i
        try:
            lhs = self.term()
            self.expect("=")
            rhs = self.term()
            return Eq(lhs, rhs)
        except ParseError as term_err:
            self.i = mark
            if self.peek().text == "(":
                self.next()
                inner = self.formula()
                self.expect(")")
                return inner
            raise term_err

    def term(self) -> Term:
        out = self.mul()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.mul()
            out = Add(out, rhs) if op == "+" else Sub(out, rhs)
        return out

    def mul(self) -> Term:
        out = self.unary()
        while self.peek().text == "*":
            self.next()
            out = Mul(out, self.unary())
        return out

    def unary(self) -> Term:
        if self.peek().text == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Term:
        base = self.atom()
        if self.peek().text == "^":
            self.next()
            exp = self.peek()
            if exp.kind != "int":
                self.fail("expected a nonnegative integer exponent")
            self.next()
            return Pow(base, int(exp.text))
        return base

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return Const(int(tok.text))
        if tok.kind == "ident" and tok.text == "inv":
            if self.mode != "field":
                raise ParseError("formal inverse is not allowed in ring mode", tok.pos)
            self.next()
            self.expect("(")
            inner = self.term()
            self.expect(")")
            return Inv(inner)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            self.next()
            return Var(tok.text)
        if tok.text == "(":
            self.next()
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError(f"expected a term, found {tok.text or 'end of input'!r}", tok.pos)


def parse_formula(text: str, mode: str = "ring") -> Formula:
    p = _FormulaParser(text, mode)
    out = p.formula()
    if not p.at_end():
        p.fail("trailing input after formula")
    return out


def parse_term(text: str, mode: str = "ring") -> Term:
    p = _FormulaParser(text, mode)
    out = p.term()
    if not p.at_end():
        p.fail("trailing input after term")
    return out


# -- formula and term printing (canonical; parse(format(x)) == x structurally)

_ADD, _MUL, _UNARY, _POW = 1, 2, 3, 4


def format_term(t: Term, level: int = 0) -> str:
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Neg):
        inner = f"-{format_term(t.arg, _UNARY)}"
        return f"({inner})" if level > _ADD else inner
    if isinstance(t, Inv):
        return f"inv({format_term(t.arg)})"
    if isinstance(t, Pow):
        base = format_term(t.base, _POW + 1)
        if not isinstance(t.base, (Var, Const)):
            base = f"({format_term(t.base)})"
        return f"{base}^{t.exponent}"
    if isinstance(t, (Add, Sub)):
        op = "+" if isinstance(t, Add) else "-"
        left = format_term(t.left, _ADD)
        right = format_term(t.right, _ADD + 1)
        out = f"{left}{op}{right}"
        return f"({out})" if level > _ADD else out
    if isinstance(t, Mul):
        left = format_term(t.left, _MUL)
        right = format_term(t.right, _MUL + 1)
        out = f"{left}*{right}"
        return f"({out})" if level > _MUL else out
    raise TypeError(f"not a term: {t!r}")


def format_formula(phi: Formula, level: int = 0) -> str:
    if isinstance(phi, TrueF):
        return "true"
    if isinstance(phi, FalseF):
        return "false"
    if isinstance(phi, Eq):
        return f"{format_term(phi.lhs)} = {format_term(phi.rhs)}"
    if isinstance(phi, Exists):
        inner = f"exists {phi.var}. {format_formula(phi.body)}"
        return f"({inner})" if level > 0 else inner
    if isinstance(phi, Or):
        out = f"{format_formula(phi.left, 1)} | {format_formula(phi.right, 2)}"
        return f"({out})" if level > 1 else out
    if isinstance(phi, And):
        out = f"{format_formula(phi.left, 2)} & {format_formula(phi.right, 3)}"
        return f"({out})" if level > 2 else out
    raise TypeError(f"not a formula: {phi!r}")


# -- series and polynomial literals


class _SeriesParser(_Parser):
    """Evaluates the literal grammar directly into UPoly values over a fixed
    context (a plain series is the degree-0 case)."""

    def __init__(self, text: str, ctx: FqContext, var: str | None):
        super().__init__(text)
        self.ctx = ctx
        self.var = var

    def expr(self) -> UPoly:
        out = self.mul()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.mul()
            out = out + rhs if op == "+" else out - rhs
        return out

    def mul(self) -> UPoly:
        out = self.unary()
        while self.peek().text == "*":
            self.next()
            out = out * self.unary()
        return out

    def unary(self) -> UPoly:
        if self.peek().text == "-":
            self.next()
            return -self.unary()
        return self.power()

    def power(self) -> UPoly:
        base = self.atom()
        if self.peek().text == "^":
            self.next()
            exp = self.peek()
            if exp.kind != "int":
                self.fail("expected a nonnegative integer exponent")
            self.next()
            return base ** int(exp.text)
        return base

    def rational(self) -> Fraction:
        sign = 1
        if self.peek().text == "-":
            self.next()
            sign = -1
        num = self.peek()
        if num.kind != "int":
            self.fail("expected an integer")
        self.next()
        den = 1
        if self.peek().text == "/":
            self.next()
            dtok = self.peek()
            if dtok.kind != "int":
                self.fail("expected a denominator")
            self.next()
            den = int(dtok.text)
        return Fraction(sign * int(num.text), den)

    def t_exponent(self) -> Fraction:
        """After 't': optional ^(rational) or ^INT."""
        if self.peek().text != "^":
            return Fraction(1)
        self.next()
        if self.peek().text == "(":
            self.next()
            e = self.rational()
            self.expect(")")
            return e
        tok = self.peek()
        if tok.kind != "int":
            self.fail("expected an exponent")
        self.next()
        return Fraction(int(tok.text))

    def _const(self, x: HahnSeries) -> UPoly:
        return UPoly(self.ctx, (x,)) if not x.is_exact_zero() else UPoly(self.ctx, ())

    def atom(self) -> UPoly:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return UPoly.from_int_poly(self.ctx, [int(tok.text)])
        if tok.kind == "ident":
            if tok.text == "t":
                self.next()
                return self._const(monomial(self.ctx, self.t_exponent()))
            if tok.text == "a":
                if self.ctx.ell == 1:
                    raise ParseError("no generator `a` in a prime field", tok.pos)
                self.next()
                from .hahn import from_fq

                return self._const(from_fq(self.ctx.gen))
            if tok.text == "O":
                self.next()
                self.expect("(")
                ttok = self.peek()
                if not (ttok.kind == "ident" and ttok.text == "t"):
                    self.fail("O(...) takes a power of t")
                self.next()
                e = self.t_exponent()
                self.expect(")")
                return UPoly(self.ctx, (big_o(self.ctx, e),))
            if self.var is not None and tok.text == self.var:
                self.next()
                from .hahn import one, zero

                return UPoly(self.ctx, (zero(self.ctx), one(self.ctx)))
            raise ParseError(f"unknown symbol {tok.text!r} in literal", tok.pos)
        if tok.text == "(":
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"expected a literal, found {tok.text or 'end of input'!r}", tok.pos)


def parse_series(text: str, ctx: FqContext) -> HahnSeries:
    p = _SeriesParser(text, ctx, var=None)
    out = p.expr()
    if not p.at_end():
        p.fail("trailing input after series literal")
    if out.degree > 0:
        raise ParseError("expected a series literal, found a polynomial", 0)
    from .hahn import zero

    return out.coeffs[0] if out.coeffs else zero(ctx)


def parse_upoly(text: str, ctx: FqContext, var: str = "y") -> UPoly:
    p = _SeriesParser(text, ctx, var=var)
    out = p.expr()
    if not p.at_end():
        p.fail("trailing input after polynomial literal")
    return out


# -- integer polynomials and field headers


def term_to_int_poly(t: Term, var: str) -> list[int]:
    """Interpret a ring term in one variable as an integer coefficient list."""

    def go(node: Term) -> list[int]:
        if isinstance(node, Const):
            return [node.value]
        if isinstance(node, Var):
            if node.name != var:
                raise HahnkitError(f"unexpected variable {node.name!r}, wanted {var!r}")
            return [0, 1]
        if isinstance(node, Neg):
            return [-c for c in go(node.arg)]
        if isinstance(node, Add) or isinstance(node, Sub):
            a, b = go(node.left), go(node.right)
            if isinstance(node, Sub):
                b = [-c for c in b]
            out = [0] * max(len(a), len(b))
            for i, c in enumerate(a):
                out[i] += c
            for i, c in enumerate(b):
                out[i] += c
            return out
        if isinstance(node, Mul):
            a, b = go(node.left), go(node.right)
            if not a or not b:
                return []
            out = [0] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                for j, y in enumerate(b):
                    out[i + j] += x * y
            return out
        if isinstance(node, Pow):
            base = go(node.base)
            acc = [1]
            for _ in range(node.exponent):
                if not base:
                    return []
                new = [0] * (len(acc) + len(base) - 1)
                for i, x in enumerate(acc):
                    for j, y in enumerate(base):
                        new[i + j] += x * y
                acc = new
            return acc
        raise HahnkitError(f"cannot interpret {type(node).__name__} as an integer polynomial")

    out = go(t)
    while out and out[-1] == 0:
        out.pop()
    return out


def parse_int_poly(text: str, var: str | None = None) -> list[int]:
    t = parse_term(text, mode="ring")
    names = sorted({v for v in _collect_vars(t)})
    if var is None:
        if len(names) > 1:
            raise ParseError(f"polynomial mentions several variables: {names}", 0)
        var = names[0] if names else "x"
    return term_to_int_poly(t, var)


def _collect_vars(t: Term) -> set[str]:
    from .formulas import term_vars

    return term_vars(t)


def parse_gf(text: str) -> FqContext:
    """Parse `GF(q)` or `GF(q;modulus-in-a)`."""
    p = _Parser(text)
    tok = p.peek()
    if not (tok.kind == "ident" and tok.text == "GF"):
        raise ParseError("expected GF(...)", tok.pos)
    p.next()
    p.expect("(")
    qtok = p.peek()
    if qtok.kind != "int":
        p.fail("expected the field size")
    p.next()
    q = int(qtok.text)
    modulus = None
    if p.peek().text == ";":
        p.next()
        start = p.peek().pos
        depth = 0
        parts = []
        while not p.at_end():
            tok = p.peek()
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                if depth == 0:
                    break
                depth -= 1
            parts.append(p.next().text)
        mod_text = "".join(parts)
        if not mod_text:
            raise ParseError("empty modulus", start)
        modulus = term_to_int_poly(parse_term(mod_text, "ring"), "a")
    p.expect(")")
    if not p.at_end():
        p.fail("trailing input after field header")
    factor_prime_power(q)
    return FqContext(q, modulus)
