from fractions import Fraction

import pytest

from hahnkit.errors import ParseError
from hahnkit.finite_field import FqContext
from hahnkit.hahn import INF, format_series, monomial, series
from hahnkit.syntax import (
    parse_gf,
    parse_int_poly,
    parse_series,
    parse_upoly,
)

F2 = FqContext(2)
F3 = FqContext(3)
F4 = FqContext(4)
F5 = FqContext(5)


def test_parse_gf_headers():
    assert parse_gf("GF(9)").q == 9
    assert parse_gf("GF(9)").modulus == (1, 0, 1)
    ctx = parse_gf("GF(4;a^2+a+1)")
    assert ctx.q == 4 and ctx.modulus == (1, 1, 1)
    with pytest.raises(Exception):
        parse_gf("GF(6)")
    with pytest.raises(ParseError):
        parse_gf("GF[5]")


def test_parse_series_example_literal():
    x = parse_series("2*t^(-1/3) + t + O(t^(5/2))", F5)
    assert x.support == (
        (Fraction(-1, 3), F5.from_int(2)),
        (Fraction(1), F5.one),
    )
    assert x.prec == Fraction(5, 2)


def test_parse_series_extension_coefficients():
    x = parse_series("(a+1)*t + a*t^2", F4)
    a = F4.gen
    assert x.support == ((Fraction(1), a + F4.one), (Fraction(2), a))


def test_parse_series_round_trip_with_formatter():
    for text in ["0", "1", "t", "t^(-1)", "2 + t^(1/3)", "1+t"]:
        x = parse_series(text, F5)
        assert parse_series(format_series(x), F5) == x


def test_parse_series_rejects_polynomial():
    with pytest.raises(ParseError):
        parse_series("y^2 - t", F2)


def test_parse_upoly_example():
    g = parse_upoly("y^2 - (1+t)*y + t^(1/2)", F3)
    assert g.degree == 2
    assert g.coeffs[0] == monomial(F3, Fraction(1, 2))
    assert g.coeffs[1] == series(F3, [(0, F3.from_int(-1)), (1, F3.from_int(-1))])
    assert g.coeffs[2].coeff(Fraction(0)) == F3.one


def test_parse_upoly_big_o_coefficient():
    g = parse_upoly("y^2 + O(t^(3))*y + t", F2)
    assert g.coeffs[1].support == () and g.coeffs[1].prec == 3


def test_parse_int_poly():
    assert parse_int_poly("x^2-x-1") == [-1, -1, 1]
    assert parse_int_poly("x^2-2") == [-2, 0, 1]
    assert parse_int_poly("5") == [5]
    with pytest.raises(ParseError):
        parse_int_poly("x*y + 1")


def test_parse_series_grammar_reference_literal():
    # the reference literal from the series grammar, over GF(9)
    F9 = FqContext(9)
    x = parse_series("2*t^(-1/3) + (a+1)*t + O(t^(5/2))", F9)
    assert x.prec == Fraction(5, 2)
    assert x.support == (
        (Fraction(-1, 3), F9.from_int(2)),
        (Fraction(1), F9.gen + F9.one),
    )
    from hahnkit.hahn import format_series

    assert format_series(x) == "2*t^(-1/3) + (a+1)*t + O(t^(5/2))"
