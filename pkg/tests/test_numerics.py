from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from kmpmd.numerics import RationalParseError, as_rational, parse_rational, rational_arith, render

rationals = st.fractions(max_denominator=10**6)


@pytest.mark.parametrize("text, value", [
    ("3/6", F(1, 2)), ("0.25", F(1, 4)), ("-7", F(-7)), ("-1.50", F(-3, 2)), ("10/4", F(5, 2)),
])
def test_parse(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["", "1/0", "abc", "1.", ".5", "1/-2", "1e3", "--1", "1/2/3", "1 /2", "\u0661"])
def test_parse_rejects(text):
    with pytest.raises(RationalParseError):
        parse_rational(text)


def test_surrounding_whitespace_ignored():
    assert parse_rational(" 3/4\n") == F(3, 4)


def test_parse_decimal_is_exact():
    # 0.1 has no binary float representation
    assert parse_rational("0.1") * 10 == 1
    assert parse_rational("123456789.000000001") == F(123456789000000001, 10**9)


def test_arith_examples():
    assert rational_arith(F(1, 3), F(1, 6), "add") == F(1, 2)
    assert rational_arith(F(2, 3), F(3, 2), "mul") == 1
    assert rational_arith(F(1, 3), F(2, 7), "cmp") == 1
    assert rational_arith(F(2, 7), F(1, 3), "cmp") == -1
    assert rational_arith(F(1, 2), F(2, 4), "cmp") == 0
    assert rational_arith(F(1, 2), F(1, 3), "sub") == F(1, 6)
    assert rational_arith(F(1, 2), F(1, 4), "div") == 2


def test_div_by_zero():
    with pytest.raises(ZeroDivisionError):
        rational_arith(F(1), F(0), "div")


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)
    assert as_rational("2/4") == F(1, 2)
    assert as_rational(3) == 3


def test_render():
    assert render(F(101, 100)) == "101/100"
    assert render(F(4, 2)) == "2"
    assert render(F(-1, 3)) == "-1/3"


@given(rationals, rationals, rationals)
def test_associative_and_distributive(a, b, c):
    add = lambda x, y: rational_arith(x, y, "add")
    mul = lambda x, y: rational_arith(x, y, "mul")
    assert add(add(a, b), c) == add(a, add(b, c))
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@given(rationals)
def test_render_round_trip(x):
    assert parse_rational(render(x)) == x


@given(rationals)
def test_canonical_form(x):
    assert x.denominator > 0
    import math
    assert math.gcd(abs(x.numerator), x.denominator) == 1


@given(rationals, rationals)
def test_cmp_total_order(a, b):
    c = rational_arith(a, b, "cmp")
    assert c == -rational_arith(b, a, "cmp")
    assert (c == 0) == (a == b)
