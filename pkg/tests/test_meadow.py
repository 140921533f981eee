from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pax import meadow as M

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


def test_examples():
    assert M.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)
    assert M.inv(Fraction(0)) == 0
    assert M.inv(Fraction(2, 3)) == Fraction(3, 2)
    assert M.sign(Fraction(-1)) == -1
    assert M.sign(Fraction(0)) == 0
    assert M.compare(Fraction(1, 3), Fraction(1, 2)) is M.Order.LT
    assert M.is_probability(Fraction(1)) and M.is_probability(Fraction(0))
    assert not M.is_probability(Fraction(7, 6))


def test_zero_over_zero():
    assert M.div(Fraction(0), Fraction(0)) == 0
    assert M.div(Fraction(3), Fraction(0)) == 0


@given(rationals, rationals, rationals)
def test_ring_laws(x, y, z):
    assert M.add(M.add(x, y), z) == M.add(x, M.add(y, z))
    assert M.add(x, y) == M.add(y, x)
    assert M.add(x, 0) == x
    assert M.add(x, M.neg(x)) == 0
    assert M.mul(M.mul(x, y), z) == M.mul(x, M.mul(y, z))
    assert M.mul(x, y) == M.mul(y, x)
    assert M.mul(x, 1) == x
    assert M.mul(x, M.add(y, z)) == M.add(M.mul(x, y), M.mul(x, z))


@given(rationals)
def test_inverse_laws(x):
    assert M.inv(M.inv(x)) == x
    assert M.mul(x, M.mul(x, M.inv(x))) == x


@given(rationals, rationals)
def test_signum_laws(x, y):
    s = M.sign(x)
    assert s in (-1, 0, 1)
    assert M.div(M.sign(x), M.sign(x)) == M.sign(M.mul(x, x))   # sign(x/x) = x/x
    assert M.sign(M.mul(x, y)) == M.mul(M.sign(x), M.sign(y))
    assert M.sign(M.inv(x)) == M.sign(x)
    assert M.sign(M.sign(x)) == M.sign(x)


@given(rationals, rationals, rationals)
def test_cancellation(a, b, c):
    if a != 0 and M.mul(a, b) == M.mul(a, c):
        assert b == c


@given(rationals, rationals)
def test_compare_matches_rational_order(a, b):
    expected = M.Order.LT if a < b else M.Order.EQ if a == b else M.Order.GT
    assert M.compare(a, b) is expected
    assert M.less_equal(a, b) == (a <= b)


@given(rationals)
def test_probability_via_compare(a):
    assert M.is_probability(a) == (M.compare(Fraction(0), a) is not M.Order.GT
                                   and M.compare(a, Fraction(1)) is not M.Order.GT)


def test_serialization():
    assert M.format_rational(Fraction(1, 6)) == "1/6"
    assert M.format_rational(Fraction(1)) == "1"
    assert M.parse("3/9") == Fraction(1, 3)
    with pytest.raises(ValueError):
        M.parse("1/0")
    with pytest.raises(TypeError):
        M.rational(0.5)
    with pytest.raises(ValueError):
        M.prob("3/2")
