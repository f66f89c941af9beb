import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from biharmonic_tori.errors import DomainError
from biharmonic_tori.exactnum import (
    SurdSum,
    SurdValue,
    as_rational,
    format_rational,
    parse_rational,
    parse_surd,
    rat_sqrt,
    squarefree_split,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
positive = st.fractions(min_value=Fraction(1, 60), max_value=1000, max_denominator=60)


@pytest.mark.parametrize(
    "text, expected",
    [("3/4", Fraction(3, 4)), ("-6/8", Fraction(-3, 4)), ("5", Fraction(5)), (" 2 / 4 ", Fraction(1, 2))],
)
def test_parse_rational(text, expected):
    assert parse_rational(text) == expected


@pytest.mark.parametrize("text", ["1.5", "a/b", "", "1/-2"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


@given(rationals)
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_as_rational_refuses_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        as_rational(True)


@pytest.mark.parametrize("q, root", [(Fraction(9, 4), Fraction(3, 2)), (0, 0), (Fraction(2), None), (Fraction(4, 3), None)])
def test_rat_sqrt(q, root):
    assert rat_sqrt(q) == root


def test_rat_sqrt_negative():
    with pytest.raises(DomainError):
        rat_sqrt(Fraction(-1, 4))


@given(st.integers(1, 10**6))
def test_squarefree_split(n):
    outer, core = squarefree_split(n)
    assert outer * outer * core == n
    assert all(core % (p * p) for p in range(2, math.isqrt(core) + 1))


@pytest.mark.parametrize(
    "radicand, coeff, core",
    [(Fraction(1, 2), Fraction(1, 2), 2), (Fraction(8), Fraction(2), 2), (Fraction(9, 4), Fraction(3, 2), 1), (Fraction(12, 5), Fraction(2, 5), 15)],
)
def test_surd_normalization(radicand, coeff, core):
    s = SurdValue.sqrt(radicand)
    assert (s.coeff, s.radicand) == (coeff, core)


@given(rationals, positive)
def test_surd_square_and_float(c, r):
    s = SurdValue.make(c, r)
    assert s.square() == c * c * r
    assert math.isclose(float(s), float(c) * math.sqrt(r), rel_tol=1e-12, abs_tol=1e-12)


@given(rationals, positive)
def test_surd_text_round_trip(c, r):
    s = SurdValue.make(c, r)
    assert parse_surd(str(s)) == s


@given(positive, positive)
def test_surd_product(p, q):
    assert (SurdValue.sqrt(p) * SurdValue.sqrt(q)).square() == p * q


def test_surd_division():
    assert SurdValue.sqrt(6) / SurdValue.sqrt(3) == SurdValue.sqrt(2)
    with pytest.raises(ZeroDivisionError):
        SurdValue.sqrt(2) / SurdValue.make(0)


def test_linear_independence():
    # sqrt(2) + sqrt(3) is irrational and not sqrt(5)
    s = SurdSum.of(SurdValue.sqrt(2)) + SurdValue.sqrt(3)
    assert not s.is_zero()
    assert s != SurdValue.sqrt(5)
    assert s - SurdValue.sqrt(3) == SurdValue.sqrt(2)
    assert (s * s) == SurdSum([5, SurdValue.make(2, 6)])


def test_sqrt8_equals_two_sqrt2():
    assert SurdSum.of(SurdValue.sqrt(8)) == SurdSum.of(SurdValue.make(2, 2))


@given(st.lists(st.tuples(rationals, st.integers(1, 30)), max_size=6))
def test_surdsum_float_and_cancellation(terms):
    s = SurdSum(SurdValue.make(c, r) for c, r in terms)
    expected = math.fsum(float(c) * math.sqrt(r) for c, r in terms)
    assert math.isclose(float(s), expected, rel_tol=1e-9, abs_tol=1e-9)
    assert (s - s).is_zero()


def test_rational_value():
    assert SurdSum([Fraction(1, 2), Fraction(1, 3)]).rational_value() == Fraction(5, 6)
    with pytest.raises(ValueError):
        SurdSum.of(SurdValue.sqrt(2)).rational_value()
