from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wreathplane.scalar import (
    INFINITY, CertifiedReal, Cmp, FiniteField, IncompatiblePlace, Place, QuadExt, abs_value,
    compare_abs, format_scalar, padic_valuation, parse_scalar,
)

rationals = st.fractions(max_denominator=10 ** 6).filter(lambda x: abs(x) < 10 ** 9)
nonzero = rationals.filter(bool)
primes = st.sampled_from([2, 3, 5, 7, 11])


def test_abs_value_examples():
    for place in (Place.real(), Place.real(-1), Place.padic(2), Place.padic(5)):
        assert abs_value(1, place) == 1
    assert abs_value(Fraction(8, 3), Place.padic(2)) == Fraction(1, 8)
    r = abs_value(QuadExt.make(1, 1, 2), Place.real(-1))
    assert abs(float(r) - 0.41421356237) < 1e-10
    iv = r.interval()
    assert iv.a <= iv.b and float(iv.b) - float(iv.a) < 1e-20
    assert float(iv.a) <= 2 ** 0.5 - 1 + 1e-15 and float(iv.b) >= 2 ** 0.5 - 1 - 1e-15


def test_padic_valuation_examples():
    assert padic_valuation(12, 2) == 2
    assert padic_valuation(1, 5) == 0
    assert padic_valuation(0, 3) == INFINITY


def test_compare_abs_examples():
    assert compare_abs(2, 1, Place.real()) is Cmp.GT
    assert compare_abs(4, 2, Place.padic(2)) is Cmp.LT
    x = QuadExt.make(1, 1, 2)
    assert compare_abs(x, x, Place.real()) is Cmp.EQ


def test_finite_field_has_no_place():
    with pytest.raises(IncompatiblePlace):
        abs_value(FiniteField(3)(1), Place.real())


@given(nonzero, nonzero, primes)
def test_valuation_is_additive(x, y, q):
    assert padic_valuation(x * y, q) == padic_valuation(x, q) + padic_valuation(y, q)


@given(rationals, rationals, primes)
def test_ultrametric_inequality(x, y, q):
    p = Place.padic(q)
    assert abs_value(x + y, p) <= max(abs_value(x, p), abs_value(y, p))


@given(rationals, rationals)
def test_real_abs_is_multiplicative_and_certified(x, y):
    p = Place.real()
    assert abs_value(x * y, p) == abs_value(x, p) * abs_value(y, p)
    assert abs_value(x, p) == CertifiedReal.of(abs(x))


@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([2, 3, 5]), st.sampled_from([1, -1]))
def test_quadratic_sign_matches_float(a, b, d, sign):
    x = QuadExt.make(Fraction(a), Fraction(b), d)
    val = a + sign * b * d ** 0.5
    cmp = compare_abs(x, 1, Place.real(sign))
    if abs(abs(val) - 1) > 1e-9:
        assert cmp is (Cmp.GT if abs(val) > 1 else Cmp.LT)


@given(rationals)
def test_rational_literal_round_trip(x):
    assert parse_scalar(format_scalar(x)) == x


@given(rationals, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_quadratic_literal_round_trip(a, b, d):
    x = QuadExt.make(a, b, d)
    assert parse_scalar(format_scalar(x)) == x


@pytest.mark.parametrize("q", [2, 3, 4, 8, 9])
def test_finite_field_axioms(q):
    F = FiniteField(*{2: (2, 1), 3: (3, 1), 4: (2, 2), 8: (2, 3), 9: (3, 2)}[q])
    els = F.elements()
    assert len(els) == q
    one, zero = F.one(), F.zero()
    for a in els:
        assert parse_scalar(format_scalar(a)) == a
        assert a + zero == a and a * one == a
        if a:
            assert a * a.inverse() == one
        for b in els:
            assert a * b == b * a and a + b == b + a
    # the multiplicative group is cyclic of order q - 1
    assert all(a ** (q - 1) == one for a in els if a)


def test_bad_literals():
    for text in ("1/0", "abc", "2 mod 6", "5 mod 4"):
        with pytest.raises(ValueError):
            parse_scalar(text)
