from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_instantons.qfield import (
    A,
    QFieldParseError,
    QSqrt3,
    as_rational,
    format_rational,
    qs_dot,
    qs_format,
    qs_parse,
    qs_to_real,
    sqrt_in_field,
)

rationals = st.builds(mpq, st.integers(-10**12, 10**12), st.integers(1, 10**6))
elements = st.builds(QSqrt3, rationals, rationals)
nonzero = elements.filter(lambda x: not x.is_zero())


def _pair(x: QSqrt3) -> tuple[Fraction, Fraction]:
    return Fraction(int(x.rat.numerator), int(x.rat.denominator)), Fraction(int(x.irr.numerator), int(x.irr.denominator))


def _mul_ref(x, y):
    # independent oracle on Fraction pairs
    (a, b), (c, d) = _pair(x), _pair(y)
    return (a * c + 3 * b * d, a * d + b * c)


@settings(max_examples=10_000, deadline=None)
@given(elements, elements, elements)
def test_field_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + QSqrt3() == x and x * QSqrt3(1) == x
    assert x - x == QSqrt3()
    assert _pair(x * y) == _mul_ref(x, y)


@settings(max_examples=2_000, deadline=None)
@given(nonzero, elements)
def test_inverse_and_division(x, y):
    assert x * x.inverse() == QSqrt3(1)
    assert (y / x) * x == y
    assert x.norm() != 0


@settings(max_examples=2_000, deadline=None)
@given(elements)
def test_text_round_trip(x):
    assert qs_parse(qs_format(x)) == x
    assert qs_format(qs_parse(qs_format(x))) == qs_format(x)


@settings(max_examples=500, deadline=None)
@given(elements)
def test_to_real_matches_direct_evaluation(x):
    a, b = _pair(x)
    with mpmath.workdps(80):
        ref = mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(3)
        v = qs_to_real(x, 50)
        if ref:
            assert abs(v / ref - 1) < mpmath.mpf(10) ** -49


def test_to_real_survives_cancellation():
    # 97/56 is a continued-fraction convergent of sqrt(3): heavy cancellation
    x = QSqrt3(mpq(-97, 56) * 10**12, 10**12) * QSqrt3(1)
    with mpmath.workdps(120):
        ref = (mpmath.sqrt(3) - mpmath.mpf(97) / 56) * 10**12
    v = qs_to_real(x, 40)
    with mpmath.workdps(40):
        assert abs(v / ref - 1) < mpmath.mpf(10) ** -39


def test_action_constants():
    assert A * A == QSqrt3(mpq(192, 25))
    assert A.inverse() == QSqrt3(0, mpq(5, 24))
    assert 16 / (5 * A) == QSqrt3(0, mpq(2, 3))
    assert qs_format(A) == "8/5*r3"


def test_mixed_operands():
    x = QSqrt3(1, 2)
    assert mpq(1, 2) * x == x * mpq(1, 2) == QSqrt3(mpq(1, 2), 1)
    assert 3 - x == QSqrt3(2, -2)
    assert Fraction(1, 3) + x == QSqrt3(mpq(4, 3), 2)
    assert x**-1 == x.inverse() and x**0 == QSqrt3(1)


def test_canonical_text():
    assert qs_format(QSqrt3(mpq(1, 2), mpq(-3, 4))) == "1/2-3/4*r3"
    assert qs_format(qs_parse("0/7")) == "0"
    assert qs_format(QSqrt3(0, -1)) == "-1*r3"
    assert format_rational(mpq(-6, 4)) == "-3/2"


@pytest.mark.parametrize(
    "text, pos",
    [("", 0), ("1/0", 2), ("1/2+", 4), ("1/2+3/4", 7), ("abc", 0), ("1/2*r3x", 6), ("1+2*r3+3*r3", 6)],
)
def test_parse_errors_are_positioned(text, pos):
    with pytest.raises(QFieldParseError) as info:
        qs_parse(text)
    assert info.value.pos == pos
    assert str(pos) in str(info.value)


def test_sqrt_in_field():
    assert sqrt_in_field(12) == QSqrt3(0, 2)
    assert sqrt_in_field(mpq(3, 4)) == QSqrt3(0, mpq(1, 2))
    assert sqrt_in_field(3) == QSqrt3(0, 1)
    assert sqrt_in_field(4) == QSqrt3(2)
    assert sqrt_in_field(2) is None
    assert sqrt_in_field(-3) is None


def test_dot_matches_naive():
    xs = [QSqrt3(mpq(i, 7), mpq(-i, 3)) for i in range(1, 30)]
    ys = [QSqrt3(mpq(2, i), mpq(i, 11)) for i in range(1, 30)]
    naive = QSqrt3()
    for x, y in zip(xs, ys):
        naive = naive + x * y
    assert qs_dot(xs, ys) == naive


def test_hash_and_order_are_consistent():
    assert hash(QSqrt3(1, 0)) == hash(QSqrt3(mpq(2, 2)))
    assert len({QSqrt3(1), QSqrt3(mpq(3, 3)), QSqrt3(0, 1)}) == 2
    assert sorted([QSqrt3(1, 1), QSqrt3(0, 5), QSqrt3(1, 0)])[0] == QSqrt3(0, 5)


def test_rejects_non_rationals():
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(TypeError):
        QSqrt3(True)
