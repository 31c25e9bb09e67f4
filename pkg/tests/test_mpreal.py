from __future__ import annotations

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_instantons.mpreal import (
    HalfInt,
    const_euler,
    const_pi,
    format_real,
    gamma_half,
    ln,
    parse_real,
    psi_half,
    to_real,
)
from painleve_instantons.qfield import A, QSqrt3


def test_constants():
    assert mpmath.nstr(const_pi(50), 50) == "3.1415926535897932384626433832795028841971693993751"
    assert mpmath.nstr(const_euler(30), 30) == "0.577215664901532860606512090082"


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=600))
def test_gamma_half_matches_general_gamma(j):
    h = HalfInt.plus(j)
    with mpmath.workdps(90):
        ref = mpmath.gamma(mpmath.mpf(2 * j + 1) / 2)
    v = gamma_half(h, 60)
    with mpmath.workdps(60):
        assert abs(v / ref - 1) < mpmath.mpf(10) ** -59


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=600))
def test_psi_half_matches_digamma(j):
    with mpmath.workdps(90):
        ref = mpmath.digamma(mpmath.mpf(2 * j + 1) / 2)
    v = psi_half(HalfInt.plus(j), 60)
    with mpmath.workdps(60):
        assert abs(v - ref) <= abs(ref) * mpmath.mpf(10) ** -58


def test_halfint():
    assert HalfInt.minus(3).twice_value == 5
    assert HalfInt.plus(0).floor == 0
    assert str(HalfInt(7)) == "7/2"
    with pytest.raises(ValueError):
        HalfInt(4)
    with pytest.raises(ValueError):
        gamma_half(HalfInt(-1), 20)
    with pytest.raises(TypeError):
        gamma_half(2.5, 20)


def test_ln_and_domain():
    assert abs(ln(mpmath.e, 40) - 1) < mpmath.mpf(10) ** -39
    with pytest.raises(ValueError):
        ln(0, 20)
    with pytest.raises(ValueError):
        ln(1, 5)


def test_to_real_accepts_exact_types():
    with mpmath.workdps(40):
        assert abs(to_real(A, 40) - 8 * mpmath.sqrt(3) / 5) < mpmath.mpf(10) ** -39
        assert to_real(QSqrt3(3), 40) == 3


def test_format_real_rounds_half_even():
    assert format_real(mpmath.mpf("0.125"), 2, 30) == "1.2e-1"
    assert format_real(mpmath.mpf("0.375"), 2, 30) == "3.8e-1"
    assert format_real(mpmath.mpf(-9.96), 2, 30) == "-1.0e+1"
    assert format_real(mpmath.mpf(0), 3, 30) == "0.00e+0"


def test_format_parse_round_trip():
    with mpmath.workdps(120):
        x = mpmath.pi ** 7 / 3
    s = format_real(x, 120, 120)
    with mpmath.workdps(120):
        assert abs(parse_real(s, 120) - x) <= abs(x) * mpmath.mpf(10) ** -119
