"""Configurable-precision reals and the few special values the predictions need.

Values are ``mpmath.mpf`` (gmpy2 backed, unbounded exponent).  Every public
function takes an explicit precision ``P`` in decimal digits, works with a few
guard digits and returns a value rounded to ``P`` digits.

Gamma and digamma are only ever needed at positive half-integers, where

    Gamma(j + 1/2) = (2j)! sqrt(pi) / (4^j j!)
    psi(j + 1/2)   = -gamma_E - 2 log 2 + 2 * sum_{i=1..j} 1/(2i - 1)

so no general special-function machinery is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Context, Decimal
from functools import lru_cache

import mpmath
from mpmath import mpf

MPReal = mpf

DEFAULT_PRECISION = 120
GUARD_DIGITS = 10

__all__ = [
    "DEFAULT_PRECISION",
    "HalfInt",
    "MPReal",
    "const_pi",
    "const_euler",
    "const_ln2",
    "ln",
    "sqrt",
    "gamma_half",
    "psi_half",
    "to_real",
    "format_real",
    "parse_real",
]


def _check_precision(P: int) -> None:
    if not isinstance(P, int) or P < 10:
        raise ValueError(f"precision must be an integer >= 10, got {P!r}")


@dataclass(frozen=True)
class HalfInt:
    """Exact half-integer ``twice_value / 2`` with ``twice_value`` odd."""

    twice_value: int

    def __post_init__(self) -> None:
        if self.twice_value % 2 == 0:
            raise ValueError(f"twice_value must be odd, got {self.twice_value}")

    @classmethod
    def plus(cls, n: int) -> HalfInt:
        """``n + 1/2``."""
        return cls(2 * n + 1)

    @classmethod
    def minus(cls, n: int) -> HalfInt:
        """``n - 1/2``."""
        return cls(2 * n - 1)

    @property
    def floor(self) -> int:
        """The integer ``j`` with ``self == j + 1/2``."""
        return (self.twice_value - 1) // 2

    def is_positive(self) -> bool:
        return self.twice_value > 0

    def shift(self, k: int) -> HalfInt:
        return HalfInt(self.twice_value + 2 * k)

    def value(self, P: int = DEFAULT_PRECISION) -> mpf:
        with mpmath.workdps(P):
            return mpf(self.twice_value) / 2

    def __str__(self) -> str:
        return f"{self.twice_value}/2"


# constant caches are keyed by precision; mpf values are immutable


@lru_cache(maxsize=64)
def const_pi(P: int = DEFAULT_PRECISION) -> mpf:
    _check_precision(P)
    with mpmath.workdps(P):
        return +mpmath.pi


@lru_cache(maxsize=64)
def const_euler(P: int = DEFAULT_PRECISION) -> mpf:
    _check_precision(P)
    with mpmath.workdps(P):
        return +mpmath.euler


@lru_cache(maxsize=64)
def const_ln2(P: int = DEFAULT_PRECISION) -> mpf:
    _check_precision(P)
    with mpmath.workdps(P):
        return +mpmath.ln2


@lru_cache(maxsize=64)
def _sqrt_pi(P: int) -> mpf:
    with mpmath.workdps(P):
        return mpmath.sqrt(mpmath.pi)


def ln(x, P: int = DEFAULT_PRECISION) -> mpf:
    _check_precision(P)
    with mpmath.workdps(P + GUARD_DIGITS):
        x = mpf(x)
        if x <= 0:
            raise ValueError(f"ln of non-positive value {mpmath.nstr(x, 10)}")
        v = mpmath.log(x)
    with mpmath.workdps(P):
        return +v


def sqrt(x, P: int = DEFAULT_PRECISION) -> mpf:
    _check_precision(P)
    with mpmath.workdps(P):
        x = mpf(x)
        if x < 0:
            raise ValueError("sqrt of negative value")
        return mpmath.sqrt(x)


def to_real(x, P: int = DEFAULT_PRECISION) -> mpf:
    """Round an int, mpq, QSqrt3 or mpf to ``P`` digits."""
    from .qfield import QSqrt3, Rational, qs_to_real, rational_to_real

    if isinstance(x, QSqrt3):
        return qs_to_real(x, P)
    if isinstance(x, Rational):
        with mpmath.workdps(P):
            return +rational_to_real(x, P)
    with mpmath.workdps(P):
        return mpf(x)


@lru_cache(maxsize=4096)
def _half_gamma_ratio(j: int) -> tuple[int, int]:
    # (2j)! / (4^j j!) as an unreduced integer pair
    num = math.prod(range(j + 1, 2 * j + 1)) if j else 1
    return num, 4**j


def _as_halfint(h) -> HalfInt:
    if isinstance(h, HalfInt):
        return h
    raise TypeError("half-integer arguments must be passed as HalfInt")


def gamma_half(h: HalfInt, P: int = DEFAULT_PRECISION) -> mpf:
    """Gamma at a positive half-integer, exact up to the final rounding."""
    _check_precision(P)
    h = _as_halfint(h)
    if not h.is_positive():
        raise ValueError(f"gamma_half needs a positive half-integer, got {h}")
    num, den = _half_gamma_ratio(h.floor)
    with mpmath.workdps(P + GUARD_DIGITS):
        v = mpf(num) * _sqrt_pi(P + GUARD_DIGITS) / den
    with mpmath.workdps(P):
        return +v


def psi_half(h: HalfInt, P: int = DEFAULT_PRECISION) -> mpf:
    """Digamma at a positive half-integer."""
    _check_precision(P)
    h = _as_halfint(h)
    if not h.is_positive():
        raise ValueError(f"psi_half needs a positive half-integer, got {h}")
    j = h.floor
    work = P + GUARD_DIGITS + len(str(j))
    with mpmath.workdps(work):
        s = mpf(0)
        for i in range(1, j + 1):
            s += mpf(1) / (2 * i - 1)
        v = -const_euler(work) - 2 * const_ln2(work) + 2 * s
    with mpmath.workdps(P):
        return +v


# --- decimal text ---------------------------------------------------------


def format_real(x, digits: int, P: int = DEFAULT_PRECISION) -> str:
    """Scientific notation, round-half-even, ``min(P, digits)`` significant digits."""
    n = max(1, min(P, digits))
    if not isinstance(x, mpf):
        with mpmath.workdps(P):
            x = mpf(x)
    if not mpmath.isfinite(x):
        raise ValueError("cannot format a non-finite value")
    if x == 0:
        return "0." + "0" * (n - 1) + "e+0" if n > 1 else "0e+0"
    # exact binary -> decimal conversion, then a single decimal rounding
    sgn, man, exp, _ = x._mpf_
    man = -int(man) if sgn else int(man)
    ctx = Context(prec=max(60, n + 30) + abs(exp) + len(str(abs(man))))
    d = ctx.multiply(Decimal(man), ctx.power(Decimal(2), exp))
    adj = d.adjusted()
    q = d.quantize(Decimal(1).scaleb(adj - n + 1), rounding=ROUND_HALF_EVEN, context=ctx)
    if q.adjusted() != adj:  # rounding carried into a new digit
        adj = q.adjusted()
        q = d.quantize(Decimal(1).scaleb(adj - n + 1), rounding=ROUND_HALF_EVEN, context=ctx)
    sign, digs, _ = q.as_tuple()
    digs = "".join(map(str, digs)).ljust(n, "0")[:n]
    mant = digs[0] + ("." + digs[1:] if n > 1 else "")
    return f"{'-' if sign else ''}{mant}e{adj:+d}"


def parse_real(text: str, P: int = DEFAULT_PRECISION) -> mpf:
    with mpmath.workdps(P):
        return mpf(text)
