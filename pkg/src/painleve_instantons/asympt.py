"""Truncated large-order predictions for the instanton coefficients.

Stokes factors are stored divided by ``2 pi i`` (or ``pi i``), which makes
every prediction a real number and keeps complex arithmetic out entirely.

Two gradings appear.  :func:`predict_u0` works with ``a_n = u_{n,0}`` in
``z^(-5/2)`` steps, hence ``Gamma(2n - 1/2)`` and the prefactor
``S_1/(pi i)``; :func:`predict_uk` works in ``z^(-5/4)`` steps with
``Gamma(n -+ 1/2)`` and ``S_1/(2 pi i)``.  Each is evaluated verbatim in its
own grading.

Series sums are accumulated exactly in Q(sqrt 3) whenever possible (the
coefficient, the power of ``A`` and the rational product
``prod (n - beta - m)``); only the transcendental prefactor is real.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import mpmath
from gmpy2 import mpq

from .mpreal import (
    DEFAULT_PRECISION,
    GUARD_DIGITS,
    HalfInt,
    const_pi,
    gamma_half,
    ln,
    psi_half,
    to_real,
)
from .qfield import A, QSqrt3, qs_to_real, sqrt_in_field
from .transseries import _exact_gamma, default_exact

# paper-quoted numeric value of S_{-1}/(2 pi i); there is no closed form
SM1_OVER_2PII_PUBLISHED = "0.3882786818052856841"

__all__ = [
    "AsymptoticPrediction",
    "Constants",
    "SM1_OVER_2PII_PUBLISHED",
    "predict_bn",
    "predict_u0",
    "predict_uk",
]


def _s1_over_2pii(P: int) -> mpmath.mpf:
    with mpmath.workdps(P + GUARD_DIGITS):
        v = -mpmath.root(3, 4) / (4 * const_pi(P + GUARD_DIGITS) ** mpmath.mpf(1.5))
    with mpmath.workdps(P):
        return +v


def _ln_a_term(P: int) -> mpmath.mpf:
    """``2 ln(A) / sqrt(3)``."""
    with mpmath.workdps(P + GUARD_DIGITS):
        return 2 * mpmath.log(qs_to_real(A, P + GUARD_DIGITS)) / mpmath.sqrt(3)


@dataclass(frozen=True)
class Constants:
    """Action, Stokes data and ``beta`` at a fixed working precision.

    ``Sm1_over_2pii`` and ``Sprime_m1_over_2pii`` are tied by
    ``S'_{-1} = S_{-1} + (2 ln A / sqrt 3) S_1`` (all over ``2 pi i``); give
    either one and the other is derived.
    """

    precision: int = DEFAULT_PRECISION
    A: QSqrt3 = A
    beta: HalfInt = HalfInt(1)
    S1_over_2pii: mpmath.mpf = None
    Sm1_over_2pii: mpmath.mpf | None = None
    Sprime_m1_over_2pii: mpmath.mpf | None = None
    c1: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        P = self.precision
        if self.S1_over_2pii is None:
            object.__setattr__(self, "S1_over_2pii", _s1_over_2pii(P))
        s1 = self.S1_over_2pii
        if s1 >= 0:
            raise ValueError("S1/(2 pi i) must be negative")
        sm1, sp = self.Sm1_over_2pii, self.Sprime_m1_over_2pii
        with mpmath.workdps(P):
            if sm1 is not None:
                sm1 = mpmath.mpf(sm1)
                derived = sm1 + _ln_a_term(P) * s1
                if sp is not None and abs(mpmath.mpf(sp) - derived) > abs(derived) * mpmath.mpf(10) ** (5 - P):
                    raise ValueError("inconsistent S_{-1} and S'_{-1}")
                object.__setattr__(self, "Sm1_over_2pii", +sm1)
                object.__setattr__(self, "Sprime_m1_over_2pii", +derived)
            elif sp is not None:
                sp = mpmath.mpf(sp)
                object.__setattr__(self, "Sprime_m1_over_2pii", +sp)
                object.__setattr__(self, "Sm1_over_2pii", +(sp - _ln_a_term(P) * s1))

    @classmethod
    def default(cls, precision: int = DEFAULT_PRECISION, published_sm1: bool = False) -> Constants:
        """Exact ``S_1``; ``S_{-1}`` only when ``published_sm1`` opts in to the quoted value."""
        if published_sm1:
            with mpmath.workdps(precision):
                return cls(precision, Sm1_over_2pii=mpmath.mpf(SM1_OVER_2PII_PUBLISHED))
        return cls(precision)

    @property
    def S1_over_pii(self) -> mpmath.mpf:
        with mpmath.workdps(self.precision):
            return 2 * self.S1_over_2pii

    def with_sprime(self, value) -> Constants:
        return replace(self, Sm1_over_2pii=None, Sprime_m1_over_2pii=value)

    def with_c1(self, gamma, value) -> Constants:
        c1 = dict(self.c1)
        c1[str(gamma)] = value
        return replace(self, c1=c1)


@dataclass
class AsymptoticPrediction:
    value: mpmath.mpf
    terms: list
    L: int
    parity: str
    n: int
    k: int | None = None
    gamma: object = None
    regime: str | None = None

    def to_json(self, digits: int = 30) -> dict:
        return {
            "n": self.n,
            "k_or_gamma": self.k if self.gamma is None else str(self.gamma),
            "L": self.L,
            "value": mpmath.nstr(self.value, digits),
            "terms": [{"label": lab, "value": mpmath.nstr(v, digits)} for lab, v in self.terms],
            "regime": self.regime,
            "parity": self.parity,
        }

    def dumps(self, digits: int = 30) -> str:
        return json.dumps(self.to_json(digits), indent=1)


def _parity(n: int) -> str:
    return "even" if n % 2 == 0 else "odd"


def _falling(x: mpq, l: int) -> mpq:
    """``prod_{m=1..l} (x - m)`` for a rational ``x``."""
    p = mpq(1)
    for m in range(1, l + 1):
        p *= x - m
    return p


def _finish(terms: list, P: int, **kw) -> AsymptoticPrediction:
    with mpmath.workdps(P + GUARD_DIGITS):
        total = mpmath.fsum(v for _, v in terms)
    with mpmath.workdps(P):
        total = +total
        terms = [(lab, +v) for lab, v in terms]
    return AsymptoticPrediction(value=total, terms=terms, **kw)


def _check_precision(P: int) -> None:
    if not isinstance(P, int) or P < 10:
        raise ValueError("precision must be an integer >= 10")


def predict_u0(n: int, L: int, P: int = DEFAULT_PRECISION) -> AsymptoticPrediction:
    """``a_n ~ A^{-2n+1/2} Gamma(2n-1/2) (S_1/pi i) {1 + sum_l u_{l,1} A^l / prod(2n-1/2-k)}``."""
    _check_precision(P)
    if n < 2:
        raise ValueError("predict_u0 needs n >= 2")
    if L < 0 or L >= 2 * n - 2:
        raise ValueError(f"truncation L={L} outside 0 <= L < 2n-2")
    ts = default_exact()
    W = P + GUARD_DIGITS
    x = mpq(4 * n - 1, 2)
    with mpmath.workdps(W):
        a = qs_to_real(A, W)
        pref = a ** (-x) * gamma_half(HalfInt.minus(2 * n), W) * 2 * _s1_over_2pii(W)
        terms = []
        for l in range(L + 1):
            c = ts.u(l, 1) * A**l / _falling(x, l)
            terms.append((f"S1[{l}]", pref * qs_to_real(c, W)))
    return _finish(terms, P, L=L, parity=_parity(n), n=n, k=0)


def predict_uk(
    n: int,
    k: int,
    L: int,
    P: int = DEFAULT_PRECISION,
    constants: Constants | None = None,
) -> AsymptoticPrediction:
    """Four-line large-``n`` prediction for ``u_{n,k}``, ``k >= 1``, truncated at ``l <= L``.

    For ``k = 1`` only the ``S_1`` line survives (``u_{n,0}`` and ``nu_{n,0}``
    count as zero there); for ``k >= 2`` ``constants.Sm1_over_2pii`` is required.
    """
    _check_precision(P)
    if k < 1:
        raise ValueError("predict_uk needs k >= 1; use predict_u0 for k = 0")
    if L < 0 or n <= L + 2:
        raise ValueError(f"need 0 <= L < n - 2, got n={n}, L={L}")
    constants = constants or Constants.default(P)
    if k >= 2 and constants.Sm1_over_2pii is None:
        raise ValueError("k >= 2 needs a numeric S_{-1}/(2 pi i) (Constants.Sm1_over_2pii)")
    ts = default_exact()
    W = P + GUARD_DIGITS
    sgn = -1 if n % 2 else 1
    x_minus = mpq(2 * n - 1, 2)  # n - beta
    x_plus = mpq(2 * n + 1, 2)  # n + beta
    terms = []
    with mpmath.workdps(W):
        a = qs_to_real(A, W)
        s1 = mpmath.mpf(constants.S1_over_2pii)
        pref1 = a ** (-x_minus) * gamma_half(HalfInt.minus(n), W) * s1
        for l in range(L + 1):
            coeff = (k + 1) * ts.u(l, k + 1) + ((-1) ** (n + l)) * ts.mu(l, k + 1)
            c = coeff * A**l / _falling(x_minus, l)
            terms.append((f"S1[{l}]", pref1 * qs_to_real(c, W)))
        if k >= 2:
            sm1 = mpmath.mpf(constants.Sm1_over_2pii)
            base = a ** (-x_plus) * gamma_half(HalfInt.plus(n), W)
            log_n = ln(n, W)
            log_term = log_n - mpmath.log(a)
            pref2 = sgn * (k - 1) * base * sm1
            pref3 = -sgn * base * s1
            mA = -A
            for l in range(L + 1):
                c = ts.u(l, k - 1) * mA**l / _falling(x_plus, l)
                terms.append((f"Sm1[{l}]", pref2 * qs_to_real(c, W)))
            for l in range(L + 1):
                c = ts.nu(l, k - 1) * mA**l / _falling(x_plus, l)
                terms.append((f"log[{l}]", pref3 * log_term * qs_to_real(c, W)))
            for l in range(L + 1):
                c = ts.nu(l, k - 1) * mA**l / _falling(x_plus, l)
                dpsi = psi_half(HalfInt.plus(n - l), W) - log_n
                terms.append((f"psi[{l}]", pref3 * dpsi * qs_to_real(c, W)))
    return _finish(terms, P, L=L, parity=_parity(n), n=n, k=k)


def _regime(gamma, W: int) -> str:
    g = _exact_gamma(gamma)
    if g is not None:
        return "above" if g > 3 else ("threshold" if g == 3 else "below")
    with mpmath.workdps(W):
        g = mpmath.mpf(gamma)
        return "above" if g > 3 else ("threshold" if g == 3 else "below")


def _real_gamma(gamma, W: int) -> mpmath.mpf:
    g = _exact_gamma(gamma)
    with mpmath.workdps(W):
        return to_real(g, W) if g is not None else mpmath.mpf(gamma)


def predict_bn(
    n: int,
    gamma,
    constants: Constants | None = None,
    P: int = DEFAULT_PRECISION,
    c1=None,
    shape_only: bool = False,
) -> AsymptoticPrediction:
    """Leading large-``n`` behaviour of ``b_n^-(gamma)`` in its three regimes.

    Below ``gamma = 3`` the Stokes factor ``c_1`` is not known in closed
    form.  It is handled as the real number ``c_1/i``, so that
    ``b_n ~ -(-1)^n (c_1/i) (2B)^{-n} Gamma(n) / (2 pi)``.  Pass it as
    ``c1`` (or via ``constants.c1[str(gamma)]``), or request the unit-``c_1``
    shape with ``shape_only=True``.
    """
    _check_precision(P)
    if n < 2:
        raise ValueError("predict_bn needs n >= 2")
    W = P + GUARD_DIGITS
    g = _real_gamma(gamma, W)
    if g <= 0:
        raise ValueError("gamma must be positive")
    regime = _regime(gamma, W)
    sgn = -1 if n % 2 else 1
    with mpmath.workdps(W):
        pi = const_pi(W)
        a = qs_to_real(A, W)
        ge = _exact_gamma(gamma)
        root = sqrt_in_field(ge) if ge is not None else None
        B = qs_to_real(root, W) * 4 / 5 if root is not None else mpmath.sqrt(g) * 4 / 5
        if regime == "above":
            K = 4 * mpmath.root(3, 4) / (25 * pi ** mpmath.mpf(1.5))
            bracket = a * (1 + sgn) - 2 * B * (1 - sgn)
            val = K * bracket / (4 * B**2 - a**2) * g * a ** (-(n + mpmath.mpf(1) / 2)) * gamma_half(HalfInt.minus(n), W)
            label = "above"
        elif regime == "threshold":
            val = sgn * mpmath.root(3, 4) / (5 * pi ** mpmath.mpf(1.5)) * mpmath.sqrt(g)
            val *= (2 * B) ** (-(n + mpmath.mpf(1) / 2)) * gamma_half(HalfInt.plus(n), W)
            label = "threshold"
        else:
            if c1 is None and constants is not None:
                c1 = constants.c1.get(str(gamma))
            if c1 is None and not shape_only:
                raise ValueError("gamma < 3 needs c1 (or shape_only=True)")
            c1v = mpmath.mpf(1) if c1 is None else mpmath.mpf(c1)
            val = -sgn * c1v * (2 * B) ** (-n) * mpmath.mpf(math.factorial(n - 1)) / (2 * pi)
            label = "below" if c1 is not None else "below:unit-c1"
    return _finish([(label, val)], P, L=0, parity=_parity(n), n=n, gamma=gamma, regime=regime)
