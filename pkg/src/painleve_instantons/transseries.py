"""Exact (or fixed-precision) generation of the Painleve I trans-series coefficients.

Families and indexing
---------------------
``u(n, 0)``
    The 0-instanton ``a_n``, stored in ``z^(-5/2)`` steps.  Formulas that
    read it in ``z^(-5/4)`` steps go through :func:`u0_half`.
``u(n, k)``, ``k >= 1``
    The k-instanton coefficients, ``u(0, 1) = 1``.
``mu(n, k)``, ``k >= 1``
    Coefficients of the non-proper sectors ``u_{0|1}``, ``u_{1|1}`` and the
    non-logarithmic parts ``f_{k}`` of ``u_{k-1|1}``; ``mu(0, 1) = 1``.
``nu(n, k)``
    Coefficients of the logarithmic parts, ``nu(n, k) = (16/(5A)) k u(n, k)``.
``b_n^{+-}(gamma)``
    Formal solutions of ``v'' = gamma u v``; ``b_n^-(12) = u(n, 1)``.

All recurrences are obtained by inserting the formal series into the ODE
hierarchy ``-u_k''/6 + sum_{k'} u_{k'} u_{k-k'} = 0`` and solving for the
newest coefficient.  The ``a_1`` term of the 0-instanton convolution is
absorbed into the ``(2n+k-4)^2`` coefficient, which is why the convolution
sums stop at ``l = n - 3``.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
import threading
from contextlib import nullcontext
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath
from gmpy2 import mpq

from . import __version__
from .mpreal import DEFAULT_PRECISION, format_real, parse_real
from .qfield import (
    A,
    QSqrt3,
    Rational,
    as_rational,
    qs_dot,
    qs_format,
    qs_parse,
    qs_to_real,
    rational_to_real,
    sqrt_in_field,
)

SCHEMA_VERSION = 1
REAL_GUARD_DIGITS = 30

__all__ = [
    "BnSeries",
    "CoeffTable",
    "TableError",
    "Transseries",
    "b_coeff",
    "closed_mu0k",
    "closed_u0k",
    "closed_u1k",
    "mu_coeff",
    "nu_coeff",
    "table_build",
    "table_export_csv",
    "table_load",
    "table_save",
    "u0_coeff",
    "u0_half",
    "u_coeff",
]


class TableError(Exception):
    """Malformed, incompatible or insufficient coefficient table."""


# --- 0-instanton ------------------------------------------------------------

_u0_cache: list[Rational] = [mpq(1)]
_u0_lock = threading.Lock()


def u0_coeff(n: int) -> Rational:
    """``a_n = u_{n,0}``: exact, memoized."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < len(_u0_cache):
        return _u0_cache[n]
    with _u0_lock:
        a = _u0_cache
        for m in range(len(a), n + 1):
            conv = sum((a[l] * a[m - l] for l in range(1, (m + 1) // 2)), mpq(0)) * 2
            if m % 2 == 0:
                conv += a[m // 2] ** 2
            a.append(mpq(25 * (m - 1) ** 2 - 1, 48) * a[m - 1] - conv / 2)
    return _u0_cache[n]


def u0_half(j: int) -> Rational:
    """``u_{j/2,0}``, zero unless ``j`` is even."""
    if j < 0:
        raise ValueError("j must be >= 0")
    return u0_coeff(j // 2) if j % 2 == 0 else mpq(0)


# --- closed forms -----------------------------------------------------------


def closed_u0k(k: int) -> QSqrt3:
    if k < 1:
        raise ValueError("closed_u0k needs k >= 1")
    return QSqrt3(mpq(k, 12 ** (k - 1)))


def closed_u1k(k: int) -> QSqrt3:
    if k < 2:
        raise ValueError("closed_u1k needs k >= 2")
    # -12^{-k} (109k^2 - 120k + 24) / (16 sqrt 3), with 1/sqrt3 = sqrt3/3
    return QSqrt3(0, -mpq(109 * k * k - 120 * k + 24, 48 * 12**k))


def closed_mu0k(k: int) -> QSqrt3:
    if k < 4:
        raise ValueError("closed_mu0k needs k >= 4")
    return QSqrt3(mpq((k - 2) * (141 * k - 402), 12 ** (k - 1)))


# --- arithmetic backends ----------------------------------------------------


class _ExactField:
    exact = True
    precision = None

    def __init__(self) -> None:
        self.A = A
        self.zero = QSqrt3()
        self.one = QSqrt3(1)
        # 16/(5A) = 2/sqrt(3)
        self.nu_factor = QSqrt3(0, mpq(2, 3))
        self.inv_A = A.inverse()

    def context(self):
        return nullcontext()

    def c(self, p, q=1) -> Rational:
        return mpq(p, q)

    def from_rational(self, r) -> QSqrt3:
        return QSqrt3(r)

    def dot(self, xs, ys) -> QSqrt3:
        return qs_dot(xs, ys)

    def rdot(self, rats, ys) -> QSqrt3:
        r = mpq(0)
        s = mpq(0)
        for q, y in zip(rats, ys):
            r += q * y.rat
            s += q * y.irr
        return QSqrt3._raw(r, s)

    def finish(self, v):
        return v


class _RealField:
    exact = False

    def __init__(self, precision: int) -> None:
        self.precision = precision
        self.work = precision + REAL_GUARD_DIGITS
        with self.context():
            self.A = 8 * mpmath.sqrt(3) / 5
            self.zero = mpmath.mpf(0)
            self.one = mpmath.mpf(1)
            self.nu_factor = 16 / (5 * self.A)
            self.inv_A = 1 / self.A
        self._rat_cache: dict = {}

    def context(self):
        return mpmath.workdps(self.work)

    def c(self, p, q=1):
        return mpmath.mpf(p) / q

    def from_rational(self, r):
        v = self._rat_cache.get(r)
        if v is None:
            v = rational_to_real(r, self.work)
            self._rat_cache[r] = v
        return v

    def dot(self, xs, ys):
        return mpmath.fdot(xs, ys)

    def rdot(self, rats, ys):
        return mpmath.fdot([self.from_rational(q) for q in rats], ys)

    def finish(self, v):
        with mpmath.workdps(self.precision):
            return +v


def _make_field(mode: str, precision: int):
    if mode == "exact":
        return _ExactField()
    if mode == "real":
        if precision < 10:
            raise ValueError("precision must be >= 10")
        return _RealField(precision)
    raise ValueError(f"mode must be 'exact' or 'real', got {mode!r}")


# --- the generator ----------------------------------------------------------


class Transseries:
    """Lazily extended coefficient rows, exact (``QSqrt3``) or real (``mpf``).

    Rows are filled in increasing ``n``; a request for ``(n, k)`` first
    completes every row it depends on.  Extension is serialized by a lock so
    one instance can be shared between threads.
    """

    def __init__(self, mode: str = "exact", precision: int = DEFAULT_PRECISION) -> None:
        self.mode = mode
        self.F = _make_field(mode, precision)
        self.precision = precision if mode == "real" else None
        self._u: dict[int, list] = {}
        self._mu: dict[int, list] = {}
        self._a_work: list = []
        self._lock = threading.RLock()

    # public accessors return P-digit values in real mode

    def u(self, n: int, k: int):
        if n < 0 or k < 0:
            raise ValueError("indices must be >= 0")
        if k == 0:
            a = u0_coeff(n)
            return QSqrt3(a) if self.F.exact else self.F.finish(self._a(n))
        return self.F.finish(self._u_at(n, k))

    def mu(self, n: int, k: int):
        if k < 1:
            raise ValueError("mu(n, k) is defined for k >= 1 only")
        if n < 0:
            raise ValueError("n must be >= 0")
        return self.F.finish(self._mu_at(n, k))

    def nu(self, n: int, k: int):
        if n < 0 or k < 0:
            raise ValueError("indices must be >= 0")
        return self.F.finish(self._nu_at(n, k))

    def u_row(self, k: int, n_max: int) -> list:
        self._u_at(n_max, k) if k else None
        if k == 0:
            return [self.u(n, 0) for n in range(n_max + 1)]
        return [self.F.finish(v) for v in self._u[k][: n_max + 1]]

    def mu_row(self, k: int, n_max: int) -> list:
        self._mu_at(n_max, k)
        return [self.F.finish(v) for v in self._mu[k][: n_max + 1]]

    def nu_row(self, k: int, n_max: int) -> list:
        return [self.nu(n, k) for n in range(n_max + 1)]

    # internal values keep guard digits in real mode

    def _a(self, n: int):
        """``a_n`` in the working field representation (real: an mpf)."""
        if self.F.exact:
            return u0_coeff(n)
        while len(self._a_work) <= n:
            self._a_work.append(self.F.from_rational(u0_coeff(len(self._a_work))))
        return self._a_work[n]

    def _u_at(self, n: int, k: int):
        row = self._u.get(k)
        if row is None or len(row) <= n:
            with self._lock, self.F.context():
                self._extend_u(k, n)
        return self._u[k][n]

    def _mu_at(self, n: int, k: int):
        row = self._mu.get(k)
        if row is None or len(row) <= n:
            with self._lock, self.F.context():
                self._extend_mu(k, n)
        return self._mu[k][n]

    def _nu_at(self, n: int, k: int):
        if k == 0:
            return self.F.zero
        return self.F.nu_factor * k * self._u_at(n, k)

    def _extend_u(self, k: int, n_max: int) -> None:
        F = self.F
        row = self._u.setdefault(k, [])
        if k >= 2:
            for m in range(1, k):
                self._u_at(n_max, m)
        for n in range(len(row), n_max + 1):
            if k == 1:
                row.append(self._next_u1(row, n))
            else:
                row.append(self._next_uk(row, n, k))
        del F

    def _next_u1(self, row: list, n: int):
        F = self.F
        if n == 0:
            return F.one
        # 12 sum_{l=0}^{n-2} u_{l,1} u_{(n+1-l)/2,0}: only l = n+1-2j, j >= 2
        js = range(2, (n + 1) // 2 + 1)
        conv = F.rdot([u0_coeff(j) for j in js], [row[n + 1 - 2 * j] for j in js])
        inner = conv * 12 - row[n - 1] * (F.c(25, 64) * (2 * n - 1) ** 2)
        return inner * F.inv_A * F.c(8, 25 * n)

    def _half_conv(self, row: list, n: int):
        # sum_{l=0}^{n-3} row_l u_{(n-l)/2,0}: l = n-2j with j >= 2
        js = range(2, n // 2 + 1)
        return self.F.rdot([u0_coeff(j) for j in js], [row[n - 2 * j] for j in js])

    def _next_uk(self, row: list, n: int, k: int):
        F = self.F
        acc = self._half_conv(row, n) * 12
        cross = F.zero
        for m in range(1, k // 2 + 1):
            a_row, b_row = self._u[m], self._u[k - m]
            c = F.dot(a_row[: n + 1], b_row[n::-1] if n else b_row[:1])
            cross = cross + (c if 2 * m == k else c * 2)
        acc = acc + cross * 6
        if n >= 2:
            acc = acc - row[n - 2] * (F.c(25, 64) * (2 * n + k - 4) ** 2)
        if n >= 1:
            acc = acc - row[n - 1] * F.A * (F.c(25, 16) * k * (k + 2 * n - 3))
        return acc * F.c(1, 12 * (k * k - 1))

    def _extend_mu(self, k: int, n_max: int) -> None:
        row = self._mu.setdefault(k, [])
        if k == 1:
            u1 = [self._u_at(n, 1) for n in range(n_max + 1)]
            for n in range(len(row), n_max + 1):
                row.append(u1[n] if n % 2 == 0 else -u1[n])
            return
        if k == 2:
            self._mu_at(n_max, 1)
            self._u_at(n_max, 1)
            for n in range(len(row), n_max + 1):
                row.append(self._next_mu2(row, n))
            return
        if k == 3:
            self._mu_at(n_max + 1, 2)
            self._mu_at(n_max + 1, 1)
            self._u_at(n_max + 1, 2)
            for n in range(len(row), n_max + 1):
                row.append(self._next_mu3(row, n))
            return
        for m in range(1, k):
            self._mu_at(n_max, m)
            self._u_at(n_max, m)
        for n in range(len(row), n_max + 1):
            row.append(self._next_muk(row, n, k))

    def _next_mu2(self, row: list, n: int):
        F = self.F
        if n % 2:
            return F.zero
        h = n // 2
        # -sum_{l=0}^{h-2} mu_{2l,2} a_{h-l}
        ls = range(0, h - 1)
        acc = -F.rdot([u0_coeff(h - l) for l in ls], [row[2 * l] for l in ls])
        # -sum_{l=0}^{2h} (-1)^l u_{l,1} u_{2h-l,1} = -sum mu_{l,1} u_{n-l,1}
        acc = acc - F.dot(self._mu[1][: n + 1], self._u[1][n::-1] if n else self._u[1][:1])
        if h >= 1:
            acc = acc + row[n - 2] * (F.c(25, 192) * (2 * h - 1) ** 2)
        return acc

    def _next_mu3(self, row: list, n: int):
        F = self.F
        # the k=3 resonance: solve for mu_{n,3} from the order-(n+1) equation
        js = range(2, (n + 1) // 2 + 1)
        acc = F.rdot([u0_coeff(j) for j in js], [row[n + 1 - 2 * j] for j in js]) * 12
        N = n + 1
        u1, u2 = self._u[1], self._u[2]
        m1, m2 = self._mu[1], self._mu[2]
        cross = F.dot(u1[N::-1], m2[: N + 1]) + F.dot(u2[N::-1], m1[: N + 1])
        acc = acc + cross * 12
        if n >= 1:
            acc = acc - row[n - 1] * (F.c(25, 64) * (2 * n + 1) ** 2)
        acc = acc + self._nu_at(n, 1) * F.c(25 * (2 * n + 1), 16)
        acc = acc + self._nu_at(n + 1, 1) * F.A * F.c(25, 8)
        return acc * F.inv_A * F.c(8, 25 * (n + 1))

    def _next_muk(self, row: list, n: int, k: int):
        F = self.F
        acc = self._half_conv(row, n) * 12
        cross = F.zero
        for m in range(1, k):
            cross = cross + F.dot(self._mu[m][: n + 1], self._u[k - m][n::-1] if n else self._u[k - m][:1])
        acc = acc + cross * 12
        if n >= 2:
            acc = acc - row[n - 2] * (F.c(25, 64) * (2 * n + k - 4) ** 2)
        if n >= 1:
            # exponential weight of f_k is e^{-(k-2)Ax}, hence (k-2) here
            acc = acc - row[n - 1] * F.A * (F.c(25, 16) * (k - 2) * (k + 2 * n - 3))
            acc = acc + self._nu_at(n - 1, k - 2) * F.c(25 * (k + 2 * n - 4), 16)
        acc = acc + self._nu_at(n, k - 2) * F.A * F.c(25 * (k - 2), 8)
        return acc * F.c(1, 12 * (k - 1) * (k - 3))


_default_exact: Transseries | None = None


def default_exact() -> Transseries:
    global _default_exact
    if _default_exact is None:
        _default_exact = Transseries("exact")
    return _default_exact


def u_coeff(n: int, k: int) -> QSqrt3:
    return default_exact().u(n, k)


def mu_coeff(n: int, k: int) -> QSqrt3:
    return default_exact().mu(n, k)


def nu_coeff(n: int, k: int) -> QSqrt3:
    return default_exact().nu(n, k)


# --- b_n^{+-}(gamma) --------------------------------------------------------


def _exact_gamma(gamma):
    if isinstance(gamma, (int, Fraction, Rational, str)) and not isinstance(gamma, bool):
        return as_rational(gamma)
    return None


class BnSeries:
    """Coefficients ``b_n^{sign}(gamma)`` of the formal solutions of ``v'' = gamma u v``.

    ``mode="auto"`` picks the exact path whenever ``sqrt(gamma)`` lies in
    Q(sqrt 3) (e.g. gamma = 3/4, 3, 4, 12) and a real path otherwise.
    """

    def __init__(self, gamma, sign: str = "-", mode: str = "auto", precision: int = DEFAULT_PRECISION) -> None:
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        g_exact = _exact_gamma(gamma)
        if g_exact is not None:
            if g_exact <= 0:
                raise ValueError("gamma must be positive")
        else:
            with mpmath.workdps(precision):
                if mpmath.mpf(gamma) <= 0:
                    raise ValueError("gamma must be positive")
        root = sqrt_in_field(g_exact) if g_exact is not None else None
        if mode == "auto":
            mode = "exact" if root is not None else "real"
        if mode == "exact" and root is None:
            raise ValueError(f"exact b_n needs sqrt(gamma) in Q(sqrt 3); gamma={gamma!r} is not admissible")
        self.gamma = g_exact if g_exact is not None else gamma
        self.sign = sign
        self.mode = mode
        self.precision = precision
        self.F = _make_field(mode, precision)
        with self.F.context():
            if mode == "exact":
                sqrt_g = root
            elif g_exact is not None:
                sqrt_g = mpmath.sqrt(rational_to_real(g_exact, self.F.work))
            else:
                sqrt_g = mpmath.sqrt(mpmath.mpf(gamma))
            B = sqrt_g * self.F.c(4, 5)
            self.B = B if sign == "+" else -B
            self.B_abs = B
            self._inv_B = 1 / self.B
        self._b = [self.F.one]
        self._lock = threading.RLock()

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def __getitem__(self, n: int):
        return self.coeff(n)

    def coeff(self, n: int):
        if n < 0:
            raise ValueError("n must be >= 0")
        if n >= len(self._b):
            with self._lock, self.F.context():
                self._extend(n)
        return self.F.finish(self._b[n])

    def coeffs(self, n_max: int) -> list:
        self.coeff(n_max)
        return [self.F.finish(v) for v in self._b[: n_max + 1]]

    def _extend(self, n_max: int) -> None:
        F, b = self.F, self._b
        for n in range(len(b), n_max + 1):
            ms = range(1, (n + 1) // 2 + 1)
            conv = F.rdot([u0_coeff(m) for m in ms], [b[n + 1 - 2 * m] for m in ms])
            first = b[n - 1] * self._inv_B * F.c((10 * n - 1) * (10 * n - 9), 100)
            b.append((first - conv * self.B) * F.c(1, 2 * n))


_bn_cache: dict = {}


def b_coeff(n: int, gamma, sign: str = "-", mode: str = "auto", precision: int = DEFAULT_PRECISION):
    key = (str(gamma), sign, mode, precision)
    series = _bn_cache.get(key)
    if series is None:
        series = _bn_cache[key] = BnSeries(gamma, sign, mode, precision)
    return series.coeff(n)


# --- persisted tables -------------------------------------------------------


@dataclass
class CoeffTable:
    """Immutable snapshot of the coefficient rows.

    ``u[k][n]`` for ``0 <= k <= k_max`` (row 0 holds ``a_n``), ``mu[k][n]``
    for ``k >= 1`` (``mu[0]`` is empty) and ``nu[k][n]``.
    """

    mode: str
    precision: int | None
    n_max: int
    k_max: int
    u: list
    mu: list
    nu: list
    provenance: dict = field(default_factory=dict)

    def _check(self, n: int, k: int, family: str) -> None:
        if not (0 <= k <= self.k_max and 0 <= n <= self.n_max):
            raise TableError(f"{family}({n},{k}) outside table n<={self.n_max}, k<={self.k_max}")

    def get_u(self, n: int, k: int):
        self._check(n, k, "u")
        return self.u[k][n]

    def get_mu(self, n: int, k: int):
        if k < 1:
            raise ValueError("mu(n, k) is defined for k >= 1 only")
        self._check(n, k, "mu")
        return self.mu[k][n]

    def get_nu(self, n: int, k: int):
        self._check(n, k, "nu")
        return self.nu[k][n]

    def covers(self, n_max: int, k_max: int) -> bool:
        return self.n_max >= n_max and self.k_max >= k_max

    def real(self, value, precision: int | None = None):
        """Convert one entry to an mpf (late conversion for exact tables)."""
        P = precision or self.precision or DEFAULT_PRECISION
        if isinstance(value, QSqrt3):
            return qs_to_real(value, P)
        return value

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffTable):
            return NotImplemented
        return (
            self.mode == other.mode
            and self.n_max == other.n_max
            and self.k_max == other.k_max
            and self.u == other.u
            and self.mu == other.mu
            and self.nu == other.nu
        )


def table_build(
    n_max: int,
    k_max: int,
    mode: str = "exact",
    precision: int = DEFAULT_PRECISION,
    generator: Transseries | None = None,
) -> CoeffTable:
    if n_max < 0 or k_max < 0:
        raise ValueError("n_max and k_max must be >= 0")
    gen = generator or Transseries(mode, precision)
    if gen.mode != mode:
        raise ValueError("generator mode does not match")
    u = [gen.u_row(k, n_max) for k in range(k_max + 1)]
    mu = [[]] + [gen.mu_row(k, n_max) for k in range(1, k_max + 1)]
    nu = [gen.nu_row(k, n_max) for k in range(k_max + 1)]
    prec = precision if mode == "real" else None
    prov = {"package": "painleve_instantons", "version": __version__, "mode": mode,
            "precision": prec, "n_max": n_max, "k_max": k_max}
    return CoeffTable(mode, prec, n_max, k_max, u, mu, nu, prov)


STORE_GUARD_DIGITS = 5


def _encode(v, table: CoeffTable) -> str:
    if table.mode == "exact":
        return qs_format(v)
    # a few spare digits so decimal text reloads to within a binary ulp or two
    d = table.precision + STORE_GUARD_DIGITS
    return format_real(v, d, d)


def _decode(s: str, mode: str, precision: int | None):
    if mode == "exact":
        return qs_parse(s)
    return parse_real(s, precision)


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def table_to_json(table: CoeffTable) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "mode": table.mode,
        "precision": table.precision,
        "A": qs_format(A),
        "n_max": table.n_max,
        "k_max": table.k_max,
        "provenance": table.provenance,
        "u": [[_encode(v, table) for v in row] for row in table.u],
        "mu": [[_encode(v, table) for v in row] for row in table.mu],
        "nu": [[_encode(v, table) for v in row] for row in table.nu],
    }


def table_from_json(doc: dict) -> CoeffTable:
    if doc.get("schema") != SCHEMA_VERSION:
        raise TableError(f"unsupported table schema {doc.get('schema')!r}, expected {SCHEMA_VERSION}")
    mode = doc["mode"]
    if mode not in ("exact", "real"):
        raise TableError(f"unknown table mode {mode!r}")
    P = doc.get("precision")
    rows = {
        fam: [[_decode(s, mode, P) for s in row] for row in doc[fam]]
        for fam in ("u", "mu", "nu")
    }
    return CoeffTable(mode, P, doc["n_max"], doc["k_max"], rows["u"], rows["mu"], rows["nu"],
                      doc.get("provenance", {}))


def table_save(table: CoeffTable, path) -> Path:
    """Write the JSON table atomically (or CSV when ``path`` ends in ``.csv``)."""
    path = Path(path)
    if path.suffix == ".csv":
        _atomic_write(path, table_export_csv(table))
    else:
        _atomic_write(path, json.dumps(table_to_json(table), indent=1) + "\n")
    return path


def table_export_csv(table: CoeffTable) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "family", "value_rat", "value_irr"])
    for fam, rows in (("u", table.u), ("mu", table.mu), ("nu", table.nu)):
        for k, row in enumerate(rows):
            for n, v in enumerate(row):
                if table.mode == "exact":
                    from .qfield import format_rational

                    w.writerow([n, k, fam, format_rational(v.rat), format_rational(v.irr)])
                else:
                    w.writerow([n, k, fam, _encode(v, table), ""])
    return buf.getvalue()


def _table_from_csv(text: str, precision: int | None) -> CoeffTable:
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames != ["n", "k", "family", "value_rat", "value_irr"]:
        raise TableError(f"unexpected CSV header {reader.fieldnames!r}")
    data: dict[str, dict[int, dict[int, str]]] = {"u": {}, "mu": {}, "nu": {}}
    mode = None
    digits = 0
    for rec in reader:
        is_exact = rec["value_irr"] != ""
        this = "exact" if is_exact else "real"
        if mode is None:
            mode = this
        elif mode != this:
            raise TableError("CSV mixes exact and real values")
        if is_exact:
            v = QSqrt3(as_rational(rec["value_rat"]), as_rational(rec["value_irr"]))
        else:
            mant = rec["value_rat"].lstrip("-").split("e")[0].replace(".", "")
            digits = max(digits, len(mant))
            v = rec["value_rat"]
        data[rec["family"]].setdefault(int(rec["k"]), {})[int(rec["n"])] = v
    if mode is None:
        raise TableError("empty CSV table")
    P = precision or (max(digits - STORE_GUARD_DIGITS, 1) if mode == "real" else None)
    k_max = max(data["u"])
    n_max = max(data["u"][0])

    def rows(fam):
        out = []
        for k in range(k_max + 1):
            row = data[fam].get(k, {})
            vals = [row[n] for n in sorted(row)]
            if mode == "real":
                vals = [parse_real(s, P) for s in vals]
            out.append(vals)
        return out

    return CoeffTable(mode, P if mode == "real" else None, n_max, k_max, rows("u"), rows("mu"), rows("nu"))


def table_load(path, precision: int | None = None) -> CoeffTable:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".csv":
        return _table_from_csv(text, precision)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TableError(f"{path}: not a JSON table ({exc})") from exc
    return table_from_json(doc)
