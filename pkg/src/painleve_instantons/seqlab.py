"""Richardson extrapolation, log-aware extraction and the diagnostic sequences.

Conventions used throughout:

* A transform count ``N`` is the total number of Richardson transformations.
  With ``pairing=p`` the levels ``1..N/p`` are run ``p`` times in a row, which
  removes ``log m / m^j`` tails as well as ``1/m^j`` ones.  For log-type
  sequences ``N=10`` therefore means levels 1..5 applied twice.
* Sequences are built from a coefficient table whose horizon is
  ``n <= 2 m_max + 2``; every sequence is taken as far as that data allows and
  an estimate is read at the last index of the transformed sequence.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import mpmath
from gmpy2 import mpq

from .asympt import Constants
from .mpreal import DEFAULT_PRECISION, HalfInt, gamma_half
from .qfield import A, QSqrt3, qs_to_real
from .transseries import BnSeries, CoeffTable, TableError

__all__ = [
    "Acceleration",
    "RealSeq",
    "SEQUENCE_NAMES",
    "StokesEstimates",
    "accelerate",
    "build_diag_seq",
    "diag_target",
    "estimate_c1",
    "estimate_sprime_m1",
    "extract_log_leading",
    "is_stable",
    "log_cancel",
    "plot_rows",
    "richardson",
    "run_report",
]

SEQUENCE_NAMES = ("ank", "nll", "ll", "nllog", "bseq", "bess")


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class RealSeq:
    """Values ``s_{start}, s_{start+1}, ...``."""

    start: int
    values: tuple
    label: str = ""
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        for v in self.values:
            if not mpmath.isfinite(v):
                raise SequenceError(f"non-finite value in sequence {self.label!r}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def stop(self) -> int:
        """Last index."""
        return self.start + len(self.values) - 1

    def __getitem__(self, m: int):
        if not self.start <= m <= self.stop:
            raise IndexError(f"index {m} outside [{self.start}, {self.stop}]")
        return self.values[m - self.start]

    def indices(self) -> range:
        return range(self.start, self.stop + 1)

    def last(self):
        return self.values[-1]

    def map(self, f, label: str | None = None) -> RealSeq:
        with mpmath.workdps(self.precision):
            vals = [f(m, v) for m, v in zip(self.indices(), self.values)]
        return RealSeq(self.start, vals, label or self.label, self.precision)

    def truncate(self, stop: int) -> RealSeq:
        if stop < self.start:
            raise SequenceError("truncation before the first index")
        return RealSeq(self.start, self.values[: stop - self.start + 1], self.label, self.precision)


def _one_level(seq: RealSeq, j: int) -> RealSeq:
    s, n0 = seq.values, seq.start
    with mpmath.workdps(seq.precision):
        out = [s[i + 1] + (n0 + i) * (s[i + 1] - s[i]) / j for i in range(len(s) - 1)]
    return RealSeq(n0, out, seq.label, seq.precision)


def richardson(seq: RealSeq, N: int) -> RealSeq:
    """Levels ``1..N`` of ``s^{(j)}_n = s^{(j-1)}_{n+1} + (n/j)(s^{(j-1)}_{n+1} - s^{(j-1)}_n)``."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if seq.start < 1:
        raise SequenceError("Richardson needs indices n >= 1")
    if len(seq) < N + 2:
        raise SequenceError(f"need at least {N + 2} terms for N={N}, have {len(seq)}")
    for j in range(1, N + 1):
        seq = _one_level(seq, j)
    return seq


def log_cancel(seq: RealSeq) -> RealSeq:
    """``m (l_{m+1} - l_m)``: turns a leading ``a_0 log m`` into the constant ``a_0``."""
    if len(seq) < 2:
        raise SequenceError("log_cancel needs at least 2 terms")
    s, m0 = seq.values, seq.start
    with mpmath.workdps(seq.precision):
        out = [(m0 + i) * (s[i + 1] - s[i]) for i in range(len(s) - 1)]
    return RealSeq(m0, out, seq.label, seq.precision)


@dataclass(frozen=True)
class Acceleration:
    value: mpmath.mpf
    index: int
    N: int
    pairing: int
    stability: mpmath.mpf
    transformed: RealSeq


def _paired(seq: RealSeq, depth: int, pairing: int) -> RealSeq:
    for _ in range(pairing):
        seq = richardson(seq, depth)
    return seq


def accelerate(seq: RealSeq, N: int, pairing: int = 2) -> Acceleration:
    """``N`` transformations in total, as ``pairing`` runs of levels ``1..N/pairing``.

    The stability delta compares depth ``N/pairing`` with depth
    ``N/pairing - 1`` at the last index of the deeper result.
    """
    if pairing < 1 or N < pairing or N % pairing:
        raise ValueError(f"N={N} must be a positive multiple of pairing={pairing}")
    depth = N // pairing
    if len(seq) < N + 2:
        raise SequenceError(f"need at least {N + 2} terms for N={N}, have {len(seq)}")
    deep = _paired(seq, depth, pairing)
    shallow = _paired(seq, depth - 1, pairing)
    idx = deep.stop
    with mpmath.workdps(seq.precision):
        delta = abs(deep[idx] - shallow[idx])
    return Acceleration(deep[idx], idx, N, pairing, delta, deep)


def is_stable(delta, P: int) -> bool:
    return delta < mpmath.mpf(10) ** (3 - mpmath.mpf(P) / 2)


def extract_log_leading(seq: RealSeq, N: int) -> Acceleration:
    """Coefficient ``a_0`` of ``log m`` in ``l_m ~ log m (a_0 + ...) + (b_0 + ...)``.

    Applies :func:`log_cancel` and then levels ``1..N`` twice.
    """
    if len(seq) < 2 * N + 2:
        raise SequenceError(f"need at least {2 * N + 2} terms for N={N}, have {len(seq)}")
    return accelerate(log_cancel(seq), 2 * N, pairing=2)


# --- the diagnostic sequences -------------------------------------------------


def _weight(k: int) -> QSqrt3:
    """``(k-1)^2 12^{2-k}``."""
    return QSqrt3(mpq((k - 1) ** 2 * 144, 12**k))


class _Reals:
    """Late conversion of exact table entries, one conversion per entry."""

    def __init__(self, table: CoeffTable, P: int) -> None:
        self.table = table
        self.P = P
        self._cache: dict = {}

    def __call__(self, family: str, n: int, k: int):
        key = (family, n, k)
        v = self._cache.get(key)
        if v is None:
            getter = {"u": self.table.get_u, "mu": self.table.get_mu, "nu": self.table.get_nu}[family]
            raw = getter(n, k)
            v = qs_to_real(raw, self.P) if isinstance(raw, QSqrt3) else mpmath.mpf(raw)
            self._cache[key] = v
        return v


def _need(table: CoeffTable, n: int, k: int) -> None:
    if not table.covers(n, k):
        raise TableError(f"table n<={table.n_max}, k<={table.k_max} does not cover n={n}, k={k}")


def diag_target(name: str, k: int, constants: Constants, P: int = DEFAULT_PRECISION):
    """Predicted limit of a diagnostic sequence (``None`` for ``ank``)."""
    from .transseries import default_exact

    ts = default_exact()
    with mpmath.workdps(P):
        S = constants.S1_over_2pii
        w = qs_to_real(_weight(k), P) if k >= 1 else None
        if name == "nll":
            return qs_to_real((2 * ts.u(2, 2) + ts.mu(2, 2)) * A * A, P)
        if name == "ll":
            return -2 * S / mpmath.sqrt(3) * w
        if name == "nllog":
            return -mpmath.mpf(8) / 5 * S * (k - 1) * qs_to_real(ts.u(1, k - 1), P)
        if name == "bseq":
            sp = constants.Sprime_m1_over_2pii
            return None if sp is None else sp * w
        if name == "bess":
            sp = constants.Sprime_m1_over_2pii
            if sp is None:
                return None
            a = qs_to_real(A, P)
            x = S * qs_to_real((k + 1) * ts.u(0, k + 1) + ts.mu(0, k + 1), P)
            y = sp * (k - 1) * qs_to_real(ts.u(1, k - 1), P)
            return -a / 2 * (x - y)
        if name == "ank":
            return None
    raise ValueError(f"unknown sequence {name!r}")


def build_diag_seq(
    name: str,
    k: int,
    m_max: int,
    table: CoeffTable,
    constants: Constants | None = None,
    P: int = DEFAULT_PRECISION,
) -> RealSeq:
    """Build one of the diagnostic sequences from table data with ``n <= 2 m_max + 2``.

    ``ank``    ``a_{2m,k} = A^{2m+1/2} u_{2m,k} / Gamma(2m+1/2)``, m = 1..m_max+1
    ``nll``    ``(2m-5/2){(2m-3/2)(u_{2m,1} A^{2m-1/2}/(S Gamma(2m-1/2)) + 2/3) - 2 u_{1,2} A}``
    ``ll``     ``m (a_{2m+2,k} - a_{2m,k})``
    ``nllog``  ``m (b_{m+1} - b_m)`` with ``b_m = m (ll_m - target)``
    ``bseq``   ``a_{2m,k} + S {(2/sqrt3)(k-1)^2 12^{2-k} - A nu_{1,k-1}/(2m)} log(2m)``
    ``bess``   ``m^2 (c_{m+1} - c_m)`` on the ``bseq`` values ``c_m``
    """
    if name not in SEQUENCE_NAMES:
        raise ValueError(f"unknown sequence {name!r}; choose from {', '.join(SEQUENCE_NAMES)}")
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    if name == "nll":
        if k != 1:
            raise ValueError("nll is defined for k = 1")
    elif k < 2:
        raise ValueError(f"{name} needs k >= 2")
    n_top = 2 * m_max + 2
    _need(table, n_top, k if name != "nll" else 2)
    constants = constants or Constants.default(P)
    W = P + 10
    R = _Reals(table, W)
    with mpmath.workdps(W):
        a = qs_to_real(A, W)
        S = mpmath.mpf(constants.S1_over_2pii)
        if name == "nll":
            u12a = R("u", 1, 2) * a
            vals = []
            for m in range(1, m_max + 2):
                g = gamma_half(HalfInt.minus(2 * m), W)
                r = R("u", 2 * m, 1) * a ** (2 * m - mpmath.mpf(1) / 2) / (S * g)
                vals.append((2 * m - mpmath.mpf(5) / 2) * ((2 * m - mpmath.mpf(3) / 2) * (r + mpmath.mpf(2) / 3) - 2 * u12a))
            return _round(RealSeq(1, vals, "nll", W), P)
        ank = [a ** (2 * m + mpmath.mpf(1) / 2) * R("u", 2 * m, k) / gamma_half(HalfInt.plus(2 * m), W)
               for m in range(1, m_max + 2)]
        ell = RealSeq(1, ank, f"ank k={k}", W)
        if name == "ank":
            return _round(ell, P)
        if name in ("ll", "nllog"):
            ll = log_cancel(ell)
            if name == "ll":
                return _round(RealSeq(1, ll.values, f"ll k={k}", W), P)
            t = -2 * S / mpmath.sqrt(3) * qs_to_real(_weight(k), W)
            b = ll.map(lambda m, v: m * (v - t))
            return _round(RealSeq(1, log_cancel(b).values, f"nllog k={k}", W), P)
        nu0 = qs_to_real(_weight(k), W) * 2 / mpmath.sqrt(3)
        nu1 = R("nu", 1, k - 1)
        c = ell.map(lambda m, v: v + S * (nu0 - a * nu1 / (2 * m)) * mpmath.log(2 * m), f"bseq k={k}")
        if name == "bseq":
            return _round(c, P)
        s = c.values
        d = [(m * m) * (s[m] - s[m - 1]) for m in range(1, len(s))]
        return _round(RealSeq(1, d, f"bess k={k}", W), P)


def _round(seq: RealSeq, P: int) -> RealSeq:
    with mpmath.workdps(P):
        return RealSeq(seq.start, [+v for v in seq.values], seq.label, P)


# pairing used for each sequence: the ones with log tails need two passes
SEQUENCE_PAIRING = {"nll": 1, "ank": 2, "ll": 2, "nllog": 2, "bseq": 2, "bess": 2}


# --- Stokes constants ---------------------------------------------------------


@dataclass(frozen=True)
class Estimate:
    value: mpmath.mpf
    m_used: int
    N_used: int
    stability: mpmath.mpf


@dataclass
class StokesEstimates:
    """Numerical Stokes data, each with ``(m_used, N_used, stability)``.

    ``Sm1`` is derived from ``Sprime_m1`` at construction, never estimated
    separately.
    """

    S1: mpmath.mpf
    Sprime_m1: Estimate | None = None
    Sm1: mpmath.mpf | None = None
    c1: dict = field(default_factory=dict)
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        if self.Sprime_m1 is not None:
            with mpmath.workdps(self.precision + 10):
                lnA = mpmath.log(qs_to_real(A, self.precision + 10))
                sm1 = self.Sprime_m1.value - 2 * lnA / mpmath.sqrt(3) * self.S1
            with mpmath.workdps(self.precision):
                self.Sm1 = +sm1

    def constants(self) -> Constants:
        sp = None if self.Sprime_m1 is None else self.Sprime_m1.value
        return Constants(self.precision, Sprime_m1_over_2pii=sp,
                         c1={g: e.value for g, e in self.c1.items()})


def estimate_sprime_m1(
    table: CoeffTable,
    constants: Constants | None = None,
    k: int = 2,
    m_max: int = 250,
    N: int = 10,
    P: int = DEFAULT_PRECISION,
) -> Estimate:
    """``S'_{-1}/(2 pi i)`` from the constant term of the ``bseq`` sequence."""
    c = build_diag_seq("bseq", k, m_max, table, constants, P)
    acc = accelerate(c, N, pairing=2)
    with mpmath.workdps(P):
        w = qs_to_real(_weight(k), P)
        return Estimate(acc.value / w, m_max, N, acc.stability / w)


def estimate_c1(gamma, n_max: int = 200, N: int = 10, P: int = DEFAULT_PRECISION, pairing: int = 1) -> Estimate:
    """``c_1/i`` from ``-(-1)^n b_n^- 2 pi (2B)^n / Gamma(n)``, Richardson-accelerated.

    The returned number is real: ``b_n^- ~ i (-1)^n c_1 (2B)^{-n} Gamma(n) / (2 pi)``.
    """
    from .transseries import _exact_gamma

    g = _exact_gamma(gamma)
    with mpmath.workdps(P):
        gv = mpmath.mpf(g.numerator) / g.denominator if g is not None else mpmath.mpf(gamma)
    if not 0 < gv < 3:
        raise ValueError("estimate_c1 needs 0 < gamma < 3")
    series = BnSeries(gamma, "-", "auto", P + 20)
    W = P + 20
    with mpmath.workdps(W):
        B2 = 2 * (qs_to_real(series.B_abs, W) if isinstance(series.B_abs, QSqrt3) else series.B_abs)
        two_pi = 2 * mpmath.pi
        vals = []
        fact = mpmath.mpf(1)
        power = B2
        for n in range(1, n_max + 1):
            if n > 1:
                fact *= n - 1
                power *= B2
            bn = series.coeff(n)
            bn = qs_to_real(bn, W) if isinstance(bn, QSqrt3) else bn
            sign = -1 if n % 2 else 1
            vals.append(-sign * bn * two_pi * power / fact)
        acc = accelerate(RealSeq(1, vals, f"c1 gamma={gamma}", W), N, pairing)
    with mpmath.workdps(P):
        return Estimate(+acc.value, n_max, N, +acc.stability)


# --- reports and plot data ----------------------------------------------------


def run_report(name: str, k: int, m_max: int, N: int, acc: Acceleration, target=None, digits: int = 30) -> dict:
    doc = {
        "sequence": name,
        "k": k,
        "m_range": [1, m_max],
        "N": N,
        "pairing": acc.pairing,
        "index": acc.index,
        "estimate": mpmath.nstr(acc.value, digits),
        "stability": mpmath.nstr(acc.stability, 5),
    }
    if target is not None:
        doc["target"] = mpmath.nstr(target, digits)
        doc["abs_error"] = mpmath.nstr(abs(acc.value - target), 5)
    return doc


def plot_rows(seq: RealSeq, pairing: int = 2) -> list[tuple]:
    """``(m, raw, R2, R4)`` rows; the transforms follow the sequence's pairing.

    R2 and R4 are the 2nd and 4th Richardson transforms in total, i.e. one and
    two levels run ``pairing`` times when ``pairing = 2``.
    """
    if pairing not in (1, 2):
        raise ValueError("plot data supports pairing 1 or 2")
    r2 = _paired(seq, 2 // pairing, pairing)
    r4 = _paired(seq, 4 // pairing, pairing)
    rows = []
    for m in seq.indices():
        rows.append((m, seq[m], r2[m] if m <= r2.stop else None, r4[m] if m <= r4.stop else None))
    return rows


def plot_csv(seq: RealSeq, pairing: int = 2, digits: int = 20) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "raw", "R2", "R4"])
    for m, raw, r2, r4 in plot_rows(seq, pairing):
        w.writerow([m] + ["" if v is None else mpmath.nstr(v, digits) for v in (raw, r2, r4)])
    return buf.getvalue()


def report_json(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
