"""Verification suites: each check returns measured value, target and verdict."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from decimal import Decimal

import mpmath
from gmpy2 import mpq

from .asympt import Constants, predict_bn, predict_u0, predict_uk
from .qfield import A, QSqrt3, qs_to_real, rational_to_real
from .seqlab import (
    RealSeq,
    accelerate,
    build_diag_seq,
    estimate_c1,
    estimate_sprime_m1,
    extract_log_leading,
    richardson,
    StokesEstimates,
)
from .transseries import (
    BnSeries,
    CoeffTable,
    closed_mu0k,
    closed_u0k,
    closed_u1k,
    default_exact,
    table_build,
    u0_coeff,
)

# printed reference values, with the number of decimals that were quoted
PUBLISHED = {
    "nll": "-0.572916666666666667",
    "ll:2": "0.068228352037087",
    "ll:5": "0.00063174400031",
    "nllog:2": "-0.00426427200235",
    "nllog:5": "-0.000847589866",
    "sprime": "0.31873285573864121",
    "sm1": "0.3882786818052856841",
    "bess:2": "-0.002295145874083",
    "bess:5": "-0.0033633587119",
}

SUITES = ("anchors", "closed-forms", "nll", "ll", "nllog", "stokes", "bess",
          "asymptotic-order", "bn", "regimes", "properties")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    measured: str
    target: str
    tolerance: str
    note: str = ""
    informational: bool = False

    def line(self) -> str:
        tag = "INFO" if self.informational else ("PASS" if self.passed else "FAIL")
        extra = f" ({self.note})" if self.note else ""
        return f"{tag} [{self.suite}] {self.name}: measured {self.measured}, target {self.target}, tol {self.tolerance}{extra}"

    def to_json(self) -> dict:
        return asdict(self)


def last_digit_unit(printed: str) -> mpmath.mpf:
    exp = Decimal(printed).as_tuple().exponent
    return mpmath.mpf(10) ** exp


def digits_agree(x, y, P: int = 200) -> float:
    """Number of matching significant digits, ``-log10 |x/y - 1|``."""
    with mpmath.workdps(P):
        if x == y:
            return float("inf")
        return float(-mpmath.log10(abs(x / y - 1)))


def _s(x, d: int = 22) -> str:
    return mpmath.nstr(x, d)


class Workspace:
    """Lazily built tables shared by the suites of one run."""

    def __init__(self, precision: int = 120, m_max: int = 250, loader=None) -> None:
        if precision < 30:
            raise ValueError("verification runs need precision >= 30")
        self.P = precision
        self.m_max = m_max
        self._loader = loader
        self._real: CoeffTable | None = None
        self.constants = Constants.default(precision)

    def real_table(self) -> CoeffTable:
        if self._real is None:
            need = (2 * self.m_max + 2, 6)
            if self._loader is not None:
                self._real = self._loader("real", self.P, *need)
            else:
                self._real = table_build(*need, mode="real", precision=self.P)
        return self._real


def _printed_check(suite, name, value, key, P) -> Check:
    printed = PUBLISHED[key]
    with mpmath.workdps(P):
        unit = last_digit_unit(printed)
        err = abs(value - mpmath.mpf(printed))
        ok = err <= 2 * unit
    return Check(suite, name, bool(ok), _s(value), printed, f"2 units of {mpmath.nstr(unit, 1)}",
                 f"|diff| = {mpmath.nstr(err, 3)}")


# --- criteria -----------------------------------------------------------------


def suite_anchors(ws: Workspace) -> list[Check]:
    ts = default_exact()
    out = []

    def eq(name, got, want):
        out.append(Check("anchors", name, got == want, str(got), str(want), "exact"))

    eq("u(0,0)", u0_coeff(0), mpq(1))
    eq("u(1,0)", u0_coeff(1), mpq(-1, 48))
    eq("u(0,2)", ts.u(0, 2), QSqrt3(mpq(1, 6)))
    eq("mu(0,2)", ts.mu(0, 2), QSqrt3(-1))
    eq("mu(2,2)", ts.mu(2, 2), QSqrt3(mpq(-75, 512)))
    eq("mu(4,2)", ts.mu(4, 2), QSqrt3(mpq(-300713, 1572864)))
    odd = [n for n in range(1, 201, 2) if not ts.mu(n, 2).is_zero()]
    out.append(Check("anchors", "mu(2n+1,2)=0, n<100", not odd, f"{len(odd)} nonzero", "0 nonzero", "exact"))
    b = BnSeries(12, "-", "exact")
    bad = [n for n in range(101) if b[n] != ts.u(n, 1)]
    out.append(Check("anchors", "b_n^-(12)=u(n,1), n<=100", not bad, f"{len(bad)} mismatches", "0", "exact"))
    eq("(2u(2,2)+mu(2,2))A^2", (2 * ts.u(2, 2) + ts.mu(2, 2)) * A * A, QSqrt3(mpq(-55, 96)))
    return out


def suite_closed_forms(ws: Workspace) -> list[Check]:
    ts = default_exact()
    bad = []
    bad += [f"u0k{k}" for k in range(1, 11) if closed_u0k(k) != ts.u(0, k)]
    bad += [f"u1k{k}" for k in range(2, 11) if closed_u1k(k) != ts.u(1, k)]
    bad += [f"mu0k{k}" for k in range(4, 11) if closed_mu0k(k) != ts.mu(0, k)]
    return [Check("closed-forms", "closed forms, k<=10", not bad, ",".join(bad) or "all equal", "all equal", "exact")]


def suite_nll(ws: Workspace) -> list[Check]:
    tab = ws.real_table()
    out = []
    with mpmath.workdps(ws.P):
        target = mpmath.mpf(-55) / 96
    for m, N in ((250, 10), (200, 5)):
        seq = build_diag_seq("nll", 1, m, tab, ws.constants, ws.P)
        acc = accelerate(seq, N, pairing=1)
        d = digits_agree(acc.value, target)
        out.append(Check("nll", f"nll (m={m}, N={N})", d >= 15, _s(acc.value), PUBLISHED["nll"],
                         ">= 15 digits", f"{d:.1f} digits"))
    # either pair is acceptable; fold into one verdict, keep the rows for reference
    best = any(c.passed for c in out)
    for c in out:
        c.informational = True
    return [Check("nll", "nll -> -55/96 with (200,5) or (250,10)", best,
                  "; ".join(f"{c.name}: {c.note}" for c in out), PUBLISHED["nll"], ">= 15 digits")] + out


def _seq_suite(ws: Workspace, name: str) -> list[Check]:
    tab = ws.real_table()
    consts = ws.constants
    if name == "bess":
        est = estimate_sprime_m1(tab, consts, 2, ws.m_max, 10, ws.P)
        consts = consts.with_sprime(est.value)
    out = []
    for k in (2, 5):
        acc = accelerate(build_diag_seq(name, k, ws.m_max, tab, consts, ws.P), 10, pairing=2)
        out.append(_printed_check(name, f"{name} k={k} (m={ws.m_max}, N=10)", acc.value, f"{name}:{k}", ws.P))
    return out


def suite_ll(ws):
    return _seq_suite(ws, "ll")


def suite_nllog(ws):
    return _seq_suite(ws, "nllog")


def suite_bess(ws):
    return _seq_suite(ws, "bess")


def suite_stokes(ws: Workspace) -> list[Check]:
    tab = ws.real_table()
    est = estimate_sprime_m1(tab, ws.constants, 2, ws.m_max, 10, ws.P)
    st = StokesEstimates(ws.constants.S1_over_2pii, est, precision=ws.P)
    out = []
    with mpmath.workdps(ws.P):
        d1 = digits_agree(est.value, mpmath.mpf(PUBLISHED["sprime"]))
        d2 = digits_agree(st.Sm1, mpmath.mpf(PUBLISHED["sm1"]))
        out.append(Check("stokes", "S'_{-1}/(2 pi i)", d1 >= 13, _s(est.value), PUBLISHED["sprime"], ">= 13 digits", f"{d1:.1f} digits"))
        out.append(Check("stokes", "S_{-1}/(2 pi i) derived", d2 >= 15, _s(st.Sm1), PUBLISHED["sm1"], ">= 15 digits", f"{d2:.1f} digits"))
        lnA = mpmath.log(qs_to_real(A, ws.P))
        resid = abs(est.value - (st.Sm1 + 2 * lnA / mpmath.sqrt(3) * ws.constants.S1_over_2pii))
        tol = mpmath.mpf(10) ** (5 - ws.P)
        out.append(Check("stokes", "S' = S_{-1} + (2 ln A/sqrt3) S_1", resid <= tol, mpmath.nstr(resid, 3), "0", mpmath.nstr(tol, 2)))
    return out


def _slope(xs, ys) -> float:
    lx = [mpmath.log(x) for x in xs]
    ly = [mpmath.log(y) for y in ys]
    n = len(xs)
    mx, my = sum(lx) / n, sum(ly) / n
    return float(sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx))


def asymptotic_slopes(P: int = 40, ns=(50, 71, 100, 141, 200, 283, 400)) -> dict:
    ts = default_exact()
    res = {}
    with mpmath.workdps(P):
        for k in (0, 1):
            for L in (0, 1, 2):
                errs = []
                for n in ns:
                    if k == 0:
                        pred, exact = predict_u0(n, L, P).value, qs_to_real(QSqrt3(u0_coeff(n)), P)
                    else:
                        # one parity so the (-1)^n terms do not alias into the fit
                        n = n + (n % 2)
                        pred, exact = predict_uk(n, 1, L, P).value, qs_to_real(ts.u(n, 1), P)
                    errs.append(abs(pred / exact - 1))
                res[(k, L)] = _slope([mpmath.mpf(n) for n in ns], errs)
    return res


def suite_asymptotic_order(ws: Workspace) -> list[Check]:
    out = []
    for (k, L), s in asymptotic_slopes().items():
        want = -(L + 1)
        out.append(Check("asymptotic-order", f"k={k} L={L} slope", abs(s - want) <= 0.3, f"{s:.3f}", str(want), "+-0.3"))
    return out


def bn_ratio_limit(gamma, n_max: int = 300, N: int = 10, P: int = 60):
    """Richardson limit of ``b_n^-/prediction`` on each parity, up to ``n_max``."""
    b = BnSeries(gamma, "-")
    res = {}
    with mpmath.workdps(P):
        for par in (0, 1):
            vals = []
            m = 1
            while 2 * m + par <= n_max:
                n = 2 * m + par
                bn = b[n]
                bn = qs_to_real(bn, P + 20) if isinstance(bn, QSqrt3) else bn
                vals.append(bn / predict_bn(n, gamma, P=P + 20).value)
                m += 1
            res["even" if par == 0 else "odd"] = accelerate(RealSeq(1, vals, "ratio", P), N, pairing=1)
    return res


def suite_bn(ws: Workspace) -> list[Check]:
    out = []
    for g in (4, 12):
        for par, acc in bn_ratio_limit(g).items():
            dev = abs(acc.value - 1)
            out.append(Check("bn", f"gamma={g} {par} n<=300", dev < mpmath.mpf("1e-8"), mpmath.nstr(acc.value, 15), "1", "1e-8"))
    with mpmath.workdps(80):
        worst = mpmath.mpf(0)
        for n in (10, 11, 1000, 1001):
            r = predict_bn(n, 12, P=80).value / predict_uk(n, 1, 0, 80).value
            worst = max(worst, abs(r - 1))
    out.append(Check("bn", "gamma=12 prefactor = k=1 leading term", worst < mpmath.mpf(10) ** -60,
                     mpmath.nstr(worst, 3), "0", "1e-60"))
    return out


def threshold_errors(pairs=((100, 400), (101, 401), (50, 200)), P: int = 40) -> list:
    b = BnSeries(3, "-")
    out = []
    with mpmath.workdps(P):
        for n1, n2 in pairs:
            e1 = abs(qs_to_real(b[n1], P) / predict_bn(n1, 3, P=P).value - 1)
            e2 = abs(qs_to_real(b[n2], P) / predict_bn(n2, 3, P=P).value - 1)
            out.append((n1, n2, e1, e2))
    return out


def suite_regimes(ws: Workspace) -> list[Check]:
    out = []
    for n1, n2, e1, e2 in threshold_errors():
        r = e1 / e2
        out.append(Check("regimes", f"gamma=3 error ratio n={n1}->{n2}", abs(r - 2) < 0.05,
                         mpmath.nstr(r, 6), "2", "+-0.05"))
    for g in ("3/4", 2):
        est = estimate_c1(g, 200, 5, 60)
        out.append(Check("regimes", f"c1 stability gamma={g} (n=200, N=5)", est.stability < mpmath.mpf("1e-6"),
                         mpmath.nstr(est.stability, 3), "< 1e-6", "1e-6", f"c1/i = {mpmath.nstr(est.value, 15)}"))
    return out


def richardson_roundoff_ulp(vals, N: int, c0, P: int, guard: int = 20) -> float:
    """Worst error in ulp of a ``P``-digit Richardson output from exactly known data."""
    seq = RealSeq(1, [rational_to_real(v, P + guard) for v in vals], "poly", P + guard)
    out = richardson(seq, N)
    with mpmath.workdps(P):
        c = rational_to_real(c0, P)
        worst = 0.0
        for v in out.values:
            v = +v
            ulp = mpmath.mpf(2) ** (mpmath.floor(mpmath.log(abs(c), 2)) - mpmath.mp.prec + 1) if c else mpmath.mpf(2) ** -mpmath.mp.prec
            worst = max(worst, float(abs(v - c) / ulp))
    return worst


def suite_properties(ws: Workspace, cases: int = 10_000, seed: int = 20240601) -> list[Check]:
    rng = random.Random(seed)

    def rq():
        return mpq(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))

    def rx():
        return QSqrt3(rq(), rq())

    bad = 0
    zero, one = QSqrt3(), QSqrt3(1)
    for _ in range(cases):
        x, y, z = rx(), rx(), rx()
        ok = (x + y == y + x and x * y == y * x and (x + y) + z == x + (y + z)
              and (x * y) * z == x * (y * z) and x * (y + z) == x * y + x * z
              and x + zero == x and x * one == x and x + (-x) == zero)
        if not x.is_zero():
            ok = ok and x * x.inverse() == one
        bad += not ok
    out = [Check("properties", f"field axioms ({cases} cases)", bad == 0, f"{bad} failures", "0", "exact")]

    inexact = 0
    worst_ulp = 0.0
    P = 50
    for N in range(1, 11):
        cs = [mpq(rng.randint(-99, 99), rng.randint(1, 9)) for _ in range(N + 1)]
        vals = [sum(c / mpq(n) ** j for j, c in enumerate(cs)) for n in range(1, N + 12)]
        inexact += any(v != cs[0] for v in richardson(RealSeq(1, vals, "poly"), N).values)
        worst_ulp = max(worst_ulp, richardson_roundoff_ulp(vals, N, cs[0], P))
    out.append(Check("properties", "Richardson exact on polynomial tails (rational data)", inexact == 0,
                     f"{inexact} inexact", "0", "exact"))
    out.append(Check("properties", "Richardson on polynomial tails (P-digit output)", worst_ulp <= 8,
                     f"{worst_ulp:.2f} ulp", "0", "8 ulp"))

    P = 60
    with mpmath.workdps(P):
        a0 = mpmath.mpf(7)
        vals = []
        for m in range(1, 201):
            mm = mpmath.mpf(m)
            s = a0 + 2 / mm - 3 / mm**2 + 5 / mm**3
            t = mpmath.mpf(-1) + 4 / mm + 1 / mm**2
            vals.append(mpmath.log(mm) * s + t)
        acc = extract_log_leading(RealSeq(1, vals, "logasym", P), 5)
        d = digits_agree(acc.value, a0)
        out.append(Check("properties", "synthetic log-leading recovery (m=200, N=5 paired)", d >= 12, _s(acc.value), "7", ">= 12 digits", f"{d:.1f} digits"))

    exact = default_exact()
    from .transseries import Transseries

    real = Transseries("real", ws.P)
    worst_ulp = 0.0
    with mpmath.workdps(ws.P):
        for k in range(0, 5):
            for n in range(0, 101):
                for fam in ("u", "mu"):
                    if fam == "mu" and k == 0:
                        continue
                    e = getattr(exact, fam)(n, k)
                    r = getattr(real, fam)(n, k)
                    ev = qs_to_real(e, ws.P)
                    if ev == 0:
                        if r != 0:
                            worst_ulp = float("inf")
                        continue
                    ulp = mpmath.mpf(2) ** (mpmath.floor(mpmath.log(abs(ev), 2)) - mpmath.mp.prec + 1)
                    worst_ulp = max(worst_ulp, float(abs(r - ev) / ulp))
    out.append(Check("properties", "exact vs real tables, n<=100, k<=4", worst_ulp <= 10, f"{worst_ulp:.2f} ulp", "0", "10 ulp"))
    return out


RUNNERS = {
    "anchors": suite_anchors,
    "closed-forms": suite_closed_forms,
    "nll": suite_nll,
    "ll": suite_ll,
    "nllog": suite_nllog,
    "stokes": suite_stokes,
    "bess": suite_bess,
    "asymptotic-order": suite_asymptotic_order,
    "bn": suite_bn,
    "regimes": suite_regimes,
    "properties": suite_properties,
}


def run_suite(name: str, ws: Workspace) -> list[Check]:
    if name == "all":
        return [c for s in SUITES for c in RUNNERS[s](ws)]
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from all, {', '.join(SUITES)}")
    return RUNNERS[name](ws)
