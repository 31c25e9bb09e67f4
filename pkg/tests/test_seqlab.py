from __future__ import annotations

import math

import mpmath
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_instantons.asympt import Constants
from painleve_instantons.seqlab import (
    SEQUENCE_PAIRING,
    RealSeq,
    SequenceError,
    StokesEstimates,
    accelerate,
    build_diag_seq,
    diag_target,
    estimate_c1,
    estimate_sprime_m1,
    extract_log_leading,
    is_stable,
    log_cancel,
    plot_csv,
    plot_rows,
    richardson,
    run_report,
)
from painleve_instantons.transseries import TableError, table_build

P = 60


def _seq(f, n_max, start=1, prec=P):
    with mpmath.workdps(prec):
        return RealSeq(start, [f(mpmath.mpf(n)) for n in range(start, n_max + 1)], "t", prec)


def test_richardson_constant_and_first_order():
    s = _seq(lambda n: mpmath.mpf(7), 10)
    assert all(v == 7 for v in richardson(s, 3).values)
    r = richardson(_seq(lambda n: 1 + 1 / n, 10), 1)
    with mpmath.workdps(P):
        assert all(abs(v - 1) < mpmath.mpf(10) ** -55 for v in r.values)


def test_richardson_on_factorial_tail():
    f = lambda n: mpmath.fsum(math.factorial(k) / n**k for k in range(0, 12))
    s = _seq(f, 30)
    r = richardson(s, 5)
    with mpmath.workdps(P):
        raw, acc = abs(s[30] - 1), abs(r[r.stop] - 1)
    # the 6! / n^6 term is the first one left over
    assert raw > mpmath.mpf("0.03") and acc < raw / 1000


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=8), st.integers(1, 20))
def test_richardson_is_exact_on_polynomial_tails(cs, start):
    # N levels annihilate 1/n, ..., 1/n^N exactly on rational data
    N = len(cs) - 1
    vals = [sum(mpq(c, n**j) for j, c in enumerate(cs)) for n in range(start, start + N + 4)]
    out = richardson(RealSeq(start, vals, "poly", P), N)
    assert all(v == cs[0] for v in out.values)


def test_richardson_rejects_short_or_bad_sequences():
    with pytest.raises(SequenceError):
        richardson(_seq(lambda n: n, 4), 3)
    with pytest.raises(SequenceError):
        richardson(RealSeq(0, [1, 2, 3, 4], "z", P), 1)
    with pytest.raises(ValueError):
        richardson(_seq(lambda n: n, 4), -1)
    with pytest.raises(ValueError):
        accelerate(_seq(lambda n: n, 40), 5, pairing=2)
    with pytest.raises(SequenceError):
        RealSeq(1, [mpmath.mpf(1), mpmath.inf], "bad", P)


def test_log_cancel():
    s = _seq(lambda n: 3 * mpmath.log(n) + 2, 40)
    lc = log_cancel(s)
    assert len(lc) == len(s) - 1 and lc.start == 1
    acc = accelerate(lc, 10, pairing=2)
    with mpmath.workdps(P):
        # m log(1 + 1/m) has an infinite 1/m tail, so only limited accuracy is expected
        assert abs(acc.value - 3) < mpmath.mpf(10) ** -9
    with pytest.raises(SequenceError):
        log_cancel(RealSeq(1, [mpmath.mpf(1)], "one", P))


def _logasym(a0, m_max):
    def f(m):
        lm = mpmath.log(m)
        return lm * (a0 + mpmath.mpf(1) / (3 * m) - 2 / m**2) + (5 - 1 / m + mpmath.mpf(1) / (7 * m**3))
    return _seq(f, m_max)


@pytest.mark.parametrize("N", [2, 4, 5])
def test_log_leading_recovery_improves_with_m(N):
    e1 = abs(extract_log_leading(_logasym(7, 50), N).value - 7)
    e2 = abs(extract_log_leading(_logasym(7, 100), N).value - 7)
    assert e2 * 10 <= e1


def test_log_leading_recovery_accuracy():
    acc = extract_log_leading(_logasym(7, 200), 5)
    assert abs(acc.value - 7) < mpmath.mpf(10) ** -11
    with pytest.raises(SequenceError):
        extract_log_leading(_logasym(7, 10), 5)


def test_accelerate_reports_last_index_and_stability():
    s = _seq(lambda n: 2 + 1 / n + 1 / n**3, 30)
    acc = accelerate(s, 4, pairing=2)
    assert acc.index == acc.transformed.stop == 30 - 4
    assert acc.N == 4 and acc.pairing == 2
    single = accelerate(s, 4, pairing=1)
    assert single.index == 26 and single.stability < mpmath.mpf(10) ** -5
    exact = accelerate(_seq(lambda n: 2 + 1 / n - 4 / n**2, 30), 3, pairing=1)
    assert abs(exact.value - 2) < mpmath.mpf(10) ** -50 and is_stable(exact.stability, P)
    assert not is_stable(mpmath.mpf(1), P)


@pytest.fixture(scope="module")
def table():
    return table_build(162, 5, "real", P)


@pytest.fixture(scope="module")
def consts():
    return Constants.default(P, published_sm1=True)


def test_diag_sequences_reach_their_targets(table, consts):
    for name, k, tol in (("ll", 5, "1e-8"), ("ll", 2, "1e-9"), ("nllog", 2, "1e-6"), ("bess", 2, "1e-8")):
        seq = build_diag_seq(name, k, 80, table, consts, P)
        acc = accelerate(seq, 10, SEQUENCE_PAIRING[name])
        target = diag_target(name, k, consts, P)
        assert abs(acc.value - target) < mpmath.mpf(tol), (name, k)


def test_targets_match_quoted_values(consts):
    with mpmath.workdps(P):
        assert abs(diag_target("ll", 5, consts, P) - mpmath.mpf("0.00063174400034")) < mpmath.mpf("1e-14")
        assert abs(diag_target("bess", 2, consts, P) - mpmath.mpf("-0.002295145874084")) < mpmath.mpf("1e-14")
        assert abs(diag_target("nll", 1, consts, P) + mpmath.mpf(55) / 96) < mpmath.mpf(10) ** -50
    assert diag_target("ank", 2, consts, P) is None
    assert diag_target("bseq", 2, Constants.default(P), P) is None


def test_ank_parity(table):
    # the even-n subsequence of a_{n,k} settles without the (-1)^n oscillation
    seq = build_diag_seq("ank", 2, 80, table, None, P)
    assert seq.start == 1 and len(seq) == 81
    diffs = [seq[m + 1] - seq[m] for m in range(60, 80)]
    assert all(d > 0 for d in diffs) or all(d < 0 for d in diffs)


def test_nll_reaches_minus_55_over_96(table):
    seq = build_diag_seq("nll", 1, 80, table, None, P)
    acc = accelerate(seq, 10, pairing=1)
    assert abs(acc.value + mpmath.mpf(55) / 96) < mpmath.mpf("1e-8")


def test_sprime_estimate(table):
    est = estimate_sprime_m1(table, Constants.default(P), 2, 80, 10, P)
    assert abs(est.value - mpmath.mpf("0.31873285573864121")) < mpmath.mpf("1e-8")
    se = StokesEstimates(Constants.default(P).S1_over_2pii, est, precision=P)
    assert abs(se.Sm1 - mpmath.mpf("0.3882786818052856841")) < mpmath.mpf("1e-8")
    assert se.constants().Sm1_over_2pii is not None


def test_diag_seq_errors(table):
    with pytest.raises(ValueError):
        build_diag_seq("nope", 2, 10, table)
    with pytest.raises(ValueError):
        build_diag_seq("nll", 2, 10, table)
    with pytest.raises(ValueError):
        build_diag_seq("ll", 1, 10, table)
    with pytest.raises(ValueError):
        build_diag_seq("ll", 2, 1, table)
    with pytest.raises(TableError):
        build_diag_seq("ll", 2, 100, table)
    with pytest.raises(TableError):
        build_diag_seq("ll", 6, 10, table)


def test_c1_estimate():
    est = estimate_c1("3/4", 200, 5, P)
    assert abs(est.value + 1 / mpmath.sqrt(2)) < mpmath.mpf("1e-10")
    assert est.stability < mpmath.mpf("1e-6")
    for bad in (3, 4, 0, -1):
        with pytest.raises(ValueError):
            estimate_c1(bad, 50, 5, P)


def test_report_and_plot_data():
    s = _seq(lambda n: 2 + 1 / n, 12)
    acc = accelerate(s, 2, pairing=2)
    doc = run_report("ll", 2, 12, 2, acc, target=mpmath.mpf(2))
    assert doc["pairing"] == 2 and doc["index"] == 10 and "abs_error" in doc
    rows = plot_rows(s, 2)
    assert rows[0][0] == 1 and rows[-1][2] is None and len(rows) == 12
    text = plot_csv(s, 1)
    assert text.splitlines()[0] == "m,raw,R2,R4" and len(text.splitlines()) == 13
    with pytest.raises(ValueError):
        plot_rows(s, 3)


def test_ll_limits_for_k_2_to_5(big_table):
    consts = Constants.default(120)
    for k in range(2, 6):
        acc = accelerate(build_diag_seq("ll", k, 250, big_table, consts, 120), 10, pairing=2)
        target = diag_target("ll", k, consts, 120)
        with mpmath.workdps(120):
            assert -mpmath.log10(abs(acc.value / target - 1)) >= 10, k


def test_sprime_from_k3_agrees_with_k2(big_table):
    c = Constants.default(120)
    e2 = estimate_sprime_m1(big_table, c, 2, 250, 10, 120)
    e3 = estimate_sprime_m1(big_table, c, 3, 250, 10, 120)
    with mpmath.workdps(120):
        assert -mpmath.log10(abs(e3.value / e2.value - 1)) >= 10
