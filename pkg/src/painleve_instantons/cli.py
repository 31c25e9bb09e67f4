"""Command-line front end.

    python -m painleve_instantons gen --nmax 200 --kmax 6
    python -m painleve_instantons predict --k 1 --n 7 --terms 2
    python -m painleve_instantons verify --suite stokes
    python -m painleve_instantons export --figure twoll --out twoll.csv

Exit codes: 0 success, 1 a verification criterion failed, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import re
import sys
from pathlib import Path

import mpmath

from . import __version__
from .asympt import Constants, SM1_OVER_2PII_PUBLISHED, predict_bn, predict_u0, predict_uk
from .mpreal import DEFAULT_PRECISION
from .qfield import QSqrt3, qs_to_real
from .seqlab import SEQUENCE_PAIRING, build_diag_seq, plot_rows
from .transseries import (
    SCHEMA_VERSION,
    BnSeries,
    TableError,
    _atomic_write,
    default_exact,
    table_build,
    table_export_csv,
    table_load,
    table_save,
    table_to_json,
)

log = logging.getLogger("painleve_instantons")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
CACHE_ENV = "PAINLEVE_CACHE_DIR"

FIGURES = {
    "teststrange": ("nll", 1),
    "twoll": ("ll", 2),
    "fivell": ("ll", 5),
    "twonllog": ("nllog", 2),
    "fivenllog": ("nllog", 5),
    "fourl": ("bess", 2),
    "fourl2": ("bess", 5),
}


class UsageError(Exception):
    pass


class CacheMissing(OSError):
    pass


# --- table cache --------------------------------------------------------------


def cache_dir(arg: str | None) -> Path:
    if arg:
        return Path(arg)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "painleve_instantons"


def param_hash(mode: str, precision: int | None, n_max: int, k_max: int) -> str:
    key = json.dumps({"schema": SCHEMA_VERSION, "mode": mode, "precision": precision,
                      "n_max": n_max, "k_max": k_max}, sort_keys=True)
    return hashlib.sha256(key.encode()).hexdigest()[:12]


_NAME = re.compile(r"table-(exact|real)-p(\d+|x)-n(\d+)-k(\d+)-([0-9a-f]{12})\.json$")


def _table_name(mode: str, precision: int | None, n_max: int, k_max: int) -> str:
    p = "x" if precision is None else str(precision)
    return f"table-{mode}-p{p}-n{n_max}-k{k_max}-{param_hash(mode, precision, n_max, k_max)}.json"


def find_cached(root: Path, mode: str, precision: int | None, n_max: int, k_max: int) -> Path | None:
    """Smallest cached table of the same mode and precision covering the request."""
    if not root.is_dir():
        return None
    want_p = "x" if precision is None else str(precision)
    best = None
    for path in sorted(root.glob("table-*.json")):
        m = _NAME.match(path.name)
        if not m or m.group(1) != mode or m.group(2) != want_p:
            continue
        n, k = int(m.group(3)), int(m.group(4))
        if m.group(5) != param_hash(mode, precision, n, k):
            continue
        if n >= n_max and k >= k_max and (best is None or (n, k) < best[0]):
            best = ((n, k), path)
    return best[1] if best else None


def ensure_table(root: Path, mode: str, precision: int, n_max: int, k_max: int, allow_gen: bool = True):
    """Return ``(table, path, hit)``; generates and caches on a miss."""
    prec = precision if mode == "real" else None
    hit = find_cached(root, mode, prec, n_max, k_max)
    if hit is not None:
        log.info("cache hit %s", hit)
        return table_load(hit), hit, True
    if not allow_gen:
        raise CacheMissing(f"no cached {mode} table covering n<={n_max}, k<={k_max} in {root}")
    log.info("generating %s table n<=%d k<=%d", mode, n_max, k_max)
    table = table_build(n_max, k_max, mode, precision)
    path = root / _table_name(mode, prec, n_max, k_max)
    table_save(table, path)
    return table, path, False


# --- commands -----------------------------------------------------------------


def _write_out(path: str | None, text: str) -> None:
    if path:
        _atomic_write(Path(path), text)


def cmd_gen(args) -> int:
    root = cache_dir(args.cache_dir)
    table, path, hit = ensure_table(root, args.mode, args.precision, args.nmax, args.kmax)
    print(f"{'cache hit' if hit else 'generated'}: {path}")
    if args.out:
        out = Path(args.out)
        if out.suffix == ".csv":
            _atomic_write(out, table_export_csv(table))
        else:
            _atomic_write(out, json.dumps(table_to_json(table), indent=1) + "\n")
        print(f"wrote {out}")
    return EXIT_OK


def _constants(args) -> Constants:
    P = args.precision
    with mpmath.workdps(P):
        if args.sm1 is not None:
            return Constants(P, Sm1_over_2pii=mpmath.mpf(args.sm1))
        if args.sprime is not None:
            return Constants(P, Sprime_m1_over_2pii=mpmath.mpf(args.sprime))
    return Constants.default(P, published_sm1=args.published_sm1)


def cmd_predict(args) -> int:
    P = args.precision
    if (args.k is None) == (args.gamma is None):
        raise UsageError("give exactly one of --k or --gamma")
    consts = _constants(args)
    exact = None
    if args.gamma is not None:
        gamma = _parse_gamma(args.gamma)
        pred = predict_bn(args.n, gamma, consts, P, c1=args.c1, shape_only=args.c1 is None)
        b = BnSeries(gamma, "-", "auto", P)
        exact = b.coeff(args.n)
        what = f"b_{args.n}^-({args.gamma})"
    elif args.k == 0:
        pred = predict_u0(args.n, args.terms, P)
        exact = default_exact().u(args.n, 0)
        what = f"u({args.n},0)"
    else:
        pred = predict_uk(args.n, args.k, args.terms, P, consts)
        exact = default_exact().u(args.n, args.k)
        what = f"u({args.n},{args.k})"
    doc = pred.to_json()
    with mpmath.workdps(P):
        ev = qs_to_real(exact, P) if isinstance(exact, QSqrt3) else exact
        rel = abs(pred.value / ev - 1) if ev else None
    doc["exact"] = mpmath.nstr(ev, 30)
    doc["relative_error"] = None if rel is None else mpmath.nstr(rel, 6)
    print(f"{what} ~ {mpmath.nstr(pred.value, 25)}  [{pred.parity}"
          f"{', ' + pred.regime if pred.regime else ''}, L={pred.L}]")
    for lab, v in pred.terms:
        print(f"  {lab:>10s}  {mpmath.nstr(v, 20)}")
    print(f"exact     {mpmath.nstr(ev, 25)}")
    if rel is not None:
        print(f"rel. err  {mpmath.nstr(rel, 6)}")
    _write_out(args.out, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return EXIT_OK


def _parse_gamma(text: str):
    from fractions import Fraction

    try:
        return Fraction(text) if "." not in text and "e" not in text.lower() else text
    except ValueError as exc:
        raise UsageError(f"bad --gamma {text!r}") from exc


def cmd_verify(args) -> int:
    from .suites import Workspace, run_suite

    if args.precision < 30:
        raise UsageError("verification needs --precision >= 30")
    root = cache_dir(args.cache_dir)

    def loader(mode, P, n, k):
        return ensure_table(root, mode, P, n, k, allow_gen=not args.no_gen)[0]

    ws = Workspace(args.precision, args.mmax, loader)
    checks = run_suite(args.suite, ws)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.informational and not c.passed]
    summary = {"suite": args.suite, "precision": args.precision, "m_max": args.mmax,
               "passed": not failed, "checks": [c.to_json() for c in checks]}
    _write_out(args.out, json.dumps(summary, indent=1, sort_keys=True) + "\n")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


def figure_csv(name: str, m_max: int, table, precision: int, digits: int = 20) -> str:
    seq_name, k = FIGURES[name]
    seq = build_diag_seq(seq_name, k, m_max, table, None, precision)
    rows = plot_rows(seq, SEQUENCE_PAIRING[seq_name])
    lines = ["m,raw,R2,R4"]
    for m, raw, r2, r4 in rows:
        lines.append(",".join([str(m)] + ["" if v is None else mpmath.nstr(v, digits) for v in (raw, r2, r4)]))
    return "\n".join(lines) + "\n"


def figure_json(name: str, m_max: int, table, precision: int, digits: int = 20) -> str:
    seq_name, k = FIGURES[name]
    seq = build_diag_seq(seq_name, k, m_max, table, None, precision)
    rows = plot_rows(seq, SEQUENCE_PAIRING[seq_name])
    doc = {"figure": name, "sequence": seq_name, "k": k, "m_max": m_max,
           "columns": ["m", "raw", "R2", "R4"],
           "rows": [[m] + [None if v is None else mpmath.nstr(v, digits) for v in (raw, r2, r4)]
                    for m, raw, r2, r4 in rows]}
    return json.dumps(doc, indent=1) + "\n"


def cmd_export(args) -> int:
    root = cache_dir(args.cache_dir)
    if (args.table is None) == (args.figure is None):
        raise UsageError("give exactly one of --table or --figure")
    if args.figure is not None:
        if args.figure not in FIGURES:
            raise UsageError(f"unknown figure {args.figure!r}; choose from {', '.join(FIGURES)}")
        table, _, _ = ensure_table(root, "real", args.precision, 2 * args.mmax + 2, 6)
        fmt = args.format or (Path(args.out).suffix.lstrip(".") if args.out else "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"unknown format {fmt!r}")
        text = (figure_csv if fmt == "csv" else figure_json)(args.figure, args.mmax, table, args.precision)
    else:
        table, _, _ = ensure_table(root, args.mode, args.precision, args.nmax, args.kmax)
        if args.table == "csv":
            text = table_export_csv(table)
        else:
            text = json.dumps(table_to_json(table), indent=1) + "\n"
    if args.out:
        _atomic_write(Path(args.out), text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="painleve-instantons", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, precision=DEFAULT_PRECISION):
        sp.add_argument("--precision", type=int, default=precision, help="decimal digits (default %(default)s)")
        sp.add_argument("--cache-dir", help=f"table cache (default ${CACHE_ENV} or ~/.cache/painleve_instantons)")
        sp.add_argument("--out", help="write machine-readable output here")

    g = sub.add_parser("gen", help="generate (or reuse) a coefficient table")
    common(g)
    g.add_argument("--nmax", type=int, default=200)
    g.add_argument("--kmax", type=int, default=6)
    g.add_argument("--mode", choices=("exact", "real"), default="exact")
    g.set_defaults(func=cmd_gen)

    pr = sub.add_parser("predict", help="large-order prediction for u(n,k) or b_n^-(gamma)")
    common(pr, 40)
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--k", type=int)
    pr.add_argument("--gamma")
    pr.add_argument("--terms", type=int, default=0, help="truncation L (default 0)")
    pr.add_argument("--sm1", help="S_{-1}/(2 pi i) for k >= 2")
    pr.add_argument("--sprime", help="S'_{-1}/(2 pi i) for k >= 2")
    pr.add_argument("--published-sm1", action="store_true",
                    help=f"use the quoted S_{{-1}}/(2 pi i) = {SM1_OVER_2PII_PUBLISHED}")
    pr.add_argument("--c1", help="c1/i for gamma < 3 (omit for the unit-c1 shape)")
    pr.set_defaults(func=cmd_predict)

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--suite", default="all")
    v.add_argument("--mmax", type=int, default=250)
    v.add_argument("--no-gen", action="store_true", help="fail instead of generating missing tables")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="export a table or figure plot data")
    common(e)
    e.add_argument("--table", choices=("json", "csv"))
    e.add_argument("--figure")
    e.add_argument("--format", choices=("csv", "json"))
    e.add_argument("--mmax", type=int, default=200)
    e.add_argument("--nmax", type=int, default=200)
    e.add_argument("--kmax", type=int, default=6)
    e.add_argument("--mode", choices=("exact", "real"), default="exact")
    e.set_defaults(func=cmd_export)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError, TableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc, TableError) else EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
