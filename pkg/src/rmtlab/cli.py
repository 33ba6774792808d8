"""Command-line front end.

Exit codes: 0 success / verified, 1 a verification or assertion failed,
2 usage or precondition error.
"""

import argparse
import csv
import io
import json
import logging
import sys

from . import bounds, experiments, inequalities
from .distributions import TailCondition, canonical_spec
from .errors import InfeasibleParametersError, PreconditionError, ResourceError
from .matrix import EnsembleConfig
from .montecarlo import DEFAULT_CONFIDENCE, check_spec_range, estimate, simulate, write_jsonl
from .rng import stream

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _csv_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def rows_to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row[c]) for c in columns])
    return buf.getvalue()


def _write_text(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _float_list(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _int_list(text):
    return [int(v) for v in text.replace(",", " ").split()]


def cmd_bound(args):
    if not args.K >= 1:
        raise UsageError("K must be ≥ 1")
    if args.p > args.n:
        raise UsageError("p ≤ n required")
    spec = canonical_spec(args.alpha, args.t_max)
    tail = TailCondition(args.alpha, args.c0) if args.c0 is not None else None
    check_spec_range(spec, args.n, args.K)
    report = bounds.bound_report(args.p, args.n, args.K, spec, tail)
    _dump(report.to_dict())
    return EXIT_OK


def load_grid(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read grid file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("grid file must hold a JSON object")
    return experiments.GridConfig.from_dict(data)


def cmd_verify(args):
    grid = load_grid(args.grid)
    result = experiments.run_grid(grid, threads=args.threads)
    _write_text(rows_to_csv(result.rows, experiments.CSV_COLUMNS), args.out)
    if args.json_out:
        _dump({"grid": grid.__dict__, "cells": result.rows,
               "verdicts": [v.to_dict() for v in result.verdicts]}, args.json_out)
    failed = [r for r in result.rows if not r["pass"]]
    for r in failed:
        print(f"FAIL alpha={r['alpha']} p={r['p']} n={r['n']} K={r['K']}", file=sys.stderr)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_simulate(args):
    spec = experiments.entry_spec(args.dist, args.alpha, args.t_max)
    for K in args.K:
        if not K >= 1:
            raise UsageError("K must be ≥ 1")
        check_spec_range(spec, args.n, K)
    config = EnsembleConfig(args.p, args.n, spec, args.seed)
    statistics = simulate(config, args.trials, threads=args.threads)
    if args.jsonl:
        write_jsonl(statistics, args.jsonl)
    per_K = []
    for K in args.K:
        lam, row = estimate(statistics, args.n, K, args.confidence)
        per_K.append({
            "K": K,
            "bound_report": bounds.bound_report(args.p, args.n, K, spec).to_dict(),
            "estimates": [lam.to_dict(), row.to_dict()],
        })
    _dump({"spec": spec.to_record(), "p": args.p, "n": args.n, "master_seed": args.seed,
           "trials": args.trials, "results": per_K}, args.summary)
    return EXIT_OK


def cmd_convergence(args):
    if args.beta > 1:
        raise UsageError("p ≤ n required: beta must be ≤ 1")
    spec = experiments.entry_spec(args.dist, args.alpha, args.t_max)
    warnings = []
    if experiments.tail_hypothesis_fails(spec):
        msg = (f"warning: n^4 P(|w| >= n) does not vanish for alpha = {spec.alpha:g}; "
               "the light-tail limit is not expected to hold")
        print(msg, file=sys.stderr)
        warnings.append(msg)
    rows = experiments.convergence_table(spec, args.beta, args.n_list, args.trials, args.seed, args.threads)
    if args.csv:
        columns = ("n", "p", "median_lambda_max", "limit", "relative_error", "tail_check")
        _write_text(rows_to_csv(rows, columns), args.csv)
    _dump({"spec": spec.to_record(), "beta": args.beta, "trials": args.trials,
           "rows": rows, "warnings": warnings})
    return EXIT_OK


def cmd_inequalities(args):
    certs = inequalities.run_all(args.samples, stream(args.seed, "inequalities"))
    _dump({"samples": args.samples, "tolerance": inequalities.VIOLATION_TOL,
           "certificates": [c.to_dict() for c in certs]})
    return EXIT_OK if all(c.passed for c in certs) else EXIT_FAILED


def cmd_sample_dist(args):
    spec = experiments.entry_spec(args.dist, args.alpha, args.t_max)
    report = experiments.calibration_report(spec, args.samples, args.seed, args.blocks)
    _dump(report)
    return EXIT_OK if report["pass"] else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Lower bounds on P(lambda_max >= K) for heavy-tailed sample covariance matrices.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="progress logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def threads(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $RMT_THREADS or CPU count)")

    def law(p, default="pareto"):
        p.add_argument("--dist", choices=("pareto", "gaussian", "rademacher"), default=default)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--t-max", type=float, default=None, help="truncation point (required for alpha = 2)")

    b = sub.add_parser("bound", help="evaluate every closed-form bound at (p, n, K)")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--K", type=float, required=True)
    b.add_argument("--alpha", type=float, required=True)
    b.add_argument("--c0", type=float, default=None, help="override c0 in the proposition bound")
    b.add_argument("--t-max", type=float, default=None)
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="run a verification grid; exit 0 iff every cell passes")
    v.add_argument("grid", help="grid JSON file")
    v.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    v.add_argument("--json-out", default=None)
    threads(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", help="simulate one ensemble and estimate both tails for several K")
    law(s)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--K", type=float, nargs="+", required=True)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--confidence", type=float, default=DEFAULT_CONFIDENCE)
    s.add_argument("--jsonl", default=None, help="write per-trial statistics here")
    s.add_argument("--summary", default=None, help="summary JSON path (default: stdout)")
    threads(s)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("convergence", help="median lambda_max against (1 + sqrt(beta))^2")
    law(c, default="gaussian")
    c.add_argument("--beta", type=float, required=True)
    c.add_argument("--n-list", type=_int_list, required=True, help="e.g. 400,1600")
    c.add_argument("--trials", type=int, default=50)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--csv", default=None)
    threads(c)
    c.set_defaults(func=cmd_convergence)

    i = sub.add_parser("inequalities", help="random sweeps of the elementary inequalities")
    i.add_argument("--samples", type=int, default=100_000)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_inequalities)

    d = sub.add_parser("sample-dist", help="calibration report for one entry law")
    law(d)
    d.add_argument("--samples", type=int, default=1_000_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--blocks", type=int, default=32)
    d.set_defaults(func=cmd_sample_dist)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, PreconditionError, InfeasibleParametersError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
