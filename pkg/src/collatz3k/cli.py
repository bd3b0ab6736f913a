"""Command-line entry point: ``collatz3k {seq,table,figdata,check,verify,spot}``.

Exit codes: 0 success, 1 usage, 2 a start failed to reach 3^k (or a formula
check failed), 3 I/O, 4 ``seq`` found a cycle avoiding 3^k.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import table as tablemod
from .analysis import FIGURE_WINDOWS, figure_dataset
from .core import Params, Status, parse_natural, trajectory
from .errors import CheckpointError
from .formula import cross_check
from .verifier import SweepConfig, run_sweep, spot_check_large

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_IO = 3
EXIT_CYCLE = 4

FIGDATA_SCHEMA = 1

log = logging.getLogger("collatz3k")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _natural(text):
    try:
        return parse_natural(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return v


def _positive(text):
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _window(text):
    try:
        lo, hi = text.split(":")
        lo, hi = parse_natural(lo), parse_natural(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like A:B, got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty window {text}")
    return lo, hi


def _emit(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_seq(args) -> int:
    params = Params(args.k)
    traj = trajectory(args.n, params, args.budget)
    after = list(traj.terms[1:])
    if args.format == "json":
        text = json.dumps({"n": str(args.n), "k": args.k, "status": traj.status.value,
                           "t": traj.t, "terms": [str(x) for x in after]}) + "\n"
    elif args.format == "csv":
        text = "index,term\n" + "".join(f"{i},{x}\n" for i, x in enumerate(after, start=1))
    else:
        text = "".join(f"{x}\n" for x in after)
    _emit(text, args.output)
    if traj.t == 0:
        print(f"t=0: n is already 3^{args.k}", file=sys.stderr)
    elif traj.status is Status.REACHED_TARGET:
        print(f"t={traj.t}", file=sys.stderr)
    else:
        print(f"{traj.status.value} after {len(after)} steps", file=sys.stderr)
    if traj.status is Status.BUDGET_EXHAUSTED:
        return EXIT_FAILURE
    if traj.status is Status.CYCLE_WITHOUT_TARGET:
        return EXIT_CYCLE
    return EXIT_OK


def cmd_table(args) -> int:
    ks = args.k or list(tablemod.DEFAULT_KS)
    columns = tablemod.table_columns(ks, args.n_max)
    render = {"table": tablemod.render_text, "csv": tablemod.render_csv,
              "json": tablemod.render_json}[args.format]
    _emit(render(columns), args.output)
    return EXIT_OK


def figdata_csv(rows, k: int, window) -> str:
    buf = io.StringIO()
    buf.write(f"# figdata-schema: {FIGDATA_SCHEMA} k={k} window={window[0]}:{window[1]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "t", "odd_count", "tag"])
    for r in rows:
        writer.writerow([r.n, "unresolved" if r.t is None else r.t,
                         "unresolved" if r.odd_count is None else r.odd_count, r.tag.value])
    return buf.getvalue()


def cmd_figdata(args) -> int:
    ks = args.k or [0, 1, 2]
    windows = args.window or list(FIGURE_WINDOWS)
    parts = []
    datasets = []
    for k in ks:
        for w in windows:
            rows = figure_dataset(w, Params(k), args.budget, jobs=args.jobs)
            if args.format == "csv":
                parts.append(figdata_csv(rows, k, w))
            else:
                datasets.append({"k": k, "window": [w[0], w[1]], "schema": FIGDATA_SCHEMA,
                                 "rows": [{"n": r.n, "t": r.t, "odd_count": r.odd_count,
                                           "tag": r.tag.value} for r in rows]})
    text = "".join(parts) if args.format == "csv" else json.dumps({"datasets": datasets}) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    lo, hi = args.range
    params = Params(args.k)
    passed = failed = unresolved = terms = 0
    bad = []
    for n in range(lo, hi + 1):
        res = cross_check(n, params, args.budget)
        terms += res.terms_checked
        if res.stopping_time_ok is None:
            unresolved += 1
            bad.append(f"n={n}: did not reach 3^{args.k} within budget")
        elif res.passed:
            passed += 1
        else:
            failed += 1
            bad.append(f"n={n}: term mismatches at l={list(res.term_failures)}, "
                       f"stopping time {'ok' if res.stopping_time_ok else 'MISMATCH'}")
    for line in bad[:20]:
        print("FAIL " + line)
    print(f"k={args.k} n={lo}..{hi} terms checked={terms} "
          f"PASS={passed} FAIL={failed} UNRESOLVED={unresolved}")
    return EXIT_OK if failed == 0 and unresolved == 0 else EXIT_FAILURE


def _report_text(report) -> str:
    d = report.to_dict()
    c = d["config"]
    tot = d["totals"]
    lines = [
        f"k={c['k']} range={c['start']}..{c['end']} chunk={c['chunk_size']} "
        f"budget={'default' if c['budget'] is None else c['budget']}",
        f"verified={tot['verified']} failed={tot['failed']} "
        f"(budget_exhausted={tot['budget_exhausted']}, cycle_without_target={tot['cycle_without_target']})",
        f"max_t={d['max_t']} at n={d['max_t_n']}  max odd_count={d['odd_max']} at n={d['odd_max_n']}",
        f"completed={d['completed']} elapsed={d['elapsed']:.3f}s throughput={d['throughput']:.0f} n/s",
    ]
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    try:
        cfg = SweepConfig(k=args.k, start=args.start, end=args.end, budget=args.budget,
                          chunk_size=args.chunk, jobs=args.jobs,
                          checkpoint_path=args.checkpoint, fast=not args.no_fast)
    except ValueError as exc:
        raise UsageError(str(exc))
    try:
        report = run_sweep(cfg)
    except KeyboardInterrupt:
        print("interrupted; rerun with the same --checkpoint to resume", file=sys.stderr)
        return 130
    text = json.dumps(report.to_dict()) + "\n" if args.format == "json" else _report_text(report)
    _emit(text, args.output)
    if report.failures:
        params = Params(args.k)
        for n, status in report.failures[:10]:
            traj = trajectory(n, params, args.budget)
            print(f"# candidate n={n} status={status.value}", file=sys.stderr)
            print(" ".join(str(x) for x in traj.terms), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_spot(args) -> int:
    res = spot_check_large(args.n, Params(args.k), args.budget)
    d = res.to_dict()
    if args.format == "json":
        text = json.dumps(d) + "\n"
    else:
        text = (f"n: {d['n_bits']}-bit start, k={res.k}\n"
                f"status={res.status.value} t={res.t} odd_count={res.odd_count} "
                f"peak_bits={res.peak_bits} elapsed={res.elapsed:.3f}s\n")
    _emit(text, args.output)
    return EXIT_OK if res.status is Status.REACHED_TARGET else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collatz3k", description="Generalized Collatz map 3n+3^k toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats, default):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("-o", "--output", help="write here instead of stdout")

    p = sub.add_parser("seq", help="print the sequence of n up to the first 3^k")
    p.add_argument("n", type=_natural)
    p.add_argument("--k", type=_nonneg, default=0)
    p.add_argument("--budget", type=_positive)
    common(p, ["table", "csv", "json"], "table")
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("table", help="render the reference table of sequences")
    p.add_argument("--k", type=_nonneg, action="append", help="repeatable; default 0..4")
    p.add_argument("--n-max", type=_positive, default=tablemod.DEFAULT_N_MAX)
    common(p, ["table", "csv", "json"], "table")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("figdata", help="n, t, odd_count, tag rows for plotting")
    p.add_argument("--k", type=_nonneg, action="append", help="repeatable; default 0 1 2")
    p.add_argument("--window", type=_window, action="append",
                   help="A:B, repeatable; default 1:100 500:600 900:1000")
    p.add_argument("--budget", type=_positive)
    p.add_argument("--jobs", type=_positive, default=1)
    common(p, ["csv", "json"], "csv")
    p.set_defaults(func=cmd_figdata)

    p = sub.add_parser("check", help="cross-check closed forms against iteration")
    p.add_argument("range", type=_window, help="A:B")
    p.add_argument("--k", type=_nonneg, default=0)
    p.add_argument("--budget", type=_positive)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="sweep a range and report any start not reaching 3^k")
    p.add_argument("--k", type=_nonneg, default=0)
    p.add_argument("--start", type=_natural, required=True)
    p.add_argument("--end", type=_natural, required=True)
    p.add_argument("--budget", type=_positive)
    p.add_argument("--chunk", type=_positive, default=10_000)
    p.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    p.add_argument("--checkpoint")
    p.add_argument("--no-fast", action="store_true", help="skip the int64 kernel")
    common(p, ["table", "json"], "table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spot", help="stopping time and peak size of one large start")
    p.add_argument("n", type=_natural)
    p.add_argument("--k", type=_nonneg, default=0)
    p.add_argument("--budget", type=_positive)
    common(p, ["table", "json"], "table")
    p.set_defaults(func=cmd_spot)
    return parser


def main(argv=None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"collatz3k: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CheckpointError as exc:
        print(f"collatz3k: checkpoint error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"collatz3k: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
