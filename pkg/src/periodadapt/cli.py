"""Command-line entry point: ``periodadapt {adjust,simulate,compare,validate}``.

Exit codes: 0 success/feasible, 2 infeasible (``adjust`` only), 1 any error.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import os
import sys
from importlib import resources

from .edf_sim import ALGORITHMS, simulate as run_simulation
from .elastic import task_compress
from .period_adjust import period_adjust
from .scenario_io import (
    ScenarioError,
    parse_scenario,
    write_assignment,
    write_samples,
    write_trace_csv,
    write_verdicts,
)

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read_input(path: str) -> bytes:
    """Read ``path``; a bare name of a bundled scenario (e.g. table1.json) also works."""
    if os.path.exists(path):
        with open(path, "rb") as fh:
            return fh.read()
    bundled = resources.files("periodadapt") / "scenarios" / os.path.basename(path)
    if os.path.basename(path) == path and bundled.is_file():
        return bundled.read_bytes()
    raise FileNotFoundError(f"no such file: {path}")


def _load(path: str):
    return parse_scenario(_read_input(path))


def _errors(lines) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def cmd_adjust(args) -> int:
    sc = _load(args.input)
    ts = sc.taskset
    if args.algorithm == "period-adjust":
        result = period_adjust(ts, args.ud)
        if args.verbose:
            for clamp in result.clamp_log:
                print(f"pass {clamp.pass_no}: {clamp.task} {clamp.kind.value}", file=sys.stderr)
            print(f"passes: {result.passes}", file=sys.stderr)
    else:
        result = task_compress(ts, args.ud)
    if not result.feasible:
        print(f"infeasible: {result.reason.value}", file=sys.stderr)
    with (open(args.output, "w", newline="", encoding="utf-8")
          if args.output else contextlib.nullcontext(sys.stdout)) as sink:
        write_assignment(result, ts, sink, args.format)
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_simulate(args) -> int:
    sc = _load(args.scenario)
    trace = run_simulation(sc)
    write_trace_csv(trace, args.outdir)
    for time, verdict, _ in trace.adjustments:
        if verdict != "Feasible":
            print(f"t={time:g} ms: {verdict}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    sc = _load(args.scenario)
    traces = {alg: run_simulation(dataclasses.replace(sc, algorithm=alg)) for alg in ALGORITHMS}
    os.makedirs(args.outdir, exist_ok=True)
    for alg, trace in traces.items():
        with open(os.path.join(args.outdir, f"samples-{alg}.csv"), "w", newline="", encoding="utf-8") as fh:
            write_samples(trace, fh)
    pa, tc = traces["period-adjust"], traces["task-compress"]
    rows = [(a[0], a[1], b[1]) for a, b in zip(pa.adjustments, tc.adjustments)]
    with open(os.path.join(args.outdir, "verdicts.csv"), "w", newline="", encoding="utf-8") as fh:
        write_verdicts(rows, fh)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        _load(args.input)
    except ScenarioError as exc:
        _errors(exc.errors)
        return EXIT_ERROR
    print("ok", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="periodadapt", description="Adaptive period assignment and EDF simulation.")
    p.add_argument("--verbose", action="store_true", help="print per-pass clamp logs")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("adjust", help="assign periods once for the task set in a scenario file")
    a.add_argument("--input", required=True)
    a.add_argument("--ud", type=float, default=1.0)
    a.add_argument("--algorithm", choices=ALGORITHMS, default="period-adjust")
    a.add_argument("--output")
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    a.set_defaults(func=cmd_adjust)

    s = sub.add_parser("simulate", help="run a scenario and write CSV traces")
    s.add_argument("--scenario", required=True)
    s.add_argument("--outdir", required=True)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="run a scenario under both algorithms")
    c.add_argument("--scenario", required=True)
    c.add_argument("--outdir", required=True)
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("validate", help="check a scenario file")
    v.add_argument("--input", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        _errors(exc.errors)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
