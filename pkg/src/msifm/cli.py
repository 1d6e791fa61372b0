"""Command-line front end: ``msifm solve|verify|oracle|border``.

Exit codes: 0 feasible dataset, 1 solved but infeasible (or violations),
2 usage or parse error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from . import __version__
from .border import compute_border
from .driver import ProgressEvent, Termination, run_colgen, run_oracle
from .errors import BorderTooLarge, CapSaturation, NumericFailure, ParseError, TooLarge, ValidationError
from .io import emit_dataset, format_count, read_dataset_file, read_instance_file, write_dataset_file
from .model import verify
from .rounding import round_solution

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

log = logging.getLogger("msifm")

_LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="msifm", description="Generate datasets satisfying ms-IFM constraints.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", required=True, metavar="PATH", help="instance file (JSON)")
    common.add_argument("--border-cap", type=int, metavar="N", help="max negative border size per attribute")
    common.add_argument("--log", choices=sorted(_LOG_LEVELS), default="quiet")
    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--arithmetic", choices=["rational", "float"])
    solving.add_argument("--out", metavar="PATH", help="write the dataset here")

    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common, solving], help="column generation, rounding and verification")
    p.add_argument("--time-limit", type=float, metavar="SECONDS")
    p = sub.add_parser("verify", parents=[common], help="check a dataset file against an instance")
    p.add_argument("--dataset", required=True, metavar="PATH")
    p = sub.add_parser("oracle", parents=[common, solving], help="solve with every column materialized")
    p.add_argument("--oracle-cap", type=int, metavar="N")
    sub.add_parser("border", parents=[common], help="print the negative border of every MV attribute")
    return ap


def _option(args, name, options, key):
    value = getattr(args, name, None)
    return options[key] if value is None else value


def _print_violations(report, out):
    for v in report:
        print(f"violation: {v}", file=out)


def _emit(D, args, out):
    if args.out:
        write_dataset_file(args.out, D)
    else:
        out.write(emit_dataset(D))


def _cmd_solve(args, inst, options, out) -> int:
    def observer(ev: ProgressEvent):
        if ev.column is not None:
            log.info("iteration %d: objective %s, added %r (reduced cost %s)",
                     ev.iteration, format_count(ev.objective), ev.column, format_count(ev.reduced_cost))

    result = run_colgen(
        inst,
        _option(args, "time_limit", options, "time_limit_s"),
        arithmetic=_option(args, "arithmetic", options, "arithmetic"),
        border_cap=_option(args, "border_cap", options, "border_cap"),
        observer=observer,
    )
    print(f"objective: {format_count(result.objective)}", file=out)
    print(f"iterations: {result.iterations}", file=out)
    print(f"termination: {result.reason.value}", file=out)
    print(f"columns: {result.live_columns}", file=out)
    if result.reason is Termination.TIME_LIMIT and not result.dataset:
        print("error: time limit reached before any transaction entered the solution", file=sys.stderr)
        return EXIT_RESOURCE
    shortfall = 0
    try:
        D = round_solution(result.dataset, inst.size, inst.dup_constraints)
    except CapSaturation as exc:
        D, shortfall = exc.partial, exc.shortfall
        print(f"rounding: {shortfall} units could not be placed under duplicate caps", file=out)
    report = verify(D, inst, result.border)
    print(f"violations: {len(report)}", file=out)
    _print_violations(report, out)
    _emit(D, args, out)
    if result.objective == 0 and report.ok and not shortfall:
        return EXIT_OK
    return EXIT_INFEASIBLE


def _cmd_verify(args, inst, options, out) -> int:
    border = compute_border(inst, _option(args, "border_cap", options, "border_cap"))
    D = read_dataset_file(args.dataset, inst.schema)
    report = verify(D, inst, border)
    print(f"violations: {len(report)}", file=out)
    _print_violations(report, out)
    return EXIT_OK if report.ok else EXIT_INFEASIBLE


def _cmd_oracle(args, inst, options, out) -> int:
    result = run_oracle(
        inst,
        _option(args, "oracle_cap", options, "oracle_cap"),
        arithmetic=_option(args, "arithmetic", options, "arithmetic"),
        border_cap=_option(args, "border_cap", options, "border_cap"),
    )
    print(f"objective: {format_count(result.objective)}", file=out)
    print(f"columns: {result.columns}", file=out)
    # fractional counts are written as p/q; only `solve` output is integral
    if args.out:
        write_dataset_file(args.out, result.dataset)
    return EXIT_OK if result.objective == 0 else EXIT_INFEASIBLE


def _cmd_border(args, inst, options, out) -> int:
    border = compute_border(inst, _option(args, "border_cap", options, "border_cap"))
    schema = inst.schema
    for i, attr in enumerate(schema.mv_attrs):
        members = ["{" + ",".join(schema.items_of(i, m)) + "}" for m in border[i]]
        print(f"{attr.name}: {' '.join(members)}", file=out)
    return EXIT_OK


_COMMANDS = {"solve": _cmd_solve, "verify": _cmd_verify, "oracle": _cmd_oracle, "border": _cmd_border}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=_LOG_LEVELS[args.log], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    logging.getLogger("msifm").setLevel(_LOG_LEVELS[args.log])
    try:
        instance_file = read_instance_file(args.instance)
        return _COMMANDS[args.command](args, instance_file.instance, instance_file.options, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TooLarge, BorderTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericFailure as exc:
        print(f"error: numeric failure: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
