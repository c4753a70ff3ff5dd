"""Command-line entry point: ``lampi check`` and ``lampi export-tpdb``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from lampi.checker import Checker, RunConfig, run_check
from lampi.signature import DEFAULT_BUDGET
from lampi.stack import run_with_deep_stack
from lampi.tpdb import export_tpdb


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lampi", description="Type checker for the λΠ-calculus modulo rewriting.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check .dk files in order")
    check.add_argument("files", nargs="+")
    check.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="reduction steps allowed per conversion or normalization query")
    check.add_argument("--quiet", action="store_true",
                       help="only print directive results, errors and the summary")
    check.add_argument("--keep-going", action="store_true",
                       help="report every failing declaration instead of stopping at the first")
    check.add_argument("-I", "--include", action="append", default=[], metavar="DIR",
                       help="directory searched by #REQUIRE (repeatable)")

    export = sub.add_parser("export-tpdb", help="export the rules of a checked file")
    export.add_argument("file")
    export.add_argument("-o", "--output", required=True)
    export.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    export.add_argument("-I", "--include", action="append", default=[], metavar="DIR")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run_with_deep_stack(_main, argv)


def _main(argv: Optional[Sequence[str]]) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.budget <= 0:
        print("lampi: --budget must be positive", file=sys.stderr)
        return 2

    if args.command == "check":
        config = RunConfig(tuple(args.files), args.budget, args.quiet, args.keep_going,
                           tuple(args.include))
        report = run_check(config)
        sys.stdout.write(report.text(config.quiet))
        return report.exit_code

    fr = Checker(args.budget, args.include).check_file(args.file)
    if fr.io_error:
        print(f"{args.file}: IOError: {fr.io_error}", file=sys.stderr)
        return 2
    if fr.errors:
        for o in fr.errors:
            print(o.line(), file=sys.stderr)
        return 1
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(export_tpdb(fr.signature))
    except OSError as e:
        print(f"{args.output}: IOError: {e.strerror}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
