"""Command-line entry point.

    engine run scenario.scn [--trace] [--max-steps N] [--depth N] [--report OUT]

Exit status: 0 when every expectation holds, 1 when a coherence verdict
expectation fails, 2 for any other failed expectation, 3 for unreadable or
ill-formed input.
"""

from __future__ import annotations

import argparse
import sys

from . import satcore
from .errors import DicekitError
from .runner import explain, run_scenario, write_report
from .scenario import load


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="engine", description="defeasible discourse engine")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="interpret a scenario file")
    run.add_argument("path", help="scenario (.scn) file")
    run.add_argument("--trace", action="store_true", help="print the inference trace")
    run.add_argument("--max-steps", type=int, default=1000, metavar="N",
                     help="inference step bound per closure (default 1000)")
    run.add_argument("--depth", type=int, default=3, metavar="N",
                     help="maximum nesting depth for attitude contexts (default 3)")
    run.add_argument("--report", metavar="OUT",
                     help="also write a report (text, or JSON when OUT ends in .json)")
    run.add_argument("--backend", choices=("pure", "compiled"),
                     help="force the satisfiability kernel")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.backend:
        try:
            satcore.use_backend(args.backend)
        except DicekitError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
    try:
        scenario = load(args.path)
        report = run_scenario(scenario, max_steps=args.max_steps, max_depth=args.depth)
    except (DicekitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    print(f"scenario {scenario.name}: {report.verdict} ({report.elapsed:.3f}s)")
    for a in report.sdrs.attachments:
        print(f"  relation {a.rel}")
    for d in report.diagnostics:
        print(f"  diagnostic: {d}")
    if args.trace:
        for line in report.trace.lines():
            print(line)
    for e in report.expectations:
        print(e.line())
    if args.report:
        write_report(report, args.report)
    return report.exit_code()


if __name__ == "__main__":
    raise SystemExit(main())
