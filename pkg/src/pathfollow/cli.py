"""Command line entry point.

    pathfollow run <scenario.yaml> [--out report.json] [--trace trace.csv]
    pathfollow suite <dir> [--variants proposed,baseline] [--seed N] [--trials K] [--out table.json]
    pathfollow gen-paths --out <dir> [--seed N]

``--ticks-per-sec`` applies to ``run`` and ``suite``. Exit status is 0 on
success, 1 if a scenario did not reach its goal, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .follower import Variant
from .harness.runner import run_scenario, write_trace
from .harness.scenario import ScenarioError, load_scenario
from .harness.suite import load_suite, run_suite, suite_to_json, write_suite

EXIT_OK = 0
EXIT_INCOMPLETE = 1
EXIT_BAD_INPUT = 2


def _variants(text: str) -> list[Variant]:
    out = []
    for part in text.split(","):
        key = part.strip().lower()
        match = [v for v in Variant if v.value.lower() == key]
        if not match:
            raise argparse.ArgumentTypeError(f"unknown variant {part!r}; use proposed and/or baseline")
        out.append(match[0])
    return out


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathfollow", description="Path-following controller simulations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ticks-per-sec", type=_positive_float, default=60.0, help="simulation rate (default 60)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="run one scenario file")
    run.add_argument("scenario", type=Path)
    run.add_argument("--out", type=Path, help="write the JSON report here (default: stdout)")
    run.add_argument("--trace", type=Path, help="write the per-tick CSV trace here")
    run.add_argument("--variant", type=lambda s: _variants(s)[0], help="override the scenario's variant")

    suite = sub.add_parser("suite", parents=[common], help="run every scenario in a directory")
    suite.add_argument("directory", type=Path)
    suite.add_argument("--variants", type=_variants, default=[Variant.PROPOSED, Variant.BASELINE])
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--trials", type=int, default=1)
    suite.add_argument("--jobs", type=int, default=1, help="worker processes")
    suite.add_argument("--out", type=Path, help="write the JSON table here (default: stdout)")

    gen = sub.add_parser("gen-paths", help="write the generated benchmark scenarios")
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--seed", type=int, default=0)
    return parser


def _emit(text: str, target: Path | None) -> None:
    if target is None:
        sys.stdout.write(text)
    else:
        target.write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            scenario = load_scenario(args.scenario)
            rows: list | None = [] if args.trace else None
            report = run_scenario(scenario, args.ticks_per_sec, args.variant, trace=rows)
            _emit(report.to_json(), args.out)
            if args.trace:
                write_trace(rows, args.trace)
            return EXIT_OK if report.completed else EXIT_INCOMPLETE

        if args.command == "suite":
            if not args.directory.is_dir():
                raise ValueError(f"not a directory: {args.directory}")
            scenarios = load_suite(args.directory)
            result = run_suite(scenarios, args.variants, args.trials, args.seed, args.ticks_per_sec, args.jobs)
            _emit(suite_to_json(result), args.out)
            return EXIT_OK

        files = write_suite(args.out, args.seed)
        print(f"wrote {len(files)} scenarios to {args.out}")
        return EXIT_OK
    except ScenarioError as exc:
        print(f"error: scenario {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
