"""Command-line interface: run sweeps, generate scenarios, solve single realizations."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import selftest
from .algorithms import ALGORITHM_NAMES, run_algorithm
from .bench import ExperimentSpec, run_experiment
from .scenario import ScenarioConfig, make_scenario

logger = logging.getLogger("uavee")


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 (not 2) on bad arguments, with usage on stderr."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_pairs(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or any(n < 1 for n in out):
        raise ValueError("pair counts must be integers >= 1")
    return tuple(out)


def _build_parser() -> _Parser:
    parser = _Parser(prog="uavee", description=__doc__)
    parser.add_argument("--verbose", action="store_true", help="debug logging to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Monte Carlo sweep over numbers of D2D pairs")
    run.add_argument("--pairs", default="2,3,4,5,6,7,8,9,10", help="comma list or a-b ranges")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--algorithms", default=",".join(ALGORITHM_NAMES))
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--config", help="base scenario JSON (overrides --seed)")
    run.add_argument("--out", help="output file path")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--jobs", type=int, default=1, help="worker processes")
    run.add_argument("--verbose", action="store_true")

    gen = sub.add_parser("gen-scenario", help="emit a scenario config as JSON")
    gen.add_argument("--pairs", type=int, default=5)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", help="write to file instead of stdout")

    solve = sub.add_parser("solve", help="run one algorithm on one scenario file")
    solve.add_argument("--scenario", required=True, help="scenario JSON path")
    solve.add_argument("--algorithm", required=True, choices=ALGORITHM_NAMES)
    solve.add_argument("--trace", action="store_true", help="include the objective trace")
    solve.add_argument("--verbose", action="store_true")

    sub.add_parser("selftest", help="run the quick invariant suite")
    return parser


def _cmd_run(args) -> int:
    try:
        pairs = _parse_pairs(args.pairs)
    except ValueError as exc:
        print(f"uavee run: error: {exc}", file=sys.stderr)
        return 1
    algorithms = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    unknown = set(algorithms) - set(ALGORITHM_NAMES)
    if unknown or not algorithms:
        print(f"uavee run: error: unknown algorithms {sorted(unknown)}", file=sys.stderr)
        return 1
    if args.trials < 1:
        print("uavee run: error: --trials must be >= 1", file=sys.stderr)
        return 1

    if args.config:
        with open(args.config) as fh:
            base = ScenarioConfig.from_json(fh.read())
    else:
        base = ScenarioConfig(num_pairs=pairs[0], seed=args.seed)
    spec = ExperimentSpec(
        base_config=base,
        pair_counts=pairs,
        trials_per_point=args.trials,
        algorithms=algorithms,
        output_path=args.out,
        output_format=args.format,
    )
    rows, summary = run_experiment(spec, jobs=max(1, args.jobs))
    if not args.out:
        json.dump({"summary": summary}, sys.stdout, indent=2)
        print()
    else:
        logger.info("wrote %d rows to %s", len(rows), args.out)
        print(json.dumps({"summary": summary}, indent=2))
    return 0


def _cmd_gen_scenario(args) -> int:
    config = ScenarioConfig(num_pairs=args.pairs, seed=args.seed)
    text = config.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_solve(args) -> int:
    with open(args.scenario) as fh:
        config = ScenarioConfig.from_json(fh.read())
    _, ch = make_scenario(config)
    report = run_algorithm(args.algorithm, ch, config)
    print(report.to_json(include_trace=args.trace))
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point; returns 0 on success, 1 on invalid arguments, 2 on runtime failure."""
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if getattr(args, "verbose", False) or os.environ.get("UAVEE_VERBOSE") == "1":
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)

    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "gen-scenario":
            return _cmd_gen_scenario(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "selftest":
            return selftest.run(np.random.default_rng(0))
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"uavee: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
