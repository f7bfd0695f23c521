"""Command-line solver entry point.

Reads one instance (file argument or stdin), solves under a time or
iteration budget, and prints the solution vertex ids to stdout. SIGTERM
and SIGINT flip the solver's cancellation flag; the best solution found so
far is still emitted.

Exit codes: 0 success, 1 parse error, 2 invalid solution under --validate,
3 usage error.
"""

from __future__ import annotations

import argparse
import signal
import sys
import threading

from .oracle import is_valid_dfvs
from .pace import ParseError, parse_instance, write_solution
from .solver import SolveStats, SolverConfig, solve

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="dfvs",
        description="Heuristic solver for minimum directed feedback vertex set.",
    )
    parser.add_argument("instance", nargs="?", default="-",
                        help="instance file, or '-' for stdin (default)")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--time-limit", type=float, default=600.0, metavar="SECONDS",
                        help="wall-clock budget (default 600)")
    parser.add_argument("--iterations", type=int, default=None, metavar="T",
                        help="run exactly T local-search iterations instead of a time budget")
    parser.add_argument("--trigger-fraction", type=float, default=0.10,
                        help="edge-loss fraction that triggers a full reduction pass")
    parser.add_argument("--restore-fraction", type=float, default=0.30,
                        help="fraction of the solution freed per local-search iteration")
    parser.add_argument("--degree-bound", type=int, default=12,
                        help="degree cap for the local diclique rules")
    parser.add_argument("--scoring", choices=("product", "lexicographic", "alternate"),
                        default="alternate", help="vertex selection criterion")
    parser.add_argument("--validate", action="store_true",
                        help="check the solution before emitting; exit 2 if invalid")
    return parser


def _install_signal_bridge(cancel: threading.Event) -> None:
    def handler(signum, frame):
        cancel.set()

    for sig in (signal.SIGTERM, signal.SIGINT):
        try:
            signal.signal(sig, handler)
        except ValueError:  # not the main thread; tests drive run_cli directly
            pass


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.iterations is not None and args.iterations < 0:
        print("dfvs: error: --iterations must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = SolverConfig(
            seed=args.seed,
            time_budget=None if args.iterations is not None else args.time_limit,
            iterations=args.iterations,
            trigger_fraction=args.trigger_fraction,
            restore_fraction=args.restore_fraction,
            degree_bound=args.degree_bound,
            scoring_mode=args.scoring,
        )
    except ValueError as exc:
        print(f"dfvs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    cancel = threading.Event()
    _install_signal_bridge(cancel)

    try:
        if args.instance == "-":
            text = sys.stdin.read()
        else:
            with open(args.instance, encoding="utf-8") as fh:
                text = fh.read()
        inst = parse_instance(text)
    except ParseError as exc:
        print(f"dfvs: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"dfvs: cannot read instance: {exc}", file=sys.stderr)
        return EXIT_PARSE

    stats = SolveStats()
    best = solve(inst, config, cancel=cancel, stats=stats)

    if args.validate and not is_valid_dfvs(inst, best.vertices):
        print("dfvs: solution failed validation", file=sys.stderr)
        return EXIT_INVALID
    write_solution(best, sys.stdout)
    sys.stdout.flush()
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
