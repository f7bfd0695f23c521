"""Benchmark harness: solve every instance in a directory and report."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import IO

from .oracle import is_valid_dfvs
from .pace import ParseError, parse_instance
from .solver import SolveStats, SolverConfig, solve

COLUMNS = ("instance", "n", "m", "size", "valid", "seconds", "iterations", "error")


@dataclass
class BenchmarkRow:
    instance: str
    n: int = 0
    m: int = 0
    size: int = 0
    valid: bool = False
    seconds: float = 0.0
    iterations: int = 0
    error: str = ""


@dataclass
class BenchmarkReport:
    rows: list[BenchmarkRow] = field(default_factory=list)

    @property
    def solved(self) -> int:
        return sum(1 for r in self.rows if not r.error)

    @property
    def all_valid(self) -> bool:
        return all(r.valid for r in self.rows if not r.error)

    def write_csv(self, sink: IO[str]) -> None:
        writer = csv.DictWriter(sink, fieldnames=COLUMNS)
        writer.writeheader()
        for row in self.rows:
            writer.writerow(asdict(row))


def _solve_one(path_str: str, config: SolverConfig) -> BenchmarkRow:
    path = Path(path_str)
    row = BenchmarkRow(instance=path.name)
    started = time.monotonic()
    try:
        inst = parse_instance(path.read_text(encoding="utf-8"))
    except (ParseError, OSError, UnicodeDecodeError) as exc:
        row.error = str(exc)
        return row
    row.n, row.m = inst.n, inst.m
    stats = SolveStats()
    try:
        best = solve(inst, config, stats=stats)
    except Exception as exc:  # a solver crash must not sink the batch
        row.error = f"{type(exc).__name__}: {exc}"
        row.seconds = round(time.monotonic() - started, 3)
        return row
    row.seconds = round(time.monotonic() - started, 3)
    row.size = best.size
    row.iterations = stats.iterations
    # never trust the solver's own view of validity
    row.valid = is_valid_dfvs(inst, best.vertices)
    return row


def run_benchmark(
    directory: str | Path, config: SolverConfig, jobs: int = 1
) -> BenchmarkReport:
    files = sorted(p for p in Path(directory).iterdir() if p.is_file())
    report = BenchmarkReport()
    if not files:
        return report
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            report.rows = list(pool.map(_solve_one, map(str, files), [config] * len(files)))
    else:
        report.rows = [_solve_one(str(p), config) for p in files]
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dfvs-bench", description="Solve every instance file in a directory."
    )
    parser.add_argument("directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--time-limit", type=float, default=60.0)
    parser.add_argument("--iterations", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--report", type=Path, default=None, help="CSV output path (default stdout)")
    args = parser.parse_args(argv)

    config = SolverConfig(
        seed=args.seed,
        time_budget=None if args.iterations is not None else args.time_limit,
        iterations=args.iterations,
    )
    report = run_benchmark(args.directory, config, jobs=args.jobs)
    if args.report is not None:
        with open(args.report, "w", newline="", encoding="utf-8") as fh:
            report.write_csv(fh)
    else:
        report.write_csv(sys.stdout)
    print(
        f"{report.solved}/{len(report.rows)} solved, all valid: {report.all_valid}",
        file=sys.stderr,
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
