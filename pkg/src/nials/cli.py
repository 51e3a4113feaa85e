"""Command-line entry point.

Solves a single .smt2 file or benchmarks a directory of them, with
answers on stdout, optional model and statistics blocks, and CSV output
for benchmark runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import smtlib
from .core import SolverConfig, Stats
from .errors import NialsError

CSV_COLUMNS = ("name", "answer", "wall_ms", "conflicts", "decisions",
               "theory_assignments", "ls_calls", "ls_moves_accepted")


@dataclass
class RunConfig:
    path: str
    ls_enabled: bool = True
    ls_threshold_base: int = 50
    ls_budget_per_var: int = 100
    acc: float = 1.2
    seed: int = 0
    max_conflicts: Optional[int] = None
    timeout_ms: Optional[int] = None
    print_model: bool = False
    print_stats: bool = False
    csv_out: Optional[str] = None

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            ls_enabled=self.ls_enabled,
            ls_threshold_base=self.ls_threshold_base,
            ls_budget_per_var=self.ls_budget_per_var,
            acc=self.acc,
            seed=self.seed,
            max_conflicts=self.max_conflicts,
            timeout_ms=self.timeout_ms,
        )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nials",
        description="QF_NIA solver with local-search guided decisions.")
    p.add_argument("path", help=".smt2 file, or a directory to benchmark")
    p.add_argument("--no-ls", action="store_true",
                   help="disable the local-search component")
    p.add_argument("--ls-threshold-base", type=int, default=50, metavar="N",
                   help="conflicts before the first local-search call")
    p.add_argument("--ls-budget", type=int, default=100, metavar="N",
                   help="local-search move budget per free variable")
    p.add_argument("--acc", type=float, default=1.2, metavar="F",
                   help="hill-climbing acceleration constant")
    p.add_argument("--seed", type=int, default=0, metavar="N",
                   help="seed for randomized tie-breaking")
    p.add_argument("--max-conflicts", type=int, default=None, metavar="N",
                   help="give up with unknown after this many conflicts")
    p.add_argument("--timeout-ms", type=int, default=None, metavar="N",
                   help="give up with unknown after this much wall time")
    p.add_argument("--print-model", action="store_true",
                   help="print a model when the answer is sat")
    p.add_argument("--print-stats", action="store_true",
                   help="print solver statistics as '; key=value' lines")
    p.add_argument("--csv", dest="csv_out", default=None, metavar="PATH",
                   help="write benchmark results to this CSV file")
    return p


def config_from_args(args) -> RunConfig:
    return RunConfig(
        path=args.path,
        ls_enabled=not args.no_ls,
        ls_threshold_base=args.ls_threshold_base,
        ls_budget_per_var=args.ls_budget,
        acc=args.acc,
        seed=args.seed,
        max_conflicts=args.max_conflicts,
        timeout_ms=args.timeout_ms,
        print_model=args.print_model,
        print_stats=args.print_stats,
        csv_out=args.csv_out,
    )


def _stats_lines(stats: Stats, answer: str, wall_ms: float) -> list[str]:
    d = stats.as_dict()
    lines = [f"; {k}={d[k]}" for k in Stats.KEYS]
    lines.append(f"; answer={answer}")
    lines.append(f"; wall_ms={wall_ms:.1f}")
    return lines


def solve_file(config: RunConfig, path: str, out=None,
               err=None) -> int:
    """Solve one file; returns the process exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        with open(path, "r") as f:
            text = f.read()
        script = smtlib.parse(text)
    except OSError as e:
        print(f"error: {e}", file=err)
        return 2
    except NialsError as e:
        print(f"{path}: error: {e}", file=err)
        return 2
    t0 = time.monotonic()
    answer, model, solver = smtlib.solve(script, config.solver_config())
    wall_ms = (time.monotonic() - t0) * 1000.0
    print(answer.value, file=out)
    if config.print_model and model is not None:
        print("\n".join(smtlib.format_model(model)), file=out)
    if config.print_stats:
        print("\n".join(_stats_lines(solver.stats, answer.value, wall_ms)),
              file=out)
    return 0


def _bench_one(config: RunConfig, path: str) -> dict:
    name = os.path.basename(path)
    t0 = time.monotonic()
    stats = Stats()
    try:
        with open(path, "r") as f:
            text = f.read()
        script = smtlib.parse(text)
        answer, _, solver = smtlib.solve(script, config.solver_config())
        ans = answer.value
        stats = solver.stats
    except (OSError, NialsError):
        ans = "error"
    wall_ms = (time.monotonic() - t0) * 1000.0
    d = stats.as_dict()
    return {
        "name": name,
        "answer": ans,
        "wall_ms": f"{wall_ms:.1f}",
        "conflicts": d["conflicts"],
        "decisions": d["decisions"],
        "theory_assignments": d["theory_assignments"],
        "ls_calls": d["ls_calls"],
        "ls_moves_accepted": d["ls_moves_accepted"],
    }


def bench_dir(config: RunConfig, directory: str, out=None,
              err=None, jobs: Optional[int] = None) -> int:
    """Benchmark every .smt2 file in a directory; writes one CSV."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        names = sorted(n for n in os.listdir(directory) if n.endswith(".smt2"))
    except OSError as e:
        print(f"error: {e}", file=err)
        return 2
    paths = [os.path.join(directory, n) for n in names]
    if jobs is None:
        jobs = min(len(paths), os.cpu_count() or 1) or 1
    # Workers share nothing; rows come back in input order and a single
    # writer emits the CSV.
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(lambda p: _bench_one(config, p), paths))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    if config.csv_out:
        with open(config.csv_out, "w") as f:
            f.write(buf.getvalue())
    else:
        out.write(buf.getvalue())
    return 0


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    if os.path.isdir(config.path):
        return bench_dir(config, config.path)
    return solve_file(config, config.path)


if __name__ == "__main__":
    sys.exit(main())
