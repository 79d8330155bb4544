"""Benchmark harness: repeated solver runs, summary statistics, CSV.

Run seeds are base_seed + run index, so a report is reproducible from
its seed alone (wall-clock columns aside) no matter how many workers
execute the grid. Unsolved runs are listed separately and never folded
into the solved-run statistics.
"""

from __future__ import annotations

import csv
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

from .model import Instance
from .search import SearchParams, run_solver

WORKERS_ENV = "AUTOLS_WORKERS"

CSV_COLUMNS = (
    "instance",
    "mode",
    "init",
    "run",
    "seed",
    "solved",
    "iterations",
    "time_ms",
    "restarts",
    "best_violation",
)


@dataclass
class RunRow:
    instance: str
    mode: str
    init: str
    run: int
    seed: int
    solved: bool
    iterations: int
    time_ms: float
    restarts: int
    best_violation: int


@dataclass
class Stats:
    count: int
    min: float
    max: float
    avg: float
    std: float

    @classmethod
    def of(cls, xs) -> "Stats":
        xs = list(xs)
        if not xs:
            return cls(0, 0.0, 0.0, 0.0, 0.0)
        return cls(len(xs), min(xs), max(xs), statistics.fmean(xs), statistics.pstdev(xs))


@dataclass
class ReportEntry:
    instance: str
    mode: str
    init: str
    runs: int
    solved: int
    iterations: Stats
    time_ms: Stats
    unsolved_runs: tuple[int, ...]


@dataclass
class BenchReport:
    rows: list[RunRow]
    entries: list[ReportEntry]


def _run_task(args) -> RunRow:
    instance, mode, init, run, seed, max_iterations, time_limit_ms = args
    params = SearchParams(
        seed=seed,
        init_mode=init,
        max_iterations=max_iterations,
        time_limit_ms=time_limit_ms,
    )
    try:
        stats, _ms = run_solver(instance, params, mode=mode)
    except Exception:  # record the failure, keep the grid going
        return RunRow(instance.name, mode, init, run, seed, False, 0, 0.0, 0, -1)
    if stats.solved:
        iters = stats.iterations_to_first_solution
        time_ms = stats.time_to_first_solution_ms
    else:
        iters = stats.iterations
        time_ms = 0.0
    return RunRow(
        instance=instance.name,
        mode=mode,
        init=init,
        run=run,
        seed=seed,
        solved=stats.solved,
        iterations=iters,
        time_ms=round(time_ms, 3),
        restarts=stats.restarts,
        best_violation=stats.best_violation,
    )


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def summarize(rows) -> list[ReportEntry]:
    groups: dict[tuple, list[RunRow]] = {}
    order = []
    for row in rows:
        key = (row.instance, row.mode, row.init)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)
    entries = []
    for key in order:
        grp = groups[key]
        solved = [r for r in grp if r.solved]
        entries.append(
            ReportEntry(
                instance=key[0],
                mode=key[1],
                init=key[2],
                runs=len(grp),
                solved=len(solved),
                iterations=Stats.of(r.iterations for r in solved),
                time_ms=Stats.of(r.time_ms for r in solved),
                unsolved_runs=tuple(r.run for r in grp if not r.solved),
            )
        )
    return entries


def run_bench(
    instances,
    modes,
    inits,
    runs: int,
    seed: int = 0,
    max_iterations: int | None = 1_000_000,
    time_limit_ms: float | None = None,
    workers: int | None = None,
) -> BenchReport:
    if runs < 1:
        raise ValueError("need at least one run")
    tasks = []
    for instance in instances:
        for mode in modes:
            for init in inits:
                for run in range(runs):
                    tasks.append(
                        (instance, mode, init, run, seed + run, max_iterations, time_limit_ms)
                    )
    if workers is None:
        workers = default_workers()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=1))
    else:
        rows = [_run_task(t) for t in tasks]
    return BenchReport(rows=rows, entries=summarize(rows))


def write_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.instance,
                    row.mode,
                    row.init,
                    row.run,
                    row.seed,
                    int(row.solved),
                    row.iterations,
                    row.time_ms,
                    row.restarts,
                    row.best_violation,
                ]
            )


def read_csv(path) -> list[RunRow]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                RunRow(
                    instance=rec["instance"],
                    mode=rec["mode"],
                    init=rec["init"],
                    run=int(rec["run"]),
                    seed=int(rec["seed"]),
                    solved=bool(int(rec["solved"])),
                    iterations=int(rec["iterations"]),
                    time_ms=float(rec["time_ms"]),
                    restarts=int(rec["restarts"]),
                    best_violation=int(rec["best_violation"]),
                )
            )
    return rows


def report_text(report: BenchReport) -> str:
    head = (
        f"{'instance':<14} {'mode':<8} {'init':<7} {'ok':>6}  "
        f"{'it.min':>7} {'it.max':>7} {'it.avg':>8} {'it.std':>8}  "
        f"{'ms.min':>8} {'ms.max':>9} {'ms.avg':>9} {'ms.std':>9}"
    )
    lines = [head, "-" * len(head)]
    for e in report.entries:
        it, tm = e.iterations, e.time_ms
        lines.append(
            f"{e.instance:<14} {e.mode:<8} {e.init:<7} {e.solved:>3}/{e.runs:<3}"
            f"{it.min:>8.0f} {it.max:>7.0f} {it.avg:>8.1f} {it.std:>8.1f}  "
            f"{tm.min:>8.1f} {tm.max:>9.1f} {tm.avg:>9.1f} {tm.std:>9.1f}"
        )
        if e.unsolved_runs:
            lines.append(f"  unsolved runs: {list(e.unsolved_runs)}")
    return "\n".join(lines)
