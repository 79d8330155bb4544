"""Tabu search over same-column swaps, with aspiration and restarts.

Each iteration picks a violated cell uniformly, probes the swap against
every other cell of its column holding a different value, and commits
the admissible swap with the smallest violation delta. A swapped pair
is tabu for max(total violation, tabu_floor) iterations unless the move
would beat the best violation seen so far. Every
restart_factor * n_cells iterations the assignment is reinitialised and
the tabu table cleared; the incumbent is kept.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .model import Instance, ModelState, initial_random, initial_tiled


@dataclass
class SearchParams:
    tabu_floor: int = 6
    restart_factor: int = 2
    max_iterations: int | None = None
    time_limit_ms: float | None = None
    seed: int = 0
    init_mode: str = "random"

    def __post_init__(self):
        if self.tabu_floor < 0:
            raise ValueError("tabu_floor must be nonnegative")
        if self.restart_factor < 1:
            raise ValueError("restart_factor must be at least 1")
        if self.init_mode not in ("random", "tiled"):
            raise ValueError(f"unknown init mode {self.init_mode!r}")


@dataclass
class RunStats:
    solved: bool
    iterations_to_first_solution: int | None
    time_to_first_solution_ms: float | None
    best_violation: int
    restarts: int
    iterations: int

    def __post_init__(self):
        assert not self.solved or self.best_violation == 0


def select_move(ms: ModelState, x: int, tabu, it: int, best: int, rng):
    """Best admissible swap partner for cell x, ties broken uniformly.

    A candidate is admissible when the pair is off tabu or the move
    would improve on the best violation seen (aspiration). Returns
    (y, delta, probe) or None when no candidate is admissible.
    """
    teams = ms.instance.teams
    col = x % 7
    vx = ms.values[x]
    total = ms.total
    tabu_x = tabu[x]
    best_delta = None
    ties = []
    for r in range(teams):
        y = r * 7 + col
        if y == x or ms.values[y] == vx:
            continue
        delta, probe = ms.probe_swap(x, y)
        if not (tabu_x[y] <= it or total + delta < best):
            continue
        if best_delta is None or delta < best_delta:
            best_delta = delta
            ties = [(y, probe)]
        elif delta == best_delta:
            ties.append((y, probe))
    if not ties:
        return None
    y, probe = ties[0] if len(ties) == 1 else rng.choice(ties)
    return y, best_delta, probe


def tabu_search(ms: ModelState, params: SearchParams, rng=None) -> RunStats:
    """Run until the first solution or a limit; returns run statistics."""
    if rng is None:
        rng = random.Random(params.seed)
    n = ms.instance.n_cells
    period = params.restart_factor * n
    tabu = [[0] * n for _ in range(n)]
    best = ms.total
    best_values = ms.values[:]
    restarts = 0
    it = 0
    t0 = time.perf_counter()
    solved_at = None

    while True:
        if ms.total == 0:
            solved_at = it
            break
        if params.max_iterations is not None and it >= params.max_iterations:
            break
        if (
            params.time_limit_ms is not None
            and (time.perf_counter() - t0) * 1000.0 >= params.time_limit_ms
        ):
            break
        x = rng.choice(ms.violated_cells())
        move = select_move(ms, x, tabu, it, best, rng)
        if move is not None:
            y, _delta, probe = move
            ms.commit(probe)
            tenure = it + max(ms.total, params.tabu_floor)
            tabu[x][y] = tenure
            tabu[y][x] = tenure
            if ms.total < best:
                best = ms.total
                best_values = ms.values[:]
        it += 1
        if it % period == 0 and ms.total != 0:
            if params.init_mode == "tiled":
                ms.reset(initial_tiled(ms.instance))
            else:
                ms.reset(initial_random(ms.instance, rng))
            for row in tabu:
                for i in range(n):
                    row[i] = 0
            restarts += 1
            if ms.total < best:
                best = ms.total
                best_values = ms.values[:]

    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    solved = solved_at is not None
    if not solved and ms.values != best_values:
        ms.reset(best_values)  # hand the incumbent back to the caller
    return RunStats(
        solved=solved,
        iterations_to_first_solution=solved_at if solved else None,
        time_to_first_solution_ms=elapsed_ms if solved else None,
        best_violation=0 if solved else best,
        restarts=restarts,
        iterations=it,
    )


def run_solver(
    instance: Instance, params: SearchParams, mode: str | None = None
) -> tuple[RunStats, ModelState]:
    """Initialise per params and search; the returned state holds the
    final assignment (the solution when stats.solved)."""
    rng = random.Random(params.seed)
    if params.init_mode == "tiled":
        values = initial_tiled(instance)
    else:
        values = initial_random(instance, rng)
    ms = ModelState(instance, values, mode=mode, rng=rng)
    stats = tabu_search(ms, params, rng=rng)
    return stats, ms
