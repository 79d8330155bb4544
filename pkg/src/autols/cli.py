"""Command line front end: solve, bench, check, unroll.

Exit codes: 0 success, 1 failed check / empty language, 2 bad
configuration or input files, 3 search ended by its limits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automata import ParseError, parse_automaton
from .bench import default_workers, report_text, run_bench, write_csv
from .layered import EmptyLanguageError, count_paths, unroll
from .model import (
    InstanceError,
    assignment_rows,
    check_solution,
    load_assignment,
    load_instance,
    solution_failures,
)
from .search import SearchParams, run_solver

OK, FAILED, CONFIG_ERROR, LIMITS = 0, 1, 2, 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return CONFIG_ERROR


def _load_instance(path):
    try:
        return load_instance(path)
    except FileNotFoundError:
        raise SystemExit(_fail(f"instance file not found: {path}"))
    except (json.JSONDecodeError, InstanceError, ParseError, OSError) as exc:
        raise SystemExit(_fail(f"bad instance file {path}: {exc}"))


def _schedule_table(instance, values) -> str:
    rows = assignment_rows(instance, values)
    width = max(len(name) for name in instance.alphabet.names)
    head = "team | " + " ".join(day.capitalize()[:3].rjust(width) for day in
                                ("mon", "tue", "wed", "thu", "fri", "sat", "sun"))
    lines = [head, "-" * len(head)]
    for r, row in enumerate(rows, start=1):
        lines.append(f"{r:>4} | " + " ".join(v.rjust(width) for v in row))
    return "\n".join(lines)


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    try:
        params = SearchParams(
            tabu_floor=args.tabu_floor,
            restart_factor=args.restart_factor,
            max_iterations=args.max_iters,
            time_limit_ms=args.time_limit_ms,
            seed=args.seed,
            init_mode=args.init,
        )
        stats, ms = run_solver(instance, params, mode=args.violation_mode)
    except (InstanceError, ValueError) as exc:
        return _fail(str(exc))
    result = {
        "instance": instance.name,
        "seed": args.seed,
        "solved": stats.solved,
        "iterations": stats.iterations,
        "iterations_to_first_solution": stats.iterations_to_first_solution,
        "time_to_first_solution_ms": stats.time_to_first_solution_ms,
        "best_violation": stats.best_violation,
        "restarts": stats.restarts,
        "rows": assignment_rows(instance, ms.values),
    }
    if args.output:
        Path(args.output).write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
    if not args.quiet:
        print(_schedule_table(instance, ms.values))
        print()
        print(f"seed {args.seed}  solved {stats.solved}  "
              f"iterations {stats.iterations_to_first_solution if stats.solved else stats.iterations}  "
              f"restarts {stats.restarts}  best violation {stats.best_violation}")
        if stats.solved:
            print(f"time to first solution: {stats.time_to_first_solution_ms:.1f} ms")
    if stats.solved and not check_solution(instance, ms.values):
        print("error: solver returned an invalid solution", file=sys.stderr)
        return FAILED
    return OK if stats.solved else LIMITS


def cmd_check(args) -> int:
    instance = _load_instance(args.instance)
    try:
        values = load_assignment(args.assignment, instance)
    except FileNotFoundError:
        return _fail(f"assignment file not found: {args.assignment}")
    except (json.JSONDecodeError, InstanceError, KeyError) as exc:
        return _fail(f"bad assignment file {args.assignment}: {exc}")
    failures = solution_failures(instance, values)
    if failures:
        print(f"invalid: {failures[0]}")
        for extra in failures[1:]:
            print(f"         {extra}")
        return FAILED
    print("valid")
    return OK


def cmd_unroll(args) -> int:
    try:
        text = Path(args.automaton).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(f"cannot read automaton: {exc}")
    try:
        automaton = parse_automaton(text)
    except ParseError as exc:
        return _fail(f"bad automaton file {args.automaton}: {exc}")
    try:
        graph = unroll(automaton, args.length)
    except EmptyLanguageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except ValueError as exc:
        return _fail(str(exc))
    if args.count_only:
        print(count_paths(graph))
        return OK
    for line in graph.iter_arc_lines():
        print(line)
    print(f"# paths from start: {count_paths(graph)}")
    if args.dot:
        Path(args.dot).write_text(graph.to_dot(), encoding="utf-8")
    return OK


def cmd_bench(args) -> int:
    instances = [_load_instance(p) for p in args.instances]
    try:
        report = run_bench(
            instances,
            modes=args.modes,
            inits=args.inits,
            runs=args.runs,
            seed=args.seed,
            max_iterations=args.max_iters,
            time_limit_ms=args.time_limit_ms,
            workers=args.workers,
        )
    except ValueError as exc:
        return _fail(str(exc))
    print(report_text(report))
    if args.out:
        write_csv(report.rows, args.out)
        print(f"per-run rows written to {args.out}")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autols",
        description="Local search for rosters with automaton-described constraints",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="search one instance for a schedule")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--violation-mode", choices=("segment", "hamming"), default=None,
                       help="override the per-constraint violation mode")
    solve.add_argument("--init", choices=("random", "tiled"), default="random")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--max-iters", type=int, default=1_000_000)
    solve.add_argument("--time-limit-ms", type=float, default=None)
    solve.add_argument("--tabu-floor", type=int, default=6)
    solve.add_argument("--restart-factor", type=int, default=2)
    solve.add_argument("--output", help="write the result as JSON")
    solve.add_argument("--quiet", action="store_true")
    solve.set_defaults(func=cmd_solve)

    check = sub.add_parser("check", help="validate a schedule against an instance")
    check.add_argument("--instance", required=True)
    check.add_argument("--assignment", required=True)
    check.set_defaults(func=cmd_check)

    unroll_p = sub.add_parser("unroll", help="dump the layered graph of an automaton")
    unroll_p.add_argument("--automaton", required=True)
    unroll_p.add_argument("-n", "--length", type=int, required=True)
    unroll_p.add_argument("--count-only", action="store_true")
    unroll_p.add_argument("--dot", help="also write a graphviz rendering")
    unroll_p.set_defaults(func=cmd_unroll)

    bench = sub.add_parser("bench", help="run the benchmark grid")
    bench.add_argument("--instances", nargs="+", required=True)
    bench.add_argument("--modes", nargs="+", choices=("segment", "hamming"),
                       default=["segment"])
    bench.add_argument("--inits", nargs="+", choices=("random", "tiled"),
                       default=["random"])
    bench.add_argument("--runs", type=int, default=100)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--max-iters", type=int, default=1_000_000)
    bench.add_argument("--time-limit-ms", type=float, default=None)
    bench.add_argument("--workers", type=int, default=default_workers(),
                       help="bench pool size (default $AUTOLS_WORKERS or 1)")
    bench.add_argument("--out", help="write per-run rows as CSV")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, matching our config-error code
        return exc.code if isinstance(exc.code, int) else CONFIG_ERROR
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
