"""Rostering model: a teams x 7 matrix, automaton constraints on index
views of it, and workload counts per weekday column.

The matrix is flattened row-wise into the cell vector. A constraint
applies to a view, a list of cell indices that may repeat: the circular
row constraint is the flattened sequence followed by aliases of its
first `overlap` cells, so any run or adjacent pair crossing the wrap is
visible to a linear automaton. Column workloads are never tracked as
violations; the initial assignment satisfies them and only same-column
swaps are allowed, so they hold by construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .automata import Alphabet, Automaton, build_offblock_pattern, build_pattern, build_stretch, parse_automaton, product
from .hamming import HammingState
from .layered import unroll
from .segments import SegmentationState, StaleRecordError

WEEK = 7
WEEKDAYS = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

ROTATION_PAIRS = (("d", "x"), ("e", "x"), ("n", "x"), ("x", "d"), ("x", "e"), ("x", "n"))
OFFBLOCK_TRIPLES = (("d", "d"), ("e", "e"), ("n", "n"), ("d", "e"), ("e", "n"), ("n", "d"))
TILED_ROWS = ("d", "e", "n", "x", "d", "x")


class InstanceError(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintSpec:
    """One automaton posted on a view of the cell vector."""

    name: str
    automaton: Automaton
    view: str | tuple[int, ...]
    mode: str = "segment"

    def __post_init__(self):
        if self.mode not in ("segment", "hamming"):
            raise InstanceError(f"unknown violation mode {self.mode!r}")


@dataclass(frozen=True)
class DirectCheck:
    """A predicate checked on the raw matrix, independently of automata.

    kinds: `pattern` (pairs), `stretch` (bounds), `offblock`
    (off, triples), `maxrun` (max_run). Views: `rows-cyclic` evaluates
    the flattened rows as a cyclic word; `column:<weekday>` evaluates
    one column top to bottom.
    """

    view: str
    kind: str
    pairs: frozenset = frozenset()
    bounds: tuple = ()
    off: int = -1
    max_run: int = 0


@dataclass(frozen=True)
class Instance:
    name: str
    alphabet: Alphabet
    teams: int
    weeks: int
    workload: tuple[tuple[int, ...], ...]  # [weekday][symbol id] -> count
    constraints: tuple[ConstraintSpec, ...]
    overlap: int = 0
    family: tuple = ()
    direct_checks: tuple[DirectCheck, ...] = ()
    notes: str = ""

    def __post_init__(self):
        if self.teams < 1 or self.weeks < 1:
            raise InstanceError("teams and weeks must be positive")
        if len(self.workload) != WEEK:
            raise InstanceError("workload needs one entry per weekday")
        for c, counts in enumerate(self.workload):
            if len(counts) != len(self.alphabet):
                raise InstanceError(f"workload {WEEKDAYS[c]} misses symbols")
            if sum(counts) != self.teams:
                raise InstanceError(
                    f"workload {WEEKDAYS[c]} sums to {sum(counts)}, not {self.teams}"
                )
        for spec in self.constraints:
            for idx in self.view_indices(spec.view):
                if not 0 <= idx < self.n_cells:
                    raise InstanceError(f"view of {spec.name!r} leaves the matrix")

    @property
    def n_cells(self) -> int:
        return self.teams * WEEK

    def view_indices(self, view) -> tuple[int, ...]:
        if isinstance(view, tuple):
            return view
        if isinstance(view, list):
            return tuple(view)
        if view == "rows-circular":
            return tuple(range(self.n_cells)) + tuple(range(self.overlap))
        if isinstance(view, str) and view.startswith("column:"):
            c = _weekday_index(view.split(":", 1)[1])
            return tuple(r * WEEK + c for r in range(self.teams))
        raise InstanceError(f"unknown view {view!r}")

    def row_word(self, values) -> list[int]:
        return list(values)

    def column_word(self, values, c: int) -> list[int]:
        return [values[r * WEEK + c] for r in range(self.teams)]


def _weekday_index(token: str) -> int:
    token = token.strip().lower()
    if token in WEEKDAYS:
        return WEEKDAYS.index(token)
    try:
        c = int(token)
    except ValueError:
        raise InstanceError(f"bad weekday {token!r}") from None
    if not 0 <= c < WEEK:
        raise InstanceError(f"weekday index {c} out of range")
    return c


@dataclass
class ModelProbe:
    """Recorded swap probe over every affected constraint."""

    version: int
    x: int
    y: int
    delta: int
    parts: list


class ModelState:
    """Mutable search state: cell values plus per-constraint trackers."""

    def __init__(self, instance: Instance, values, mode: str | None = None, rng=None):
        if mode not in (None, "segment", "hamming"):
            raise InstanceError(f"unknown violation mode {mode!r}")
        n = instance.n_cells
        values = list(values)
        if len(values) != n:
            raise InstanceError(f"expected {n} cells, got {len(values)}")
        self.instance = instance
        self.values = values
        self.version = 0
        if rng is None:
            rng = random.Random(0)
        self.posted = []
        for spec in instance.constraints:
            indices = instance.view_indices(spec.view)
            graph = unroll(spec.automaton, len(indices))
            word = [values[c] for c in indices]
            use = mode or spec.mode
            if use == "segment":
                state = SegmentationState(graph, word, seed=rng.getrandbits(64))
            else:
                state = HammingState(graph, word)
            positions: dict[int, tuple[int, ...]] = {}
            for p, cell in enumerate(indices):
                positions[cell] = positions.get(cell, ()) + (p,)
            self.posted.append((spec, indices, positions, state))
        self.per_cell = [0] * n
        self.violated: dict[int, None] = {}
        self._rebuild_aggregates()

    @property
    def total(self) -> int:
        return self._total

    def _rebuild_aggregates(self) -> None:
        per_cell = [0] * len(self.values)
        total = 0
        for _spec, indices, _pos, state in self.posted:
            total += state.total
            viol = state.violation
            for p, cell in enumerate(indices):
                per_cell[cell] += viol[p]
        self.per_cell = per_cell
        self._total = total
        self.violated = {c: None for c, v in enumerate(per_cell) if v > 0}

    def scratch_totals(self) -> tuple[int, list[int]]:
        """Recompute (total, per-cell) from the constraint states, fresh."""
        per_cell = [0] * len(self.values)
        total = 0
        for _spec, indices, _pos, state in self.posted:
            total += state.total
            for p, cell in enumerate(indices):
                per_cell[cell] += state.violation[p]
        return total, per_cell

    def violated_cells(self) -> list[int]:
        return list(self.violated)

    def column_of(self, cell: int) -> int:
        return cell % WEEK

    def check_gcc(self) -> bool:
        inst = self.instance
        for c in range(WEEK):
            counts = [0] * len(inst.alphabet)
            for r in range(inst.teams):
                counts[self.values[r * WEEK + c]] += 1
            if tuple(counts) != tuple(inst.workload[c]):
                return False
        return True

    def probe_swap(self, x: int, y: int) -> tuple[int, ModelProbe]:
        """Violation delta of exchanging two same-column cells."""
        if x == y or x % WEEK != y % WEEK:
            raise InstanceError("swap must exchange two cells of one column")
        vx, vy = self.values[x], self.values[y]
        if vx == vy:
            raise InstanceError("swap values must differ")
        delta = 0
        parts = []
        for k, (_spec, _indices, positions, state) in enumerate(self.posted):
            changes = [(p, vy) for p in positions.get(x, ())]
            changes += [(p, vx) for p in positions.get(y, ())]
            if not changes:
                continue
            d, rec = state.probe_changes(changes)
            delta += d
            parts.append((k, rec))
        return delta, ModelProbe(self.version, x, y, delta, parts)

    def commit(self, probe: ModelProbe) -> None:
        if probe.version != self.version:
            raise StaleRecordError(
                f"probe from version {probe.version}, state at {self.version}"
            )
        per_cell = self.per_cell
        violated = self.violated
        for k, rec in probe.parts:
            _spec, indices, _pos, state = self.posted[k]
            old = state.violation[:]
            state.commit(rec)
            new = state.violation
            for p in range(len(old)):
                if old[p] != new[p]:
                    cell = indices[p]
                    v = per_cell[cell] + new[p] - old[p]
                    per_cell[cell] = v
                    if v > 0:
                        violated[cell] = None
                    else:
                        violated.pop(cell, None)
        x, y = probe.x, probe.y
        self.values[x], self.values[y] = self.values[y], self.values[x]
        self._total += probe.delta
        self.version += 1

    def reset(self, values) -> None:
        """Replace the assignment and recompute every tracker from scratch."""
        n = self.instance.n_cells
        values = list(values)
        if len(values) != n:
            raise InstanceError(f"expected {n} cells, got {len(values)}")
        self.values[:] = values
        for _spec, indices, _pos, state in self.posted:
            state.reset_values([values[c] for c in indices])
        self._rebuild_aggregates()
        self.version += 1


def initial_random(instance: Instance, rng) -> list[int]:
    """Independent uniform shuffle of each column's workload multiset."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    values = [0] * instance.n_cells
    for c in range(WEEK):
        pool = []
        for sid, count in enumerate(instance.workload[c]):
            pool.extend([sid] * count)
        rng.shuffle(pool)
        for r, v in enumerate(pool):
            values[r * WEEK + c] = v
    return values


def initial_tiled(instance: Instance) -> list[int]:
    """Vertical tiling of the six fixed one-shift rows (d,e,n,x,d,x)."""
    if not (instance.family and instance.family[0] == "rotating"):
        raise InstanceError("tiled start needs a rotating-family instance")
    scale = instance.family[1]
    if not isinstance(scale, int) or instance.teams != 6 * scale:
        raise InstanceError("tiled start needs teams = 6 * scale")
    alpha = instance.alphabet
    values = []
    for _ in range(scale):
        for name in TILED_ROWS:
            values.extend([alpha.id(name)] * WEEK)
    return values


# ---------------------------------------------------------------------------
# direct predicates, evaluated on the raw matrix (not via automata)

def _runs(word):
    out = []
    for v in word:
        if out and out[-1][0] == v:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def _cyclic_runs(word):
    rs = _runs(word)
    if len(rs) > 1 and rs[0][0] == rs[-1][0]:
        v, k = rs.pop()
        rs[0][1] += k
    return rs


def check_direct(check: DirectCheck, word) -> bool:
    if check.view == "rows-cyclic":
        rs = _cyclic_runs(word)
        cyclic = True
    else:
        rs = _runs(word)
        cyclic = False
    if check.kind == "stretch":
        for v, k in rs:
            lo, hi = check.bounds[v]
            if k < lo or (hi is not None and k > hi):
                return False
        return True
    if check.kind == "pattern":
        seq = [v for v, _k in rs]
        edges = list(zip(seq, seq[1:]))
        if cyclic and len(seq) > 1:
            edges.append((seq[-1], seq[0]))
        return all(pair in check.pairs for pair in edges)
    if check.kind == "offblock":
        if len(rs) <= 1:
            return True
        last = len(rs) - 1
        for idx, (v, _k) in enumerate(rs):
            if v != check.off:
                continue
            if not cyclic and (idx == 0 or idx == last):
                continue
            before = rs[idx - 1][0]
            after = rs[(idx + 1) % len(rs)][0]
            if before != check.off and after != check.off and (before, after) not in check.pairs:
                return False
        return True
    if check.kind == "maxrun":
        return all(k <= check.max_run for _v, k in rs)
    raise InstanceError(f"unknown direct check {check.kind!r}")


def solution_failures(instance: Instance, values) -> list[str]:
    """Names of every violated requirement, empty when valid."""
    n = instance.n_cells
    if len(values) != n:
        raise InstanceError(f"expected {n} cells, got {len(values)}")
    failures = []
    for c in range(WEEK):
        counts = [0] * len(instance.alphabet)
        for r in range(instance.teams):
            counts[values[r * WEEK + c]] += 1
        if tuple(counts) != tuple(instance.workload[c]):
            failures.append(f"workload[{WEEKDAYS[c]}] counts {counts} differ from spec")
    for spec in instance.constraints:
        indices = instance.view_indices(spec.view)
        word = [values[i] for i in indices]
        if not spec.automaton.accepts(word):
            failures.append(f"automaton constraint {spec.name!r} rejects its view")
    for check in instance.direct_checks:
        if check.view == "rows-cyclic":
            word = instance.row_word(values)
        else:
            word = instance.column_word(values, _weekday_index(check.view.split(":", 1)[1]))
        if not check_direct(check, word):
            failures.append(f"direct {check.kind} check fails on {check.view}")
    return failures


def check_solution(instance: Instance, values) -> bool:
    return not solution_failures(instance, values)


# ---------------------------------------------------------------------------
# instance builders

def _symbol_counts(alphabet: Alphabet, per_day: dict) -> tuple[int, ...]:
    counts = [0] * len(alphabet)
    for name, count in per_day.items():
        counts[alphabet.id(name)] = count
    return tuple(counts)


def rotating_automaton(alphabet: Alphabet) -> Automaton:
    """Product of the shift-change rule and the 2..7 run-length rule."""
    pattern = build_pattern(alphabet, ROTATION_PAIRS)
    stretch = build_stretch(alphabet, list("denx"), [2, 2, 2, 2], [7, 7, 7, 7])
    return product(pattern, stretch)


def rotating_checks(alphabet: Alphabet) -> tuple[DirectCheck, ...]:
    pairs = frozenset((alphabet.id(u), alphabet.id(v)) for u, v in ROTATION_PAIRS)
    bounds = tuple((2, 7) for _ in range(len(alphabet)))
    return (
        DirectCheck(view="rows-cyclic", kind="pattern", pairs=pairs),
        DirectCheck(view="rows-cyclic", kind="stretch", bounds=bounds),
    )


def rotating_family_instance(name: str, day_workload: dict, family=()) -> Instance:
    """Rotating roster with one cyclic row constraint and uniform workload."""
    alphabet = Alphabet(("d", "e", "n", "x"))
    teams = sum(day_workload.values())
    counts = _symbol_counts(alphabet, day_workload)
    return Instance(
        name=name,
        alphabet=alphabet,
        teams=teams,
        weeks=teams,
        workload=tuple(counts for _ in range(WEEK)),
        constraints=(
            ConstraintSpec("shift-rules", rotating_automaton(alphabet), "rows-circular"),
        ),
        overlap=7,
        family=family,
        direct_checks=rotating_checks(alphabet),
    )


def build_rotating_instance(scale: int) -> Instance:
    """The scaled uniform-workload family: 6*scale teams, (2,1,1,2)*scale."""
    if scale < 1:
        raise InstanceError("scale must be at least 1")
    workload = {"d": 2 * scale, "e": scale, "n": scale, "x": 2 * scale}
    return rotating_family_instance(
        f"rotating-{scale}", workload, family=("rotating", scale)
    )


STLOUIS_WORKLOAD = (
    {"d": 5, "e": 4, "n": 5, "x": 3},  # mon (given)
    {"d": 5, "e": 4, "n": 5, "x": 3},  # tue (reconstructed)
    {"d": 5, "e": 4, "n": 5, "x": 3},  # wed (reconstructed)
    {"d": 5, "e": 4, "n": 5, "x": 3},  # thu (reconstructed)
    {"d": 5, "e": 4, "n": 5, "x": 3},  # fri (reconstructed)
    {"d": 4, "e": 4, "n": 4, "x": 5},  # sat (reconstructed)
    {"d": 3, "e": 4, "n": 4, "x": 6},  # sun (given)
)


def build_stlouis_instance() -> Instance:
    """Reconstruction of the 17-team police roster.

    Monday and Sunday workloads are the documented ones; Tuesday..Saturday
    are interpolated and marked as such in `notes`.
    """
    alphabet = Alphabet(("d", "e", "n", "x"))
    pattern = build_pattern(alphabet, ROTATION_PAIRS)
    stretch = build_stretch(alphabet, list("denx"), [3, 3, 3, 2], [8, 8, 8, 7])
    offblock = build_offblock_pattern(alphabet, "x", OFFBLOCK_TRIPLES)
    row_rule = product(product(pattern, stretch), offblock)
    monday_rule = build_stretch(alphabet, list("denx"), [1] * 4, [3] * 4)
    pairs = frozenset((alphabet.id(u), alphabet.id(v)) for u, v in ROTATION_PAIRS)
    triples = frozenset((alphabet.id(u), alphabet.id(v)) for u, v in OFFBLOCK_TRIPLES)
    off = alphabet.id("x")
    lohi = {"d": (3, 8), "e": (3, 8), "n": (3, 8), "x": (2, 7)}
    bounds = tuple(lohi[alphabet.name(v)] for v in range(4))
    return Instance(
        name="stlouis",
        alphabet=alphabet,
        teams=17,
        weeks=17,
        workload=tuple(_symbol_counts(alphabet, day) for day in STLOUIS_WORKLOAD),
        constraints=(
            ConstraintSpec("row-shift-rules", row_rule, "rows-circular"),
            ConstraintSpec("monday-no-quad", monday_rule, "column:mon"),
        ),
        overlap=8,
        family=("stlouis",),
        direct_checks=(
            DirectCheck(view="rows-cyclic", kind="pattern", pairs=pairs),
            DirectCheck(view="rows-cyclic", kind="stretch", bounds=bounds),
            DirectCheck(view="rows-cyclic", kind="offblock", pairs=triples, off=off),
            DirectCheck(view="column:mon", kind="maxrun", max_run=3),
        ),
        notes="tue..sat workloads are reconstructed, only mon and sun are documented",
    )


# ---------------------------------------------------------------------------
# instance files

def load_instance(path) -> Instance:
    """Read an instance from its JSON description."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        alphabet = Alphabet(tuple(doc["alphabet"]))
        teams = int(doc["teams"])
        weeks = int(doc["weeks"])
        workload = tuple(
            _symbol_counts(alphabet, day) for day in doc["workload"]
        )
        constraints = []
        for cdoc in doc["constraints"]:
            aref = cdoc["automaton"]
            if "file" in aref:
                text = (path.parent / aref["file"]).read_text(encoding="utf-8")
            else:
                text = aref["text"]
            view = cdoc["view"]
            if isinstance(view, list):
                view = tuple(view)
            constraints.append(
                ConstraintSpec(
                    name=cdoc.get("name", f"c{len(constraints)}"),
                    automaton=parse_automaton(text),
                    view=view,
                    mode=cdoc.get("mode", "segment"),
                )
            )
        checks = []
        for kdoc in doc.get("direct_checks", ()):
            kind = kdoc["type"]
            if kind == "pattern":
                checks.append(DirectCheck(
                    view=kdoc["view"], kind=kind,
                    pairs=frozenset((alphabet.id(u), alphabet.id(v)) for u, v in kdoc["pairs"]),
                ))
            elif kind == "stretch":
                bounds = [(1, None)] * len(alphabet)
                for name, lo, hi in kdoc["bounds"]:
                    bounds[alphabet.id(name)] = (lo, hi)
                checks.append(DirectCheck(view=kdoc["view"], kind=kind, bounds=tuple(bounds)))
            elif kind == "offblock":
                checks.append(DirectCheck(
                    view=kdoc["view"], kind=kind,
                    off=alphabet.id(kdoc["off"]),
                    pairs=frozenset((alphabet.id(u), alphabet.id(v)) for u, v in kdoc["triples"]),
                ))
            elif kind == "maxrun":
                checks.append(DirectCheck(view=kdoc["view"], kind=kind, max_run=int(kdoc["max"])))
            else:
                raise InstanceError(f"unknown direct check type {kind!r}")
        family = tuple(doc["family"]) if "family" in doc else ()
        return Instance(
            name=doc.get("name", path.stem),
            alphabet=alphabet,
            teams=teams,
            weeks=weeks,
            workload=workload,
            constraints=tuple(constraints),
            overlap=int(doc.get("overlap", 0)),
            family=family,
            direct_checks=tuple(checks),
            notes=doc.get("notes", ""),
        )
    except KeyError as exc:
        raise InstanceError(f"instance file misses field {exc}") from None


def load_assignment(path, instance: Instance) -> list[int]:
    """Read a schedule (rows of symbol names) and flatten it."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    rows = doc["rows"] if isinstance(doc, dict) else doc
    if len(rows) != instance.teams or any(len(r) != WEEK for r in rows):
        raise InstanceError(
            f"assignment must be {instance.teams} rows of {WEEK} entries"
        )
    return [instance.alphabet.id(v) for row in rows for v in row]


def assignment_rows(instance: Instance, values) -> list[list[str]]:
    alpha = instance.alphabet
    return [
        [alpha.name(values[r * WEEK + c]) for c in range(WEEK)]
        for r in range(instance.teams)
    ]
