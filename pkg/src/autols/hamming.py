"""Exact minimum-Hamming-distance violation tracking on the layered graph.

The comparison method: the violation of the constraint is the minimal
number of positions that must change to reach an accepted word,
computed by shortest-path dynamic programming over the layered graph
with arc cost 0 on a label match and 1 otherwise. Per-variable
violations come from one deterministic minimum-cost witness path.

Each probe relaxes every arc in the suffix layers, so its cost grows
with the arc count of the unrolled graph, unlike the segment tracker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .layered import LayeredGraph
from .segments import StaleRecordError

INF = 1 << 30


@dataclass
class HammingProbeRecord:
    version: int
    start: int
    changes: tuple[tuple[int, int], ...]
    delta: int
    fwd_tail: list[list[int]]
    total: int


class HammingState:
    """Mutable min-distance state of one automaton constraint.

    `fwd[i][q]` is the least number of mismatched positions along any
    path from the start node to node q in layer i. `bwd` is the
    symmetric matrix computed at initialisation time (updates leave it
    untouched; the maintained invariants only rely on `fwd`).
    """

    def __init__(self, graph: LayeredGraph, values):
        n = graph.n
        values = list(values)
        if len(values) != n:
            raise ValueError(f"expected {n} values, got {len(values)}")
        self.graph = graph
        self.values = values
        # full transition list; pruned-away nodes stay at INF or feed
        # only dead nodes, so they never affect reachable costs
        self._arcs = sorted(graph.automaton.transitions)
        m = graph.automaton.num_states
        self.fwd: list[list[int]] = [[INF] * m for _ in range(n + 1)]
        self.fwd[0][graph.start] = 0
        self.version = 0
        self.arc_relaxations = 0
        self._refresh_fwd(0)
        self.bwd = self._compute_bwd()
        self.total = self._best_final()
        assert self.bwd[0][graph.start] == self.total
        self.node: list[int] = []
        self.violation: list[int] = []
        self._extract_path()

    @property
    def n(self) -> int:
        return self.graph.n

    def update(self, start: int) -> None:
        """Restore the invariants after values changed at positions >= start."""
        self._refresh_fwd(start)
        self.total = self._best_final()
        self._extract_path()
        self.version += 1

    def set_value(self, i: int, v: int) -> None:
        self.values[i] = v
        self.update(i)

    def reset_values(self, values) -> None:
        """Replace the whole word and recompute from the first position."""
        if len(values) != self.graph.n:
            raise ValueError(f"expected {self.graph.n} values, got {len(values)}")
        self.values[:] = values
        self.update(0)

    def probe_changes(self, changes) -> tuple[int, HammingProbeRecord]:
        """Violation delta of assigning `changes`, without mutating."""
        changes = tuple(sorted((i, v) for i, v in changes))
        if len({i for i, _ in changes}) != len(changes):
            raise ValueError("duplicate positions in probe")
        s = changes[0][0]
        pre_vals = [(i, self.values[i]) for i, _ in changes]
        for i, v in changes:
            self.values[i] = v
        n = self.graph.n
        tail: list[list[int]] = []
        row = self.fwd[s]
        for i in range(s, n):
            row = self._relax(row, self.values[i])
            tail.append(row)
        for i, v in pre_vals:
            self.values[i] = v
        new_total = min(
            (tail[-1] if tail else self.fwd[s])[q] for q in self.graph.success_nodes
        )
        record = HammingProbeRecord(
            version=self.version,
            start=s,
            changes=changes,
            delta=new_total - self.total,
            fwd_tail=tail,
            total=new_total,
        )
        return record.delta, record

    def probe_assign(self, i: int, v: int) -> tuple[int, HammingProbeRecord]:
        return self.probe_changes([(i, v)])

    def probe_swap(self, i: int, j: int) -> tuple[int, HammingProbeRecord]:
        if i == j:
            raise ValueError("swap needs two distinct positions")
        return self.probe_changes([(i, self.values[j]), (j, self.values[i])])

    def commit(self, record: HammingProbeRecord) -> None:
        if record.version != self.version:
            raise StaleRecordError(
                f"record from version {record.version}, state at {self.version}"
            )
        s = record.start
        for i, v in record.changes:
            self.values[i] = v
        self.fwd[s + 1 :] = [row[:] for row in record.fwd_tail]
        self.total = record.total
        self._extract_path()
        self.version += 1

    def check_invariants(self) -> None:
        g = self.graph
        n = g.n
        assert self.total == min(self.fwd[n][q] for q in g.success_nodes)
        assert self.node[0] == g.start
        assert self.node[n] in g.success_nodes
        assert sum(self.violation) == self.total
        for i in range(n):
            succ = [t for _sym, t in g.arcs[i][self.node[i]]]
            assert self.node[i + 1] in succ

    def _relax(self, row: list[int], value: int) -> list[int]:
        m = self.graph.automaton.num_states
        out = [INF] * m
        for f, sym, t in self._arcs:
            c = row[f] + (sym != value)
            if c < out[t]:
                out[t] = c
        self.arc_relaxations += len(self._arcs)
        return out

    def _refresh_fwd(self, start: int) -> None:
        n = self.graph.n
        row = self.fwd[start]
        for i in range(start, n):
            row = self._relax(row, self.values[i])
            self.fwd[i + 1] = row

    def _compute_bwd(self) -> list[list[int]]:
        g = self.graph
        n, m = g.n, g.automaton.num_states
        bwd: list[list[int]] = [[INF] * m for _ in range(n + 1)]
        for q in g.automaton.accepting:
            bwd[n][q] = 0
        for i in range(n - 1, -1, -1):
            row = bwd[i]
            nxt = bwd[i + 1]
            v = self.values[i]
            for f, sym, t in self._arcs:
                c = nxt[t] + (sym != v)
                if c < row[f]:
                    row[f] = c
        return bwd

    def _best_final(self) -> int:
        return min(self.fwd[self.graph.n][q] for q in self.graph.success_nodes)

    def _extract_path(self) -> None:
        """Walk one minimum-cost path backward through `fwd`.

        Ties break toward the smallest node id, so the witness path and
        the per-variable violations are deterministic.
        """
        g = self.graph
        n = g.n
        fwd = self.fwd
        node = [0] * (n + 1)
        viol = [0] * n
        best = self.total
        node[n] = min(q for q in g.success_nodes if fwd[n][q] == best)
        for i in range(n - 1, -1, -1):
            t = node[i + 1]
            target = fwd[i + 1][t]
            v = self.values[i]
            chosen = -1
            for f, sym in g.preds(i)[t]:
                if fwd[i][f] + (sym != v) == target and (chosen == -1 or f < chosen):
                    chosen = f
            assert chosen >= 0, "optimal predecessor must exist"
            node[i] = chosen
            viol[i] = fwd[i + 1][t] - fwd[i][chosen]
        self.node = node
        self.violation = viol
