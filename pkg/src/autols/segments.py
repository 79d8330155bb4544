"""Segment-based violation tracking for one unrolled-automaton constraint.

The tracker keeps one start-to-success path through the layered graph
together with the segmentation of the current word along that path.
Positions whose value matches an arc on the path extend the current
segment and cost nothing; anywhere the word falls off the graph the
position is charged one violation and the path resumes at a successor
drawn with probability proportional to its number of completions.

Updating after a change at position s revisits only positions s..n-1,
so the cost of a move probe is independent of the number of arcs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .layered import LayeredGraph


class StaleRecordError(RuntimeError):
    """The state changed since this probe record was taken."""


class ScriptedRng:
    """Replays a fixed sequence of draw outcomes.

    Stands in for random.Random when a run must reproduce the picks of
    an earlier run exactly, or when a test forces a specific branch.
    """

    def __init__(self, draws: Sequence[int]):
        self._draws = list(draws)
        self._pos = 0

    def randrange(self, n: int) -> int:
        if self._pos >= len(self._draws):
            raise IndexError("scripted draw sequence exhausted")
        r = self._draws[self._pos]
        self._pos += 1
        if not 0 <= r < n:
            raise ValueError(f"scripted draw {r} out of range({n})")
        return r


@dataclass
class ProbeRecord:
    """Snapshot of the suffix a probe recomputed, replayable by commit."""

    version: int
    start: int
    changes: tuple[tuple[int, int], ...]
    delta: int
    node_tail: list[int]
    viol_tail: list[int]
    draw_tail: list
    segments: list[list[int]]
    total: int


class SegmentationState:
    """Mutable violation state of one automaton constraint.

    Everything is 0-based: positions 0..n-1, layers 0..n. `node[i]` is
    the picked node in layer i, `violation[i]` charges position i,
    `segments` holds [start, end] position spans (inclusive), and
    `draws[i]` records the sampling outcome used at position i (None
    when the successor was forced), which lets a scratch run replay an
    incremental one exactly.
    """

    def __init__(self, graph: LayeredGraph, values, seed=None, rng=None):
        n = graph.n
        values = list(values)
        if len(values) != n:
            raise ValueError(f"expected {n} values, got {len(values)}")
        nsym = len(graph.automaton.alphabet)
        for v in values:
            if not 0 <= v < nsym:
                raise ValueError(f"symbol id {v} out of range")
        self.graph = graph
        self.values = values
        self.rng = rng if rng is not None else random.Random(seed)
        self.node = [0] * (n + 1)
        self.node[0] = graph.start
        self.violation = [0] * n
        self.draws: list = [None] * n
        self.segments: list[list[int]] = []
        self.total = 0
        self.version = 0
        self.positions_visited = 0
        self._calc(0)

    @property
    def n(self) -> int:
        return self.graph.n

    def segment_spans(self) -> list[tuple[int, int]]:
        return [tuple(seg) for seg in self.segments]

    def set_value(self, i: int, v: int) -> None:
        """Assign position i and update the suffix in place."""
        self.values[i] = v
        self._calc(i)
        self.version += 1

    def recompute(self, start: int = 0) -> None:
        """Re-roll the stochastic picks from `start` on, values unchanged."""
        self._calc(start)
        self.version += 1

    def reset_values(self, values) -> None:
        """Replace the whole word and recompute from the first position."""
        if len(values) != self.graph.n:
            raise ValueError(f"expected {self.graph.n} values, got {len(values)}")
        self.values[:] = values
        self._calc(0)
        self.version += 1

    def probe_changes(self, changes) -> tuple[int, ProbeRecord]:
        """Violation delta of assigning `changes` without observably mutating.

        The candidate values are applied, the suffix recomputed, the
        result recorded, and everything undone. Committing the record
        replays the recorded outcome without consuming fresh draws.
        """
        changes = tuple(sorted((i, v) for i, v in changes))
        if len({i for i, _ in changes}) != len(changes):
            raise ValueError("duplicate positions in probe")
        s = changes[0][0]
        pre_vals = [(i, self.values[i]) for i, _ in changes]
        pre_node = self.node[s + 1 :]
        pre_viol = self.violation[s:]
        pre_draws = self.draws[s:]
        pre_segs = [seg[:] for seg in self.segments]
        pre_total = self.total
        for i, v in changes:
            self.values[i] = v
        self._calc(s)
        record = ProbeRecord(
            version=self.version,
            start=s,
            changes=changes,
            delta=self.total - pre_total,
            node_tail=self.node[s + 1 :],
            viol_tail=self.violation[s:],
            draw_tail=self.draws[s:],
            segments=[seg[:] for seg in self.segments],
            total=self.total,
        )
        for i, v in pre_vals:
            self.values[i] = v
        self.node[s + 1 :] = pre_node
        self.violation[s:] = pre_viol
        self.draws[s:] = pre_draws
        self.segments[:] = pre_segs
        self.total = pre_total
        return record.delta, record

    def probe_assign(self, i: int, v: int) -> tuple[int, ProbeRecord]:
        return self.probe_changes([(i, v)])

    def probe_swap(self, i: int, j: int) -> tuple[int, ProbeRecord]:
        if i == j:
            raise ValueError("swap needs two distinct positions")
        return self.probe_changes([(i, self.values[j]), (j, self.values[i])])

    def commit(self, record: ProbeRecord) -> None:
        """Apply a probe's recorded outcome; no randomness is consumed."""
        if record.version != self.version:
            raise StaleRecordError(
                f"record from version {record.version}, state at {self.version}"
            )
        s = record.start
        for i, v in record.changes:
            self.values[i] = v
        self.node[s + 1 :] = record.node_tail
        self.violation[s:] = record.viol_tail
        self.draws[s:] = record.draw_tail
        self.segments[:] = [seg[:] for seg in record.segments]
        self.total = record.total
        self.version += 1

    def check_invariants(self) -> None:
        """Assert every structural invariant; for tests and debugging."""
        g = self.graph
        n = g.n
        assert self.node[0] == g.start
        assert self.node[n] in g.success_nodes, "path must end in a success node"
        prev_end = -1
        covered = set()
        for start, end in self.segments:
            assert 0 <= start <= end < n, f"bad segment ({start},{end})"
            assert start > prev_end, "segments must be ordered and disjoint"
            prev_end = end
            covered.update(range(start, end + 1))
        for i in range(n):
            in_seg = i in covered
            assert self.violation[i] == (0 if in_seg else 1)
            succ = [t for _sym, t in g.arcs[i][self.node[i]]]
            assert self.node[i + 1] in succ, f"path arc missing at {i}"
            if in_seg:
                labelled = g.step[i][self.node[i]][self.values[i]]
                assert self.node[i + 1] in labelled, f"segment arc mislabelled at {i}"
        assert self.total == sum(self.violation)
        assert self.total == n - sum(e - s + 1 for s, e in self.segments)

    def _calc(self, s: int) -> None:
        """Recompute path, violations and segments for positions s..n-1.

        Keeps the prefix untouched: the segment list is truncated to
        positions before s and extension continues exactly when
        position s-1 sits inside a segment.
        """
        g = self.graph
        n = g.n
        node = self.node
        viol = self.violation
        draws = self.draws
        segs = self.segments
        values = self.values
        paths = g.paths
        step_layers = g.step
        arc_layers = g.arcs
        randrange = self.rng.randrange

        if s == 0:
            segs.clear()
            in_seg = False
        else:
            in_seg = viol[s - 1] == 0
            while segs and segs[-1][0] >= s:
                segs.pop()
            if segs and segs[-1][1] >= s:
                segs[-1][1] = s - 1
        old_suffix = sum(viol[s:])

        f = node[s]
        for i in range(s, n):
            a = values[i]
            matches = step_layers[i][f][a]
            if matches:
                if len(matches) == 1:
                    t = matches[0]
                    r = None
                else:
                    # nondeterministic tie: weight matching arcs by
                    # their completion counts, same rule as below
                    nxt = paths[i + 1]
                    total = 0
                    for t2 in matches:
                        total += nxt[t2]
                    r = randrange(total)
                    acc = 0
                    for t2 in matches:
                        acc += nxt[t2]
                        if r < acc:
                            t = t2
                            break
                if in_seg:
                    segs[-1][1] = i
                else:
                    segs.append([i, i])
                    in_seg = True
                viol[i] = 0
            else:
                arcs = arc_layers[i][f]
                if len(arcs) == 1:
                    t = arcs[0][1]
                    r = None
                else:
                    nxt = paths[i + 1]
                    r = randrange(paths[i][f])
                    acc = 0
                    for _sym2, t2 in arcs:
                        acc += nxt[t2]
                        if r < acc:
                            t = t2
                            break
                viol[i] = 1
                in_seg = False
            node[i + 1] = t
            draws[i] = r
            f = t
        self.positions_visited += n - s
        self.total += sum(viol[s:]) - old_suffix
