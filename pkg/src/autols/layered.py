"""Unrolling an automaton over a fixed number of positions.

The layered graph has one layer of automaton states per position plus a
final layer; an arc from layer i consumes position i. It is pruned in
both directions (backward from the accepting states, forward from the
start), and every surviving node carries the exact number of paths from
it to a success node, kept as unbounded integers so that weighted
successor sampling stays exact at any instance size.
"""

from __future__ import annotations

from .automata import Automaton


class EmptyLanguageError(ValueError):
    pass


class LayeredGraph:
    """Pruned unrolled automaton with per-node path counts.

    Layers are 0..n, nodes are automaton state ids. `paths[i][q]` is 0
    exactly when node q in layer i was pruned. `arcs[i][q]` lists the
    surviving (symbol, target) arcs sorted by symbol then target, and
    `step[i][q][a]` the targets reachable on symbol a; per-layer tables
    are shared between layers with identical survival masks.
    """

    __slots__ = (
        "automaton",
        "n",
        "paths",
        "arcs",
        "step",
        "start",
        "success_nodes",
        "_masks",
        "_pred_cache",
    )

    def __init__(self, automaton, n, paths, arcs, step, masks):
        self.automaton = automaton
        self.n = n
        self.paths = paths
        self.arcs = arcs
        self.step = step
        self.start = automaton.start
        self.success_nodes = tuple(
            q for q in sorted(automaton.accepting) if paths[n][q] > 0
        )
        self._masks = masks
        self._pred_cache: dict = {}

    def alive(self, layer: int, node: int) -> bool:
        return self.paths[layer][node] > 0

    def nodes_in_layer(self, layer: int) -> tuple[int, ...]:
        row = self.paths[layer]
        return tuple(q for q in range(len(row)) if row[q] > 0)

    def preds(self, layer: int):
        """Reverse adjacency for arcs out of `layer`: node -> ((from, symbol), ...)."""
        key = (self._masks[layer], self._masks[layer + 1])
        cached = self._pred_cache.get(key)
        if cached is None:
            m = self.automaton.num_states
            rows: list[list[tuple[int, int]]] = [[] for _ in range(m)]
            for f in range(m):
                for sym, t in self.arcs[layer][f]:
                    rows[t].append((f, sym))
            cached = tuple(tuple(r) for r in rows)
            self._pred_cache[key] = cached
        return cached

    def arc_count(self, layer: int) -> int:
        return sum(len(r) for r in self.arcs[layer])

    def iter_arc_lines(self):
        """Human-readable arc dump, 1-based: `layer from -> symbol to`."""
        names = self.automaton.alphabet.names
        for i in range(self.n):
            for f in range(self.automaton.num_states):
                for sym, t in self.arcs[i][f]:
                    yield f"{i + 1} {f + 1} -> {names[sym]} {t + 1}"

    def to_dot(self) -> str:
        """Graphviz rendering of the pruned graph with path counts."""
        names = self.automaton.alphabet.names
        out = ["digraph layered {", "  rankdir=LR;", "  node [shape=circle];"]
        for i in range(self.n + 1):
            for q in self.nodes_in_layer(i):
                shape = "doublecircle" if i == self.n and q in self.success_nodes else "circle"
                out.append(
                    f'  "L{i + 1}S{q + 1}" [label="{q + 1}\\n{self.paths[i][q]}" shape={shape}];'
                )
        for i in range(self.n):
            for f in range(self.automaton.num_states):
                for sym, t in self.arcs[i][f]:
                    out.append(f'  "L{i + 1}S{f + 1}" -> "L{i + 2}S{t + 1}" [label="{names[sym]}"];')
        out.append("}")
        return "\n".join(out) + "\n"


def unroll(a: Automaton, n: int) -> LayeredGraph:
    """Build the pruned layered graph of `a` over `n` positions.

    Raises EmptyLanguageError when the automaton accepts no word of
    length n (the constraint would be unsatisfiable).
    """
    if n < 1:
        raise ValueError(f"need at least one position, got {n}")
    m = a.num_states
    paths: list[list[int]] = [[0] * m for _ in range(n + 1)]
    for q in a.accepting:
        paths[n][q] = 1
    for i in range(n - 1, -1, -1):
        nxt = paths[i + 1]
        row = paths[i]
        for f in range(m):
            total = 0
            for _sym, t in a.arcs[f]:
                total += nxt[t]
            row[f] = total
    if paths[0][a.start] == 0:
        raise EmptyLanguageError(f"automaton accepts no word of length {n}")

    # forward prune: zero out co-reachable nodes the start cannot reach
    reach = {a.start}
    for i in range(n + 1):
        row = paths[i]
        for q in range(m):
            if row[q] > 0 and q not in reach:
                row[q] = 0
        if i == n:
            break
        nxt_reach = set()
        nxt_row = paths[i + 1]
        for f in reach:
            if row[f] == 0:
                continue
            for _sym, t in a.arcs[f]:
                if nxt_row[t] > 0:
                    nxt_reach.add(t)
        reach = nxt_reach

    masks = tuple(
        bytes(1 if paths[i][q] > 0 else 0 for q in range(m)) for i in range(n + 1)
    )
    nsym = len(a.alphabet)
    cache: dict = {}
    arcs_layers = []
    step_layers = []
    for i in range(n):
        key = (masks[i], masks[i + 1])
        tables = cache.get(key)
        if tables is None:
            alive_from, alive_to = key
            arcs_i = []
            step_i = []
            for f in range(m):
                if alive_from[f]:
                    row = tuple((sym, t) for sym, t in a.arcs[f] if alive_to[t])
                else:
                    row = ()
                arcs_i.append(row)
                by: list[list[int]] = [[] for _ in range(nsym)]
                for sym, t in row:
                    by[sym].append(t)
                step_i.append(tuple(tuple(ts) for ts in by))
            tables = cache[key] = (tuple(arcs_i), tuple(step_i))
        arcs_layers.append(tables[0])
        step_layers.append(tables[1])

    return LayeredGraph(a, n, paths, tuple(arcs_layers), tuple(step_layers), masks)


def count_paths(g: LayeredGraph) -> int:
    """Number of accepted words of length g.n (start-to-success paths)."""
    return g.paths[0][g.start]
