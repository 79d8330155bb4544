"""Finite automata over small named alphabets.

Words are tuples of integer symbol ids. An automaton only lists moves
that can still lead to acceptance: a missing transition is an implicit
rejection, there is no explicit failure state.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class AlphabetError(ValueError):
    pass


class AutomatonError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Symbol:
    id: int
    name: str


@dataclass(frozen=True)
class Alphabet:
    """Dense table of symbol names; ids are 0..len-1 in name order."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if not names:
            raise AlphabetError("alphabet must not be empty")
        if len(set(names)) != len(names):
            raise AlphabetError(f"duplicate symbol names in {names}")
        object.__setattr__(self, "_index", {nm: i for i, nm in enumerate(names)})

    def __len__(self) -> int:
        return len(self.names)

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(Symbol(i, nm) for i, nm in enumerate(self.names))

    def id(self, sym) -> int:
        """Normalize a Symbol, id or name to a symbol id."""
        if isinstance(sym, Symbol):
            sym = sym.id
        if isinstance(sym, int):
            if not 0 <= sym < len(self.names):
                raise AlphabetError(f"symbol id {sym} out of range")
            return sym
        idx = self._index.get(sym)
        if idx is None:
            raise AlphabetError(f"unknown symbol {sym!r}")
        return idx

    def name(self, sid: int) -> str:
        return self.names[sid]

    def ids(self, seq: Iterable) -> tuple[int, ...]:
        return tuple(self.id(s) for s in seq)

    def names_of(self, ids: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.names[i] for i in ids)


@dataclass(frozen=True)
class Automaton:
    """Finite automaton; NFA semantics unless `deterministic` holds.

    Transitions are (from_state, symbol_id, to_state) triples over
    0-based state ids. `deterministic` and the per-state sorted arc
    table are derived on construction.
    """

    alphabet: Alphabet
    num_states: int
    start: int
    accepting: frozenset[int]
    transitions: frozenset[tuple[int, int, int]]
    deterministic: bool = field(init=False, compare=False)
    arcs: tuple[tuple[tuple[int, int], ...], ...] = field(
        init=False, repr=False, compare=False
    )

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        m, nsym = self.num_states, len(self.alphabet)
        if m < 1:
            raise AutomatonError("automaton needs at least one state")
        if not 0 <= self.start < m:
            raise AutomatonError(f"start state {self.start} out of range")
        for q in self.accepting:
            if not 0 <= q < m:
                raise AutomatonError(f"accepting state {q} out of range")
        per_state: list[list[tuple[int, int]]] = [[] for _ in range(m)]
        seen = set()
        det = True
        for f, a, t in sorted(self.transitions):
            if not (0 <= f < m and 0 <= t < m):
                raise AutomatonError(f"transition ({f},{a},{t}) out of range")
            if not 0 <= a < nsym:
                raise AutomatonError(f"transition symbol {a} not in alphabet")
            if (f, a) in seen:
                det = False
            seen.add((f, a))
            per_state[f].append((a, t))
        object.__setattr__(self, "arcs", tuple(tuple(row) for row in per_state))
        object.__setattr__(self, "deterministic", det)

    def accepts(self, word: Sequence[int]) -> bool:
        """True iff some run over `word` ends in an accepting state."""
        nsym = len(self.alphabet)
        states = {self.start}
        for a in word:
            if not 0 <= a < nsym:
                raise AlphabetError(f"symbol id {a} out of range")
            nxt = set()
            for f in states:
                for sym, t in self.arcs[f]:
                    if sym == a:
                        nxt.add(t)
            if not nxt:
                return False
            states = nxt
        return not states.isdisjoint(self.accepting)


def universal(alphabet: Alphabet) -> Automaton:
    """Single-state automaton accepting every word over `alphabet`."""
    trans = frozenset((0, a, 0) for a in range(len(alphabet)))
    return Automaton(alphabet, 1, 0, frozenset({0}), trans)


def product(a: Automaton, b: Automaton) -> Automaton:
    """Automaton accepting the intersection of the two languages.

    The result is trimmed: states unreachable from the start or unable
    to reach an accepting state are dropped. An empty intersection
    yields a one-state automaton that accepts nothing.
    """
    if a.alphabet != b.alphabet:
        raise AutomatonError("product requires identical alphabets")
    b_on: list[dict[int, list[int]]] = []
    for f in range(b.num_states):
        by: dict[int, list[int]] = {}
        for sym, t in b.arcs[f]:
            by.setdefault(sym, []).append(t)
        b_on.append(by)

    start = (a.start, b.start)
    order = [start]
    index = {start: 0}
    pair_trans: list[tuple[int, int, int]] = []
    queue = deque([start])
    while queue:
        fa, fb = pair = queue.popleft()
        fi = index[pair]
        for sym, ta in a.arcs[fa]:
            for tb in b_on[fb].get(sym, ()):
                tgt = (ta, tb)
                ti = index.get(tgt)
                if ti is None:
                    ti = index[tgt] = len(order)
                    order.append(tgt)
                    queue.append(tgt)
                pair_trans.append((fi, sym, ti))

    accepting = {
        index[p] for p in order if p[0] in a.accepting and p[1] in b.accepting
    }
    # backward trim to states that can still accept
    rev: list[list[int]] = [[] for _ in order]
    for f, _sym, t in pair_trans:
        rev[t].append(f)
    live = set(accepting)
    queue = deque(accepting)
    while queue:
        t = queue.popleft()
        for f in rev[t]:
            if f not in live:
                live.add(f)
                queue.append(f)
    if 0 not in live:
        return Automaton(a.alphabet, 1, 0, frozenset(), frozenset())
    renum = {}
    for i in range(len(order)):
        if i in live:
            renum[i] = len(renum)
    trans = frozenset(
        (renum[f], sym, renum[t])
        for f, sym, t in pair_trans
        if f in live and t in live
    )
    return Automaton(
        a.alphabet,
        len(renum),
        renum[0],
        frozenset(renum[q] for q in accepting),
        trans,
    )


def build_pattern(alphabet: Alphabet, allowed_pairs) -> Automaton:
    """Automaton for adjacency rules on nonempty words.

    Accepts exactly the nonempty words in which every adjacent pair of
    *distinct* values is in `allowed_pairs`; repeating a value is always
    allowed. States track the last symbol seen, plus a start state.
    """
    k = len(alphabet)
    pairs = {(alphabet.id(u), alphabet.id(v)) for u, v in allowed_pairs}
    start = k
    trans = set()
    for v in range(k):
        trans.add((start, v, v))
        trans.add((v, v, v))
    for u, v in pairs:
        if u != v:
            trans.add((u, v, v))
    return Automaton(alphabet, k + 1, start, frozenset(range(k)), frozenset(trans))


def build_stretch(
    alphabet: Alphabet,
    values,
    min_len: Sequence[int],
    max_len: Sequence[int | None],
) -> Automaton:
    """Automaton bounding the length of every maximal run.

    A run of value v must have length in [min_len[v], max_len[v]];
    max_len entries of None are unbounded. Symbols not listed in
    `values` are unconstrained. Accepts the empty word.
    """
    vals = [alphabet.id(v) for v in values]
    if len(set(vals)) != len(vals):
        raise AutomatonError("duplicate values in stretch bounds")
    if not (len(vals) == len(min_len) == len(max_len)):
        raise AutomatonError("stretch bound lists must be aligned")
    k = len(alphabet)
    lo = [1] * k
    hi: list[int | None] = [None] * k
    for v, mn, mx in zip(vals, min_len, max_len):
        if mn < 1 or (mx is not None and mx < mn):
            raise AutomatonError(f"bad stretch bounds [{mn},{mx}] for value {v}")
        lo[v], hi[v] = mn, mx
    # run-length states are capped: beyond the cap extra repeats either
    # self-loop (unbounded) or are rejected (bounded)
    cap = [hi[v] if hi[v] is not None else lo[v] for v in range(k)]
    state_of = {}
    start = 0
    nstates = 1
    for v in range(k):
        for run in range(1, cap[v] + 1):
            state_of[v, run] = nstates
            nstates += 1
    trans = set()
    accepting = {start}
    for v in range(k):
        trans.add((start, v, state_of[v, 1]))
        for run in range(1, cap[v] + 1):
            q = state_of[v, run]
            if run >= lo[v]:
                accepting.add(q)
                for u in range(k):
                    if u != v:
                        trans.add((q, u, state_of[u, 1]))
            if run < cap[v]:
                trans.add((q, v, state_of[v, run + 1]))
            elif hi[v] is None:
                trans.add((q, v, q))
    return Automaton(alphabet, nstates, start, frozenset(accepting), frozenset(trans))


def build_offblock_pattern(alphabet: Alphabet, off_symbol, allowed_triples) -> Automaton:
    """Automaton restricting which values may bracket an off-block.

    For every maximal block of `off_symbol` with a work symbol s right
    before it and s' right after it, (s, s') must be in
    `allowed_triples`. Blocks at either end of the word, and direct
    changes with no off-block in between, are unconstrained.
    """
    off = alphabet.id(off_symbol)
    pairs = set()
    for u, v in allowed_triples:
        ui, vi = alphabet.id(u), alphabet.id(v)
        if off in (ui, vi):
            raise AutomatonError("off-block triples must pair work symbols")
        pairs.add((ui, vi))
    works = [v for v in range(len(alphabet)) if v != off]
    start = 0
    lead = 1  # inside an off-block with no work symbol before it
    last = {s: 2 + i for i, s in enumerate(works)}
    gap = {s: 2 + len(works) + i for i, s in enumerate(works)}
    trans = set()
    trans.add((start, off, lead))
    trans.add((lead, off, lead))
    for s in works:
        trans.add((start, s, last[s]))
        trans.add((lead, s, last[s]))
        trans.add((last[s], off, gap[s]))
        trans.add((gap[s], off, gap[s]))
        for s2 in works:
            trans.add((last[s], s2, last[s2]))
            if (s, s2) in pairs:
                trans.add((gap[s], s2, last[s2]))
    nstates = 2 + 2 * len(works)
    return Automaton(
        alphabet, nstates, start, frozenset(range(nstates)), frozenset(trans)
    )


def parse_automaton(text: str) -> Automaton:
    """Parse the line-based automaton format.

    Directives: `alphabet <names...>`, `states <m>`, `start <id>`,
    `accept <ids...>`, `trans <from> <symbol> <to>`. State ids are
    1-based in the text, 0-based in the object. '#' starts a comment.
    """
    alphabet: Alphabet | None = None
    num_states: int | None = None
    start: int | None = None
    accepting: set[int] = set()
    seen_accept = False
    raw_trans: list[tuple[int, int, str, int]] = []

    def state_id(tok: str, lineno: int) -> int:
        try:
            sid = int(tok)
        except ValueError:
            raise ParseError(lineno, f"bad state id {tok!r}") from None
        if sid < 1:
            raise ParseError(lineno, f"state ids are 1-based, got {sid}")
        return sid - 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        key, args = toks[0], toks[1:]
        if key == "alphabet":
            if alphabet is not None:
                raise ParseError(lineno, "duplicate alphabet line")
            if not args:
                raise ParseError(lineno, "alphabet needs at least one symbol")
            try:
                alphabet = Alphabet(tuple(args))
            except AlphabetError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif key == "states":
            if num_states is not None:
                raise ParseError(lineno, "duplicate states line")
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError(lineno, "states needs one positive integer")
            num_states = int(args[0])
        elif key == "start":
            if start is not None:
                raise ParseError(lineno, "duplicate start line")
            if len(args) != 1:
                raise ParseError(lineno, "start needs one state id")
            start = state_id(args[0], lineno)
        elif key == "accept":
            if seen_accept:
                raise ParseError(lineno, "duplicate accept line")
            seen_accept = True
            accepting = {state_id(t, lineno) for t in args}
        elif key == "trans":
            if len(args) != 3:
                raise ParseError(lineno, "trans needs: from symbol to")
            raw_trans.append(
                (lineno, state_id(args[0], lineno), args[1], state_id(args[2], lineno))
            )
        else:
            raise ParseError(lineno, f"unknown directive {key!r}")

    if alphabet is None:
        raise ParseError(0, "missing alphabet line")
    if num_states is None:
        raise ParseError(0, "missing states line")
    if start is None:
        raise ParseError(0, "missing start line")
    if start >= num_states:
        raise ParseError(0, f"start state {start + 1} exceeds states {num_states}")
    for q in accepting:
        if q >= num_states:
            raise ParseError(0, f"accepting state {q + 1} exceeds states {num_states}")
    trans = set()
    for lineno, f, sym, t in raw_trans:
        if f >= num_states:
            raise ParseError(lineno, f"undeclared state {f + 1}")
        if t >= num_states:
            raise ParseError(lineno, f"undeclared state {t + 1}")
        try:
            a = alphabet.id(sym)
        except AlphabetError:
            raise ParseError(lineno, f"undeclared symbol {sym!r}") from None
        trans.add((f, a, t))
    return Automaton(alphabet, num_states, start, frozenset(accepting), frozenset(trans))


def serialize_automaton(a: Automaton) -> str:
    """Inverse of parse_automaton (up to line ordering)."""
    lines = [
        "alphabet " + " ".join(a.alphabet.names),
        f"states {a.num_states}",
        f"start {a.start + 1}",
        "accept " + " ".join(str(q + 1) for q in sorted(a.accepting)),
    ]
    for f, sym, t in sorted(a.transitions):
        lines.append(f"trans {f + 1} {a.alphabet.name(sym)} {t + 1}")
    return "\n".join(lines) + "\n"
