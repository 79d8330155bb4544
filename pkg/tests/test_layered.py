import pytest
from hypothesis import given, settings

from autols import (
    Alphabet,
    EmptyLanguageError,
    count_paths,
    parse_automaton,
    universal,
    unroll,
)

from oracles import count_accepted
from strategies import automaton_with_length

CHAIN = """\
alphabet a b
states 4
start 1
accept 4
trans 1 a 2
trans 2 b 3
trans 3 a 4
"""


class TestUnroll:
    def test_total_paths(self, shift6_graph):
        assert count_paths(shift6_graph) == 42
        assert shift6_graph.paths[0][shift6_graph.start] == 42

    def test_spot_node_counts(self, shift6_graph):
        # layer 4 (1-based), automaton states 3 and 5
        assert shift6_graph.paths[3][2] == 4
        assert shift6_graph.paths[3][4] == 2

    def test_matches_enumeration(self, shift6):
        # n=1 is empty (no single-symbol word is accepted)
        for n in range(2, 9):
            assert count_paths(unroll(shift6, n)) == count_accepted(shift6, n)

    def test_success_layer_paths_are_one(self, shift6_graph):
        for q in shift6_graph.success_nodes:
            assert shift6_graph.paths[6][q] == 1

    def test_empty_language_raises(self):
        a = parse_automaton("alphabet a\nstates 2\nstart 1\naccept 2\ntrans 1 a 2\n")
        assert count_paths(unroll(a, 1)) == 1
        with pytest.raises(EmptyLanguageError):
            unroll(a, 2)

    def test_rejects_zero_length(self, shift6):
        with pytest.raises(ValueError):
            unroll(shift6, 0)

    def test_chain_has_one_path(self):
        g = unroll(parse_automaton(CHAIN), 3)
        assert count_paths(g) == 1
        for i in range(4):
            assert len(g.nodes_in_layer(i)) == 1

    def test_universal_counts(self):
        g = unroll(universal(Alphabet(("a", "b", "c"))), 5)
        assert count_paths(g) == 243


class TestInvariants:
    def _check(self, g):
        n = g.n
        m = g.automaton.num_states
        # recurrence: each surviving node's count is the arc-sum of successors
        for i in range(n):
            for f in range(m):
                if g.alive(i, f):
                    assert g.paths[i][f] == sum(
                        g.paths[i + 1][t] for _s, t in g.arcs[i][f]
                    )
                    assert g.arcs[i][f], "pruned graph may not dead-end"
                else:
                    assert not g.arcs[i][f]
        # forward reachability closure
        reach = {g.start}
        for i in range(n):
            assert reach == set(g.nodes_in_layer(i))
            reach = {t for f in reach for _s, t in g.arcs[i][f]}
        assert reach == set(g.nodes_in_layer(n)) == set(g.success_nodes)

    def test_shift6(self, shift6_graph):
        self._check(shift6_graph)

    @settings(max_examples=60, deadline=None)
    @given(automaton_with_length())
    def test_random(self, agn):
        a, g, n = agn
        self._check(g)
        # one accepted word may have several accepting runs of an NFA,
        # so the path count only matches the word count exactly for DFAs
        if a.deterministic:
            assert count_paths(g) == count_accepted(a, n)
        else:
            assert count_paths(g) >= count_accepted(a, n)

    @settings(max_examples=40, deadline=None)
    @given(automaton_with_length(deterministic=True))
    def test_deterministic_preserved(self, agn):
        a, g, _n = agn
        assert count_paths(g) == count_accepted(a, g.n)
        for i in range(g.n):
            for f in range(g.automaton.num_states):
                for row in g.step[i][f]:
                    assert len(row) <= 1


class TestDumps:
    def test_arc_lines(self, shift6_graph):
        lines = list(shift6_graph.iter_arc_lines())
        assert "1 1 -> x 3" in lines
        assert all(len(line.split()) == 5 for line in lines)

    def test_dot(self, shift6_graph):
        dot = shift6_graph.to_dot()
        assert dot.startswith("digraph")
        assert '"L1S1" -> "L2S3" [label="x"]' in dot
