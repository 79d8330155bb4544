import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autols import (
    ScriptedRng,
    SegmentationState,
    StaleRecordError,
    unroll,
)

from oracles import min_hamming
from strategies import automaton_with_length, word_for


def make_state(graph, dex, word, rng=None, seed=0):
    return SegmentationState(graph, dex(word), seed=seed, rng=rng)


class TestWorkedExample:
    """The running example: word xedexx on the 6-position shift graph."""

    def test_accepted_word_is_one_segment(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xexexx")
        assert st_.total == 0
        assert st_.segment_spans() == [(0, 5)]
        st_.check_invariants()

    def test_violated_word_with_forced_branch(self, shift6_graph, dex):
        # position 2 (0-based) has no arc for d; force the draw toward
        # the layer-3 node with 4 completions (automaton state 3)
        st_ = make_state(shift6_graph, dex, "xedexx", rng=ScriptedRng([2]))
        assert st_.total == 1
        assert st_.violation == [0, 0, 1, 0, 0, 0]
        assert st_.segment_spans() == [(0, 1), (3, 5)]
        assert st_.node[3] == 2  # automaton state 3, 0-based 2
        st_.check_invariants()

    def test_update_to_e_gives_three_violations(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", rng=ScriptedRng([2, 0]))
        st_.set_value(2, st_.graph.automaton.alphabet.id("e"))
        assert st_.total == 3
        assert st_.violation == [0, 0, 0, 1, 1, 1]
        assert st_.segment_spans() == [(0, 2)]
        st_.check_invariants()

    def test_update_to_x_solves(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", rng=ScriptedRng([2]))
        st_.set_value(2, st_.graph.automaton.alphabet.id("x"))
        assert st_.total == 0
        assert st_.segment_spans() == [(0, 5)]
        assert st_.graph.automaton.accepts(st_.values)
        st_.check_invariants()

    def test_probe_assign_deltas(self, shift6_graph, dex):
        alpha = shift6_graph.automaton.alphabet
        st_ = make_state(shift6_graph, dex, "xedexx", rng=ScriptedRng([2, 0]))
        delta_x, _ = st_.probe_assign(2, alpha.id("x"))
        assert delta_x == -1
        delta_e, _ = st_.probe_assign(2, alpha.id("e"))
        assert delta_e == 2

    def test_probe_then_commit_solves(self, shift6_graph, dex):
        alpha = shift6_graph.automaton.alphabet
        st_ = make_state(shift6_graph, dex, "xedexx", rng=ScriptedRng([2]))
        delta, rec = st_.probe_assign(2, alpha.id("x"))
        assert st_.total == 1  # unchanged by the probe
        st_.commit(rec)
        assert st_.total == 1 + delta == 0
        assert st_.graph.automaton.accepts(st_.values)
        st_.check_invariants()


class TestSamplingLaw:
    def test_forced_choice_frequencies(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", rng=random.Random(1234))
        trials = 100_000
        hits = {2: 0, 4: 0}
        for _ in range(trials):
            st_.recompute(2)
            hits[st_.node[3]] += 1
        assert hits[2] + hits[4] == trials
        assert abs(hits[2] / trials - 4 / 6) < 0.01
        assert abs(hits[4] / trials - 2 / 6) < 0.01


class TestProbeMechanics:
    def test_probe_leaves_state_unchanged(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=7)
        before = (
            list(st_.values),
            list(st_.node),
            list(st_.violation),
            list(st_.draws),
            st_.segment_spans(),
            st_.total,
            st_.version,
        )
        st_.probe_assign(2, 1)
        st_.probe_swap(1, 4)
        after = (
            list(st_.values),
            list(st_.node),
            list(st_.violation),
            list(st_.draws),
            st_.segment_spans(),
            st_.total,
            st_.version,
        )
        assert before == after

    def test_noop_probe_is_zero_under_replay(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=3)
        script = [r for r in st_.draws if r is not None]
        st_.rng = ScriptedRng(script)
        delta, _ = st_.probe_assign(2, st_.values[2])
        assert delta == 0

    def test_swap_of_equal_values_is_zero_under_replay(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=3)
        script = [r for r in st_.draws if r is not None]
        st_.rng = ScriptedRng(script)
        delta, _ = st_.probe_swap(0, 4)  # both x
        assert delta == 0

    def test_swap_probe_matches_scratch_recompute(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=11)
        base = st_.total
        delta, rec = st_.probe_swap(1, 2)
        st_.commit(rec)
        scratch = SegmentationState(
            st_.graph,
            st_.values,
            rng=ScriptedRng([r for r in st_.draws if r is not None]),
        )
        assert scratch.total == base + delta == st_.total

    def test_swap_and_swap_back_restores_state(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=5)
        snap = (list(st_.values), list(st_.node), list(st_.violation),
                list(st_.draws), st_.segment_spans(), st_.total)
        i, j = 1, 2
        _, rec = st_.probe_swap(i, j)
        st_.commit(rec)
        # swapping back while replaying the original draws undoes exactly
        st_.rng = ScriptedRng([r for r in snap[3][min(i, j):] if r is not None])
        _, rec2 = st_.probe_swap(i, j)
        st_.commit(rec2)
        assert (list(st_.values), list(st_.node), list(st_.violation),
                list(st_.draws), st_.segment_spans(), st_.total) == snap

    def test_stale_record_rejected(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=5)
        _, rec = st_.probe_assign(2, 1)
        st_.set_value(2, 2)
        with pytest.raises(StaleRecordError):
            st_.commit(rec)

    def test_commit_restores_invariants(self, shift6_graph, dex):
        st_ = make_state(shift6_graph, dex, "xedexx", seed=9)
        for i, v in [(2, 0), (4, 1), (0, 0), (3, 2)]:
            _, rec = st_.probe_assign(i, v)
            st_.commit(rec)
            st_.check_invariants()


class TestProperties:
    @settings(max_examples=300, deadline=None)
    @given(automaton_with_length(), st.randoms(use_true_random=False),
           st.integers(0, 2**32 - 1))
    def test_core_identities(self, agn, py_rng, seed):
        a, g, n = agn
        word = tuple(py_rng.randrange(len(a.alphabet)) for _ in range(n))
        st_ = SegmentationState(g, word, seed=seed)
        st_.check_invariants()
        assert st_.total == n - sum(e - s + 1 for s, e in st_.segment_spans())
        assert st_.total == sum(st_.violation)
        oracle = min_hamming(a, word)
        assert oracle is not None
        assert oracle <= st_.total
        if st_.total == 0:
            assert a.accepts(word)
        if a.deterministic and a.accepts(word):
            assert st_.total == 0

    @settings(max_examples=300, deadline=None)
    @given(automaton_with_length(), st.randoms(use_true_random=False),
           st.integers(0, 2**32 - 1))
    def test_incremental_equals_scratch_replay(self, agn, py_rng, seed):
        a, g, n = agn
        word = [py_rng.randrange(len(a.alphabet)) for _ in range(n)]
        st_ = SegmentationState(g, word, seed=seed)
        s = py_rng.randrange(n)
        st_.set_value(s, py_rng.randrange(len(a.alphabet)))
        scratch = SegmentationState(
            g, st_.values, rng=ScriptedRng([r for r in st_.draws if r is not None])
        )
        assert scratch.values == st_.values
        assert scratch.node == st_.node
        assert scratch.violation == st_.violation
        assert scratch.draws == st_.draws
        assert scratch.segments == st_.segments
        assert scratch.total == st_.total

    @settings(max_examples=200, deadline=None)
    @given(automaton_with_length(), st.randoms(use_true_random=False))
    def test_hamming_witness_from_path(self, agn, py_rng):
        # replacing each violated position by the label of the path arc
        # used there yields an accepted word
        a, g, n = agn
        word = [py_rng.randrange(len(a.alphabet)) for _ in range(n)]
        st_ = SegmentationState(g, word, seed=0)
        repaired = list(st_.values)
        for i in range(n):
            if st_.violation[i]:
                labels = [sym for sym, t in g.arcs[i][st_.node[i]] if t == st_.node[i + 1]]
                repaired[i] = labels[0]
        assert a.accepts(repaired)

    @settings(max_examples=200, deadline=None)
    @given(automaton_with_length(), st.randoms(use_true_random=False))
    def test_visit_count_is_suffix_length(self, agn, py_rng):
        _a, g, n = agn
        word = [py_rng.randrange(len(g.automaton.alphabet)) for _ in range(n)]
        st_ = SegmentationState(g, word, seed=1)
        assert st_.positions_visited == n
        s = py_rng.randrange(n)
        before = st_.positions_visited
        st_.probe_assign(s, 0)
        assert st_.positions_visited - before == n - s
