from __future__ import annotations

import pytest
from helpers import hypergraphs, make
from hypothesis import given, settings
from oracles import naive_greedy_completion, naive_optimal, naive_verify

from hyperctrl import (
    CapacityError,
    DirectedHypergraph,
    GenConfig,
    ValidationError,
    generate,
    is_structurally_controllable,
    matching_lower_bound,
    select,
    select_greedy,
    select_mag,
    select_matching_only,
    select_optimal_bfs,
    verify_structural_controllability,
)


class TestVerify:
    def test_examples(self, h1, h2):
        assert verify_structural_controllability(h1, {0})[0]
        ok, diag = verify_structural_controllability(h2, {0})
        assert not ok and diag["inaccessible"] == [] and len(diag["uncovered"]) == 1
        assert is_structurally_controllable(h2, range(3))

    def test_odd_k_flag(self):
        h = make(2, 3, [((2,), (1, 1))])
        ok, diag = verify_structural_controllability(h, {0})
        assert ok and diag["strong_accessibility_only"]

    def test_range_error(self, h1):
        with pytest.raises(ValidationError):
            verify_structural_controllability(h1, {7})

    @given(hypergraphs(max_n=8, max_head=3))
    @settings(max_examples=80, deadline=None)
    def test_matches_oracle_on_all_singletons(self, h):
        for v in range(h.n):
            assert is_structurally_controllable(h, {v}) == naive_verify(h, {v})


class TestMatchingOnly:
    def test_examples(self, h1, h3):
        r = select_matching_only(h1)
        assert r.drivers == (0,) and r.controllable
        r = select_matching_only(h3)
        assert r.drivers == (1, 2) and r.controllable

    def test_can_be_insufficient(self):
        # v1 -> v2 -> v3 chain plus v3 -> v1 closes a cycle: perfect matching, nothing seeded
        h = make(3, 2, [((2,), (1,)), ((3,), (2,)), ((1,), (3,))])
        r = select_matching_only(h)
        assert r.drivers == () and r.lower_bound == 0 and not r.controllable


class TestMag:
    def test_examples(self, h1, h2):
        assert select_mag(h1).drivers == (0,)
        r = select_mag(h2)
        assert r.drivers == (0, 2) and r.lower_bound == 2
        assert select_mag(DirectedHypergraph(5, 2)).drivers == (0, 1, 2, 3, 4)

    def test_completes_accessibility(self):
        h = make(3, 2, [((2,), (1,)), ((3,), (2,)), ((1,), (3,))])
        r = select_mag(h)
        assert r.drivers == (0,) and r.steps == [(0, 3)]

    @given(hypergraphs(max_n=9, max_head=3))
    @settings(max_examples=100, deadline=None)
    def test_equals_naive_definition(self, h):
        lb, uncovered = matching_lower_bound(h)
        expected = sorted(set(uncovered) | set(naive_greedy_completion(h, uncovered)))
        r = select_mag(h)
        assert list(r.drivers) == expected
        assert naive_verify(h, r.drivers)
        gains = [g for _, g in r.steps]
        assert all(g >= 1 for g in gains)


class TestGreedy:
    def test_examples(self, h1, h2):
        assert select_greedy(h1).drivers == (0,)
        assert select_greedy(DirectedHypergraph(3, 2)).drivers == (0, 1, 2)
        r = select_greedy(h2)
        assert r.drivers == (0, 2) and r.steps == [(0, 3), (2, 0)]

    @given(hypergraphs(max_n=9, max_head=3))
    @settings(max_examples=80, deadline=None)
    def test_always_controllable(self, h):
        assert naive_verify(h, select_greedy(h).drivers)


class TestOptimal:
    def test_examples(self, h1, h2):
        assert select_optimal_bfs(h1).drivers == (0,)
        assert select_optimal_bfs(h2).drivers == (0, 1)
        assert select_optimal_bfs(DirectedHypergraph(1, 2)).drivers == (0,)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            select_optimal_bfs(DirectedHypergraph(13, 2))
        assert select_optimal_bfs(DirectedHypergraph(13, 2), max_n=13).num_drivers == 13

    @given(hypergraphs(max_n=8, max_head=3))
    @settings(max_examples=100, deadline=None)
    def test_equals_naive_enumeration(self, h):
        assert select_optimal_bfs(h).drivers == naive_optimal(h)

    @given(hypergraphs(max_n=9, ks=(2, 3, 4), max_head=3))
    @settings(max_examples=100, deadline=None)
    def test_sandwich(self, h):
        lb, _ = matching_lower_bound(h)
        opt = select_optimal_bfs(h).num_drivers
        assert lb <= opt <= select_mag(h).num_drivers
        assert opt <= select_greedy(h).num_drivers


def test_dispatch_and_serialization(h2):
    r = select(h2, "mag")
    d = r.to_dict()
    assert d["drivers"] == [1, 3] and d["method"] == "mag" and d["controllable"]
    with pytest.raises(ValidationError):
        select(h2, "annealing")


def test_controlled_input_rejected():
    h = make(2, 2, [((2,), (1,))], controls=[(1, 1)])
    for method in ("matching", "mag", "greedy", "optimal"):
        with pytest.raises(ValidationError):
            select(h, method)


@pytest.mark.parametrize("topology", ["uniform", "scale_free", "clustered", "small_world"])
def test_generated_outputs_verify(topology):
    h = generate(GenConfig(60, 4, 1.0, topology, seed=5, modules=3))
    for method in ("mag", "greedy"):
        r = select(h, method)
        assert r.controllable and is_structurally_controllable(h, r.drivers)
