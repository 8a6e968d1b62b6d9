from __future__ import annotations

from itertools import permutations

import numpy as np
import pytest
from helpers import make
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import dense_tensor_product

from hyperctrl import (
    CapacityError,
    SparsityPattern,
    ValidationError,
    apply_polynomial,
    apply_symmetric,
    controllability_rank,
    cross_validate,
    pattern_from_hypergraph,
    realize_random,
)
from hyperctrl.oracle import Realization, bounded_uniform


@st.composite
def patterns(draw, max_n=3, ks=(2, 3, 4)):
    n = draw(st.integers(1, max_n))
    k = draw(st.sampled_from(ks))
    idx = st.tuples(*[st.integers(0, n - 1)] * k)
    return SparsityPattern(n, k, frozenset(draw(st.sets(idx, min_size=1, max_size=8))))


class TestRealization:
    def test_empty_pattern(self):
        r = realize_random(SparsityPattern(2, 3), seed=1)
        assert r.values_A == {} and r.values_B == {}

    def test_seed_determinism(self, h1):
        p = pattern_from_hypergraph(h1)
        assert realize_random(p, 42) == realize_random(p, 42)
        assert realize_random(p, 42) != realize_random(p, 43)

    def test_values_bounded_away_from_zero(self):
        vals = bounded_uniform(np.random.default_rng(0), 1000)
        assert np.all(np.abs(vals) >= 0.1) and np.all(np.abs(vals) <= 1.0)
        assert (vals < 0).any() and (vals > 0).any()

    def test_support_must_match(self):
        p = SparsityPattern(2, 2, {(0, 1)})
        with pytest.raises(ValidationError):
            Realization(p, {(1, 0): 0.5}, {})
        with pytest.raises(ValidationError):
            Realization(p, {(0, 1): 0.0}, {})


class TestProducts:
    def test_single_term(self):
        p = SparsityPattern(2, 4, {(0, 1, 1, 1)})
        r = Realization(p, {(0, 1, 1, 1): 0.7}, {})
        e2 = np.array([0.0, 1.0])
        np.testing.assert_allclose(apply_polynomial(r, e2, e2, e2), [0.7, 0.0])

    def test_zero_argument(self):
        r = realize_random(SparsityPattern(3, 3, {(0, 1, 2), (2, 2, 2)}), 3)
        out = apply_polynomial(r, np.ones(3), np.zeros(3))
        np.testing.assert_array_equal(out, np.zeros(3))

    def test_dimension_mismatch(self):
        r = realize_random(SparsityPattern(3, 3, {(0, 1, 2)}), 3)
        with pytest.raises(ValidationError):
            apply_polynomial(r, np.ones(3))
        with pytest.raises(ValidationError):
            apply_polynomial(r, np.ones(3), np.ones(2))

    @given(patterns(), st.integers(0, 2**32 - 1))
    @settings(max_examples=80, deadline=None)
    def test_sparse_equals_dense_unfolding(self, p, seed):
        r = realize_random(p, seed)
        rng = np.random.default_rng(seed)
        vs = [rng.normal(size=p.n) for _ in range(p.k - 1)]
        dense = dense_tensor_product(r.dense(), vs)
        np.testing.assert_allclose(apply_polynomial(r, *vs), dense, rtol=1e-10, atol=1e-12)

    @given(patterns(), st.integers(0, 2**32 - 1))
    @settings(max_examples=80, deadline=None)
    def test_symmetric_is_permutation_mean(self, p, seed):
        r = realize_random(p, seed)
        rng = np.random.default_rng(seed)
        vs = [rng.normal(size=p.n) for _ in range(p.k - 1)]
        perms = list(permutations(vs))
        mean = sum(apply_polynomial(r, *q) for q in perms) / len(perms)
        np.testing.assert_allclose(apply_symmetric(r, *vs), mean, rtol=1e-10, atol=1e-12)

    def test_symmetrized_duplicates_are_order_free(self):
        keys = [(0, 1, 2), (0, 2, 1)]
        r = Realization(SparsityPattern(3, 3, set(keys)), {t: 0.4 for t in keys}, {})
        a, b = np.array([1.0, 2.0, 3.0]), np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(apply_polynomial(r, a, b), apply_polynomial(r, b, a))


class TestRank:
    def test_two_node_example(self):
        p = SparsityPattern(2, 4, {(0, 1, 1, 1)})
        rank, basis = controllability_rank(realize_random(p, 0), {1})
        assert rank == 2 and basis.stage == 1

    def test_all_drivers_full_rank(self, h1):
        r = realize_random(pattern_from_hypergraph(h1), 5)
        assert controllability_rank(r, range(3))[0] == 3

    def test_dilation_forces_deficiency(self, h2):
        p = pattern_from_hypergraph(h2)
        ranks = [controllability_rank(realize_random(p, s), {0})[0] for s in range(10)]
        assert max(ranks) < 3

    def test_capacity(self):
        r = realize_random(SparsityPattern(9, 2, {(0, 1)}), 0)
        with pytest.raises(CapacityError):
            controllability_rank(r, {0})
        assert controllability_rank(r, range(9), cap=9)[0] == 9

    def test_odd_order_warns(self):
        r = realize_random(SparsityPattern(2, 3, {(0, 1, 1)}), 0)
        with pytest.warns(UserWarning, match="strong accessibility"):
            controllability_rank(r, {1})

    def test_input_matrix_columns_count(self):
        p = SparsityPattern(2, 4, {(0, 1, 1, 1)}, 1, {(1, 0)})
        assert controllability_rank(realize_random(p, 0))[0] == 2

    @given(patterns(max_n=4, ks=(2, 4)), st.integers(0, 1000), st.data())
    @settings(max_examples=60, deadline=None)
    def test_adding_a_driver_never_lowers_rank(self, p, seed, data):
        r = realize_random(p, seed)
        base = data.draw(st.sets(st.integers(0, p.n - 1)))
        extra = data.draw(st.integers(0, p.n - 1))
        assert controllability_rank(r, base | {extra})[0] >= controllability_rank(r, base)[0]


class TestCrossValidate:
    def test_controllable(self, h1):
        rep = cross_validate(pattern_from_hypergraph(h1), {0}, 10, seed=7)
        assert rep.structural_verdict and rep.fraction_full_rank == 1.0
        assert len(rep.seeds) == 10 and len(set(rep.seeds)) == 10

    def test_not_controllable(self, h2):
        rep = cross_validate(pattern_from_hypergraph(h2), {0}, 10, seed=7)
        assert rep.structural_verdict is False and rep.fraction_full_rank == 0.0

    def test_zero_trials(self, h1):
        rep = cross_validate(pattern_from_hypergraph(h1), {0}, 0)
        assert rep.per_trial_ranks == [] and rep.fraction_full_rank is None
        assert rep.to_dict()["trials"] == 0

    def test_deterministic(self, h1):
        p = pattern_from_hypergraph(h1)
        assert cross_validate(p, {1}, 5, 3).to_dict() == cross_validate(p, {1}, 5, 3).to_dict()

    def test_tail_sharing_edges_are_one_signal(self):
        # rows v2 and v3 are both driven by the single monomial x1^3
        h = make(3, 4, [((2,), (1, 1, 1)), ((3,), (1, 1, 1))])
        rep = cross_validate(pattern_from_hypergraph(h), {0}, 10, seed=1)
        assert rep.structural_verdict is False and max(rep.per_trial_ranks) < 3
