"""Brute-force oracle and approximation-ratio accounting."""

import random
from fractions import Fraction

import pytest

from hagopt import (
    DirectedGraph,
    WorkBudgetExceeded,
    approximation_ratio,
    candidate_space,
    computation_graph,
    optimal_single_layer,
    value,
    verify_equivalence,
)

from conftest import (
    exhaustive_best_single_layer_value,
    random_graph,
    relabel_graph,
)


class TestCandidateSpace:
    def test_twin_graph_single_candidate(self, twin_cg):
        space = candidate_space(twin_cg, 2)
        assert space.members == ((0, 1),)
        assert space.hosts == ((2, 3, 4),)

    def test_prunes_single_host_subsets(self):
        g = DirectedGraph(4, [(0, 2), (1, 2), (0, 3)])
        space = candidate_space(computation_graph(g), 2)
        assert space.members == ()  # {0,1} appears at one receiver only

    def test_members_sorted_lexicographically(self):
        g = DirectedGraph(6, [(s, r) for s in (0, 1, 3) for r in (4, 5)])
        space = candidate_space(computation_graph(g), 2)
        assert space.members == ((0, 1), (0, 3), (1, 3))

    def test_pruning_is_lossless(self):
        rng = random.Random(53)
        for _ in range(15):
            n = rng.randint(3, 6)
            g = random_graph(rng, n, rng.uniform(0.3, 0.7))
            cg = computation_graph(g)
            pruned = optimal_single_layer(cg, 2, d=2).value
            unpruned = exhaustive_best_single_layer_value(cg, 2)
            assert pruned == unpruned


class TestOptimalSingleLayer:
    def test_zero_budget(self, twin_cg):
        result = optimal_single_layer(twin_cg, 0)
        assert result.value == 0 and result.k_used == 0

    def test_twin_graph(self, twin_cg):
        result = optimal_single_layer(twin_cg, 1, d=2)
        assert result.value == 2
        assert result.final.intermediates[0].cover == frozenset({0, 1})

    def test_uses_fewer_nodes_when_extra_ones_cannot_pay(self, twin_cg):
        result = optimal_single_layer(twin_cg, 3, d=2)
        assert result.k_used == 1 and result.value == 2

    def test_matches_independent_exhaustive_search(self):
        rng = random.Random(59)
        for _ in range(12):
            n = rng.randint(3, 6)
            k = rng.randint(0, 2)
            g = random_graph(rng, n, rng.uniform(0.3, 0.7))
            cg = computation_graph(g)
            assert optimal_single_layer(cg, k).value == \
                exhaustive_best_single_layer_value(cg, k)

    def test_value_invariant_under_relabeling(self):
        rng = random.Random(61)
        for _ in range(10):
            n = rng.randint(4, 9)
            g = random_graph(rng, n, rng.uniform(0.3, 0.6))
            perm = list(range(n))
            rng.shuffle(perm)
            a = optimal_single_layer(computation_graph(g), 2).value
            b = optimal_single_layer(computation_graph(relabel_graph(g, perm)), 2).value
            assert a == b

    def test_d3_instances(self):
        rng = random.Random(67)
        for _ in range(6):
            n = rng.randint(4, 7)
            g = random_graph(rng, n, 0.6)
            cg = computation_graph(g)
            assert optimal_single_layer(cg, 2, d=3).value == \
                exhaustive_best_single_layer_value(cg, 2, d=3)

    def test_trace_is_consistent(self, twin_cg):
        result = optimal_single_layer(twin_cg, 2, d=2)
        if result.trace:
            assert result.trace[-1].cumulative_value == value(result.final)

    def test_output_is_equivalent(self):
        rng = random.Random(71)
        for _ in range(10):
            n = rng.randint(4, 10)
            g = random_graph(rng, n, rng.uniform(0.2, 0.6))
            result = optimal_single_layer(computation_graph(g), 2)
            assert verify_equivalence(result.final, g).ok

    def test_budget_exceeded_reports_bound(self):
        g = random_graph(random.Random(73), 12, 0.8)
        with pytest.raises(WorkBudgetExceeded, match="selections"):
            optimal_single_layer(computation_graph(g), 3, work_budget=10)


class TestApproximationRatio:
    def test_perfect(self):
        assert approximation_ratio(2, 2) == (Fraction(1), Fraction(0))

    def test_half(self):
        assert approximation_ratio(1, 2) == (Fraction(1, 2), Fraction(1, 2))

    def test_degenerate_zero_over_zero(self):
        assert approximation_ratio(0, 0) == (Fraction(1), Fraction(0))

    def test_candidate_above_optimum_is_an_error(self):
        with pytest.raises(ValueError, match="exceeds"):
            approximation_ratio(3, 2)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            approximation_ratio(-1, 2)
