"""Degree-pairing and hub-neighbor heuristics."""

import random

from hagopt import (
    DirectedGraph,
    computation_graph,
    degree_heuristic,
    hub_heuristic,
    optimal_single_layer,
    verify_equivalence,
)

from conftest import random_graph


class TestDegreeHeuristic:
    def test_zero_budget(self, twin_cg):
        result = degree_heuristic(twin_cg, 0)
        assert result.value == 0 and result.k_used == 0

    def test_twin_graph_pairs_the_twins(self, twin_cg):
        result = degree_heuristic(twin_cg, 1)
        assert result.value == 2
        assert result.trace[0].in_set == (0, 1)

    def test_pair_with_disjoint_receivers_is_skipped(self):
        # senders 0 and 1 top the ranking but share no receiver; the pair
        # (2, 3) would have helped, showing the heuristic's blind spot
        edges = [(0, r) for r in (4, 5, 6)] + [(1, r) for r in (7, 8, 9)]
        edges += [(2, 4), (3, 4), (2, 5), (3, 5)]
        cg = computation_graph(DirectedGraph(10, edges))
        result = degree_heuristic(cg, 1)
        assert result.k_used == 0 and result.value == 0
        # literal mode keeps the useless node at a value loss
        literal = degree_heuristic(cg, 1, stop_on_nonpositive=False)
        assert literal.k_used == 1 and literal.value == -1

    def test_second_pair_found_with_larger_budget(self):
        edges = [(0, r) for r in (4, 5, 6)] + [(1, r) for r in (7, 8, 9)]
        edges += [(2, 4), (3, 4), (2, 5), (3, 5)]
        cg = computation_graph(DirectedGraph(10, edges))
        result = degree_heuristic(cg, 2)
        assert result.trace[0].in_set == (2, 3) and result.value == 1

    def test_runs_out_of_ranked_senders(self, twin_cg):
        result = degree_heuristic(twin_cg, 10)
        assert result.k_used == 1  # only two senders have out-edges at all

    def test_receiver_claimed_by_two_disjoint_pairs(self):
        edges = [(s, 6) for s in range(4)] + [(s, 7) for s in range(4)]
        cg = computation_graph(DirectedGraph(8, edges))
        result = degree_heuristic(cg, 2)
        assert result.k_used == 2
        assert result.value == 2
        assert cg.in_sets[6] == frozenset(range(4))
        assert result.final.receiver_in[6] == {8, 9}


class TestHubHeuristic:
    def test_zero_budget(self, twin_cg):
        assert hub_heuristic(twin_cg, 0).value == 0

    def test_twin_senders_have_no_in_neighbors(self, twin_cg):
        result = hub_heuristic(twin_cg, 5)
        assert result.value == 0 and result.k_used == 0

    def test_pairs_hub_with_its_in_neighbor(self):
        g = DirectedGraph(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])
        result = hub_heuristic(computation_graph(g), 2)
        assert result.value == 1
        assert result.trace[0].in_set == (0, 1)
        assert result.k_used == 1

    def test_self_loop_not_paired_with_itself(self):
        g = DirectedGraph(3, [(0, 0), (0, 1), (0, 2)])
        result = hub_heuristic(computation_graph(g), 1)
        assert result.k_used == 0

    def test_ties_prefer_smaller_neighbor_id(self):
        edges = [(1, 0), (2, 0)]                    # both 1 and 2 feed vertex 0
        edges += [(0, r) for r in (3, 4, 5, 6)]     # vertex 0 is the top hub
        edges += [(1, 3), (1, 4), (2, 3), (2, 4)]   # both pairings serve 3 and 4
        result = hub_heuristic(computation_graph(DirectedGraph(7, edges)), 1)
        assert result.trace[0].in_set == (0, 1)


class TestHeuristicProperties:
    def test_outputs_equivalent_and_bounded_by_optimum(self):
        rng = random.Random(79)
        for _ in range(20):
            n = rng.randint(4, 10)
            g = random_graph(rng, n, rng.uniform(0.2, 0.6))
            cg = computation_graph(g)
            k = rng.randint(1, 3)
            best = optimal_single_layer(cg, k, d=2).value
            for result in (degree_heuristic(cg, k), hub_heuristic(cg, k)):
                assert verify_equivalence(result.final, g).ok
                assert result.value <= best

    def test_no_receiver_reads_overlapping_covers(self):
        rng = random.Random(83)
        for _ in range(20):
            n = rng.randint(4, 10)
            g = random_graph(rng, n, rng.uniform(0.3, 0.6))
            cg = computation_graph(g)
            for result in (degree_heuristic(cg, 3), hub_heuristic(cg, 3)):
                hag = result.final
                for senders in hag.receiver_in:
                    covers = [hag.cover_of(w) for w in senders if w >= hag.n]
                    union = set().union(*covers) if covers else set()
                    assert sum(len(c) for c in covers) == len(union)
