"""Shared fixtures and reference helpers.

The reference helpers here are deliberately naive (exhaustive
enumeration, direct recomputation); tests use them as independent oracles
against the real implementations.
"""

import random
from itertools import combinations, product

import pytest

from hagopt import (
    ComputationGraph,
    DirectedGraph,
    ErConfig,
    HagGraph,
    Matching,
    computation_graph,
    gen_erdos_renyi,
)


@pytest.fixture
def twin_graph() -> DirectedGraph:
    """Two senders feeding the same three receivers: A=0, B=1, r=2..4."""
    return DirectedGraph(5, [(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)])


@pytest.fixture
def twin_cg(twin_graph) -> ComputationGraph:
    return computation_graph(twin_graph)


@pytest.fixture
def pair_share_graph() -> DirectedGraph:
    """Two receivers, each reading the same two senders: A=0, B=1, r=2..3."""
    return DirectedGraph(4, [(0, 2), (1, 2), (0, 3), (1, 3)])


@pytest.fixture
def pair_share_cg(pair_share_graph) -> ComputationGraph:
    return computation_graph(pair_share_graph)


def twin_hag(cg: ComputationGraph) -> HagGraph:
    """The twin graph rewritten with one shared node feeding all receivers."""
    hag = HagGraph(cg, d=2, single_layer=True)
    node = hag.add_intermediate((0, 1))
    for r in (2, 3, 4):
        hag.receiver_in[r] = {node.id}
    return hag


def random_graph(rng: random.Random, n: int, p: float) -> DirectedGraph:
    return gen_erdos_renyi(ErConfig(n=n, p=p, seed=rng.randrange(1 << 30)))


def multiset_init(n: int) -> list[tuple]:
    """One singleton multiset per node: the injective initial state."""
    from hagopt import multiset
    return [multiset(v) for v in range(n)]


def random_in_sets(rng: random.Random, n: int, k: int, d: int = 2) -> list[tuple[int, ...]]:
    chosen = set()
    for _ in range(40):
        if len(chosen) == k:
            break
        chosen.add(tuple(sorted(rng.sample(range(n), d))))
    return sorted(chosen)


def relabel_graph(g: DirectedGraph, perm: list[int]) -> DirectedGraph:
    return DirectedGraph(g.node_count, [(perm[u], perm[v]) for u, v in g.edges])


def relabel_hag(hag: HagGraph, perm: list[int]) -> HagGraph:
    """The same rewritten graph with original node ids permuted."""
    from hagopt import Intermediate

    def map_id(w: int) -> int:
        return perm[w] if w < hag.n else w

    out = hag.copy()
    out.intermediates = [
        Intermediate(m.id,
                     frozenset(map_id(w) for w in m.in_set),
                     frozenset(perm[l] for l in m.cover))
        for m in hag.intermediates
    ]
    out._cover_by_id = {m.id: m.cover for m in out.intermediates}
    new_receiver_in = [set() for _ in range(hag.n)]
    for r, senders in enumerate(hag.receiver_in):
        new_receiver_in[perm[r]] = {map_id(w) for w in senders}
    out.receiver_in = new_receiver_in
    return out


def enumerate_receiver_matchings(hyperedges) -> list[tuple[tuple[int, ...], int]]:
    """All pairwise-disjoint subsets of one receiver's hyperedges."""
    edges = sorted(hyperedges, key=lambda e: e.source)
    out = []
    for mask in range(1 << len(edges)):
        picked = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        used = set()
        ok = True
        for e in picked:
            if used & e.vertices:
                ok = False
                break
            used |= e.vertices
        if ok:
            out.append((tuple(sorted(e.source for e in picked)),
                        sum(e.weight for e in picked)))
    return out


def enumerate_instance_matchings(instance, cap: int | None = None):
    """All matchings of a whole instance as Matching objects (or None if the
    cartesian product exceeds the cap)."""
    per_receiver = [enumerate_receiver_matchings(p.hyperedges) for p in instance.problems]
    total = 1
    for options in per_receiver:
        total *= len(options)
        if cap is not None and total > cap:
            return None
    matchings = []
    for combo in product(*per_receiver):
        matchings.append(Matching(
            tuple(sel for sel, _ in combo),
            sum(v for _, v in combo),
        ))
    return matchings


def brute_force_receiver_value(hyperedges) -> int:
    """Independent maximum-weight matching value by full enumeration."""
    return max((v for _, v in enumerate_receiver_matchings(hyperedges)), default=0)


def exhaustive_best_single_layer_value(cg: ComputationGraph, k: int, d: int = 2) -> int:
    """Independent optimum: try every set of up to k size-d sender subsets,
    wiring receivers by per-receiver exhaustive matching."""
    all_subsets = list(combinations(range(cg.n), d))
    best = 0
    for j in range(0, k + 1):
        for sel in combinations(all_subsets, j):
            covers = [frozenset(s) for s in sel]
            total = 0
            for r in range(cg.n):
                usable = [c for c in covers if c <= cg.in_sets[r]]
                best_r = 0
                for mask in range(1 << len(usable)):
                    picked = [usable[i] for i in range(len(usable)) if mask >> i & 1]
                    union = set().union(*picked) if picked else set()
                    if sum(len(c) for c in picked) == len(union):
                        best_r = max(best_r, sum(len(c) - 1 for c in picked))
                total += best_r
            best = max(best, total - sum(len(c) - 1 for c in covers))
    return best
