"""Reference execution of aggregation over plain and rewritten graphs.

``run_gnn`` performs rounds of aggregate-then-update over the bipartite
computation graph; ``run_hag`` does the same over a hierarchical graph,
evaluating intermediates first (in dependency order) and reusing their
results.  For equivalent graphs the receiver-side states match exactly in
every round, while the rewritten run performs fewer pairwise aggregation
steps; the per-round difference in step counts is exactly the graph's
value.

The aggregate is pluggable but must be commutative and associative, since
the rewriting regroups inputs arbitrarily.  Updates are modeled as bare
pair formation (new state = (aggregate, old state)): update internals
never differ between the two runs, so nothing more is needed to compare
them.  Because updated states feed later rounds, a combine operation must
accept them; ``structural_combine`` lifts a leaf-level operation to do so
by combining pairs slot by slot and absorbing plain values into the
aggregate slot, which keeps the lifted operation commutative and
associative whenever the leaf operation is.
"""

import heapq
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Any

from .graphs import ComputationGraph, HagGraph


@dataclass(frozen=True)
class Updated:
    """State of a node after one update: the aggregate it saw, plus its
    previous state."""

    aggregated: Any
    previous: Any


def structural_combine(leaf_combine: Callable[[Any, Any], Any]) -> Callable[[Any, Any], Any]:
    """Lift a combine on leaf values to one on arbitrary update histories."""

    def combine(x: Any, y: Any) -> Any:
        x_up = isinstance(x, Updated)
        y_up = isinstance(y, Updated)
        if x_up and y_up:
            return Updated(combine(x.aggregated, y.aggregated),
                           combine(x.previous, y.previous))
        if x_up:
            return Updated(combine(x.aggregated, y), x.previous)
        if y_up:
            return Updated(combine(x, y.aggregated), y.previous)
        return leaf_combine(x, y)

    return combine


@dataclass(frozen=True)
class AggregateSpec:
    """A commutative, associative binary combine with its identity."""

    name: str
    combine: Callable[[Any, Any], Any]
    identity: Any


def sum_aggregate() -> AggregateSpec:
    """Integer addition over update histories."""
    return AggregateSpec("sum", structural_combine(lambda a, b: a + b), 0)


def multiset(*items) -> tuple:
    """A multiset literal: the canonical sorted-tuple representation."""
    return tuple(sorted(items))


def union_aggregate() -> AggregateSpec:
    """Multiset union (sorted-tuple representation) over update histories.

    Unlike summation this never collides: distinct input multisets give
    distinct outputs, which makes it the stronger equivalence check.
    """
    return AggregateSpec(
        "union", structural_combine(lambda a, b: tuple(sorted(a + b))), ())


@dataclass
class RunReport:
    """States per round plus the pairwise aggregation work performed.

    A node aggregating j inputs performs max(j - 1, 0) pairwise steps, so
    ``ops_per_round`` doubles as a live measurement of the cost model.
    """

    rounds: int
    ops_per_round: list[int]
    states_per_round: list[tuple[Any, ...]]

    @property
    def total_ops(self) -> int:
        return sum(self.ops_per_round)

    @property
    def final_states(self) -> tuple[Any, ...]:
        return self.states_per_round[-1]


def topo_order(hag: HagGraph) -> list[int]:
    """Intermediates ordered so every node follows all of its inputs.

    Deterministic: among ready nodes the smallest id goes first, so
    single-layer graphs come back in creation order.  Raises if the
    dependencies contain a cycle.
    """
    n = hag.n
    indegree: dict[int, int] = {m.id: 0 for m in hag.intermediates}
    children: dict[int, list[int]] = {m.id: [] for m in hag.intermediates}
    for m in hag.intermediates:
        for w in m.in_set:
            if w >= n:
                indegree[m.id] += 1
                children[w].append(m.id)
    ready = [mid for mid, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        mid = heapq.heappop(ready)
        order.append(mid)
        for child in children[mid]:
            indegree[child] -= 1
            if indegree[child] == 0:
                heapq.heappush(ready, child)
    if len(order) != len(hag.intermediates):
        raise ValueError("cycle among intermediate nodes")
    return order


def _aggregate(agg: AggregateSpec, inputs: list) -> tuple[Any, int]:
    if not inputs:
        return agg.identity, 0
    return reduce(agg.combine, inputs), len(inputs) - 1


def run_gnn(cg: ComputationGraph, rounds: int, init_states: Sequence,
            agg: AggregateSpec) -> RunReport:
    """Plain aggregation: every node aggregates its in-neighbors directly."""
    if rounds < 1:
        raise ValueError("at least one round required")
    if len(init_states) != cg.n:
        raise ValueError(f"need {cg.n} initial states, got {len(init_states)}")
    h = list(init_states)
    ops_per_round: list[int] = []
    states: list[tuple[Any, ...]] = []
    for _ in range(rounds):
        ops = 0
        aggregated = []
        for v in range(cg.n):
            inputs = [h[u] for u in sorted(cg.in_sets[v])]
            a_v, steps = _aggregate(agg, inputs)
            ops += steps
            aggregated.append(a_v)
        h = [Updated(aggregated[v], h[v]) for v in range(cg.n)]
        ops_per_round.append(ops)
        states.append(tuple(h))
    return RunReport(rounds, ops_per_round, states)


def run_hag(hag: HagGraph, rounds: int, init_states: Sequence,
            agg: AggregateSpec) -> RunReport:
    """Aggregation with reuse: intermediates run first, receivers read them.

    Receiver-side states match ``run_gnn`` on an equivalent graph exactly,
    round for round, with fewer pairwise steps.
    """
    if rounds < 1:
        raise ValueError("at least one round required")
    if len(init_states) != hag.n:
        raise ValueError(f"need {hag.n} initial states, got {len(init_states)}")
    order = topo_order(hag)
    n = hag.n
    h = list(init_states)
    ops_per_round: list[int] = []
    states: list[tuple[Any, ...]] = []
    for _ in range(rounds):
        ops = 0
        partials: dict[int, Any] = {}
        for mid in order:
            m = hag.intermediate(mid)
            inputs = [h[u] if u < n else partials[u] for u in sorted(m.in_set)]
            partials[mid], steps = _aggregate(agg, inputs)
            ops += steps
        aggregated = []
        for r in range(n):
            inputs = [h[u] if u < n else partials[u]
                      for u in sorted(hag.receiver_in[r])]
            a_r, steps = _aggregate(agg, inputs)
            ops += steps
            aggregated.append(a_r)
        h = [Updated(aggregated[r], h[r]) for r in range(n)]
        ops_per_round.append(ops)
        states.append(tuple(h))
    return RunReport(rounds, ops_per_round, states)
