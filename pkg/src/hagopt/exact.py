"""Exhaustive optimal solver for single-layer problems.

This is the ground-truth oracle that every approximation claim in the
package is checked against.  It enumerates all ways to pick up to k
intermediate in-sets out of the candidate space, evaluates each selection
by solving the per-receiver matchings, and returns a maximum-value graph.
Selections are enumerated smallest-size first and lexicographically within
a size; the first maximum found wins, so results are reproducible.
"""

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .graphs import ComputationGraph, value
from .greedy import HagResult, StepRecord
from .matching import PartialHag, cooccurrence_counts, optimal_completion


class WorkBudgetExceeded(RuntimeError):
    """The enumeration would evaluate more selections than allowed."""


@dataclass(frozen=True)
class CandidateSpace:
    """Size-d sender subsets worth considering as intermediate in-sets.

    Only subsets contained in at least two receivers' in-neighborhoods are
    kept.  The pruning is lossless for the optimal value: a subset hosted
    by at most one receiver can be wired to at most one receiver in any
    completion, so it saves at most d - 1 while its node costs d - 1;
    removing it from any selection never lowers the value, and the smaller
    selection is itself enumerated (all sizes up to k are searched).
    """

    d: int
    members: tuple[tuple[int, ...], ...]
    hosts: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.members)


def candidate_space(cg: ComputationGraph, d: int, floor: int = 2) -> CandidateSpace:
    """All size-d sender subsets co-occurring in at least ``floor`` receivers."""
    counts = cooccurrence_counts(cg.in_sets, d, restrict_below=cg.n)
    members = tuple(key for key in sorted(counts) if counts[key] >= floor)
    hosts = tuple(
        tuple(r for r in range(cg.n) if set(key) <= cg.in_sets[r])
        for key in members
    )
    return CandidateSpace(d, members, hosts)


def _max_disjoint(indices: list[int], disjoint: list[list[bool]]) -> int:
    """Largest pairwise-disjoint subfamily among the given candidates.

    The families here have at most k members; the common sizes are spelled
    out and anything larger falls back to exhaustive subset testing.
    """
    m = len(indices)
    if m == 0:
        return 0
    if m == 1:
        return 1
    if m == 2:
        a, b = indices
        return 2 if disjoint[a][b] else 1
    if m == 3:
        a, b, c = indices
        ab, ac, bc = disjoint[a][b], disjoint[a][c], disjoint[b][c]
        if ab and ac and bc:
            return 3
        if ab or ac or bc:
            return 2
        return 1
    best = 0
    for mask in range(1, 1 << m):
        picked = [indices[i] for i in range(m) if mask >> i & 1]
        if len(picked) <= best:
            continue
        if all(disjoint[a][b] for a, b in combinations(picked, 2)):
            best = len(picked)
    return best


def optimal_single_layer(cg: ComputationGraph, k: int, d: int = 2,
                         work_budget: int = 10_000_000,
                         mode: str = "auto") -> HagResult:
    """Maximum-value single-layer graph with at most k intermediates.

    Every selection size from 0 to k is searched, because a forced k-th
    node can only lose value.  Branches whose optimistic bound cannot
    strictly beat the incumbent are pruned, which never changes the value
    and keeps the first-found tie rule intact.
    """
    t0 = time.perf_counter()
    space = candidate_space(cg, d)
    n_cands = len(space)
    budget = sum(comb(n_cands, j) for j in range(min(k, n_cands) + 1))
    if budget > work_budget:
        raise WorkBudgetExceeded(
            f"{budget} selections to evaluate exceeds the budget of {work_budget}")

    covers = [frozenset(key) for key in space.members]
    host_sets = [set(h) for h in space.hosts]
    counts = [len(h) for h in space.hosts]
    disjoint = [[not (covers[i] & covers[j]) for j in range(n_cands)] for i in range(n_cands)]

    # top_sums[i][t] = sum of the t largest host counts among candidates i..;
    # an upper bound on how many receivers t extra nodes could serve.
    top_sums: list[list[int]] = [[0] * (k + 1) for _ in range(n_cands + 1)]
    tops: list[int] = []
    for i in range(n_cands - 1, -1, -1):
        tops = sorted(tops + [counts[i]], reverse=True)[:k]
        for t in range(1, k + 1):
            top_sums[i][t] = sum(tops[:t])

    best_value = 0
    best_sel: tuple[int, ...] = ()
    current: list[int] = []
    present: dict[int, list[int]] = {r: [] for r in range(cg.n)}
    matched = {r: 0 for r in range(cg.n)}
    total_matched = 0

    def recurse(start: int) -> None:
        nonlocal best_value, best_sel, total_matched
        j = len(current)
        val = (d - 1) * (total_matched - j)
        if val > best_value:
            best_value = val
            best_sel = tuple(current)
        if j == k:
            return
        for i in range(start, n_cands):
            remaining = k - j
            gain = max(
                (top_sums[i][t] - t for t in range(1, remaining + 1)), default=0)
            if val + (d - 1) * gain <= best_value:
                break  # later candidates have even smaller host counts
            undo: list[tuple[int, int]] = []
            for r in space.hosts[i]:
                present[r].append(i)
                new = _max_disjoint(present[r], disjoint)
                undo.append((r, matched[r]))
                total_matched += new - matched[r]
                matched[r] = new
            current.append(i)
            recurse(i + 1)
            current.pop()
            for r, old in undo:
                present[r].pop()
                total_matched += old - matched[r]
                matched[r] = old

    recurse(0)

    in_sets = [space.members[i] for i in best_sel]
    final_mode = mode
    prefix_values: list[int] = []
    completions = []
    for j in range(len(in_sets) + 1):
        p = PartialHag.from_in_sets(cg.n, in_sets[:j], d=d, single_layer=True)
        done = optimal_completion(p, cg, mode=final_mode)
        completions.append(done)
        prefix_values.append(value(done))
    final = completions[-1]
    assert prefix_values[-1] == best_value, "materialized graph disagrees with the search"

    trace = []
    for j, key in enumerate(in_sets, start=1):
        out_deg = completions[j].out_to_receivers()[cg.n + j - 1]
        trace.append(StepRecord(
            in_set=key,
            receivers=out_deg,
            marginal_value=prefix_values[j] - prefix_values[j - 1],
            cumulative_value=prefix_values[j],
        ))
    return HagResult(
        final=final,
        trace=trace,
        candidates_considered=n_cands,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def approximation_ratio(candidate_value: int, optimal_value: int) -> tuple[Fraction, Fraction]:
    """(ratio, 1 - ratio) of an algorithm's value against the optimum.

    Both zero counts as a perfect ratio.  A candidate exceeding the
    optimum means the oracle or the algorithm is broken, so that is an
    error rather than a ratio greater than one.
    """
    if candidate_value < 0 or optimal_value < 0:
        raise ValueError("values must be nonnegative")
    if candidate_value > optimal_value:
        raise ValueError(
            f"candidate value {candidate_value} exceeds optimal {optimal_value}; "
            f"aborting, this indicates a bug in an algorithm or the oracle")
    if optimal_value == 0:
        alpha = Fraction(1)
    else:
        alpha = Fraction(candidate_value, optimal_value)
    return alpha, 1 - alpha
