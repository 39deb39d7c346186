"""Greedy construction of hierarchical aggregation graphs.

Two optimizers are provided.  ``full_greedy`` commits to an intermediate
node together with all of its out-edges at every step: it repeatedly picks
the size-d subset of available senders shared by the most receivers,
inserts a node for it, and rewires those receivers.  ``partial_greedy``
commits only to the node's inputs; all intermediate-to-receiver edges are
re-optimized from scratch at every step by solving the per-receiver
matching problems, so earlier wiring choices can be revised as the node
set grows.

Also here are the two set functions used to reason about single-layer
solution quality: ``ordered_matching_value`` (insert in-sets in a given
order, greedily wiring each new node to every receiver that can still take
it) and ``max_matching_value`` (the best wiring over all receivers for an
unordered in-set collection).  The first is within a factor d of the
second for every ordering, and both differ from graph values only by the
fixed per-node offset (d - 1) per intermediate.
"""

import time
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from .graphs import ComputationGraph, HagGraph, value
from .matching import (
    BRUTEFORCE_VERTEX_CAP,
    Hyperedge,
    LazyMaxCounter,
    PartialHag,
    ReceiverProblem,
    RegimeError,
    cooccurrence_counts,
    max_matching_blossom,
    max_matching_bruteforce,
    optimal_completion,
)

LAYER_MODES = ("single", "multi")


@dataclass(frozen=True)
class OptimizerConfig:
    """Shared optimizer settings.

    ``k`` bounds the number of intermediates, ``d`` their in-degree.
    ``stop_on_nonpositive`` halts a run once no remaining step can improve
    the value; disabling it reproduces the literal always-insert-k
    behavior, in which zero-gain or losing nodes are still inserted.
    ``candidate_floor`` is the smallest receiver count worth considering
    for a new node (anything serving fewer than two receivers cannot pay
    for itself); it is ignored when stopping is disabled so the literal
    mode still sees every candidate.  Ties are always broken toward the
    lexicographically smallest sorted candidate, which makes every run
    reproducible.
    """

    k: int
    d: int = 2
    layer_mode: str = "single"
    stop_on_nonpositive: bool = True
    tie_break: str = "lexicographic"
    candidate_floor: int = 2

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be nonnegative")
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.layer_mode not in LAYER_MODES:
            raise ValueError(f"layer_mode must be one of {LAYER_MODES}")
        if self.tie_break != "lexicographic":
            raise ValueError("only lexicographic tie-breaking is supported")
        if self.candidate_floor < 1:
            raise ValueError("candidate_floor must be at least 1")

    @property
    def single_layer(self) -> bool:
        return self.layer_mode == "single"


@dataclass(frozen=True)
class StepRecord:
    """One optimizer step: the chosen in-set and its effect on the value."""

    in_set: tuple[int, ...]
    receivers: int
    marginal_value: int
    cumulative_value: int


@dataclass
class HagResult:
    """Optimizer output: the graph, the per-step trace, and counters."""

    final: HagGraph
    trace: list[StepRecord] = field(default_factory=list)
    candidates_considered: int = 0
    elapsed_ms: float = 0.0

    @property
    def value(self) -> int:
        return value(self.final)

    @property
    def k_used(self) -> int:
        return len(self.final.intermediates)


def _subset_key(hag: HagGraph, in_set: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(in_set))


def _in_set_combos(members: Iterable[int], d: int, restrict_below: int | None):
    pool = sorted(x for x in members if restrict_below is None or x < restrict_below)
    return combinations(pool, d)


def _candidate_cover(hag: HagGraph, key: Sequence[int]) -> frozenset[int] | None:
    """Union cover of a candidate, or None if member covers overlap."""
    cover: set[int] = set()
    for w in key:
        part = hag.cover_of(w)
        if cover & part:
            return None
        cover |= part
    return frozenset(cover)


def _first_forced_candidate(hag: HagGraph, d: int, single_layer: bool) -> tuple[int, ...] | None:
    """Lexicographically first insertable in-set when nothing co-occurs.

    Only reached in literal always-insert mode on graphs where no size-d
    subset is shared by any receiver; the scan is exhaustive but such
    graphs are tiny in practice.
    """
    top = hag.n if single_layer else hag.n + len(hag.intermediates)
    for key in combinations(range(top), d):
        cover = _candidate_cover(hag, key)
        if cover is not None and not hag.has_cover(cover):
            return key
    return None


def full_greedy(cg: ComputationGraph, cfg: OptimizerConfig) -> HagResult:
    """Insert up to k intermediates, each grabbing the most-shared subset.

    At every step the candidate is the size-d subset C of current
    sender-side nodes maximizing the number of receivers whose whole
    in-neighborhood still contains C; those receivers then read from the
    new node instead.  Each rewired receiver sheds d - 1 in-edges no
    matter how large the member covers are, so maximizing the receiver
    count is exactly the greedy-on-marginal-value rule.
    """
    t0 = time.perf_counter()
    hag = HagGraph(cg, d=cfg.d, single_layer=cfg.single_layer)
    restrict = cg.n if cfg.single_layer else None
    counter = LazyMaxCounter(cooccurrence_counts(hag.receiver_in, cfg.d, restrict))
    out_map: dict[int, set[int]] = {l: set(s) for l, s in enumerate(cg.out_sets)}
    trace: list[StepRecord] = []
    cumulative = 0

    def duplicates_existing(key: tuple[int, ...]) -> bool:
        cover = _candidate_cover(hag, key)
        return cover is None or hag.has_cover(cover)

    for _ in range(cfg.k):
        found = counter.best(skip=duplicates_existing)
        best_count = found[0] if found else 0
        if cfg.stop_on_nonpositive and best_count < max(cfg.candidate_floor, 2):
            break
        if found is None:
            key = _first_forced_candidate(hag, cfg.d, cfg.single_layer)
            if key is None:
                break  # every admissible in-set is already in use
        else:
            key = found[1]
        shared = set.intersection(*(out_map[x] for x in key)) if key else set()
        node = hag.add_intermediate(key)
        out_map[node.id] = set(shared)
        members = set(key)
        for r in shared:
            if cfg.d == 2:
                # delta update: only subsets touching the removed members
                # change, so wide receivers cost O(degree), not O(degree^2)
                removed = sorted(members)
                keep = [x for x in hag.receiver_in[r]
                        if x not in members and (restrict is None or x < restrict)]
                for c in removed:
                    for x in keep:
                        counter.adjust((c, x) if c < x else (x, c), -1)
                counter.adjust((removed[0], removed[1]), -1)
                if restrict is None:
                    for x in keep:
                        counter.adjust((x, node.id), +1)
                hag.receiver_in[r] -= members
                hag.receiver_in[r].add(node.id)
            else:
                for combo in _in_set_combos(hag.receiver_in[r], cfg.d, restrict):
                    counter.adjust(combo, -1)
                hag.receiver_in[r] -= members
                hag.receiver_in[r].add(node.id)
                for combo in _in_set_combos(hag.receiver_in[r], cfg.d, restrict):
                    counter.adjust(combo, +1)
            for x in members:
                out_map[x].discard(r)
        marginal = (cfg.d - 1) * (len(shared) - 1)
        cumulative += marginal
        trace.append(StepRecord(tuple(sorted(key)), len(shared), marginal, cumulative))
        assert value(hag) == cumulative, "value bookkeeping drifted from the graph"
    considered = len(counter.counts)

    if __debug__:
        hag.validate()
    return HagResult(
        final=hag,
        trace=trace,
        candidates_considered=considered,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def _completion_mode(cg: ComputationGraph, cfg: OptimizerConfig) -> str:
    """Pick the exact per-receiver solver, or refuse loudly.

    Pairwise single-layer instances always have an exact polynomial
    solver; anything else needs every receiver to fit under the
    exhaustive-search cap.
    """
    if cfg.d == 2 and cfg.single_layer:
        return "blossom"
    worst = max(range(cg.n), key=lambda r: len(cg.in_sets[r]), default=None)
    if worst is not None and len(cg.in_sets[worst]) > BRUTEFORCE_VERTEX_CAP:
        raise RegimeError(
            f"receiver {worst} has in-degree {len(cg.in_sets[worst])}, above the "
            f"exhaustive-search cap of {BRUTEFORCE_VERTEX_CAP}; this configuration "
            f"(d={cfg.d}, {cfg.layer_mode}-layer) has no exact polynomial solver")
    return "bruteforce"


def partial_greedy(cg: ComputationGraph, cfg: OptimizerConfig) -> HagResult:
    """Greedy over node in-sets with fully re-optimized receiver wiring.

    For every candidate in-set C the optimizer forms the sender-side
    structure extended by C, solves the per-receiver matching problems
    exactly, and keeps the candidate whose completed graph has the largest
    value.  Receiver wiring is recomputed from scratch each step, so edges
    chosen earlier may move to newer nodes; because of that, each trace
    record's ``receivers`` field reports the node's out-degree in the
    final wiring rather than at insertion time.
    """
    t0 = time.perf_counter()
    mode = _completion_mode(cg, cfg)
    solve = max_matching_blossom if mode == "blossom" else max_matching_bruteforce
    n = cg.n

    chosen: list[frozenset[int]] = []          # in-sets committed so far
    chosen_covers: list[frozenset[int]] = []
    edges_at: list[list[Hyperedge]] = [[] for _ in range(n)]
    base_val = [0] * n
    base_total = 0
    trace: list[StepRecord] = []
    considered = 0

    static_candidates: list[tuple[tuple[int, ...], frozenset[int], list[int]]] | None = None
    if cfg.single_layer:
        counts = cooccurrence_counts(cg.in_sets, cfg.d, restrict_below=n)
        static_candidates = []
        for key in sorted(counts):
            cover = frozenset(key)
            hosts = [r for r in range(n) if cover <= cg.in_sets[r]]
            static_candidates.append((key, cover, hosts))

    def receiver_value(r: int, edges: list[Hyperedge]) -> int:
        problem = ReceiverProblem(r, cg.in_sets[r], tuple(edges))
        return solve(problem)[1]

    def cover_hosts(cover: frozenset[int]) -> list[int]:
        return [r for r in range(n) if cover <= cg.in_sets[r]]

    def candidate_pool(step: int) -> Iterable[tuple[tuple[int, ...], frozenset[int], list[int]]]:
        floor = cfg.candidate_floor if cfg.stop_on_nonpositive else 1
        if static_candidates is not None:
            for key, cover, hosts in static_candidates:
                if len(hosts) >= floor and cover not in chosen_covers:
                    yield key, cover, hosts
            return
        # Multi-layer: candidates may include earlier intermediates, whose
        # covers grow, so the pool is rebuilt every step.
        pool = list(range(n)) + [n + i for i in range(step)]
        cover_of = {n + i: chosen_covers[i] for i in range(step)}
        for key in combinations(pool, cfg.d):
            cover: set[int] = set()
            ok = True
            for w in key:
                part = cover_of.get(w, frozenset((w,)) if w < n else None)
                if part is None or cover & part:
                    ok = False
                    break
                cover |= part
            if not ok:
                continue
            cover_f = frozenset(cover)
            if cover_f in chosen_covers:
                continue
            hosts = cover_hosts(cover_f)
            if len(hosts) >= floor:
                yield key, cover_f, hosts

    for step in range(cfg.k):
        node_id = n + step
        offset = sum(len(s) - 1 for s in chosen) + (cfg.d - 1)
        best = None  # (value, key, cover, hosts)
        for key, cover, hosts in candidate_pool(step):
            considered += 1
            delta = 0
            edge = Hyperedge(node_id, cover)
            for r in hosts:
                delta += receiver_value(r, edges_at[r] + [edge]) - base_val[r]
            cand_value = base_total + delta - offset
            if best is None or cand_value > best[0]:
                best = (cand_value, key, cover, hosts)
        if best is None:
            key = _forced_partial_candidate(n, chosen, chosen_covers, cfg, step)
            if key is None:
                break
            cover = _union_cover(n, chosen_covers, key)
            hosts = cover_hosts(cover)
            edge = Hyperedge(node_id, cover)
            delta = sum(receiver_value(r, edges_at[r] + [edge]) - base_val[r]
                        for r in hosts)
            best = (base_total + delta - offset, key, cover, hosts)
        cand_value, key, cover, hosts = best
        marginal = cand_value - (trace[-1].cumulative_value if trace else 0)
        if cfg.stop_on_nonpositive and marginal <= 0:
            break
        chosen.append(frozenset(key))
        chosen_covers.append(cover)
        edge = Hyperedge(node_id, cover)
        for r in hosts:
            edges_at[r].append(edge)
            new_val = receiver_value(r, edges_at[r])
            base_total += new_val - base_val[r]
            base_val[r] = new_val
        trace.append(StepRecord(tuple(sorted(key)), 0, marginal, cand_value))

    p = PartialHag.from_in_sets(n, chosen, d=cfg.d, single_layer=cfg.single_layer)
    final = optimal_completion(p, cg, mode=mode)
    out_r = final.out_to_receivers()
    trace = [
        StepRecord(rec.in_set, out_r[n + i], rec.marginal_value, rec.cumulative_value)
        for i, rec in enumerate(trace)
    ]
    if trace:
        assert trace[-1].cumulative_value == value(final), \
            "completed value disagrees with the step trace"
    if __debug__:
        final.validate()
    return HagResult(
        final=final,
        trace=trace,
        candidates_considered=considered,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def _union_cover(n: int, chosen_covers: list[frozenset[int]], key: Sequence[int]) -> frozenset[int]:
    cover: set[int] = set()
    for w in key:
        cover |= chosen_covers[w - n] if w >= n else {w}
    return frozenset(cover)


def _forced_partial_candidate(n: int, chosen: list[frozenset[int]],
                              chosen_covers: list[frozenset[int]],
                              cfg: OptimizerConfig, step: int) -> tuple[int, ...] | None:
    """Lexicographically first unused in-set for literal always-insert mode."""
    top = n if cfg.single_layer else n + step
    for key in combinations(range(top), cfg.d):
        cover: set[int] = set()
        ok = True
        for w in key:
            part = chosen_covers[w - n] if w >= n else frozenset((w,))
            if cover & part:
                ok = False
                break
            cover |= part
        if ok and frozenset(cover) not in chosen_covers:
            return key
    return None


InSetSequence = Sequence[Collection[int]]


def _check_in_set(cg: ComputationGraph, s: Collection[int], d: int) -> frozenset[int]:
    fs = frozenset(int(x) for x in s)
    if len(fs) != d:
        raise ValueError(f"in-set {sorted(fs)} does not have size {d}")
    if any(not (0 <= x < cg.n) for x in fs):
        raise ValueError(f"in-set {sorted(fs)} references unknown senders")
    return fs


def ordered_matching_value(cg: ComputationGraph, seq: InSetSequence, d: int,
                           allow_repeats: bool = False) -> int:
    """Total wired out-degree, times d - 1, after greedy sequential wiring.

    In-sets are inserted in order; each new node takes every receiver whose
    remaining direct senders still include the whole in-set (claimed
    senders are consumed).  Repeats are rejected unless explicitly allowed
    (a repeat can never wire anywhere, but concatenated sequences used in
    analysis may contain them).
    """
    residual = [set(s) for s in cg.in_sets]
    seen: set[frozenset[int]] = set()
    total_out = 0
    for s in seq:
        fs = _check_in_set(cg, s, d)
        if fs in seen:
            if not allow_repeats:
                raise ValueError(f"in-set {sorted(fs)} repeats in the sequence")
            continue
        seen.add(fs)
        for r in range(cg.n):
            if fs <= residual[r]:
                residual[r] -= fs
                total_out += 1
    return (d - 1) * total_out


def greedy_sequence_graph(cg: ComputationGraph, seq: InSetSequence, d: int) -> HagGraph:
    """The graph built by the same greedy sequential wiring as above."""
    hag = HagGraph(cg, d=d, single_layer=True)
    for s in seq:
        node = hag.add_intermediate(_check_in_set(cg, s, d))
        for r in range(cg.n):
            direct = {w for w in hag.receiver_in[r] if w < cg.n}
            if node.cover <= direct:
                hag.receiver_in[r] -= node.cover
                hag.receiver_in[r].add(node.id)
    if __debug__:
        hag.validate()
    return hag


def max_matching_value(cg: ComputationGraph, s_set: Iterable[Collection[int]], d: int,
                       mode: str = "auto") -> int:
    """Best-wiring analogue of ``ordered_matching_value`` for unordered sets.

    Equals the optimally completed graph's value plus (d - 1) per in-set.
    Monotone: adding in-sets never lowers it.
    """
    sets = []
    seen: set[frozenset[int]] = set()
    for s in s_set:
        fs = _check_in_set(cg, s, d)
        if fs in seen:
            raise ValueError(f"in-set {sorted(fs)} appears twice")
        seen.add(fs)
        sets.append(fs)
    sets.sort(key=sorted)
    if not sets:
        return 0
    p = PartialHag.from_in_sets(cg.n, sets, d=d, single_layer=True)
    completed = optimal_completion(p, cg, mode=mode)
    return value(completed) + (d - 1) * len(sets)
