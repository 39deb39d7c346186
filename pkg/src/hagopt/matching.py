"""Per-receiver matching problems and completion of partial HAGs.

Fixing the sender-side structure of a HAG (which intermediates exist and
what feeds them) leaves one decision per receiver: which intermediates to
wire in.  An intermediate v is usable at receiver r only when cover(v) is
contained in r's original in-neighborhood, and two intermediates can both
feed r only when their covers are disjoint (each original edge must be
realized exactly once).  That is precisely a matching problem in a
hypergraph per receiver: vertices are r's original senders, hyperedges are
the usable covers, and a hyperedge saves |cover| - 1 aggregation steps.

The whole-instance problem is the disjoint union of the per-receiver ones,
so receivers are solved independently.  ``complete_from_matching`` turns a
matching back into a full HAG (residual senders keep direct edges), and
``matching_from_hag`` inverts it; the two are mutually inverse bijections,
and the HAG value equals the matching value minus a constant that depends
only on the partial graph (sum over intermediates of in-degree minus one).
"""

import heapq
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

from .graphs import (
    ComputationGraph,
    HagGraph,
    Intermediate,
    resolve_in_set,
)

BRUTEFORCE_VERTEX_CAP = 20
BRUTEFORCE_EDGE_CAP = 22


class RegimeError(RuntimeError):
    """A solver was invoked outside the parameter regime it supports."""


@dataclass(frozen=True)
class Hyperedge:
    """A usable intermediate at some receiver: its id and its cover."""

    source: int
    vertices: frozenset[int]

    @property
    def weight(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class ReceiverProblem:
    """The matching problem local to one receiver."""

    receiver: int
    vertices: frozenset[int]
    hyperedges: tuple[Hyperedge, ...]


@dataclass(frozen=True)
class MatchingInstance:
    """Disjoint union of all per-receiver problems, indexed by receiver id."""

    problems: tuple[ReceiverProblem, ...]

    def total_hyperedges(self) -> int:
        return sum(len(p.hyperedges) for p in self.problems)


@dataclass(frozen=True)
class Matching:
    """Selected intermediates per receiver plus the total saved weight."""

    selected: tuple[tuple[int, ...], ...]
    value: int


class PartialHag:
    """Sender-side structure of a HAG: intermediates with their in-sets only.

    Receivers are not wired yet; completing the graph means choosing, per
    receiver, a matching of usable covers.
    """

    __slots__ = ("n", "d", "single_layer", "intermediates", "_cover_by_id")

    def __init__(self, n: int, d: int | None = None, single_layer: bool = True):
        self.n = n
        self.d = d
        self.single_layer = single_layer
        self.intermediates: list[Intermediate] = []
        self._cover_by_id: dict[int, frozenset[int]] = {}

    @classmethod
    def from_in_sets(cls, n: int, in_sets: Iterable[Iterable[int]],
                     d: int | None = None, single_layer: bool = True) -> "PartialHag":
        p = cls(n, d=d, single_layer=single_layer)
        for s in in_sets:
            p.add_intermediate(s)
        return p

    @classmethod
    def from_hag(cls, hag: HagGraph) -> "PartialHag":
        p = cls(hag.n, d=hag.d, single_layer=hag.single_layer)
        for m in hag.intermediates:
            p.add_intermediate(m.in_set)
        return p

    def add_intermediate(self, in_set: Iterable[int]) -> Intermediate:
        next_id = self.n + len(self.intermediates)
        members, cover = resolve_in_set(
            self.n, self._cover_by_id, in_set,
            d=self.d, single_layer=self.single_layer, next_id=next_id)
        if cover in self._cover_by_id.values():
            raise ValueError(f"cover {sorted(cover)} duplicates an existing intermediate")
        node = Intermediate(next_id, members, cover)
        self.intermediates.append(node)
        self._cover_by_id[next_id] = cover
        return node

    def cover_of(self, node_id: int) -> frozenset[int]:
        if 0 <= node_id < self.n:
            return frozenset((node_id,))
        return self._cover_by_id[node_id]

    def in_degree_excess(self) -> int:
        """Sum over intermediates of (in-degree - 1); the completion offset."""
        return sum(len(m.in_set) - 1 for m in self.intermediates)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PartialHag)
            and self.n == other.n
            and self.d == other.d
            and self.single_layer == other.single_layer
            and self.intermediates == other.intermediates
        )

    def __repr__(self) -> str:
        return f"PartialHag(n={self.n}, intermediates={len(self.intermediates)})"


def build_matching_instance(p: PartialHag, cg: ComputationGraph) -> MatchingInstance:
    """One hypergraph per receiver: hyperedges are covers usable there."""
    if p.n != cg.n:
        raise ValueError(f"partial graph has {p.n} nodes but computation graph has {cg.n}")
    problems = []
    for r in range(cg.n):
        senders = cg.in_sets[r]
        edges = tuple(
            Hyperedge(m.id, m.cover)
            for m in p.intermediates
            if m.cover <= senders
        )
        problems.append(ReceiverProblem(r, senders, edges))
    return MatchingInstance(tuple(problems))


# -- maximum-cardinality matching in general graphs --------------------------

def _max_cardinality_matching(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Maximum matching in a general graph by augmenting paths with blossom
    contraction; returns mate[] with -1 for unmatched vertices.

    Deterministic for a fixed adjacency order.  O(V^3) worst case, which is
    plenty for the per-receiver graphs this package produces.
    """
    mate = [-1] * n
    parent = [-1] * n
    base = list(range(n))
    in_queue = [False] * n
    in_blossom = [False] * n

    def lca(a: int, b: int) -> int:
        on_path = [False] * n
        while True:
            a = base[a]
            on_path[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if on_path[b]:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int) -> None:
        while base[v] != b:
            in_blossom[base[v]] = True
            in_blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    def augment_from(root: int) -> None:
        nonlocal parent, base, in_queue
        parent = [-1] * n
        base = list(range(n))
        in_queue = [False] * n
        in_queue[root] = True
        queue = [root]
        head = 0
        while head < len(queue):
            v = queue[head]
            head += 1
            for to in adj[v]:
                if base[v] == base[to] or mate[v] == to:
                    continue
                if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                    # Even-to-even edge: contract the blossom around it.
                    b = lca(v, to)
                    for i in range(n):
                        in_blossom[i] = False
                    mark_path(v, b, to)
                    mark_path(to, b, v)
                    for i in range(n):
                        if in_blossom[base[i]]:
                            base[i] = b
                            if not in_queue[i]:
                                in_queue[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    if mate[to] == -1:
                        # Augmenting path found; flip matched edges along it.
                        u = to
                        while u != -1:
                            pv = parent[u]
                            nxt = mate[pv]
                            mate[u] = pv
                            mate[pv] = u
                            u = nxt
                        return
                    if not in_queue[mate[to]]:
                        in_queue[mate[to]] = True
                        queue.append(mate[to])

    for v in range(n):
        if mate[v] == -1:
            augment_from(v)
    return mate


def max_matching_blossom(problem: ReceiverProblem) -> tuple[tuple[int, ...], int]:
    """Exact maximum matching when every hyperedge is an ordinary edge.

    All such edges weigh 1, so maximum weight equals maximum cardinality.
    Returns (sorted selected intermediate ids, total weight); deterministic
    given the input order.
    """
    for e in problem.hyperedges:
        if len(e.vertices) > 2:
            raise RegimeError(
                f"receiver {problem.receiver}: hyperedge for intermediate "
                f"{e.source} has {len(e.vertices)} vertices; pairwise solver needs <= 2")
    verts = sorted(problem.vertices)
    index = {v: i for i, v in enumerate(verts)}
    adj: list[list[int]] = [[] for _ in verts]
    source_by_pair: dict[frozenset[int], int] = {}
    for e in problem.hyperedges:
        a, b = sorted(e.vertices)
        adj[index[a]].append(index[b])
        adj[index[b]].append(index[a])
        source_by_pair[e.vertices] = e.source
    mate = _max_cardinality_matching(len(verts), adj)
    selected = []
    for i, j in enumerate(mate):
        if j > i:
            selected.append(source_by_pair[frozenset((verts[i], verts[j]))])
    selected.sort()
    return tuple(selected), len(selected)


def max_matching_bruteforce(problem: ReceiverProblem,
                            vertex_cap: int = BRUTEFORCE_VERTEX_CAP,
                            edge_cap: int = BRUTEFORCE_EDGE_CAP) -> tuple[tuple[int, ...], int]:
    """Exact maximum-weight hypergraph matching by branch and bound.

    Hyperedges are tried in ascending source-id order; among maximum-weight
    matchings the lexicographically smallest sorted id list wins.  Refuses
    instances above the caps instead of silently approximating.
    """
    if len(problem.vertices) > vertex_cap:
        raise RegimeError(
            f"receiver {problem.receiver} has {len(problem.vertices)} in-neighbors, "
            f"exceeding the exhaustive-search cap of {vertex_cap}")
    if len(problem.hyperedges) > edge_cap:
        raise RegimeError(
            f"receiver {problem.receiver} has {len(problem.hyperedges)} hyperedges, "
            f"exceeding the exhaustive-search cap of {edge_cap}")
    edges = sorted(problem.hyperedges, key=lambda e: e.source)
    suffix_weight = [0] * (len(edges) + 1)
    for i in range(len(edges) - 1, -1, -1):
        suffix_weight[i] = suffix_weight[i + 1] + edges[i].weight

    best_value = 0
    best_sel: tuple[int, ...] = ()
    chosen: list[int] = []

    def consider(total: int) -> None:
        nonlocal best_value, best_sel
        sel = tuple(chosen)
        if total > best_value or (total == best_value and sel < best_sel):
            best_value = total
            best_sel = sel

    def search(idx: int, used: frozenset[int], total: int) -> None:
        consider(total)
        if idx == len(edges):
            return
        # Equal-potential branches are kept: they may tie and win on ids.
        if total + suffix_weight[idx] < best_value:
            return
        e = edges[idx]
        if not (used & e.vertices):
            chosen.append(e.source)
            search(idx + 1, used | e.vertices, total + e.weight)
            chosen.pop()
        search(idx + 1, used, total)

    search(0, frozenset(), 0)
    return best_sel, best_value


def greedy_matching(instance: MatchingInstance, order: Sequence[int]) -> Matching:
    """Scan intermediates in the given order, taking each usable hyperedge
    whenever it is disjoint from the selection so far, per receiver.

    This is the classical greedy hypergraph matcher; it is within a factor
    of the largest hyperedge size of the optimum.
    """
    order = list(order)
    if len(set(order)) != len(order):
        raise ValueError("order lists an intermediate more than once")
    known = set(order)
    for p in instance.problems:
        for e in p.hyperedges:
            if e.source not in known:
                raise ValueError(f"order is missing intermediate {e.source}")
    selected: list[tuple[int, ...]] = []
    total = 0
    for p in instance.problems:
        by_source = {e.source: e for e in p.hyperedges}
        used: set[int] = set()
        picks = []
        for v in order:
            e = by_source.get(v)
            if e is not None and not (used & e.vertices):
                used |= e.vertices
                picks.append(v)
                total += e.weight
        selected.append(tuple(sorted(picks)))
    return Matching(tuple(selected), total)


def make_matching(p: PartialHag, cg: ComputationGraph,
                  selected: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]) -> Matching:
    """Normalize per-receiver selections into a Matching, computing value."""
    if isinstance(selected, Mapping):
        rows = [tuple(sorted(selected.get(r, ()))) for r in range(cg.n)]
    else:
        rows = [tuple(sorted(s)) for s in selected]
        if len(rows) != cg.n:
            raise ValueError("one selection per receiver required")
    total = sum(len(p.cover_of(v)) - 1 for row in rows for v in row)
    return Matching(tuple(rows), total)


def complete_from_matching(p: PartialHag, cg: ComputationGraph, n_match: Matching) -> HagGraph:
    """Materialize the full HAG a matching describes.

    Each receiver keeps its selected intermediates plus direct edges from
    every original sender not covered by them.  Raises if some receiver's
    selection is not actually a matching (overlapping covers) or uses an
    intermediate whose cover is not contained in that receiver's senders.
    """
    if p.n != cg.n:
        raise ValueError("partial graph and computation graph disagree on size")
    hag = HagGraph(cg, d=p.d, single_layer=p.single_layer)
    for m in p.intermediates:
        hag.add_intermediate(m.in_set)
    for r, row in enumerate(n_match.selected):
        senders = cg.in_sets[r]
        covered: set[int] = set()
        for v in row:
            cov = p.cover_of(v)
            if not cov <= senders:
                raise ValueError(
                    f"receiver {r}: intermediate {v} covers {sorted(cov)}, "
                    f"not contained in its senders")
            if covered & cov:
                raise ValueError(f"receiver {r}: selection is not a matching")
            covered |= cov
        hag.receiver_in[r] = set(row) | (senders - covered)
    return hag


def matching_from_hag(hag: HagGraph) -> Matching:
    """Read the matching a completed HAG realizes (inverse of completion)."""
    rows = []
    total = 0
    for senders in hag.receiver_in:
        picks = tuple(sorted(w for w in senders if w >= hag.n))
        rows.append(picks)
        total += sum(len(hag.cover_of(v)) - 1 for v in picks)
    return Matching(tuple(rows), total)


def optimal_completion(p: PartialHag, cg: ComputationGraph,
                       mode: str = "auto") -> HagGraph:
    """Best possible wiring of receivers for a fixed sender-side structure.

    mode "blossom" requires every cover to have exactly two members (exact
    pairwise matching); "bruteforce" requires every receiver to fit under
    the exhaustive-search caps; "auto" picks blossom when it applies.
    """
    instance = build_matching_instance(p, cg)
    if mode == "auto":
        mode = "blossom" if all(len(m.cover) == 2 for m in p.intermediates) else "bruteforce"
    if mode == "blossom":
        solve = max_matching_blossom
    elif mode == "bruteforce":
        solve = max_matching_bruteforce
    else:
        raise ValueError(f"unknown completion mode {mode!r}")
    rows = []
    total = 0
    for problem in instance.problems:
        picks, val = solve(problem)
        rows.append(picks)
        total += val
    return complete_from_matching(p, cg, Matching(tuple(rows), total))


def cooccurrence_counts(in_sets: Sequence[Iterable[int]], d: int,
                        restrict_below: int | None = None) -> dict[tuple[int, ...], int]:
    """How many in-sets contain each size-d subset of their members.

    ``restrict_below`` limits subset members to ids under the bound (used
    to keep candidates inside the original sender set).  Subsets are sorted
    tuples; subsets appearing nowhere are absent.
    """
    counts: dict[tuple[int, ...], int] = {}
    for s in in_sets:
        members = sorted(x for x in s if restrict_below is None or x < restrict_below)
        for combo in combinations(members, d):
            counts[combo] = counts.get(combo, 0) + 1
    return counts


class LazyMaxCounter:
    """Max-tracking multiset of candidate counts with lazy heap deletion.

    Supports incremental count updates as receiver in-sets change during a
    greedy run; ``best`` returns the (count, key) pair with the largest
    count, ties broken toward the lexicographically smallest key.
    """

    def __init__(self, counts: dict[tuple[int, ...], int]):
        self.counts = dict(counts)
        self._heap: list[tuple[int, tuple[int, ...]]] = [
            (-c, key) for key, c in self.counts.items() if c > 0
        ]
        heapq.heapify(self._heap)

    def adjust(self, key: tuple[int, ...], delta: int) -> None:
        c = self.counts.get(key, 0) + delta
        if c < 0:
            raise ValueError(f"count underflow for {key}")
        self.counts[key] = c
        if c > 0:
            heapq.heappush(self._heap, (-c, key))

    def best(self, skip=None) -> tuple[int, tuple[int, ...]] | None:
        """Largest current count (with lex tie rule), or None if all zero.

        ``skip`` filters out keys (e.g. candidates that would duplicate an
        existing cover); skipped entries are re-pushed so later calls see
        them again.
        """
        stash = []
        found = None
        while self._heap:
            negc, key = heapq.heappop(self._heap)
            if self.counts.get(key, 0) != -negc:
                continue  # stale entry
            if skip is not None and skip(key):
                stash.append((negc, key))
                continue
            found = (-negc, key)
            stash.append((negc, key))
            break
        for item in stash:
            heapq.heappush(self._heap, item)
        return found
