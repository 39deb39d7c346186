"""Core graph types for hierarchical aggregation.

The model has three layers of structure:

* ``DirectedGraph`` -- the raw input graph G = (V, E).
* ``ComputationGraph`` -- the bipartite expansion used by message-passing
  aggregation: L and R are both copies of V, and every source edge (u, v)
  becomes one edge from u on the left to v on the right.  Aggregation
  happens at the R nodes.
* ``HagGraph`` -- a hierarchical aggregation graph: the computation graph
  augmented with intermediate aggregation nodes (M) that factor out sender
  subsets shared by many receivers.  Every original edge (u, v) must be
  realized by exactly one directed path from u in L to v in R, which is
  what makes the rewritten graph compute the same results.

All graph values are treated as immutable once an algorithm returns them;
construction and mutation are single-threaded.  Intermediate nodes receive
ids ``node_count, node_count + 1, ...`` in creation order, so ids below
``node_count`` always refer to original vertices.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from numbers import Real


@dataclass(frozen=True)
class DirectedGraph:
    """A directed graph on dense integer node ids 0..node_count-1.

    Edges form a set (no multi-edges).  Self-loops and isolated vertices
    are permitted; both are inert under every algorithm in this package.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count < 0:
            raise ValueError("node_count must be nonnegative")
        edge_set = frozenset((int(u), int(v)) for u, v in edges)
        for u, v in edge_set:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", edge_set)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_neighbors(self, v: int) -> set[int]:
        return {t for (s, t) in self.edges if s == v}

    def in_neighbors(self, v: int) -> set[int]:
        return {s for (s, t) in self.edges if t == v}

    def out_degrees(self) -> list[int]:
        degs = [0] * self.node_count
        for s, _ in self.edges:
            degs[s] += 1
        return degs


class ComputationGraph:
    """Bipartite aggregation graph: one L->R edge per source edge.

    ``in_sets[r]`` is the set of senders feeding receiver r, ``out_sets[l]``
    the set of receivers fed by sender l.  Both sides are indexed by the
    source graph's node ids.
    """

    __slots__ = ("n", "in_sets", "out_sets")

    def __init__(self, n: int, in_sets: Sequence[frozenset[int]]):
        self.n = n
        self.in_sets: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in in_sets)
        out: list[set[int]] = [set() for _ in range(n)]
        for r, senders in enumerate(self.in_sets):
            for l in senders:
                out[l].add(r)
        self.out_sets: tuple[frozenset[int], ...] = tuple(frozenset(s) for s in out)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.in_sets)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ComputationGraph)
            and self.n == other.n
            and self.in_sets == other.in_sets
        )

    def __repr__(self) -> str:
        return f"ComputationGraph(n={self.n}, edges={self.edge_count})"


def computation_graph(g: DirectedGraph) -> ComputationGraph:
    """Expand a directed graph into its bipartite aggregation graph."""
    in_sets: list[set[int]] = [set() for _ in range(g.node_count)]
    for u, v in g.edges:
        in_sets[v].add(u)
    return ComputationGraph(g.node_count, [frozenset(s) for s in in_sets])


@dataclass(frozen=True)
class Intermediate:
    """An intermediate aggregation node.

    ``in_set`` holds ids of inputs (original senders below n, earlier
    intermediates at or above n).  ``cover`` is the set of original senders
    reachable backwards from the node, cached at creation.
    """

    id: int
    in_set: frozenset[int]
    cover: frozenset[int]


def resolve_in_set(n: int, cover_by_id: dict[int, frozenset[int]],
                   in_set: Iterable[int], d: int | None, single_layer: bool,
                   next_id: int) -> tuple[frozenset[int], frozenset[int]]:
    """Validate an intermediate's inputs and compute its cover.

    Shared by every structure that creates intermediates.  Inputs must be
    known node ids, respect the in-degree bound and the single-layer
    restriction, and have pairwise disjoint covers (overlap would give some
    sender two paths into anything fed by the new node).
    """
    members = frozenset(int(x) for x in in_set)
    if d is not None and len(members) != d:
        raise ValueError(f"intermediate must have exactly {d} inputs, got {len(members)}")
    if len(members) < 2:
        raise ValueError("intermediate needs at least two inputs")
    cover: set[int] = set()
    for w in members:
        if w < 0 or w >= next_id:
            raise ValueError(f"unknown input id {w}")
        if w >= n:
            if single_layer:
                raise ValueError("single-layer graph cannot chain intermediates")
            part = cover_by_id[w]
        else:
            part = frozenset((w,))
        if cover & part:
            raise ValueError("input covers overlap; node would duplicate paths")
        cover |= part
    return members, frozenset(cover)


@dataclass(frozen=True)
class CostParams:
    """Unit costs: c_agg per pairwise aggregation step, c_up per update."""

    c_agg: Real = 1
    c_up: Real = 1

    def __post_init__(self):
        if self.c_agg <= 0:
            raise ValueError("c_agg must be positive")
        if self.c_up < 0:
            raise ValueError("c_up must be nonnegative")


class HagGraph:
    """A hierarchical aggregation graph over a fixed sender/receiver set.

    Node ids: 0..n-1 are the original vertices (interpreted as senders on
    the left and receivers on the right); intermediates get n, n+1, ... in
    creation order.  ``receiver_in[r]`` is the current in-neighborhood of
    receiver r; members below n are residual direct edges, members >= n
    are intermediate nodes.

    ``d`` (when set) pins every intermediate's in-degree; ``single_layer``
    forbids intermediate-to-intermediate edges, making the graph
    tripartite.  Distinct intermediates must have distinct covers: two
    nodes with the same cover compute the same thing and one is redundant.
    """

    __slots__ = ("n", "d", "single_layer", "intermediates", "receiver_in", "_cover_by_id")

    def __init__(self, source: ComputationGraph, d: int | None = None,
                 single_layer: bool = True):
        self.n = source.n
        self.d = d
        self.single_layer = single_layer
        self.intermediates: list[Intermediate] = []
        self.receiver_in: list[set[int]] = [set(s) for s in source.in_sets]
        self._cover_by_id: dict[int, frozenset[int]] = {}

    # -- construction ------------------------------------------------------

    def add_intermediate(self, in_set: Iterable[int]) -> Intermediate:
        """Add an intermediate with the given inputs and return it.

        Validates the in-degree bound, the single-layer restriction, that
        input covers are pairwise disjoint (overlap would create multiple
        paths from one sender), and that the resulting cover is new.
        """
        next_id = self.n + len(self.intermediates)
        members, cover_f = resolve_in_set(
            self.n, self._cover_by_id, in_set,
            d=self.d, single_layer=self.single_layer, next_id=next_id)
        if cover_f in self._cover_by_id.values():
            raise ValueError(f"cover {sorted(cover_f)} duplicates an existing intermediate")
        node = Intermediate(next_id, members, cover_f)
        self.intermediates.append(node)
        self._cover_by_id[next_id] = cover_f
        return node

    def has_cover(self, leaves: Iterable[int]) -> bool:
        return frozenset(leaves) in self._cover_by_id.values()

    # -- queries -----------------------------------------------------------

    def intermediate(self, node_id: int) -> Intermediate:
        if not (self.n <= node_id < self.n + len(self.intermediates)):
            raise KeyError(f"no intermediate with id {node_id}")
        return self.intermediates[node_id - self.n]

    def cover_of(self, node_id: int) -> frozenset[int]:
        """Cached cover of any sender-side node (singleton for original ids)."""
        if 0 <= node_id < self.n:
            return frozenset((node_id,))
        return self.intermediate(node_id).cover

    def out_to_receivers(self) -> dict[int, int]:
        """Out-degree into R for every intermediate id."""
        counts = {m.id: 0 for m in self.intermediates}
        for senders in self.receiver_in:
            for w in senders:
                if w >= self.n:
                    counts[w] += 1
        return counts

    def out_neighbor_count(self) -> dict[int, int]:
        """Total out-degree (into R and into other intermediates) per intermediate."""
        counts = self.out_to_receivers()
        for m in self.intermediates:
            for w in m.in_set:
                if w >= self.n:
                    counts[w] += 1
        return counts

    # -- edge partitions ---------------------------------------------------

    def edges_lm(self) -> list[tuple[int, int]]:
        return sorted((w, m.id) for m in self.intermediates for w in m.in_set if w < self.n)

    def edges_mm(self) -> list[tuple[int, int]]:
        return sorted((w, m.id) for m in self.intermediates for w in m.in_set if w >= self.n)

    def edges_mr(self) -> list[tuple[int, int]]:
        return sorted((w, r) for r, s in enumerate(self.receiver_in) for w in s if w >= self.n)

    def edges_lr(self) -> list[tuple[int, int]]:
        return sorted((w, r) for r, s in enumerate(self.receiver_in) for w in s if w < self.n)

    # -- integrity ---------------------------------------------------------

    def validate(self) -> None:
        """Recompute every cached invariant; raise ValueError on violation."""
        seen_covers: dict[frozenset[int], int] = {}
        for idx, m in enumerate(self.intermediates):
            if m.id != self.n + idx:
                raise ValueError(f"intermediate id {m.id} out of sequence")
            if self.d is not None and len(m.in_set) != self.d:
                raise ValueError(f"intermediate {m.id} has in-degree {len(m.in_set)} != {self.d}")
            if len(m.cover) < 2:
                raise ValueError(f"intermediate {m.id} has trivial cover")
            recomputed = cover(self, m.id)
            if recomputed != m.cover:
                raise ValueError(
                    f"intermediate {m.id}: cached cover {sorted(m.cover)} != recomputed {sorted(recomputed)}")
            if self.single_layer and any(w >= self.n for w in m.in_set):
                raise ValueError(f"intermediate {m.id} chains in a single-layer graph")
            if any(w >= m.id for w in m.in_set):
                raise ValueError(f"intermediate {m.id} references a later node")
            if m.cover in seen_covers:
                raise ValueError(f"intermediates {seen_covers[m.cover]} and {m.id} share a cover")
            seen_covers[m.cover] = m.id
        top = self.n + len(self.intermediates)
        for r, senders in enumerate(self.receiver_in):
            for w in senders:
                if not (0 <= w < top):
                    raise ValueError(f"receiver {r} references unknown node {w}")

    def copy(self) -> "HagGraph":
        dup = HagGraph.__new__(HagGraph)
        dup.n = self.n
        dup.d = self.d
        dup.single_layer = self.single_layer
        dup.intermediates = list(self.intermediates)
        dup.receiver_in = [set(s) for s in self.receiver_in]
        dup._cover_by_id = dict(self._cover_by_id)
        return dup

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HagGraph)
            and self.n == other.n
            and self.d == other.d
            and self.single_layer == other.single_layer
            and self.intermediates == other.intermediates
            and self.receiver_in == other.receiver_in
        )

    def __repr__(self) -> str:
        return (f"HagGraph(n={self.n}, intermediates={len(self.intermediates)}, "
                f"d={self.d}, single_layer={self.single_layer})")


def empty_hag(cg: ComputationGraph, d: int | None = None, single_layer: bool = True) -> HagGraph:
    """A HAG with no intermediates: just the computation graph itself."""
    return HagGraph(cg, d=d, single_layer=single_layer)


def cover(hag: HagGraph, node_id: int) -> frozenset[int]:
    """Original senders reachable backwards from ``node_id``, by traversal.

    This deliberately ignores the cached covers so it can serve as an
    independent check of them.  For an original sender the cover is the
    singleton of the node itself.
    """
    if 0 <= node_id < hag.n:
        return frozenset((node_id,))
    hag.intermediate(node_id)  # raises KeyError for unknown ids
    result: set[int] = set()
    stack = [node_id]
    seen = {node_id}
    while stack:
        w = stack.pop()
        if w < hag.n:
            result.add(w)
            continue
        for u in hag.intermediate(w).in_set:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return frozenset(result)


def cost(graph: ComputationGraph | HagGraph, params: CostParams = CostParams()) -> Real:
    """Total execution cost of one aggregation round plus updates.

    Each node aggregating j inputs performs max(j - 1, 0) pairwise
    aggregation steps (a single input is free, and the term is clamped at
    zero for empty in-neighborhoods so costs stay physically meaningful);
    every receiver performs one update.
    """
    if isinstance(graph, HagGraph):
        degrees = [len(m.in_set) for m in graph.intermediates]
        degrees += [len(s) for s in graph.receiver_in]
        receivers = graph.n
    elif isinstance(graph, ComputationGraph):
        degrees = [len(s) for s in graph.in_sets]
        receivers = graph.n
    else:
        raise TypeError(f"cannot cost a {type(graph).__name__}")
    agg_steps = sum(max(deg - 1, 0) for deg in degrees)
    return params.c_agg * agg_steps + params.c_up * receivers


def value(hag: HagGraph) -> int:
    """Aggregation steps saved relative to the plain computation graph.

    Per intermediate v this is (out-degree into R) * (|cover(v)| - 1) minus
    the (|in-set| - 1) steps the node itself costs.  Only edges into R are
    credited: an edge into another intermediate realizes its savings
    through that node's larger cover, and counting it here would break the
    exact correspondence with the cost difference.
    """
    out_r = hag.out_to_receivers()
    return sum(
        out_r[m.id] * (len(m.cover) - 1) - (len(m.in_set) - 1)
        for m in hag.intermediates
    )


def shifted_value(hag: HagGraph, d: int) -> int:
    """value plus |M| * (d - 1): the matching-weight-aligned objective.

    Defined only for graphs whose intermediates all have in-degree d.
    """
    for m in hag.intermediates:
        if len(m.in_set) != d:
            raise ValueError(
                f"intermediate {m.id} has in-degree {len(m.in_set)}, expected {d}")
    return value(hag) + len(hag.intermediates) * (d - 1)


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of checking the unique-path property against a source graph.

    ``violations`` lists (u, v, path_count) for every ordered pair whose
    number of u_L -> v_R paths differs from what the source graph demands
    (1 for edges, 0 for non-edges).
    """

    ok: bool
    violations: tuple[tuple[int, int, int], ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def verify_equivalence(hag: HagGraph, g: DirectedGraph) -> EquivalenceReport:
    """Check that the HAG computes exactly the source graph's aggregations.

    For every source edge (u, v) there must be exactly one directed path
    from u on the left to v on the right, and no path for non-edges.
    Violations are returned as data, never raised.
    """
    if hag.n != g.node_count:
        raise ValueError("graph sizes differ")
    # paths[m][l] = number of distinct l -> m paths; intermediates are
    # created in topological order so a single pass suffices.
    paths: dict[int, dict[int, int]] = {}
    for m in hag.intermediates:
        acc: dict[int, int] = {}
        for w in m.in_set:
            if w < hag.n:
                acc[w] = acc.get(w, 0) + 1
            else:
                for l, c in paths[w].items():
                    acc[l] = acc.get(l, 0) + c
        paths[m.id] = acc

    expected: dict[int, set[int]] = {r: set() for r in range(hag.n)}
    for u, v in g.edges:
        expected[v].add(u)

    violations: list[tuple[int, int, int]] = []
    for r, senders in enumerate(hag.receiver_in):
        counts: dict[int, int] = {}
        for w in senders:
            if w < hag.n:
                counts[w] = counts.get(w, 0) + 1
            else:
                for l, c in paths[w].items():
                    counts[l] = counts.get(l, 0) + c
        want = expected[r]
        for l, c in counts.items():
            if (l in want and c != 1) or (l not in want and c != 0):
                violations.append((l, r, c))
        for l in want:
            if l not in counts:
                violations.append((l, r, 0))
    violations.sort()
    return EquivalenceReport(ok=not violations, violations=tuple(violations))


def dedupe_intermediates(hag: HagGraph) -> HagGraph:
    """Merge intermediates that share a cover; return a renumbered graph.

    The first node with a given cover survives and inherits the out-edges
    of every duplicate.  Duplicates with no out-edges are simply dropped.
    Equivalence is preserved and the value never decreases (each removed
    node stops paying its own aggregation cost).
    """
    survivor_by_cover: dict[frozenset[int], int] = {}
    remap: dict[int, int] = {}
    kept: list[Intermediate] = []
    for m in hag.intermediates:
        if m.cover in survivor_by_cover:
            remap[m.id] = survivor_by_cover[m.cover]
            continue
        new_id = hag.n + len(kept)
        new_in = frozenset(remap.get(w, w) if w >= hag.n else w for w in m.in_set)
        if len(new_in) != len(m.in_set):
            raise ValueError(f"intermediate {m.id}: merging collapsed its in-set")
        kept.append(Intermediate(new_id, new_in, m.cover))
        survivor_by_cover[m.cover] = new_id
        remap[m.id] = new_id

    result = HagGraph.__new__(HagGraph)
    result.n = hag.n
    result.d = hag.d
    result.single_layer = hag.single_layer
    result.intermediates = kept
    result.receiver_in = [
        {remap.get(w, w) if w >= hag.n else w for w in s} for s in hag.receiver_in
    ]
    result._cover_by_id = {m.id: m.cover for m in kept}
    return result
