"""Graph I/O: edge-list parsing, random graphs, and serialization.

Edge lists follow the published SNAP convention: '#'-prefixed comment
lines, one edge per line as two whitespace-separated integer ids.
Arbitrary ids are remapped to dense 0-based ids in order of first
appearance; the original ids are kept in a sidecar table for reporting.
Undirected inputs are expanded into both orientations at ingestion, so
everything downstream only ever sees directed graphs.

Serialized graphs are JSON documents.  The hierarchical-graph document is
deliberately redundant (in-sets, covers, and all four edge partitions) so
a reader can cross-check it; any inconsistency is rejected with the
offending node named.
"""

import json
import random
from collections.abc import Sequence
from dataclasses import dataclass

from .graphs import ComputationGraph, DirectedGraph, HagGraph, Intermediate

GRAPH_FORMAT = "digraph"
HAG_FORMAT = "hag"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class EdgeListFormat:
    """Line-oriented edge-list dialect: comment prefix and directedness."""

    directed: bool = True
    comment_prefix: str = "#"


@dataclass(frozen=True)
class ParsedEdgeList:
    """Dense-id graph plus the original id for each dense id."""

    graph: DirectedGraph
    original_ids: tuple[int, ...]


def parse_edge_list(text: str, fmt: EdgeListFormat = EdgeListFormat()) -> ParsedEdgeList:
    """Parse edge-list text, remapping ids densely by first appearance.

    Duplicate lines collapse (edges form a set); undirected mode emits
    both orientations of every edge.  Malformed lines are reported with
    their line number.  Empty input gives the empty graph.
    """
    dense: dict[int, int] = {}
    order: list[int] = []
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(fmt.comment_prefix):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two node ids, got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer node id in {raw!r}") from None
        for x in (u, v):
            if x not in dense:
                dense[x] = len(order)
                order.append(x)
        a, b = dense[u], dense[v]
        edges.add((a, b))
        if not fmt.directed:
            edges.add((b, a))
    return ParsedEdgeList(DirectedGraph(len(order), edges), tuple(order))


def parse_snap_edge_list(text: str, fmt: EdgeListFormat = EdgeListFormat()) -> DirectedGraph:
    """Parse edge-list text and return just the dense-id graph."""
    return parse_edge_list(text, fmt).graph


@dataclass(frozen=True)
class ErConfig:
    """Seeded random-graph parameters.

    Directed mode includes each ordered pair (u, v), u != v, independently
    with probability p; undirected mode draws unordered pairs and emits
    both orientations.
    """

    n: int
    p: float
    seed: int
    undirected: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must lie in [0, 1]")


def gen_erdos_renyi(cfg: ErConfig) -> DirectedGraph:
    """Reproducible random graph: identical seeds give identical edge sets."""
    rng = random.Random(cfg.seed)
    edges: set[tuple[int, int]] = set()
    if cfg.undirected:
        for u in range(cfg.n):
            for v in range(u + 1, cfg.n):
                if rng.random() < cfg.p:
                    edges.add((u, v))
                    edges.add((v, u))
    else:
        for u in range(cfg.n):
            for v in range(cfg.n):
                if u != v and rng.random() < cfg.p:
                    edges.add((u, v))
    return DirectedGraph(cfg.n, edges)


# -- JSON serialization -------------------------------------------------------

def serialize_graph(g: DirectedGraph) -> str:
    doc = {
        "format": GRAPH_FORMAT,
        "version": FORMAT_VERSION,
        "node_count": g.node_count,
        "edges": sorted(list(e) for e in g.edges),
    }
    return json.dumps(doc, sort_keys=True)


def deserialize_graph(text: str) -> DirectedGraph:
    doc = _load_document(text, GRAPH_FORMAT)
    try:
        return DirectedGraph(doc["node_count"], [tuple(e) for e in doc["edges"]])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph document: {exc}") from None


def serialize_hag(hag: HagGraph) -> str:
    doc = {
        "format": HAG_FORMAT,
        "version": FORMAT_VERSION,
        "node_count": hag.n,
        "d": hag.d,
        "layer_mode": "single" if hag.single_layer else "multi",
        "intermediates": [
            {"id": m.id, "in_set": sorted(m.in_set), "cover": sorted(m.cover)}
            for m in hag.intermediates
        ],
        "receiver_in": [sorted(s) for s in hag.receiver_in],
        "edges": {
            "sender_to_intermediate": [list(e) for e in hag.edges_lm()],
            "intermediate_to_intermediate": [list(e) for e in hag.edges_mm()],
            "intermediate_to_receiver": [list(e) for e in hag.edges_mr()],
            "sender_to_receiver": [list(e) for e in hag.edges_lr()],
        },
    }
    return json.dumps(doc, sort_keys=True)


def deserialize_hag(text: str) -> HagGraph:
    """Rebuild a hierarchical graph, cross-checking every stored field.

    Stored covers must equal the covers recomputed from the in-sets, and
    the stored edge partitions must match the adjacency; violations name
    the node or partition at fault.
    """
    doc = _load_document(text, HAG_FORMAT)
    try:
        n = doc["node_count"]
        single = {"single": True, "multi": False}[doc["layer_mode"]]
        hag = HagGraph(ComputationGraph(n, [frozenset()] * n),
                       d=doc["d"], single_layer=single)
        for item in doc["intermediates"]:
            node = hag.add_intermediate(item["in_set"])
            if node.id != item["id"]:
                raise ValueError(
                    f"intermediate {item['id']}: ids must be {n}, {n + 1}, ... in order")
            stored = frozenset(item["cover"])
            if stored != node.cover:
                raise ValueError(
                    f"intermediate {item['id']}: stored cover {sorted(stored)} does not "
                    f"match its in-set (expected {sorted(node.cover)})")
        receiver_in = doc["receiver_in"]
        if len(receiver_in) != n:
            raise ValueError(f"expected {n} receiver rows, got {len(receiver_in)}")
        hag.receiver_in = [set(row) for row in receiver_in]
        hag.validate()
        stored_edges = doc["edges"]
        actual = {
            "sender_to_intermediate": [list(e) for e in hag.edges_lm()],
            "intermediate_to_intermediate": [list(e) for e in hag.edges_mm()],
            "intermediate_to_receiver": [list(e) for e in hag.edges_mr()],
            "sender_to_receiver": [list(e) for e in hag.edges_lr()],
        }
        for part, want in actual.items():
            if stored_edges.get(part) != want:
                raise ValueError(f"edge partition {part!r} disagrees with node in-sets")
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed document: missing or invalid field {exc}") from None
    return hag


def _load_document(text: str, expected_format: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not a JSON document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != expected_format:
        raise ValueError(f"expected a {expected_format!r} document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported document version {doc.get('version')!r}")
    return doc


# -- rendering ----------------------------------------------------------------

def export_dot(hag: HagGraph, names: Sequence[str] | None = None) -> str:
    """Deterministic DOT rendering with sender/intermediate/receiver ranks.

    Intermediates are labeled with their cover joined by the aggregation
    symbol (for example "A⊕B").  ``names`` optionally maps original node
    ids to display names.
    """
    def name(v: int) -> str:
        return names[v] if names is not None else str(v)

    def m_label(m: Intermediate) -> str:
        return "⊕".join(name(l) for l in sorted(m.cover))

    lines = ["digraph hag {", "  rankdir=LR;"]
    if hag.n or hag.intermediates:
        lines.append("  { rank=same; " + " ".join(f"L{v};" for v in range(hag.n)) + " }")
        if hag.intermediates:
            lines.append("  { rank=same; " + " ".join(f"M{m.id};" for m in hag.intermediates) + " }")
        lines.append("  { rank=same; " + " ".join(f"R{v};" for v in range(hag.n)) + " }")
        for v in range(hag.n):
            lines.append(f'  L{v} [label="{name(v)}"];')
        for m in hag.intermediates:
            lines.append(f'  M{m.id} [label="{m_label(m)}" shape=box];')
        for v in range(hag.n):
            lines.append(f'  R{v} [label="{name(v)}"];')
        for u, v in hag.edges_lm():
            lines.append(f"  L{u} -> M{v};")
        for u, v in hag.edges_mm():
            lines.append(f"  M{u} -> M{v};")
        for u, v in hag.edges_mr():
            lines.append(f"  M{u} -> R{v};")
        for u, v in hag.edges_lr():
            lines.append(f"  L{u} -> R{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
