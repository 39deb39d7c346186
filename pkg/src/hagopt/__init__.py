"""Redundancy elimination for graph aggregation workloads.

Builds hierarchical aggregation graphs: computation graphs augmented with
intermediate nodes that factor out sender subsets shared by many
receivers, provably computing the same results with fewer aggregation
steps.  Ships two greedy optimizers, two fast heuristics, an exact
brute-force oracle, matching-based completion machinery, a reference
executor that demonstrates the savings, and an experiment harness exposed
both as a library and as an HTTP service with a CLI client.
"""

from .exact import (
    CandidateSpace,
    WorkBudgetExceeded,
    approximation_ratio,
    candidate_space,
    optimal_single_layer,
)
from .executor import (
    AggregateSpec,
    RunReport,
    Updated,
    multiset,
    run_gnn,
    run_hag,
    structural_combine,
    sum_aggregate,
    topo_order,
    union_aggregate,
)
from .graphs import (
    ComputationGraph,
    CostParams,
    DirectedGraph,
    EquivalenceReport,
    HagGraph,
    Intermediate,
    computation_graph,
    cost,
    cover,
    dedupe_intermediates,
    empty_hag,
    shifted_value,
    value,
    verify_equivalence,
)
from .greedy import (
    HagResult,
    OptimizerConfig,
    StepRecord,
    full_greedy,
    greedy_sequence_graph,
    max_matching_value,
    ordered_matching_value,
    partial_greedy,
)
from .heuristics import degree_heuristic, hub_heuristic
from .ingest import (
    EdgeListFormat,
    ErConfig,
    ParsedEdgeList,
    deserialize_graph,
    deserialize_hag,
    export_dot,
    gen_erdos_renyi,
    parse_edge_list,
    parse_snap_edge_list,
    serialize_graph,
    serialize_hag,
)
from .matching import (
    Hyperedge,
    Matching,
    MatchingInstance,
    PartialHag,
    ReceiverProblem,
    RegimeError,
    build_matching_instance,
    complete_from_matching,
    cooccurrence_counts,
    greedy_matching,
    make_matching,
    matching_from_hag,
    max_matching_blossom,
    max_matching_bruteforce,
    optimal_completion,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateSpec",
    "CandidateSpace",
    "ComputationGraph",
    "CostParams",
    "DirectedGraph",
    "EdgeListFormat",
    "EquivalenceReport",
    "ErConfig",
    "HagGraph",
    "HagResult",
    "Hyperedge",
    "Intermediate",
    "Matching",
    "MatchingInstance",
    "OptimizerConfig",
    "ParsedEdgeList",
    "PartialHag",
    "ReceiverProblem",
    "RegimeError",
    "RunReport",
    "StepRecord",
    "Updated",
    "WorkBudgetExceeded",
    "approximation_ratio",
    "build_matching_instance",
    "candidate_space",
    "complete_from_matching",
    "computation_graph",
    "cooccurrence_counts",
    "cost",
    "cover",
    "dedupe_intermediates",
    "degree_heuristic",
    "deserialize_graph",
    "deserialize_hag",
    "empty_hag",
    "export_dot",
    "full_greedy",
    "gen_erdos_renyi",
    "greedy_matching",
    "greedy_sequence_graph",
    "hub_heuristic",
    "make_matching",
    "matching_from_hag",
    "max_matching_blossom",
    "max_matching_bruteforce",
    "max_matching_value",
    "multiset",
    "optimal_completion",
    "optimal_single_layer",
    "ordered_matching_value",
    "parse_edge_list",
    "parse_snap_edge_list",
    "partial_greedy",
    "run_gnn",
    "run_hag",
    "serialize_graph",
    "serialize_hag",
    "shifted_value",
    "structural_combine",
    "sum_aggregate",
    "topo_order",
    "union_aggregate",
    "value",
    "verify_equivalence",
]
