"""Request/response models for the optimization service."""

from typing import Literal

from pydantic import BaseModel, Field

AlgorithmName = Literal["full", "partial", "degree", "hub", "optimal"]
LayerMode = Literal["single", "multi"]


class GraphSpec(BaseModel):
    """A graph supplied inline, exactly one way.

    ``edges`` (+ optional node_count), raw ``edge_list`` text in SNAP
    convention, or a ``graph_json`` document produced by this service.
    ``undirected`` expands each edge into both orientations.
    """

    node_count: int | None = None
    edges: list[tuple[int, int]] | None = None
    edge_list: str | None = None
    graph_json: str | None = None
    undirected: bool = False


class OptimizeRequest(BaseModel):
    graph: GraphSpec
    algorithm: AlgorithmName
    k: int = Field(ge=0)
    d: int = Field(default=2, ge=2)
    layer_mode: LayerMode = "single"
    stop_on_nonpositive: bool = True
    candidate_floor: int = Field(default=2, ge=1)
    seed: int | None = None


class TraceEntry(BaseModel):
    in_set: list[int]
    receivers: int
    marginal_value: int
    cumulative_value: int


class OptimizeResponse(BaseModel):
    algorithm: AlgorithmName
    value: int
    k_used: int
    elapsed_ms: float
    candidates_considered: int
    equivalence_ok: bool
    node_count: int
    edge_count: int
    hag: str
    trace: list[TraceEntry]


class CompareRequest(BaseModel):
    graph: GraphSpec
    algorithms: list[AlgorithmName]
    k: int = Field(ge=0)
    d: int = Field(default=2, ge=2)
    layer_mode: LayerMode = "single"
    stop_on_nonpositive: bool = True
    candidate_floor: int = Field(default=2, ge=1)


class TrialRowModel(BaseModel):
    algorithm: str
    n: int
    p: float | None = None
    dataset: str | None = None
    k: int
    d: int
    layer_mode: str
    value: int
    optimal_value: int | None = None
    alpha: float | None = None
    one_minus_alpha: float | None = None
    elapsed_ms: float
    seed: int | None = None
    status: str = "ok"


class CompareResponse(BaseModel):
    rows: list[TrialRowModel]
    value_ratios: dict[str, float | None]
    runtime_ratios: dict[str, float | None]
    csv: str


class ErExperimentRequest(BaseModel):
    n: int = Field(default=15, ge=0)
    p_grid: list[float]
    trials: int = Field(default=50, ge=1)
    k_list: list[int] = Field(default=[2, 3])
    d: int = Field(default=2, ge=2)
    seed: int = 0
    undirected: bool = False
    algorithms: list[AlgorithmName] = Field(default=["full", "partial"])


class AggregateRowModel(BaseModel):
    algorithm: str
    p: float | None
    k: int
    trials: int
    mean_value: float
    mean_alpha: float | None
    mean_one_minus_alpha: float | None
    std_one_minus_alpha: float | None


class ErExperimentResponse(BaseModel):
    rows: list[TrialRowModel]
    aggregates: list[AggregateRowModel]
    csv: str
    aggregates_csv: str


class LayerExperimentRequest(BaseModel):
    graph: GraphSpec
    k_max: int = Field(default=100, ge=1)
    dataset: str | None = None


class LayerRowModel(BaseModel):
    k: int
    single_value: int
    multi_value: int
    improvement_pct: float


class LayerExperimentResponse(BaseModel):
    rows: list[LayerRowModel]
    mean_single: float
    mean_multi: float
    mean_improvement_pct: float
    std_improvement_pct: float
    csv: str


class ValidateRequest(BaseModel):
    seed: int = 0
    trials: int = Field(default=25, ge=1)
    inject_fault: bool = False


class CheckModel(BaseModel):
    name: str
    passed: bool
    detail: str


class ValidateResponse(BaseModel):
    ok: bool
    checks: list[CheckModel]
