"""HTTP surface wrapping the optimization library.

One stateless endpoint per operation; graphs travel inline in requests.
Domain errors (bad graphs, solver regime violations, exceeded work
budgets) map to 400 with the underlying message; schema violations are
FastAPI's usual 422.
"""

from dataclasses import asdict

from fastapi import FastAPI, HTTPException

from ..exact import WorkBudgetExceeded
from ..experiments import (
    compare_algorithms,
    erdos_renyi_experiment,
    layer_experiment,
    run_algorithm,
)
from ..graphs import DirectedGraph, computation_graph, verify_equivalence
from ..ingest import (
    EdgeListFormat,
    deserialize_graph,
    parse_edge_list,
    serialize_hag,
)
from ..matching import RegimeError
from ..validate import run_validation_suite
from . import schemas

app = FastAPI(
    title="hagopt",
    description=(
        "Eliminates redundant aggregation work in graph-neural-network "
        "computation graphs by inserting shared intermediate aggregation "
        "nodes, with greedy optimizers, fast heuristics, an exact oracle, "
        "and benchmark experiments."
    ),
    version="0.1.0",
)


def resolve_graph(spec: schemas.GraphSpec) -> DirectedGraph:
    given = [x is not None for x in (spec.edges, spec.edge_list, spec.graph_json)]
    if sum(given) != 1:
        raise HTTPException(
            status_code=400,
            detail="supply exactly one of edges, edge_list, or graph_json")
    try:
        if spec.edge_list is not None:
            return parse_edge_list(
                spec.edge_list, EdgeListFormat(directed=not spec.undirected)).graph
        if spec.graph_json is not None:
            g = deserialize_graph(spec.graph_json)
        else:
            edges = [tuple(e) for e in spec.edges]
            n = spec.node_count
            if n is None:
                n = max((max(u, v) for u, v in edges), default=-1) + 1
            g = DirectedGraph(n, edges)
        if spec.undirected:
            g = DirectedGraph(g.node_count,
                              g.edges | {(v, u) for u, v in g.edges})
        return g
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


def _domain_error(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/optimize", response_model=schemas.OptimizeResponse)
def optimize(req: schemas.OptimizeRequest) -> schemas.OptimizeResponse:
    g = resolve_graph(req.graph)
    cg = computation_graph(g)
    try:
        result = run_algorithm(
            req.algorithm, cg, req.k, d=req.d, layer_mode=req.layer_mode,
            stop_on_nonpositive=req.stop_on_nonpositive,
            candidate_floor=req.candidate_floor)
    except (RegimeError, WorkBudgetExceeded, ValueError) as exc:
        raise _domain_error(exc) from None
    report = verify_equivalence(result.final, g)
    return schemas.OptimizeResponse(
        algorithm=req.algorithm,
        value=result.value,
        k_used=result.k_used,
        elapsed_ms=result.elapsed_ms,
        candidates_considered=result.candidates_considered,
        equivalence_ok=report.ok,
        node_count=g.node_count,
        edge_count=g.edge_count,
        hag=serialize_hag(result.final),
        trace=[schemas.TraceEntry(
            in_set=list(rec.in_set),
            receivers=rec.receivers,
            marginal_value=rec.marginal_value,
            cumulative_value=rec.cumulative_value,
        ) for rec in result.trace],
    )


@app.post("/compare", response_model=schemas.CompareResponse)
def compare(req: schemas.CompareRequest) -> schemas.CompareResponse:
    g = resolve_graph(req.graph)
    try:
        report = compare_algorithms(
            g, req.k, req.d, list(req.algorithms), layer_mode=req.layer_mode,
            stop_on_nonpositive=req.stop_on_nonpositive,
            candidate_floor=req.candidate_floor)
    except (RegimeError, WorkBudgetExceeded, ValueError) as exc:
        raise _domain_error(exc) from None
    return schemas.CompareResponse(
        rows=[schemas.TrialRowModel(**asdict(r)) for r in report.rows],
        value_ratios=report.value_ratios,
        runtime_ratios=report.runtime_ratios,
        csv=report.to_csv(),
    )


@app.post("/experiments/erdos-renyi", response_model=schemas.ErExperimentResponse)
def experiment_erdos_renyi(req: schemas.ErExperimentRequest) -> schemas.ErExperimentResponse:
    try:
        report = erdos_renyi_experiment(
            n=req.n, p_grid=list(req.p_grid), trials=req.trials,
            k_list=list(req.k_list), d=req.d, seed=req.seed,
            algorithms=tuple(req.algorithms), undirected=req.undirected)
    except (RegimeError, WorkBudgetExceeded, ValueError) as exc:
        raise _domain_error(exc) from None
    return schemas.ErExperimentResponse(
        rows=[schemas.TrialRowModel(**asdict(r)) for r in report.rows],
        aggregates=[schemas.AggregateRowModel(**asdict(a)) for a in report.aggregates],
        csv=report.to_csv(),
        aggregates_csv=report.aggregates_to_csv(),
    )


@app.post("/experiments/layers", response_model=schemas.LayerExperimentResponse)
def experiment_layers(req: schemas.LayerExperimentRequest) -> schemas.LayerExperimentResponse:
    g = resolve_graph(req.graph)
    try:
        report = layer_experiment(g, req.k_max)
    except (RegimeError, WorkBudgetExceeded, ValueError) as exc:
        raise _domain_error(exc) from None
    return schemas.LayerExperimentResponse(
        rows=[schemas.LayerRowModel(**asdict(r)) for r in report.rows],
        mean_single=report.mean_single,
        mean_multi=report.mean_multi,
        mean_improvement_pct=report.mean_improvement_pct,
        std_improvement_pct=report.std_improvement_pct,
        csv=report.to_csv(),
    )


@app.post("/validate", response_model=schemas.ValidateResponse)
def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
    checks = run_validation_suite(seed=req.seed, trials=req.trials,
                                  inject_fault=req.inject_fault)
    return schemas.ValidateResponse(
        ok=all(c.passed for c in checks),
        checks=[schemas.CheckModel(**asdict(c)) for c in checks],
    )
