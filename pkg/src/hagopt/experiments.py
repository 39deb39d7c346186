"""Experiment harness: algorithm comparisons and benchmark sweeps.

Everything here is deterministic given its inputs and seed.  Trials within
a sweep run concurrently with per-trial seeds derived as seed + trial
index, and report rows are always ordered by trial index, never by
completion order.  Reports are plain rows plus aggregates that can be
recomputed from the rows, and render to CSV with a header row and '.'
decimals.
"""

import csv
import io
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from .exact import WorkBudgetExceeded, approximation_ratio, optimal_single_layer
from .graphs import ComputationGraph, DirectedGraph, computation_graph, value
from .greedy import HagResult, OptimizerConfig, full_greedy, partial_greedy
from .heuristics import degree_heuristic, hub_heuristic
from .ingest import ErConfig, gen_erdos_renyi

ALGORITHMS = ("full", "partial", "degree", "hub", "optimal")


def run_algorithm(name: str, cg: ComputationGraph, k: int, d: int = 2,
                  layer_mode: str = "single", stop_on_nonpositive: bool = True,
                  candidate_floor: int = 2) -> HagResult:
    """Dispatch one optimizer or heuristic by name."""
    if name in ("full", "partial"):
        cfg = OptimizerConfig(k=k, d=d, layer_mode=layer_mode,
                              stop_on_nonpositive=stop_on_nonpositive,
                              candidate_floor=candidate_floor)
        return full_greedy(cg, cfg) if name == "full" else partial_greedy(cg, cfg)
    if name in ("degree", "hub", "optimal") and layer_mode != "single":
        raise ValueError(f"algorithm {name!r} produces single-layer graphs only")
    if name == "degree":
        if d != 2:
            raise ValueError("degree heuristic is defined for d=2 only")
        return degree_heuristic(cg, k, stop_on_nonpositive=stop_on_nonpositive)
    if name == "hub":
        if d != 2:
            raise ValueError("hub heuristic is defined for d=2 only")
        return hub_heuristic(cg, k)
    if name == "optimal":
        return optimal_single_layer(cg, k, d=d)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}")


@dataclass(frozen=True)
class TrialRow:
    """One algorithm run on one instance."""

    algorithm: str
    n: int
    p: float | None
    dataset: str | None
    k: int
    d: int
    layer_mode: str
    value: int
    optimal_value: int | None
    alpha: float | None
    one_minus_alpha: float | None
    elapsed_ms: float
    seed: int | None
    status: str = "ok"


@dataclass(frozen=True)
class AggregateRow:
    """Mean statistics over the trial rows sharing (algorithm, p, k)."""

    algorithm: str
    p: float | None
    k: int
    trials: int
    mean_value: float
    mean_alpha: float | None
    mean_one_minus_alpha: float | None
    std_one_minus_alpha: float | None


@dataclass
class ExperimentReport:
    rows: list[TrialRow] = field(default_factory=list)
    aggregates: list[AggregateRow] = field(default_factory=list)

    def to_csv(self) -> str:
        return rows_to_csv([asdict(r) for r in self.rows])

    def aggregates_to_csv(self) -> str:
        return rows_to_csv([asdict(r) for r in self.aggregates])


def rows_to_csv(rows: list[dict]) -> str:
    """Render dict rows as CSV with a header; empty cells for None."""
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: ("" if val is None else val) for key, val in row.items()})
    return buf.getvalue()


def aggregate_trials(rows: list[TrialRow]) -> list[AggregateRow]:
    """Group rows by (algorithm, p, k) and average; recomputable exactly."""
    groups: dict[tuple, list[TrialRow]] = {}
    for row in rows:
        groups.setdefault((row.algorithm, row.p, row.k), []).append(row)
    out = []
    for (algorithm, p, k), members in sorted(groups.items(),
                                             key=lambda kv: (str(kv[0][0]), kv[0][1] or 0, kv[0][2])):
        alphas = [r.alpha for r in members if r.alpha is not None]
        one_minus = [r.one_minus_alpha for r in members if r.one_minus_alpha is not None]
        out.append(AggregateRow(
            algorithm=algorithm,
            p=p,
            k=k,
            trials=len(members),
            mean_value=sum(r.value for r in members) / len(members),
            mean_alpha=sum(alphas) / len(alphas) if alphas else None,
            mean_one_minus_alpha=sum(one_minus) / len(one_minus) if one_minus else None,
            std_one_minus_alpha=(statistics.pstdev(one_minus)
                                 if len(one_minus) > 1 else (0.0 if one_minus else None)),
        ))
    return out


def _er_trial(n: int, p: float, trial_seed: int, k_list: list[int], d: int,
              algorithms: tuple[str, ...], undirected: bool,
              work_budget: int) -> list[TrialRow]:
    g = gen_erdos_renyi(ErConfig(n=n, p=p, seed=trial_seed, undirected=undirected))
    cg = computation_graph(g)
    rows = []
    for k in k_list:
        try:
            oracle = optimal_single_layer(cg, k, d=d, work_budget=work_budget)
            opt_value = oracle.value
        except WorkBudgetExceeded:
            opt_value = None
        for name in algorithms:
            result = run_algorithm(name, cg, k, d=d)
            if opt_value is None:
                alpha = one_minus = None
                status = "incomplete"
            else:
                ratio, complement = approximation_ratio(result.value, opt_value)
                alpha, one_minus = float(ratio), float(complement)
                status = "ok"
            rows.append(TrialRow(
                algorithm=name, n=n, p=p, dataset=None, k=k, d=d,
                layer_mode="single", value=result.value,
                optimal_value=opt_value, alpha=alpha,
                one_minus_alpha=one_minus, elapsed_ms=result.elapsed_ms,
                seed=trial_seed, status=status,
            ))
    return rows


def erdos_renyi_experiment(n: int, p_grid: list[float], trials: int,
                           k_list: list[int], d: int = 2, seed: int = 0,
                           algorithms: tuple[str, ...] = ("full", "partial"),
                           undirected: bool = False,
                           work_budget: int = 10_000_000,
                           max_workers: int | None = None) -> ExperimentReport:
    """Random-graph sweep comparing algorithms to the exact optimum.

    For every p in the grid, ``trials`` seeded graphs are generated and
    every algorithm is scored by its ratio to the oracle.  Rows on which
    the oracle exceeded its work budget are marked incomplete and excluded
    from the ratio aggregates.
    """
    jobs = [(p, seed + t) for p in p_grid for t in range(trials)]
    with ThreadPoolExecutor(max_workers=max_workers or 2) as pool:
        results = list(pool.map(
            lambda job: _er_trial(n, job[0], job[1], list(k_list), d,
                                  tuple(algorithms), undirected, work_budget),
            jobs))
    rows = [row for batch in results for row in batch]
    return ExperimentReport(rows=rows, aggregates=aggregate_trials(rows))


@dataclass(frozen=True)
class LayerRow:
    k: int
    single_value: int
    multi_value: int
    improvement_pct: float


@dataclass
class LayerReport:
    rows: list[LayerRow]
    mean_single: float
    mean_multi: float
    mean_improvement_pct: float
    std_improvement_pct: float

    def to_csv(self) -> str:
        return rows_to_csv([asdict(r) for r in self.rows])


def _values_by_k(result: HagResult, k_max: int) -> list[int]:
    """Greedy value after each budget 1..k_max, read off the run's trace.

    The greedy choice at each step does not depend on the budget, so one
    run at k_max yields every smaller budget's value as a prefix; once the
    run stops, the value stays flat.
    """
    values = [rec.cumulative_value for rec in result.trace]
    out = []
    for k in range(1, k_max + 1):
        if not values:
            out.append(0)
        else:
            out.append(values[min(k, len(values)) - 1])
    return out


def layer_experiment(g: DirectedGraph, k_max: int) -> LayerReport:
    """Single- versus multi-layer greedy value over budgets 1..k_max."""
    cg = computation_graph(g)
    single = full_greedy(cg, OptimizerConfig(k=k_max, d=2, layer_mode="single"))
    multi = full_greedy(cg, OptimizerConfig(k=k_max, d=2, layer_mode="multi"))
    single_values = _values_by_k(single, k_max)
    multi_values = _values_by_k(multi, k_max)
    rows = []
    improvements = []
    for k, (sv, mv) in enumerate(zip(single_values, multi_values), start=1):
        pct = 0.0 if sv == 0 else 100.0 * (mv - sv) / sv
        improvements.append(pct)
        rows.append(LayerRow(k=k, single_value=sv, multi_value=mv, improvement_pct=pct))
    return LayerReport(
        rows=rows,
        mean_single=sum(single_values) / len(single_values) if rows else 0.0,
        mean_multi=sum(multi_values) / len(multi_values) if rows else 0.0,
        mean_improvement_pct=sum(improvements) / len(improvements) if rows else 0.0,
        std_improvement_pct=statistics.pstdev(improvements) if len(improvements) > 1 else 0.0,
    )


@dataclass
class ComparisonReport:
    rows: list[TrialRow]
    value_ratios: dict[str, float | None]
    runtime_ratios: dict[str, float | None]

    def to_csv(self) -> str:
        return rows_to_csv([asdict(r) for r in self.rows])


def compare_algorithms(g: DirectedGraph, k: int, d: int,
                       algorithms: list[str], layer_mode: str = "single",
                       dataset: str | None = None,
                       stop_on_nonpositive: bool = True,
                       candidate_floor: int = 2) -> ComparisonReport:
    """Run several algorithms on one graph and report pairwise ratios.

    ``value_ratios["a/b"]`` is value(a)/value(b) (1.0 when both are zero,
    None when only b is zero); runtime ratios are reported the same way
    but are hardware-bound and should never be asserted against.
    """
    cg = computation_graph(g)
    results: dict[str, HagResult] = {}
    rows = []
    for name in algorithms:
        result = run_algorithm(name, cg, k, d=d, layer_mode=layer_mode,
                               stop_on_nonpositive=stop_on_nonpositive,
                               candidate_floor=candidate_floor)
        results[name] = result
        rows.append(TrialRow(
            algorithm=name, n=g.node_count, p=None, dataset=dataset, k=k, d=d,
            layer_mode=layer_mode, value=result.value, optimal_value=None,
            alpha=None, one_minus_alpha=None, elapsed_ms=result.elapsed_ms,
            seed=None,
        ))

    def ratio(a: float, b: float) -> float | None:
        if b == 0:
            return 1.0 if a == 0 else None
        return a / b

    value_ratios = {}
    runtime_ratios = {}
    for a in algorithms:
        for b in algorithms:
            if a == b:
                continue
            value_ratios[f"{a}/{b}"] = ratio(results[a].value, results[b].value)
            runtime_ratios[f"{a}/{b}"] = ratio(results[a].elapsed_ms, results[b].elapsed_ms)
    return ComparisonReport(rows=rows, value_ratios=value_ratios,
                            runtime_ratios=runtime_ratios)
