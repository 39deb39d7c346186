"""Self-contained property suite behind the ``validate`` command.

Runs randomized spot checks of the package's core guarantees: the
matching/completion value identity and bijection, the ordered-vs-optimal
matching sandwich, the greedy shifted-value floor, structural equivalence
of every optimizer's output, agreement of the two exact matchers, and
exact state equality between plain and rewritten execution.  Each check
reports a pass/fail with a one-line detail; the suite passes only if all
checks do.

``inject_fault=True`` deliberately corrupts one optimizer output before
checking it, to demonstrate that a broken graph is in fact caught.
"""

import math
import random
from dataclasses import dataclass
from itertools import product

from .exact import approximation_ratio, optimal_single_layer
from .graphs import computation_graph, shifted_value, value, verify_equivalence
from .greedy import (
    OptimizerConfig,
    full_greedy,
    max_matching_value,
    ordered_matching_value,
    partial_greedy,
)
from .heuristics import degree_heuristic, hub_heuristic
from .ingest import ErConfig, gen_erdos_renyi
from .matching import (
    Hyperedge,
    Matching,
    PartialHag,
    ReceiverProblem,
    build_matching_instance,
    complete_from_matching,
    matching_from_hag,
    max_matching_blossom,
    max_matching_bruteforce,
)
from .executor import run_gnn, run_hag, union_aggregate


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_partial_in_sets(rng: random.Random, n: int, k: int, d: int = 2) -> list[tuple[int, ...]]:
    """Up to k distinct random size-d sender subsets."""
    chosen: set[tuple[int, ...]] = set()
    attempts = 0
    while len(chosen) < k and attempts < 50:
        attempts += 1
        chosen.add(tuple(sorted(rng.sample(range(n), d))))
    return sorted(chosen)


def enumerate_matchings(instance, covers: dict[int, frozenset[int]], cap: int):
    """All matchings of a per-receiver instance family, or None above cap.

    Per receiver, every subset of pairwise-disjoint hyperedges is listed;
    the global matchings are the cartesian product across receivers.
    """
    per_receiver: list[list[tuple[int, ...]]] = []
    total = 1
    for problem in instance.problems:
        edges = sorted(problem.hyperedges, key=lambda e: e.source)
        options: list[tuple[int, ...]] = []
        for mask in range(1 << len(edges)):
            picked = [edges[i] for i in range(len(edges)) if mask >> i & 1]
            used: set[int] = set()
            ok = True
            for e in picked:
                if used & e.vertices:
                    ok = False
                    break
                used |= e.vertices
            if ok:
                options.append(tuple(sorted(e.source for e in picked)))
        per_receiver.append(options)
        total *= len(options)
        if total > cap:
            return None
    out = []
    for combo in product(*per_receiver):
        val = sum(len(covers[v]) - 1 for row in combo for v in row)
        out.append(Matching(tuple(combo), val))
    return out


def check_completion_value_identity(rng: random.Random, trials: int) -> CheckResult:
    """Completion value == matching value minus the per-node in-degree excess,
    for every matching of random small instances; inverse round-trips."""
    checked = 0
    instances = 0
    while instances < trials:
        n = rng.randint(4, 8)
        g = gen_erdos_renyi(ErConfig(n=n, p=rng.uniform(0.2, 0.5), seed=rng.randrange(1 << 30)))
        cg = computation_graph(g)
        in_sets = random_partial_in_sets(rng, n, rng.randint(1, 3))
        if not in_sets:
            continue
        p = PartialHag.from_in_sets(n, in_sets, d=2, single_layer=True)
        instance = build_matching_instance(p, cg)
        covers = {m.id: m.cover for m in p.intermediates}
        matchings = enumerate_matchings(instance, covers, cap=600)
        if matchings is None:
            continue
        instances += 1
        offset = p.in_degree_excess()
        for m in matchings:
            hag = complete_from_matching(p, cg, m)
            if value(hag) != m.value - offset:
                return CheckResult(
                    "completion_value_identity", False,
                    f"graph value {value(hag)} != matching {m.value} - offset {offset}")
            if matching_from_hag(hag) != m:
                return CheckResult(
                    "completion_value_identity", False,
                    "extracting the matching back did not round-trip")
            checked += 1
    return CheckResult("completion_value_identity", True,
                       f"{checked} matchings over {instances} instances")


def check_matching_sandwich(rng: random.Random, trials: int) -> CheckResult:
    """Ordered greedy wiring lies between optimal/d and optimal."""
    checked = 0
    for _ in range(trials):
        n = rng.randint(5, 10)
        d = rng.choice((2, 3))
        g = gen_erdos_renyi(ErConfig(n=n, p=rng.uniform(0.3, 0.6), seed=rng.randrange(1 << 30)))
        cg = computation_graph(g)
        in_sets = random_partial_in_sets(rng, n, rng.randint(1, 3), d=d)
        if not in_sets:
            continue
        f_val = max_matching_value(cg, in_sets, d)
        for _ in range(3):
            order = list(in_sets)
            rng.shuffle(order)
            h_val = ordered_matching_value(cg, order, d)
            if not (f_val <= h_val * d and h_val <= f_val):
                return CheckResult(
                    "matching_sandwich", False,
                    f"order {order}: ordered {h_val} outside [{f_val}/{d}, {f_val}]")
            checked += 1
    return CheckResult("matching_sandwich", True, f"{checked} (instance, order) pairs")


def check_greedy_floor(rng: random.Random, trials: int) -> CheckResult:
    """Greedy shifted value is at least (1/d)(1 - 1/e) of the optimum's."""
    bound_factor = 1 - 1 / math.e
    checked = 0
    for _ in range(trials):
        n = rng.randint(6, 10)
        d = rng.choice((2, 3))
        k = rng.randint(1, 3)
        g = gen_erdos_renyi(ErConfig(n=n, p=rng.uniform(0.2, 0.6), seed=rng.randrange(1 << 30)))
        cg = computation_graph(g)
        greedy = full_greedy(cg, OptimizerConfig(k=k, d=d, layer_mode="single"))
        oracle = optimal_single_layer(cg, k, d=d)
        lhs = shifted_value(greedy.final, d)
        rhs = shifted_value(oracle.final, d)
        approximation_ratio(greedy.value, oracle.value)  # raises if greedy beat the oracle
        if lhs < (bound_factor / d) * rhs:
            return CheckResult(
                "greedy_floor", False,
                f"shifted value {lhs} below floor {(bound_factor / d) * rhs:.3f} (n={n}, d={d}, k={k})")
        checked += 1
    return CheckResult("greedy_floor", True, f"{checked} instances")


def _corrupt(hag):
    """Give some rewired receiver a duplicate path (for fault injection)."""
    bad = hag.copy()
    for r, senders in enumerate(bad.receiver_in):
        for w in sorted(senders):
            if w >= bad.n:
                leaf = min(bad.intermediate(w).cover)
                bad.receiver_in[r].add(leaf)
                return bad
    return None


def check_equivalence(rng: random.Random, trials: int, inject_fault: bool) -> CheckResult:
    """Every algorithm's output preserves exactly-once aggregation."""
    checked = 0
    faulted = False
    for i in range(trials):
        n = rng.randint(5, 14)
        g = gen_erdos_renyi(ErConfig(n=n, p=rng.uniform(0.2, 0.5), seed=rng.randrange(1 << 30)))
        cg = computation_graph(g)
        k = rng.randint(1, 3)
        outputs = [
            full_greedy(cg, OptimizerConfig(k=k, d=2)).final,
            full_greedy(cg, OptimizerConfig(k=k, d=2, layer_mode="multi")).final,
            partial_greedy(cg, OptimizerConfig(k=k, d=2)).final,
            degree_heuristic(cg, k).final,
            hub_heuristic(cg, k).final,
        ]
        if inject_fault and not faulted:
            for hag in outputs:
                bad = _corrupt(hag)
                if bad is not None:
                    outputs.append(bad)
                    faulted = True
                    break
        for hag in outputs:
            report = verify_equivalence(hag, g)
            if not report.ok:
                return CheckResult(
                    "equivalence", False,
                    f"violations {report.violations[:3]} on n={n} seed trial {i}")
            checked += 1
    return CheckResult("equivalence", True, f"{checked} graphs verified")


def check_solver_agreement(rng: random.Random, trials: int) -> CheckResult:
    """Blossom and exhaustive search agree on pairwise instances."""
    for i in range(trials):
        n_verts = rng.randint(2, 8)
        pairs = [(a, b) for a in range(n_verts) for b in range(a + 1, n_verts)]
        rng.shuffle(pairs)
        chosen = pairs[:rng.randint(0, min(len(pairs), 20))]
        problem = ReceiverProblem(
            receiver=0,
            vertices=frozenset(range(n_verts)),
            hyperedges=tuple(Hyperedge(100 + j, frozenset(e)) for j, e in enumerate(chosen)),
        )
        _, blossom_val = max_matching_blossom(problem)
        _, brute_val = max_matching_bruteforce(problem)
        if blossom_val != brute_val:
            return CheckResult(
                "solver_agreement", False,
                f"trial {i}: blossom {blossom_val} != exhaustive {brute_val}")
    return CheckResult("solver_agreement", True, f"{trials} random graphs")


def check_execution_equality(rng: random.Random, trials: int) -> CheckResult:
    """Rewritten execution matches plain execution exactly; per-round step
    savings equal the graph value."""
    agg = union_aggregate()
    checked = 0
    for _ in range(trials):
        n = rng.randint(4, 12)
        g = gen_erdos_renyi(ErConfig(n=n, p=rng.uniform(0.2, 0.5), seed=rng.randrange(1 << 30)))
        cg = computation_graph(g)
        hag = full_greedy(cg, OptimizerConfig(k=2, d=2, layer_mode="multi")).final
        init = [(v,) for v in range(n)]
        for rounds in (1, 2):
            plain = run_gnn(cg, rounds, init, agg)
            rewritten = run_hag(hag, rounds, init, agg)
            if plain.states_per_round != rewritten.states_per_round:
                return CheckResult("execution_equality", False,
                                   f"states diverged at n={n}, rounds={rounds}")
            savings = {plain.ops_per_round[i] - rewritten.ops_per_round[i]
                       for i in range(rounds)}
            if savings != {value(hag)}:
                return CheckResult("execution_equality", False,
                                   f"per-round savings {savings} != value {value(hag)}")
            checked += 1
    return CheckResult("execution_equality", True, f"{checked} runs compared")


def run_validation_suite(seed: int = 0, trials: int = 25,
                         inject_fault: bool = False) -> list[CheckResult]:
    rng = random.Random(seed)
    return [
        check_completion_value_identity(random.Random(rng.randrange(1 << 30)), max(trials // 2, 5)),
        check_matching_sandwich(random.Random(rng.randrange(1 << 30)), trials),
        check_greedy_floor(random.Random(rng.randrange(1 << 30)), trials),
        check_equivalence(random.Random(rng.randrange(1 << 30)), max(trials // 2, 5), inject_fault),
        check_solver_agreement(random.Random(rng.randrange(1 << 30)), trials * 2),
        check_execution_equality(random.Random(rng.randrange(1 << 30)), max(trials // 2, 5)),
    ]
