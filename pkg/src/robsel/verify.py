"""Oracle-backed check suite behind `robsel verify`.

Each check draws small random instances, computes the relevant quantities by
brute force and counts violations of the approximation guarantees and
structural invariants. Instances are reproducible from the suite seed.
"""

import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import networkx as nx
import numpy as np

from robsel.errors import PopulationInvariantError, RobselError
from robsel.influence.cascade import estimate_spread_stats, ic_simulator
from robsel.influence.graph import DirectedGraph, top_active_subgraph
from robsel.influence.live_edge import LiveEdgeEnumerator
from robsel.influence.probabilities import (
    ProbabilityVector,
    beta_lower_bound,
    delta_max,
    vector_distance,
    weighted_cascade_probs,
)
from robsel.logic.eporss import NEG_INFINITY, default_iterations, eporss_run, evaluate_solution
from robsel.logic.greedy import greedy_select, modified_greedy_select
from robsel.logic.instance_builder import (
    InstanceBuilder,
    build_exact_perturbation_ensemble,
    build_perturbation_ensemble,
    random_instance,
)
from robsel.logic.objective import ObjectiveEnsemble
from robsel.logic.ratios import (
    BruteForceOracle,
    guarantee_report,
    mask_of,
    one_step_gain_function,
    one_step_gain_worst_case,
    submodularity_ratio,
)
from robsel.logic.set_functions import PowerModularFunction

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9
KINDS = ('modular', 'coverage', 'concave')


@dataclass(frozen=True)
class VerifyTier:
    instances: int
    eporss_instances: int
    count_max_n: int
    spread_triples: int
    correlation_instances: int
    gain_pairs: int
    coverage_triples: int
    calibration_cases: int
    calibration_r: int
    fuzz_iterations: int
    trend_nodes: int
    trend_seeds: int


TIERS: Dict[str, VerifyTier] = {
    'tiny': VerifyTier(10, 5, 6, 40, 4, 20, 10, 10, 2000, 20_000, 20, 3),
    'small': VerifyTier(100, 100, 12, 200, 20, 100, 50, 50, 10_000, 1_000_000, 50, 10),
}


@dataclass
class CheckResult:
    name: str
    total: int = 0
    failures: List[str] = field(default_factory=list)
    allowed_failures: int = 0
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return len(self.failures) <= self.allowed_failures

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.total - len(self.failures)}/{self.total} ok"


# --- instance generators ---

def _random_ensemble(rng: np.random.Generator, max_n: int = 10, max_k: int = 3) -> Tuple[ObjectiveEnsemble, int]:
    n = int(rng.integers(3, max_n + 1))
    m = int(rng.integers(1, 4))
    k = int(rng.integers(1, min(max_k, n) + 1))
    return random_instance(rng, n, m, KINDS).build_ensemble(), k


def _random_graph(rng: np.random.Generator, max_edges: int = 12) -> DirectedGraph:
    n = int(rng.integers(3, 8))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    count = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    chosen = rng.choice(len(pairs), size=count, replace=False)
    return DirectedGraph.from_edges(n, [(pairs[i][0], pairs[i][1], 1.0) for i in sorted(chosen)])


def _random_subset(rng: np.random.Generator, n: int, max_size: int) -> np.ndarray:
    bits = np.zeros(n, dtype=bool)
    size = int(rng.integers(0, min(max_size, n) + 1))
    bits[rng.choice(n, size=size, replace=False)] = True
    return bits


def _final_value(ensemble: ObjectiveEnsemble, bits: np.ndarray) -> float:
    return float(ensemble.evaluate_profile(bits, counted=False).min())


# --- checks ---

def check_greedy_bound(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("greedy bound F >= (1 - e^-βγ)·OPT")
    for i in range(tier.instances):
        ensemble, k = _random_ensemble(rng)
        bits, trace = greedy_select(ensemble, k)
        report = guarantee_report(ensemble, k, trace)
        value = _final_value(ensemble, bits)
        result.total += 1
        if value < report.ratio_bound * report.opt - TOLERANCE:
            result.failures.append(f"instance {i}: F={value} < {report.ratio_bound}·{report.opt}")
    return result


def check_eporss_bound(rng: np.random.Generator, tier: VerifyTier, seeds: int = 10) -> CheckResult:
    result = CheckResult("EPORSS best-of-seeds bound F >= (1 - e^-β'γ')·OPT")
    for i in range(tier.eporss_instances):
        ensemble, k = _random_ensemble(rng)
        _, trace = greedy_select(ensemble.fresh(), k)
        report = guarantee_report(ensemble, k, trace)
        target = report.ratio_bound_prime * report.opt - TOLERANCE
        T = 2 * default_iterations(ensemble.n, k)
        result.total += 1
        best = NEG_INFINITY
        for seed in range(seeds):
            run = ensemble.fresh()
            bits, _ = eporss_run(run, k, T, seed)
            best = max(best, _final_value(run, bits))
            if best >= target:
                break
        if best < target:
            result.failures.append(f"instance {i}: best F={best} < {target}")
    return result


def check_evaluation_counts(tier: VerifyTier) -> CheckResult:
    result = CheckResult("greedy / modified greedy evaluation counts")
    for n in range(1, tier.count_max_n + 1):
        builder = InstanceBuilder.from_weights([np.arange(1, n + 1).tolist(), np.arange(n, 0, -1).tolist()])
        ensemble = builder.build_ensemble()
        for k in range(1, n + 1):
            result.total += 2
            run = ensemble.fresh()
            greedy_select(run, k)
            if run.eval_count * 2 != (2 * n - k + 1) * k:
                result.failures.append(f"greedy n={n} k={k}: {run.eval_count}")
            run = ensemble.fresh()
            modified_greedy_select(run, k)
            if run.eval_count != (2 * n - k + 1) * k:
                result.failures.append(f"modified greedy n={n} k={k}: {run.eval_count}")
    return result


def check_one_step_gains(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("one-step gain inequalities (per function and worst case)")
    for i in range(tier.gain_pairs):
        ensemble, k = _random_ensemble(rng, max_n=8)
        X = _random_subset(rng, ensemble.n, ensemble.n - 1)
        oracle = BruteForceOracle(ensemble)
        opt, _ = oracle.exhaustive_opt(k)
        result.total += 1
        for index in range(ensemble.m):
            opt_i, _ = oracle.exhaustive_opt(k, index=index)
            gain, bound = one_step_gain_function(ensemble, index, X, k, opt_i, oracle)
            if gain < bound - TOLERANCE:
                result.failures.append(f"pair {i} f{index + 1}: gain {gain} < {bound}")
        gain, bound = one_step_gain_worst_case(ensemble, X, k, opt, oracle)
        if gain < bound - TOLERANCE:
            result.failures.append(f"pair {i} worst case: gain {gain} < {bound}")
    return result


def check_spread_lipschitz(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("|σ_θ(X) − σ_θ'(X)| <= n·δ(θ, θ')")
    for i in range(tier.spread_triples):
        graph = _random_graph(rng)
        enumerator = LiveEdgeEnumerator(graph)
        theta = ProbabilityVector(rng.random(graph.edge_count))
        other = ProbabilityVector(rng.random(graph.edge_count))
        X = _random_subset(rng, graph.n, graph.n)
        gap = abs(enumerator.spread(theta, X) - enumerator.spread(other, X))
        result.total += 1
        if gap > graph.n * vector_distance(theta, other) + TOLERANCE:
            result.failures.append(f"triple {i}: gap {gap}")
    return result


def check_correlation_bound(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("greedy-prefix β_X >= 1 − 2en·δ_max")
    for i in range(tier.correlation_instances):
        graph = _random_graph(rng)
        base = weighted_cascade_probs(graph)
        # perturbation width small enough that δ_max < 1/(4en)
        width = 1.0 / (10 * math.e * graph.n * max(1, graph.edge_count))
        ensemble, thetas = build_exact_perturbation_ensemble(
            graph, int(rng.integers(2, 4)), rng, 1 - width, 1 + width, base,
        )
        delta = delta_max(thetas)
        if delta >= 1 / (4 * math.e * graph.n):
            logger.debug("instance %d: δ_max=%g too large, skipped", i, delta)
            continue
        k = int(rng.integers(1, min(3, graph.n) + 1))
        _, trace = greedy_select(ensemble, k)
        oracle = BruteForceOracle(ensemble)
        bound = beta_lower_bound(graph.n, delta)
        for bits in trace.prefixes()[:k]:
            mask = mask_of(bits)
            if np.any(oracle.profile(mask) >= (1 - 1 / math.e) * graph.n):
                continue
            result.total += 1
            beta = oracle.correlation_ratio(mask)
            if beta < bound - TOLERANCE:
                result.failures.append(f"instance {i}: β={beta} < {bound}")
    return result


def check_submodularity_detection(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("γ = 1 on coverage functions, γ < 1 on a supermodular witness")
    for i in range(tier.coverage_triples):
        n = int(rng.integers(3, 8))
        universe = int(rng.integers(n, 2 * n + 1))
        item_sets = [rng.choice(universe, size=int(rng.integers(1, 4)), replace=False).tolist() for _ in range(n)]
        builder = InstanceBuilder()
        builder.add_function('coverage', item_sets=item_sets)
        f = builder.build_ensemble().functions[0]
        X = _random_subset(rng, n, n - 1)
        b = int(rng.integers(1, 4))
        result.total += 1
        gamma = submodularity_ratio(f, X, b)
        if gamma != 1.0:
            result.failures.append(f"coverage triple {i}: γ={gamma}")
    result.total += 1
    witness = PowerModularFunction([1.0, 1.0, 1.0], power=2.0)
    gamma = submodularity_ratio(witness, np.zeros(3, dtype=bool), 2)
    if not gamma < 1.0:
        result.failures.append(f"supermodular witness: γ={gamma}")
    return result


def check_monte_carlo_calibration(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("Monte Carlo IC estimate within 4 standard errors of exact spread", allowed_failures=1)
    for i in range(tier.calibration_cases):
        graph = _random_graph(rng)
        theta = ProbabilityVector(rng.random(graph.edge_count))
        X = _random_subset(rng, graph.n, graph.n)
        exact = LiveEdgeEnumerator(graph).spread(theta, X)
        mean, std = estimate_spread_stats(ic_simulator(graph, theta), X, tier.calibration_r, int(rng.integers(2**31)))
        result.total += 1
        if abs(mean - exact) > 4 * std / math.sqrt(tier.calibration_r) + TOLERANCE:
            result.failures.append(f"case {i}: estimate {mean} vs exact {exact}")
    return result


def check_population_invariants(rng: np.random.Generator, tier: VerifyTier) -> CheckResult:
    result = CheckResult("EPORSS archive invariants under fuzzing")
    done = 0
    while done < tier.fuzz_iterations:
        ensemble, k = _random_ensemble(rng, max_n=10, max_k=4)
        T = min(tier.fuzz_iterations - done, int(rng.integers(500, 5001)))
        result.total += 1
        try:
            _, trace = eporss_run(ensemble, k, T, int(rng.integers(2**31)), check_invariants=True)
        except PopulationInvariantError as e:
            result.failures.append(f"run at iteration {done}: {e}")
        else:
            values = [step.value for step in trace.steps]
            if any(b < a for a, b in zip(values, values[1:])):
                result.failures.append(f"run at iteration {done}: best feasible F decreased")
        done += T
    return result


def _sampled_network(rng: np.random.Generator, nodes: int) -> DirectedGraph:
    """The `nodes` most active nodes of a sparse random digraph four times larger."""
    source = nx.gnm_random_graph(4 * nodes, 12 * nodes, seed=int(rng.integers(2**31)), directed=True)
    return top_active_subgraph(DirectedGraph.from_networkx(source), nodes)


def check_perturbation_trend(
    rng: np.random.Generator, tier: VerifyTier, k: int = 5, m: int = 3, r: int = 100
) -> CheckResult:
    """EPORSS mean F over seeds is not below greedy's by more than one pooled std."""
    result = CheckResult(f"perturb-ic trend: EPORSS vs greedy on {tier.trend_nodes} nodes")
    graph = _sampled_network(rng, tier.trend_nodes)
    ensemble, _ = build_perturbation_ensemble(graph, m, rng, r=r)
    started = time.perf_counter()
    values: Dict[str, List[float]] = {'greedy': [], 'eporss': []}
    for seed in range(tier.trend_seeds):
        run = ensemble.fresh(seed)
        bits, _ = greedy_select(run, k)
        values['greedy'].append(_final_value(run, bits))
        run = ensemble.fresh(seed)
        bits, _ = eporss_run(run, k, seed=seed)
        values['eporss'].append(_final_value(run, bits))
    greedy_mean, eporss_mean = np.mean(values['greedy']), np.mean(values['eporss'])
    ddof = 1 if tier.trend_seeds > 1 else 0
    pooled = math.sqrt((np.var(values['greedy'], ddof=ddof) + np.var(values['eporss'], ddof=ddof)) / 2)
    result.total += 1
    if eporss_mean < greedy_mean - pooled - TOLERANCE:
        result.failures.append(f"EPORSS mean F={eporss_mean:.4g} < greedy {greedy_mean:.4g} - {pooled:.4g}")
    if eporss_mean > greedy_mean + pooled:
        relation = "clearly better"
    elif eporss_mean < greedy_mean - pooled:
        relation = "worse"
    else:
        relation = "comparable"
    result.notes.append(
        f"EPORSS mean F={eporss_mean:.4g}, greedy {greedy_mean:.4g}, pooled std {pooled:.4g}: EPORSS {relation}"
        f" ({tier.trend_seeds} seeds, {time.perf_counter() - started:.1f}s)"
    )
    return result


def check_g1_threshold() -> CheckResult:
    """Sizes below 2k keep their F value; sizes from 2k on are infeasible."""
    result = CheckResult("g1 infeasibility threshold at 2k")
    ensemble = InstanceBuilder.from_weights([[1.0] * 8, [2.0] * 8]).build_ensemble()
    for k in range(1, 5):
        for size in range(0, 9):
            bits = np.zeros(8, dtype=bool)
            bits[:size] = True
            g1 = evaluate_solution(bits, k, ensemble).g1
            result.total += 1
            if (size >= 2 * k) != (g1 == NEG_INFINITY):
                result.failures.append(f"k={k} size={size}: g1={g1}")
    return result


def run_checks(tier_name: str = 'tiny', seed: int = 0) -> List[CheckResult]:
    tier = TIERS[tier_name]
    rng = np.random.default_rng(seed)
    suite: List[Callable[[], CheckResult]] = [
        lambda: check_evaluation_counts(tier),
        check_g1_threshold,
        lambda: check_greedy_bound(rng, tier),
        lambda: check_eporss_bound(rng, tier),
        lambda: check_one_step_gains(rng, tier),
        lambda: check_spread_lipschitz(rng, tier),
        lambda: check_correlation_bound(rng, tier),
        lambda: check_submodularity_detection(rng, tier),
        lambda: check_monte_carlo_calibration(rng, tier),
        lambda: check_population_invariants(rng, tier),
        lambda: check_perturbation_trend(rng, tier),
    ]
    results = []
    for check in suite:
        outcome = check()
        print(outcome.line())
        for failure in outcome.failures[:5]:
            print(f"    {failure}")
        for note in outcome.notes:
            print(f"    {note}")
        results.append(outcome)
    return results


def cmd_verify(tier: str = 'tiny', seed: int = 0) -> int:
    """Runs the suite; nonzero exit when any check fails."""
    if tier not in TIERS:
        print(f"error: unknown tier {tier!r}; expected one of {', '.join(TIERS)}", file=sys.stderr)
        return 2
    try:
        results = run_checks(tier, seed)
    except RobselError as e:
        logger.error("verify aborted: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return 1
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0
