"""Independent cascade and general IC simulation, and Monte Carlo spread estimation."""

import logging
from dataclasses import dataclass
from functools import partial
from typing import Callable, Optional, Tuple

import numpy as np

from robsel.errors import InvalidArgumentError
from robsel.influence.graph import DirectedGraph
from robsel.influence.probabilities import ProbabilityVector
from robsel.logic.objective import GroundSet, SeedPolicy, SetFunctionOracle, Subset, to_bits

logger = logging.getLogger(__name__)

Simulator = Callable[[Subset, np.random.Generator], int]

DEFAULT_SIMULATIONS = 100


@dataclass(frozen=True)
class GeneralICParams:
    """Attempt probability min(base + increment·|S_v|, cap), S_v = failed attempts on v."""

    base: float = 0.1
    increment: float = 0.05
    cap: float = 1.0

    def __post_init__(self):
        if not 0 <= self.base <= self.cap <= 1:
            raise InvalidArgumentError(f"need 0 <= base <= cap <= 1, got base={self.base}, cap={self.cap}")
        if self.increment < 0:
            raise InvalidArgumentError(f"increment must be >= 0, got {self.increment}")

    def attempt_probability(self, failed: int) -> float:
        return min(self.base + self.increment * failed, self.cap)


def _cascade(graph: DirectedGraph, X: Subset, attempt: Callable[[int, int], bool]) -> int:
    """Runs one cascade; `attempt(edge, target)` decides a single activation try.

    Nodes activated at step t try their inactive out-neighbors once, at step t+1,
    in ascending order of (source id, target id).
    """
    active = to_bits(X, graph.n).copy()
    frontier = np.flatnonzero(active).tolist()
    while frontier:
        activated = []
        for u in frontier:
            for e in graph.out_edges[u]:
                v = int(graph.targets[e])
                if not active[v] and attempt(e, v):
                    active[v] = True
                    activated.append(v)
        frontier = sorted(activated)
    return int(active.sum())


def _live_edge_reach(graph: DirectedGraph, live: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Active-node counts of several cascades; row i of `live` marks cascade i's live edges.

    Each edge is tried at most once in an IC cascade, so deciding all edges up
    front gives the same distribution as deciding them during the spread.
    """
    active = np.tile(seeds, (live.shape[0], 1))
    frontier = active.copy()
    while frontier.any():
        rows, edges = np.nonzero(live & frontier[:, graph.sources])
        reached = np.zeros_like(active)
        reached[rows, graph.targets[edges]] = True
        frontier = reached & ~active
        active |= frontier
    return active.sum(axis=1)


def _check_theta(graph: DirectedGraph, theta: ProbabilityVector):
    if len(theta) != graph.edge_count:
        raise InvalidArgumentError(f"θ has {len(theta)} entries for {graph.edge_count} edges")


def simulate_ic(graph: DirectedGraph, theta: ProbabilityVector, X: Subset, rng: np.random.Generator) -> int:
    """One IC cascade from X; returns the number of active nodes."""
    _check_theta(graph, theta)
    live = rng.random((1, graph.edge_count)) < theta.probs
    return int(_live_edge_reach(graph, live, to_bits(X, graph.n))[0])


def simulate_ic_batch(
    graph: DirectedGraph, theta: ProbabilityVector, X: Subset, rng: np.random.Generator, r: int
) -> np.ndarray:
    """r IC cascades from X; cascade i uses row i of one (r, |E|) uniform draw."""
    _check_theta(graph, theta)
    live = rng.random((r, graph.edge_count)) < theta.probs
    return _live_edge_reach(graph, live, to_bits(X, graph.n))


def simulate_general_ic(graph: DirectedGraph, params: GeneralICParams, X: Subset, rng: np.random.Generator) -> int:
    """One general IC cascade; each failure on v raises the next attempt's probability."""
    failed = np.zeros(graph.n, dtype=np.int64)
    draws = rng.random(graph.edge_count)

    def attempt(e: int, v: int) -> bool:
        if draws[e] < params.attempt_probability(int(failed[v])):
            return True
        failed[v] += 1
        return False

    return _cascade(graph, X, attempt)


class ICSimulator:
    """IC cascades on a fixed graph and θ; `batch` runs many replicates in one pass."""

    def __init__(self, graph: DirectedGraph, theta: ProbabilityVector):
        _check_theta(graph, theta)
        self.graph = graph
        self.theta = theta

    def __call__(self, X: Subset, rng: np.random.Generator) -> int:
        return simulate_ic(self.graph, self.theta, X, rng)

    def batch(self, X: Subset, rng: np.random.Generator, r: int) -> np.ndarray:
        return simulate_ic_batch(self.graph, self.theta, X, rng, r)


def ic_simulator(graph: DirectedGraph, theta: ProbabilityVector) -> Simulator:
    return ICSimulator(graph, theta)


def general_ic_simulator(graph: DirectedGraph, params: GeneralICParams = GeneralICParams()) -> Simulator:
    return partial(simulate_general_ic, graph, params)


def estimate_spread_stats(simulator: Simulator, X: Subset, r: int = DEFAULT_SIMULATIONS, seed: int = 0) -> Tuple[float, float]:
    """(mean, sample standard deviation) of r simulations.

    Simulators with a `batch` method draw replicate i as row i of one stream
    seeded by `seed`; others draw replicate i from the i-th child of
    SeedSequence(seed).
    """
    if r < 1:
        raise InvalidArgumentError(f"r must be >= 1, got {r}")
    batch = getattr(simulator, "batch", None)
    if batch is not None:
        counts = np.asarray(batch(X, np.random.default_rng(seed), r), dtype=float)
    else:
        counts = np.array(
            [simulator(X, np.random.default_rng(child)) for child in np.random.SeedSequence(seed).spawn(r)],
            dtype=float,
        )
    std = float(counts.std(ddof=1)) if r > 1 else 0.0
    return float(counts.mean()), std


def estimate_spread(simulator: Simulator, X: Subset, r: int = DEFAULT_SIMULATIONS, seed: int = 0) -> float:
    return estimate_spread_stats(simulator, X, r, seed)[0]


class SpreadOracle(SetFunctionOracle):
    """Monte Carlo influence spread of a seed set, as a stochastic set function."""

    stochastic = True

    def __init__(
        self,
        graph: DirectedGraph,
        simulator: Simulator,
        r: int = DEFAULT_SIMULATIONS,
        seed_policy: SeedPolicy = SeedPolicy.MEMOIZED_PER_SUBSET,
        seed: int = 0,
    ):
        super().__init__(GroundSet(graph.n, graph.labels), seed_policy, seed)
        self.graph = graph
        self.simulator = simulator
        self.r = r

    def evaluate(self, bits, rng: Optional[np.random.Generator] = None) -> float:
        if not bits.any():
            return 0.0
        rng = rng if rng is not None else np.random.default_rng(self.seed)
        return estimate_spread(self.simulator, bits, self.r, int(rng.integers(2**63)))
