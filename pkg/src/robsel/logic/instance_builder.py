import copy
import logging
import uuid
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from robsel.errors import InvalidArgumentError
from robsel.influence.cascade import GeneralICParams, SpreadOracle, general_ic_simulator, ic_simulator
from robsel.influence.graph import DirectedGraph, top_active_subgraph
from robsel.influence.live_edge import ExactSpreadOracle, LiveEdgeEnumerator
from robsel.influence.probabilities import ProbabilityVector, perturb_probs, weighted_cascade_probs
from robsel.logic.objective import ObjectiveEnsemble, SeedPolicy, SetFunctionOracle
from robsel.logic.set_functions import CoverageFunction, ModularFunction, PowerModularFunction, TableFunction

logger = logging.getLogger(__name__)

# Default properties per function family
DEFAULT_MODULAR_PROPS = {
    'weights': [1.0],
}

DEFAULT_COVERAGE_PROPS = {
    'item_sets': [[0]],
    'element_weights': None,  # unit weight per universe element
}

DEFAULT_CONCAVE_PROPS = {
    'weights': [1.0],
    'power': 0.5,
}

DEFAULT_SUPERMODULAR_PROPS = {
    'weights': [1.0],
    'power': 2.0,
}

DEFAULT_TABLE_PROPS = {
    'n': 1,
    'values': {},
}

DEFAULT_PROPS_MAP = {
    'modular': DEFAULT_MODULAR_PROPS,
    'coverage': DEFAULT_COVERAGE_PROPS,
    'concave': DEFAULT_CONCAVE_PROPS,
    'supermodular': DEFAULT_SUPERMODULAR_PROPS,
    'table': DEFAULT_TABLE_PROPS,
}


def _make_function(kind: str, props: Dict[str, Any], labels: Optional[Sequence[str]]) -> SetFunctionOracle:
    if kind == 'modular':
        return ModularFunction(props['weights'], labels=labels)
    if kind in ('concave', 'supermodular'):
        return PowerModularFunction(props['weights'], power=props['power'], labels=labels)
    if kind == 'coverage':
        return CoverageFunction(props['item_sets'], props['element_weights'], labels=labels)
    if kind == 'table':
        return TableFunction(props['n'], props['values'], labels=labels)
    raise InvalidArgumentError(f"Unsupported function kind: {kind}")


class InstanceBuilder:
    """Records the functions of a synthetic instance and builds its ensemble.

    Each function is a dict with an id, a kind and a 'properties' dict seeded
    from the kind's defaults.
    """

    def __init__(self, labels: Optional[Sequence[str]] = None):
        self.functions: List[Dict[str, Any]] = []
        self.labels = tuple(labels) if labels else None

    def _generate_unique_id(self, kind: str) -> str:
        return f"{kind}_{uuid.uuid4().hex[:6]}"

    def add_function(self, kind: str, **properties: Any) -> str:
        """Adds a function of `kind`; unspecified properties take the defaults.

        Raises:
            InvalidArgumentError: If the kind or a property name is unknown.
        """
        if kind not in DEFAULT_PROPS_MAP:
            raise InvalidArgumentError(f"Unsupported function kind: {kind}")
        unknown = set(properties) - set(DEFAULT_PROPS_MAP[kind])
        if unknown:
            raise InvalidArgumentError(f"Unknown properties for {kind}: {sorted(unknown)}")
        new_id = self._generate_unique_id(kind)
        props = copy.deepcopy(DEFAULT_PROPS_MAP[kind])
        props.update(properties)
        self.functions.append({'id': new_id, 'kind': kind, 'properties': props})
        return new_id

    def build_ensemble(self, seed: int = 0, workers: int = 1) -> ObjectiveEnsemble:
        """Instantiates every recorded function over a common ground set."""
        if not self.functions:
            raise InvalidArgumentError("No functions added to the instance")
        oracles = [_make_function(s['kind'], s['properties'], self.labels) for s in self.functions]
        return ObjectiveEnsemble(oracles, seed=seed, workers=workers)

    @classmethod
    def from_weights(cls, weights: Sequence[Sequence[float]]) -> "InstanceBuilder":
        builder = cls()
        for row in weights:
            builder.add_function('modular', weights=list(row))
        return builder

    @classmethod
    def modular_pair(cls) -> "InstanceBuilder":
        """f1 weights (3, 2, 1), f2 weights (1, 2, 3)."""
        return cls.from_weights([[3, 2, 1], [1, 2, 3]])


def random_instance(
    rng: np.random.Generator, n: int, m: int, kinds: Sequence[str] = ('modular', 'coverage', 'concave')
) -> InstanceBuilder:
    """Random mixture of monotone functions over n items."""
    builder = InstanceBuilder()
    for _ in range(m):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == 'coverage':
            universe = int(rng.integers(n, 2 * n + 1))
            item_sets = [rng.choice(universe, size=int(rng.integers(1, 4)), replace=False).tolist() for _ in range(n)]
            builder.add_function('coverage', item_sets=item_sets, element_weights=rng.uniform(0.5, 2.0, universe).tolist())
        elif kind == 'concave':
            builder.add_function('concave', weights=rng.uniform(0, 5, n).tolist(), power=float(rng.uniform(0.3, 1.0)))
        elif kind == 'supermodular':
            builder.add_function('supermodular', weights=rng.uniform(0, 5, n).tolist(), power=float(rng.uniform(1.2, 2.5)))
        else:
            builder.add_function('modular', weights=rng.integers(0, 10, n).astype(float).tolist())
    return builder


def build_perturbation_ensemble(
    graph: DirectedGraph,
    m: int,
    rng: np.random.Generator,
    r: int = 100,
    lo: float = 0.9,
    hi: float = 1.1,
    seed_policy: SeedPolicy = SeedPolicy.MEMOIZED_PER_SUBSET,
    seed: int = 0,
    workers: int = 1,
) -> Tuple[ObjectiveEnsemble, List[ProbabilityVector]]:
    """One Monte Carlo IC oracle per perturbed weighted-cascade vector."""
    thetas = perturb_probs(weighted_cascade_probs(graph), lo, hi, m, rng)
    oracles = [SpreadOracle(graph, ic_simulator(graph, theta), r, seed_policy, seed) for theta in thetas]
    return ObjectiveEnsemble(oracles, seed=seed, workers=workers), thetas


def build_exact_perturbation_ensemble(
    graph: DirectedGraph, m: int, rng: np.random.Generator, lo: float = 0.9, hi: float = 1.1,
    theta: Optional[ProbabilityVector] = None,
) -> Tuple[ObjectiveEnsemble, List[ProbabilityVector]]:
    """Like build_perturbation_ensemble but with exact live-edge oracles."""
    enumerator = LiveEdgeEnumerator(graph)
    base = theta if theta is not None else weighted_cascade_probs(graph)
    thetas = perturb_probs(base, lo, hi, m, rng)
    return ObjectiveEnsemble([ExactSpreadOracle(enumerator, t) for t in thetas]), thetas


def build_snapshot_ensemble(
    graphs: Sequence[DirectedGraph],
    params: GeneralICParams = GeneralICParams(),
    r: int = 100,
    node_limit: int = 200,
    seed_policy: SeedPolicy = SeedPolicy.MEMOIZED_PER_SUBSET,
    seed: int = 0,
    workers: int = 1,
) -> ObjectiveEnsemble:
    """One general IC oracle per snapshot graph over a shared ground set.

    The ground set is the `node_limit` most active nodes of the union of all
    snapshots; each snapshot is restricted to those labels.
    """
    if not graphs:
        raise InvalidArgumentError("need at least one snapshot graph")
    labels: Dict[str, int] = {}
    edges = []
    for g in graphs:
        for u, v, w in g.edges():
            for label in (g.labels[u], g.labels[v]):
                labels.setdefault(label, len(labels))
            edges.append((labels[g.labels[u]], labels[g.labels[v]], w))
    union = DirectedGraph.from_edges(len(labels), edges, tuple(labels))
    common = top_active_subgraph(union, min(node_limit, union.n)).labels
    oracles = []
    for g in graphs:
        restricted = g.restrict_to_labels(common)
        oracles.append(SpreadOracle(restricted, general_ic_simulator(restricted, params), r, seed_policy, seed))
    logger.info("built %d snapshot oracles over %d common nodes", len(oracles), len(common))
    return ObjectiveEnsemble(oracles, seed=seed, workers=workers)
