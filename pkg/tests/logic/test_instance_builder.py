import numpy as np
import pytest

from robsel.errors import InvalidArgumentError
from robsel.influence.cascade import GeneralICParams
from robsel.influence.graph import DirectedGraph
from robsel.influence.probabilities import delta_max
from robsel.logic.instance_builder import (
    InstanceBuilder,
    build_exact_perturbation_ensemble,
    build_perturbation_ensemble,
    build_snapshot_ensemble,
    random_instance,
)


def test_init_creates_empty_function_list():
    """Verify that InstanceBuilder initializes with an empty list of functions."""
    builder = InstanceBuilder()
    assert builder.functions == [], "InstanceBuilder should start with no functions"


def test_add_function_returns_unique_id():
    """Verify that adding functions returns distinct, non-empty string IDs."""
    builder = InstanceBuilder()
    id1 = builder.add_function('modular', weights=[1, 2])
    id2 = builder.add_function('coverage', item_sets=[[0], [1]])
    assert isinstance(id1, str) and id1, "ID should be a non-empty string"
    assert id1 != id2, "Consecutive calls should return unique IDs"
    assert id1.startswith('modular_')


def test_add_function_fills_defaults():
    """Verify unspecified properties take the kind's defaults."""
    builder = InstanceBuilder()
    builder.add_function('concave', weights=[1, 1])
    entry = builder.functions[0]
    assert entry['kind'] == 'concave'
    assert entry['properties']['power'] == 0.5, "power should default for concave functions"


def test_defaults_are_not_shared_between_functions():
    """Mutating one function's default containers must not leak into the next."""
    builder = InstanceBuilder()
    builder.add_function('modular')
    builder.add_function('table')
    builder.functions[0]['properties']['weights'].append(9.0)
    builder.functions[1]['properties']['values'][(0,)] = 5.0
    builder.add_function('modular')
    builder.add_function('table')
    assert builder.functions[2]['properties']['weights'] == [1.0]
    assert builder.functions[3]['properties']['values'] == {}


def test_unknown_kind_or_property_is_rejected():
    builder = InstanceBuilder()
    with pytest.raises(InvalidArgumentError):
        builder.add_function('submodular-ish')
    with pytest.raises(InvalidArgumentError):
        builder.add_function('modular', decay=0.3)
    assert builder.functions == []


def test_build_ensemble_evaluates_every_kind():
    builder = InstanceBuilder(labels=['a', 'b', 'c'])
    builder.add_function('modular', weights=[3, 2, 1])
    builder.add_function('coverage', item_sets=[[0], [0, 1], [2]])
    builder.add_function('table', n=3, values={(1,): 4.0})
    ensemble = builder.build_ensemble(seed=4)
    assert ensemble.m == 3 and ensemble.n == 3
    assert ensemble.evaluate_profile([1], counted=False).tolist() == [2.0, 2.0, 4.0]
    assert ensemble.ground.describe(np.array([True, False, True])) == 'a;c'


def test_build_empty_ensemble_fails():
    with pytest.raises(InvalidArgumentError):
        InstanceBuilder().build_ensemble()


def test_random_instance_is_reproducible():
    a = random_instance(np.random.default_rng(1), 6, 3).build_ensemble()
    b = random_instance(np.random.default_rng(1), 6, 3).build_ensemble()
    X = [0, 2, 5]
    assert a.evaluate_profile(X).tolist() == b.evaluate_profile(X).tolist()


@pytest.fixture
def small_graph():
    return DirectedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])


def test_perturbation_ensemble_has_m_noisy_oracles(small_graph, rng):
    ensemble, thetas = build_perturbation_ensemble(small_graph, 3, rng, r=20)
    assert ensemble.m == 3 and len(thetas) == 3
    assert ensemble.stochastic
    assert ensemble.evaluate_worst_case([]) == 0


def test_exact_perturbation_ensemble_is_deterministic(small_graph, rng):
    ensemble, thetas = build_exact_perturbation_ensemble(small_graph, 2, rng, 0.99, 1.01)
    assert not ensemble.stochastic
    assert delta_max(thetas) < 0.1
    assert ensemble.evaluate_worst_case([0]) >= 1


def test_snapshot_ensemble_shares_a_ground_set():
    g1 = DirectedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)], ('x', 'y', 'z'))
    g2 = DirectedGraph.from_edges(2, [(0, 1, 1.0)], ('z', 'w'))
    ensemble = build_snapshot_ensemble([g1, g2], GeneralICParams(), r=10, node_limit=3)
    assert ensemble.m == 2
    assert ensemble.n == 3
    assert all(f.ground.labels == ensemble.ground.labels for f in ensemble.functions)
