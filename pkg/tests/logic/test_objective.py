import threading

import numpy as np
import pytest

from robsel.errors import InvalidArgumentError, InvalidSubsetError
from robsel.influence.cascade import SpreadOracle, ic_simulator
from robsel.influence.graph import DirectedGraph
from robsel.influence.probabilities import ProbabilityVector
from robsel.logic.eporss import eporss_run
from robsel.logic.objective import (
    GroundSet,
    ObjectiveEnsemble,
    SeedPolicy,
    evaluate_worst_case,
    marginal_gain,
    subset_key,
    to_bits,
)
from robsel.logic.set_functions import CoverageFunction, ModularFunction
from tests.conftest import bits_of


def test_worst_case_of_modular_pair(modular_pair):
    """F({v2}) = min(2, 2) = 2."""
    assert evaluate_worst_case(modular_pair, bits_of(3, 1)) == 2


def test_empty_set_is_zero(modular_pair):
    assert evaluate_worst_case(modular_pair, np.zeros(3, dtype=bool)) == 0


def test_single_function_matches_f(rng):
    f = ModularFunction(rng.uniform(0, 5, 6))
    ensemble = ObjectiveEnsemble([f])
    for _ in range(10):
        X = rng.random(6) < 0.5
        assert evaluate_worst_case(ensemble, X) == pytest.approx(f(X))


def test_each_profile_call_counts_one_evaluation(modular_pair):
    modular_pair.evaluate_profile(bits_of(3, 0))
    modular_pair.evaluate_worst_case(bits_of(3, 0, 1))
    assert modular_pair.eval_count == 2
    assert modular_pair.per_function_counts == [2, 2]


def test_uncounted_path_leaves_counters_alone(modular_pair):
    modular_pair.evaluate_profile(bits_of(3, 0), counted=False)
    modular_pair.evaluate_batch([bits_of(3, 2), bits_of(3, 1)], counted=False)
    assert modular_pair.eval_count == 0


def test_index_lists_are_accepted(modular_pair):
    assert evaluate_worst_case(modular_pair, [1]) == 2


def test_out_of_range_items_are_rejected():
    with pytest.raises(InvalidSubsetError):
        to_bits([3], 3)
    with pytest.raises(InvalidSubsetError):
        to_bits(np.zeros(4, dtype=bool), 3)


def test_ensemble_needs_common_ground_set():
    with pytest.raises(InvalidArgumentError):
        ObjectiveEnsemble([ModularFunction([1, 2]), ModularFunction([1, 2, 3])])
    with pytest.raises(InvalidArgumentError):
        ObjectiveEnsemble([])


def test_fresh_copy_resets_counters(modular_pair):
    modular_pair.evaluate_profile(bits_of(3, 0))
    copy = modular_pair.fresh(seed=7)
    assert copy.eval_count == 0
    assert copy.seed == 7
    assert copy.functions == modular_pair.functions


def test_batch_preserves_order_with_workers():
    f1 = ModularFunction(np.arange(1, 9))
    f2 = ModularFunction(np.arange(8, 0, -1))
    ensemble = ObjectiveEnsemble([f1, f2], workers=4)
    subsets = [bits_of(8, i) for i in range(8)]
    profiles = ensemble.evaluate_batch(subsets)
    assert [p.tolist() for p in profiles] == [[i + 1, 8 - i] for i in range(8)]
    assert ensemble.eval_count == 8


def test_ground_set_labels_and_describe():
    ground = GroundSet(3)
    assert ground.labels == ('v1', 'v2', 'v3')
    assert ground.describe(bits_of(3, 0, 2)) == 'v1;v3'


def test_subset_key_distinguishes_subsets():
    assert subset_key(bits_of(9, 0)) != subset_key(bits_of(9, 8))


class TestMarginalGain:
    """marginal_gain on deterministic oracles."""

    def test_modular_gain(self):
        assert marginal_gain(ModularFunction([3, 2, 1]), [], 0) == 3

    def test_constant_function_gain_is_zero(self):
        assert marginal_gain(ModularFunction([0, 0, 0]), [1], 2) == 0

    def test_coverage_gain_when_already_covered(self):
        # universe {a, b} = {0, 1}; v1 -> {a}, v2 -> {a, b}
        f = CoverageFunction([[0], [0, 1]])
        assert marginal_gain(f, [1], 0) == 0

    def test_item_already_in_subset(self):
        with pytest.raises(InvalidArgumentError):
            marginal_gain(ModularFunction([3, 2, 1]), [0], 0)


class TestNoisyOracles:
    """Seed policies of Monte Carlo oracles."""

    @pytest.fixture
    def noisy_ensemble(self):
        graph = DirectedGraph.from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)])
        theta = ProbabilityVector([0.5, 0.5])
        return graph, theta

    def test_memoized_policy_repeats_values(self, noisy_ensemble):
        graph, theta = noisy_ensemble
        oracle = SpreadOracle(graph, ic_simulator(graph, theta), r=5)
        ensemble = ObjectiveEnsemble([oracle], seed=3)
        first = ensemble.evaluate_worst_case([0])
        assert all(ensemble.evaluate_worst_case([0]) == first for _ in range(5))

    def test_memoized_policy_is_reproducible_across_ensembles(self, noisy_ensemble):
        graph, theta = noisy_ensemble
        oracle = SpreadOracle(graph, ic_simulator(graph, theta), r=5)
        a = ObjectiveEnsemble([oracle], seed=3).evaluate_worst_case([0])
        b = ObjectiveEnsemble([oracle], seed=3).evaluate_worst_case([0])
        assert a == b

    def test_fresh_sample_policy_draws_new_values(self, noisy_ensemble):
        graph, theta = noisy_ensemble
        oracle = SpreadOracle(graph, ic_simulator(graph, theta), r=3, seed_policy=SeedPolicy.FRESH_SAMPLE)
        ensemble = ObjectiveEnsemble([oracle], seed=3)
        values = {ensemble.evaluate_worst_case([0]) for _ in range(30)}
        assert len(values) > 1
        assert ensemble.oracle_mode == 'stochastic/fresh-sample'
        assert not ensemble.memoized_noise

    def test_eporss_metadata_reports_noise_policy(self, noisy_ensemble):
        graph, theta = noisy_ensemble
        for policy, memoized in ((SeedPolicy.FRESH_SAMPLE, False), (SeedPolicy.MEMOIZED_PER_SUBSET, True)):
            oracle = SpreadOracle(graph, ic_simulator(graph, theta), r=3, seed_policy=policy)
            _, trace = eporss_run(ObjectiveEnsemble([oracle], seed=1), k=1, T=5, seed=0)
            assert trace.metadata['memoized_noise'] is memoized

    def test_deterministic_mode(self, modular_pair):
        assert modular_pair.oracle_mode == 'deterministic'
        assert not modular_pair.stochastic
        assert not modular_pair.memoized_noise


def test_counter_is_thread_safe(modular_pair):
    def work():
        for _ in range(200):
            modular_pair.evaluate_profile(bits_of(3, 1))

    threads = [threading.Thread(target=work) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert modular_pair.eval_count == 800
