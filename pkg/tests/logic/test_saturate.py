import numpy as np
import pytest

from robsel.errors import InvalidArgumentError
from robsel.logic.greedy import greedy_select
from robsel.logic.instance_builder import InstanceBuilder, random_instance
from robsel.logic.objective import ObjectiveEnsemble
from robsel.logic.saturate import SaturateConfig, saturate_select, truncated_greedy, truncated_mean
from robsel.logic.set_functions import ModularFunction


def test_truncated_mean():
    assert truncated_mean(np.array([3.0, 1.0]), 2.0) == 1.5


def test_zero_target_returns_empty(modular_pair):
    assert not truncated_greedy(modular_pair, 0.0, 3).any()


def test_truncated_greedy_reaches_target_with_one_item(modular_pair):
    bits = truncated_greedy(modular_pair, 2.0, 1)
    assert bits.tolist() == [False, True, False]


def test_unreachable_target_fills_the_limit(modular_pair):
    bits = truncated_greedy(modular_pair, 100.0, 3)
    assert bits.all()


def test_truncated_greedy_argument_checks(modular_pair):
    with pytest.raises(InvalidArgumentError):
        truncated_greedy(modular_pair, -1.0, 2)
    with pytest.raises(InvalidArgumentError):
        truncated_greedy(modular_pair, 1.0, 0)


def test_single_function_reaches_opt():
    ensemble = ObjectiveEnsemble([ModularFunction([3, 2, 1])])
    bits, _ = saturate_select(ensemble, 2, SaturateConfig(epsilon=1e-6))
    assert ensemble.evaluate_profile(bits, counted=False).min() == 5


def test_modular_pair_k1(modular_pair):
    bits, trace = saturate_select(modular_pair, 1)
    assert bits.tolist() == [False, True, False]
    assert trace.metadata["status"] == "ok"


def test_k_equal_n_returns_whole_set_value(modular_pair):
    bits, _ = saturate_select(modular_pair, 3)
    assert modular_pair.evaluate_profile(bits, counted=False).min() == 6


def test_rounds_are_bounded(modular_pair):
    config = SaturateConfig(epsilon=1e-3)
    _, trace = saturate_select(modular_pair, 2, config)
    c_max = 6
    bound = int(np.ceil(np.log2(c_max / (config.epsilon * c_max)))) + 1
    assert trace.metadata["rounds"] <= bound


def test_all_zero_functions_warn_and_return_empty(caplog):
    ensemble = ObjectiveEnsemble([ModularFunction([0, 0]), ModularFunction([0, 0])])
    bits, trace = saturate_select(ensemble, 1)
    assert not bits.any()
    assert trace.metadata["status"] == "no-feasible-target"
    assert "no feasible target" in caplog.text


def test_costs_more_evaluations_than_greedy():
    ensemble = InstanceBuilder.from_weights([[5, 1, 2, 4], [1, 5, 4, 2]]).build_ensemble()
    saturate_select(ensemble, 2)
    saturate_count = ensemble.eval_count
    other = ensemble.fresh()
    greedy_select(other, 2)
    assert saturate_count > other.eval_count


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SaturateConfig(alpha=0.5)
    with pytest.raises(InvalidArgumentError):
        SaturateConfig(epsilon=0)


def test_value_grows_with_k_and_costs_exceed_greedy(rng):
    """Over random instances F is non-decreasing in k and every run out-spends greedy."""
    for _ in range(25):
        n = int(rng.integers(3, 8))
        ensemble = random_instance(rng, n, int(rng.integers(1, 4))).build_ensemble()
        if ensemble.evaluate_profile(np.ones(n, dtype=bool), counted=False).min() == 0:
            continue
        previous = 0.0
        for k in range(1, n + 1):
            run = ensemble.fresh()
            bits, _ = saturate_select(run, k)
            value = run.evaluate_profile(bits, counted=False).min()
            assert value >= previous - 1e-9, f"n={n} k={k}: {value} < {previous}"
            previous = value
            baseline = ensemble.fresh()
            greedy_select(baseline, k)
            assert run.eval_count > baseline.eval_count, f"n={n} k={k}"
