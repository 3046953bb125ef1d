import numpy as np
import pytest

from robsel.errors import InvalidBudgetError
from robsel.logic.greedy import gain_ratios, greedy_select, modified_greedy_select
from robsel.logic.instance_builder import InstanceBuilder, random_instance
from robsel.logic.objective import ObjectiveEnsemble
from robsel.logic.set_functions import ModularFunction


def _ramp(n):
    return InstanceBuilder.from_weights([np.arange(1, n + 1).tolist(), np.arange(n, 0, -1).tolist()]).build_ensemble()


def test_greedy_picks_balanced_item(modular_pair):
    bits, trace = greedy_select(modular_pair, 1)
    assert bits.tolist() == [False, True, False]
    assert trace.final_value == 2


def test_greedy_eval_count_n5_k2():
    ensemble = _ramp(5)
    greedy_select(ensemble, 2)
    assert ensemble.eval_count == 9


def test_greedy_with_k_equal_n_selects_everything():
    ensemble = _ramp(4)
    bits, _ = greedy_select(ensemble, 4)
    assert bits.all()


def test_greedy_ties_go_to_lowest_index():
    ensemble = ObjectiveEnsemble([ModularFunction([1, 1, 1])])
    bits, trace = greedy_select(ensemble, 1)
    assert trace.steps[0].item == 0


def test_trace_records_prefixes(modular_pair):
    _, trace = greedy_select(modular_pair, 2)
    prefixes = trace.prefixes()
    assert len(prefixes) == 3
    assert [int(p.sum()) for p in prefixes] == [0, 1, 2]
    assert [s.evaluations for s in trace.steps] == [3, 5]


@pytest.mark.parametrize("k", [0, 4])
def test_budget_outside_range(modular_pair, k):
    with pytest.raises(InvalidBudgetError):
        greedy_select(modular_pair, k)


def test_modified_greedy_eval_count_n5_k2():
    ensemble = _ramp(5)
    modified_greedy_select(ensemble, 2)
    assert ensemble.eval_count == 18


def test_modified_greedy_picks_v2_on_modular_pair(modular_pair):
    bits, _ = modified_greedy_select(modular_pair, 1)
    assert bits.tolist() == [False, True, False]


def test_eval_counts_are_exact_for_small_grids():
    for n in range(1, 9):
        for k in range(1, n + 1):
            ensemble = _ramp(n)
            greedy_select(ensemble, k)
            assert 2 * ensemble.eval_count == (2 * n - k + 1) * k
            ensemble = _ramp(n)
            modified_greedy_select(ensemble, k)
            assert ensemble.eval_count == (2 * n - k + 1) * k


def test_cached_first_pass_halves_the_count():
    ensemble = _ramp(5)
    modified_greedy_select(ensemble, 2, cache_first_pass=True)
    assert ensemble.eval_count == 9


def test_single_function_modified_greedy_matches_greedy(rng):
    for _ in range(20):
        ensemble = random_instance(rng, 7, 1, ('modular', 'coverage', 'concave')).build_ensemble()
        a, _ = greedy_select(ensemble.fresh(), 3)
        b, _ = modified_greedy_select(ensemble.fresh(), 3)
        assert a.tolist() == b.tolist()


def test_gain_ratios_treat_zero_best_gain_as_one():
    gains = np.array([[0.0, 1.0], [0.0, 2.0]])
    ratios = gain_ratios(gains, np.array([0.0, 2.0]))
    assert ratios.tolist() == [[1.0, 0.5], [1.0, 1.0]]
