import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robsel.errors import EnumerationSizeError
from robsel.logic.greedy import greedy_select
from robsel.logic.instance_builder import InstanceBuilder, random_instance
from robsel.logic.objective import ObjectiveEnsemble
from robsel.logic.ratios import (
    BruteForceOracle,
    correlation_ratio,
    exhaustive_opt,
    guarantee_report,
    one_step_gain_function,
    one_step_gain_worst_case,
    submodularity_ratio,
)
from robsel.logic.set_functions import CoverageFunction, ModularFunction, PowerModularFunction, TableFunction


class TestSubmodularityRatio:

    def test_modular_is_one(self):
        assert submodularity_ratio(ModularFunction([3, 2, 1, 4]), [0], 3) == 1

    def test_pair_only_function_is_zero(self):
        f = TableFunction(2, {(0, 1): 1.0})
        assert submodularity_ratio(f, [], 2) == 0

    def test_supermodular_witness_is_below_one(self):
        assert submodularity_ratio(PowerModularFunction([1, 1, 1], power=2.0), [], 2) < 1

    @settings(max_examples=30, deadline=None)
    @given(
        st.lists(st.lists(st.integers(0, 9), min_size=1, max_size=3), min_size=3, max_size=6),
        st.data(),
    )
    def test_coverage_is_exactly_one(self, item_sets, data):
        f = CoverageFunction(item_sets)
        n = len(item_sets)
        X = data.draw(st.lists(st.integers(0, n - 1), max_size=n - 1, unique=True))
        b = data.draw(st.integers(1, 3))
        assert submodularity_ratio(f, X, b) == 1.0

    def test_budget_guard(self):
        with pytest.raises(EnumerationSizeError):
            submodularity_ratio(ModularFunction(np.ones(12)), list(range(6)), 6, budget=1000)

    def test_non_increasing_along_chains(self, rng):
        """Growing X only adds (L, S) pairs, so γ_{X,b} can only drop."""
        for _ in range(20):
            n = 6
            f = PowerModularFunction(rng.uniform(0, 5, n), power=float(rng.uniform(1.2, 2.5)))
            b = int(rng.integers(2, 4))
            chain = rng.permutation(n)
            ratios = [submodularity_ratio(f, chain[:size].tolist(), b) for size in range(n)]
            assert all(later <= earlier for earlier, later in zip(ratios, ratios[1:])), ratios


class TestCorrelationRatio:

    def test_single_function_is_one(self, rng):
        ensemble = ObjectiveEnsemble([ModularFunction(rng.uniform(0, 5, 5))])
        assert correlation_ratio(ensemble, [1, 3]) == 1

    def test_modular_pair_at_empty_set(self, modular_pair):
        assert correlation_ratio(modular_pair, []) == pytest.approx(2 / 3)

    def test_identical_functions(self):
        f = CoverageFunction([[0], [0, 1], [2]])
        assert correlation_ratio(ObjectiveEnsemble([f, f]), [0]) == 1

    def test_does_not_touch_counters(self, modular_pair):
        correlation_ratio(modular_pair, [])
        assert modular_pair.eval_count == 0


class TestExhaustiveOpt:

    def test_k1(self, modular_pair):
        value, bits = exhaustive_opt(modular_pair, 1)
        assert value == 2
        assert bits.tolist() == [False, True, False]

    def test_k3(self, modular_pair):
        value, bits = exhaustive_opt(modular_pair, 3)
        assert value == 6
        assert bits.all()

    def test_k0(self, modular_pair):
        value, bits = exhaustive_opt(modular_pair, 0)
        assert value == 0
        assert not bits.any()

    def test_budget_guard(self, modular_pair):
        with pytest.raises(EnumerationSizeError):
            exhaustive_opt(modular_pair, 3, budget=2)


class TestGuaranteeReport:

    def test_single_submodular_function(self):
        ensemble = ObjectiveEnsemble([CoverageFunction([[0], [0, 1], [2], [1, 3]])])
        _, trace = greedy_select(ensemble, 2)
        report = guarantee_report(ensemble, 2, trace)
        assert report.beta == 1 and report.gamma == 1
        assert report.ratio_bound == pytest.approx(1 - 1 / math.e)

    def test_identical_submodular_pair(self):
        f = CoverageFunction([[0], [0, 1], [2], [1, 3]])
        ensemble = ObjectiveEnsemble([f, f])
        _, trace = greedy_select(ensemble, 2)
        report = guarantee_report(ensemble, 2, trace)
        assert (report.beta, report.beta_prime, report.gamma, report.gamma_prime) == (1, 1, 1, 1)

    def test_modular_pair(self, modular_pair):
        _, trace = greedy_select(modular_pair, 1)
        report = guarantee_report(modular_pair, 1, trace)
        assert report.gamma == report.gamma_prime == 1
        assert report.beta == pytest.approx(2 / 3)
        assert report.ratio_bound == pytest.approx(1 - math.exp(-2 / 3))
        assert report.opt == 2

    def test_record_is_key_value_lines(self, modular_pair):
        _, trace = greedy_select(modular_pair, 1)
        record = guarantee_report(modular_pair, 1, trace).to_record()
        keys = [line.split("=", 1)[0] for line in record.strip().splitlines()]
        assert keys[:3] == ["opt", "opt_per_function", "beta"]

    def test_greedy_meets_bound_on_random_instances(self, rng):
        """F(greedy) >= (1 - e^-βγ)·OPT on mixed monotone instances."""
        for _ in range(15):
            ensemble = random_instance(rng, int(rng.integers(3, 8)), int(rng.integers(1, 4))).build_ensemble()
            k = int(rng.integers(1, min(3, ensemble.n) + 1))
            bits, trace = greedy_select(ensemble, k)
            report = guarantee_report(ensemble, k, trace)
            value = ensemble.evaluate_profile(bits, counted=False).min()
            assert report.ratio_bound <= 1
            assert value >= report.ratio_bound * report.opt - 1e-9


def test_one_step_gains_hold_on_random_pairs(rng):
    for _ in range(15):
        ensemble = random_instance(rng, 6, 2).build_ensemble()
        oracle = BruteForceOracle(ensemble)
        X = np.flatnonzero(rng.random(6) < 0.4)[:4]
        k = 2
        opt, _ = oracle.exhaustive_opt(k)
        for index in range(ensemble.m):
            opt_i, _ = oracle.exhaustive_opt(k, index=index)
            gain, bound = one_step_gain_function(ensemble, index, X, k, opt_i, oracle)
            assert gain >= bound - 1e-9
        gain, bound = one_step_gain_worst_case(ensemble, X, k, opt, oracle)
        assert gain >= bound - 1e-9


def test_instance_builder_pair_has_expected_opt():
    ensemble = InstanceBuilder.from_weights([[1, 0], [0, 1]]).build_ensemble()
    assert exhaustive_opt(ensemble, 1)[0] == 0
    assert exhaustive_opt(ensemble, 2)[0] == 1
