"""Brute-force oracles for the approximation theory.

Submodularity ratio, correlation ratio, exhaustive OPT and the constants of the
greedy and EPORSS guarantees. Everything here is exponential-time; budgets
refuse instances that would take more than a few seconds.
"""

import logging
import math
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from robsel.errors import EnumerationSizeError, InvalidArgumentError
from robsel.logic.greedy import RunTrace, gain_ratios
from robsel.logic.objective import ObjectiveEnsemble, SetFunctionOracle, Subset, to_bits

logger = logging.getLogger(__name__)

PAIR_BUDGET = 10**7
SUBSET_BUDGET = 10**6


def mask_of(bits: np.ndarray) -> int:
    return sum(1 << int(i) for i in np.flatnonzero(bits))


def _bits_of(mask: int, n: int) -> np.ndarray:
    return ((mask >> np.arange(n)) & 1).astype(bool)


def _items(mask: int) -> List[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _submasks(mask: int) -> Iterator[int]:
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _masks_of_size(n: int, size: int) -> Iterator[int]:
    for combo in combinations(range(n), size):
        yield sum(1 << i for i in combo)


def _count_subsets(n: int, max_size: int) -> int:
    return sum(math.comb(n, s) for s in range(0, max_size + 1))


@dataclass
class GuaranteeReport:
    opt: float
    opt_per_function: List[float]
    beta: float
    gamma: float
    beta_prime: float
    gamma_prime: float
    ratio_bound: float
    ratio_bound_prime: float

    def to_record(self) -> str:
        """Flat key=value lines."""
        lines = []
        for key, value in asdict(self).items():
            if isinstance(value, list):
                value = ",".join(repr(float(v)) for v in value)
            else:
                value = repr(float(value))
            lines.append(f"{key}={value}")
        return "\n".join(lines) + "\n"


class BruteForceOracle:
    """Cached exhaustive evaluation of an ensemble's functions, keyed by bitmask.

    Values are read through the uncounted path so solver accounting is untouched.
    """

    def __init__(self, ensemble: ObjectiveEnsemble):
        self.ensemble = ensemble
        self.n = ensemble.n
        self.m = ensemble.m
        self._values: Dict[int, np.ndarray] = {}

    def profile(self, mask: int) -> np.ndarray:
        cached = self._values.get(mask)
        if cached is None:
            cached = self.ensemble.evaluate_profile(_bits_of(mask, self.n), counted=False)
            self._values[mask] = cached
        return cached

    def value(self, index: int, mask: int) -> float:
        return float(self.profile(mask)[index])

    def worst_case(self, mask: int) -> float:
        return float(self.profile(mask).min())

    # --- submodularity ratio ---

    def submodularity_ratio(self, index: int, x_mask: int, b: int, budget: int = PAIR_BUDGET) -> float:
        if b < 1:
            raise InvalidArgumentError(f"b must be >= 1, got {b}")
        x_size = bin(x_mask).count("1")
        pairs = sum(
            math.comb(x_size, l) * sum(math.comb(self.n - l, s) for s in range(1, b + 1))
            for l in range(x_size + 1)
        )
        if pairs > budget:
            raise EnumerationSizeError(f"submodularity ratio needs {pairs} (L, S) pairs, budget is {budget}")
        full = (1 << self.n) - 1
        ratio = 1.0
        for low in _submasks(x_mask):
            base = self.value(index, low)
            free = _items(full & ~low)
            gains = {v: self.value(index, low | (1 << v)) - base for v in free}
            # a singleton S has ratio exactly 1, so only |S| >= 2 can lower the minimum
            for size in range(2, min(b, len(free)) + 1):
                for combo in combinations(free, size):
                    s_mask = sum(1 << v for v in combo)
                    joint = self.value(index, low | s_mask) - base
                    if joint <= 0:
                        continue
                    ratio = min(ratio, sum(gains[v] for v in combo) / joint)
        return ratio

    def min_submodularity_ratio(self, x_mask: int, b: int) -> float:
        """γ^min_{X,b} = min_i γ_{X,b}(f_i)."""
        return min(self.submodularity_ratio(i, x_mask, b) for i in range(self.m))

    # --- correlation ratio ---

    def correlation_ratio(self, x_mask: int) -> float:
        full = (1 << self.n) - 1
        free = _items(full & ~x_mask)
        if not free:
            raise InvalidArgumentError("correlation ratio needs at least one item outside X")
        base = self.profile(x_mask)
        gains = np.array([self.profile(x_mask | (1 << v)) for v in free]) - base
        # argmax takes the lowest index among ties, matching v^i's tie rule
        best_gains = gains[np.argmax(gains, axis=0), np.arange(self.m)]
        return float(gain_ratios(gains, best_gains).min(axis=1).max())

    # --- optima ---

    def exhaustive_opt(self, k: int, index: Optional[int] = None, budget: int = SUBSET_BUDGET) -> Tuple[float, int]:
        """Max of F (or f_index) over |X| <= k; ties go to the lexicographically smallest index tuple."""
        if k < 0:
            raise InvalidArgumentError(f"k must be >= 0, got {k}")
        k = min(k, self.n)
        total = _count_subsets(self.n, k)
        if total > budget:
            raise EnumerationSizeError(f"exhaustive search needs {total} subsets, budget is {budget}")
        best_key, best_mask, best_value = None, 0, 0.0
        for size in range(k + 1):
            for mask in _masks_of_size(self.n, size):
                value = self.worst_case(mask) if index is None else self.value(index, mask)
                key = (-value, _items(mask))
                if best_key is None or key < best_key:
                    best_key, best_mask, best_value = key, mask, value
        return best_value, best_mask

    # --- guarantee constants ---

    def guarantee_report(self, k: int, greedy_trace: RunTrace) -> GuaranteeReport:
        if not 1 <= k <= self.n:
            raise InvalidArgumentError(f"k={k} outside [1, {self.n}]")
        prefixes = greedy_trace.prefixes() or [np.zeros(self.n, dtype=bool)]
        if len(prefixes) < k:
            raise InvalidArgumentError(f"trace holds {len(prefixes) - 1} steps, need at least {k - 1}")
        prefix_masks = [mask_of(bits) for bits in prefixes[:k]]

        opt, _ = self.exhaustive_opt(k)
        opt_per_function = [self.exhaustive_opt(k, index=i)[0] for i in range(self.m)]
        beta = min(self.correlation_ratio(mask) for mask in prefix_masks)
        gamma = self.min_submodularity_ratio(prefix_masks[-1], k)

        if _count_subsets(self.n, k - 1) > SUBSET_BUDGET:
            raise EnumerationSizeError(f"β′ needs all subsets of size <= {k - 1}")
        beta_prime = min(
            self.correlation_ratio(mask) for size in range(k) for mask in _masks_of_size(self.n, size)
        )
        gamma_prime = min(self.min_submodularity_ratio(mask, k) for mask in _masks_of_size(self.n, k - 1))
        return GuaranteeReport(
            opt=opt,
            opt_per_function=opt_per_function,
            beta=beta,
            gamma=gamma,
            beta_prime=beta_prime,
            gamma_prime=gamma_prime,
            ratio_bound=1 - math.exp(-beta * gamma),
            ratio_bound_prime=1 - math.exp(-beta_prime * gamma_prime),
        )

    # --- one-step gain inequalities ---

    def best_single_gain(self, x_mask: int, index: Optional[int] = None) -> float:
        full = (1 << self.n) - 1
        free = _items(full & ~x_mask)
        if not free:
            raise InvalidArgumentError("no item outside X")
        read = self.worst_case if index is None else (lambda mask: self.value(index, mask))
        base = read(x_mask)
        return max(read(x_mask | (1 << v)) for v in free) - base


def submodularity_ratio(f: SetFunctionOracle, X: Subset, b: int, budget: int = PAIR_BUDGET) -> float:
    """γ_{X,b}(f): min over L ⊆ X and nonempty S disjoint from L with |S| <= b.

    Pairs whose joint gain is zero are skipped; 1 is returned if all are.
    """
    oracle = BruteForceOracle(ObjectiveEnsemble([f]))
    return oracle.submodularity_ratio(0, mask_of(to_bits(X, f.n)), b, budget)


def correlation_ratio(ensemble: ObjectiveEnsemble, X: Subset) -> float:
    """β_X: best common item's worst normalized gain; zero best gains count as 1."""
    return BruteForceOracle(ensemble).correlation_ratio(mask_of(to_bits(X, ensemble.n)))


def exhaustive_opt(ensemble: ObjectiveEnsemble, k: int, budget: int = SUBSET_BUDGET) -> Tuple[float, np.ndarray]:
    """(OPT, witness) over all subsets of size <= k."""
    value, mask = BruteForceOracle(ensemble).exhaustive_opt(k, budget=budget)
    return value, _bits_of(mask, ensemble.n)


def guarantee_report(ensemble: ObjectiveEnsemble, k: int, greedy_trace: RunTrace) -> GuaranteeReport:
    return BruteForceOracle(ensemble).guarantee_report(k, greedy_trace)


def one_step_gain_function(
    ensemble: ObjectiveEnsemble, index: int, X: Subset, k: int, opt_i: float, oracle: Optional[BruteForceOracle] = None
) -> Tuple[float, float]:
    """(max_v f_i gain at X, γ_{X,k}(f_i)/k · (OPT_i − f_i(X)))."""
    oracle = oracle or BruteForceOracle(ensemble)
    mask = mask_of(to_bits(X, ensemble.n))
    gain = oracle.best_single_gain(mask, index=index)
    bound = oracle.submodularity_ratio(index, mask, k) / k * (opt_i - oracle.value(index, mask))
    return gain, bound


def one_step_gain_worst_case(
    ensemble: ObjectiveEnsemble, X: Subset, k: int, opt: float, oracle: Optional[BruteForceOracle] = None
) -> Tuple[float, float]:
    """(max_v F gain at X, β_X · γ^min_{X,k}/k · (OPT − F(X)))."""
    oracle = oracle or BruteForceOracle(ensemble)
    mask = mask_of(to_bits(X, ensemble.n))
    gain = oracle.best_single_gain(mask)
    bound = oracle.correlation_ratio(mask) * oracle.min_submodularity_ratio(mask, k) / k * (opt - oracle.worst_case(mask))
    return gain, bound

