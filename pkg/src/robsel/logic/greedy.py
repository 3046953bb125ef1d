"""Greedy and modified greedy selection on the worst-case objective."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from robsel.errors import InvalidBudgetError
from robsel.logic.objective import ObjectiveEnsemble

logger = logging.getLogger(__name__)


@dataclass
class TraceStep:
    iteration: int
    item: Optional[int]
    bits: np.ndarray
    value: float
    evaluations: int


@dataclass
class RunTrace:
    """Per-iteration record emitted by every solver."""

    algorithm: str
    seed: Optional[int] = None
    steps: List[TraceStep] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def record(self, iteration: int, item: Optional[int], bits: np.ndarray, value: float, evaluations: int):
        self.steps.append(TraceStep(iteration, item, bits.copy(), float(value), int(evaluations)))

    def prefixes(self) -> List[np.ndarray]:
        """X_0 = ∅ followed by the recorded subsets, for incremental solvers."""
        if not self.steps:
            return []
        empty = np.zeros(self.steps[0].bits.size, dtype=bool)
        return [empty] + [step.bits for step in self.steps]

    @property
    def final_value(self) -> float:
        return self.steps[-1].value if self.steps else 0.0


def check_budget(k: int, n: int):
    if not 1 <= k <= n:
        raise InvalidBudgetError(f"budget k={k} outside [1, {n}]")


def single_additions(bits: np.ndarray) -> List[Tuple[int, np.ndarray]]:
    """(item, bits ∪ {item}) for every unselected item in ascending order."""
    out = []
    for v in np.flatnonzero(~bits):
        extended = bits.copy()
        extended[v] = True
        out.append((int(v), extended))
    return out


def greedy_select(ensemble: ObjectiveEnsemble, k: int) -> Tuple[np.ndarray, RunTrace]:
    """Adds, k times, the item maximizing F(X ∪ {v}); ties go to the lowest index.

    Consumes exactly (n - k/2 + 1/2) * k worst-case evaluations.
    """
    check_budget(k, ensemble.n)
    trace = RunTrace("greedy")
    bits = np.zeros(ensemble.n, dtype=bool)
    for j in range(1, k + 1):
        candidates = single_additions(bits)
        profiles = ensemble.evaluate_batch([c for _, c in candidates])
        values = np.array([p.min() for p in profiles])
        best = int(np.argmax(values))
        item, bits = candidates[best]
        trace.record(j, item, bits, values[best], ensemble.eval_count)
        logger.debug("greedy step %d: item %d, F=%.6g", j, item, values[best])
    return bits, trace


def gain_ratios(gains: np.ndarray, best_gains: np.ndarray) -> np.ndarray:
    """Per-function gain / best gain; a zero best gain makes the term 1."""
    ratios = np.ones_like(gains)
    positive = best_gains > 0
    ratios[:, positive] = gains[:, positive] / best_gains[positive]
    return ratios


def modified_greedy_select(
    ensemble: ObjectiveEnsemble, k: int, cache_first_pass: bool = False
) -> Tuple[np.ndarray, RunTrace]:
    """Selects the item maximizing the minimum normalized gain across functions.

    Each iteration first finds every function's best single addition a_i*,
    then re-scans the candidates for the ratio argmax. Without caching this
    costs (2n - k + 1) * k worst-case evaluations.
    """
    check_budget(k, ensemble.n)
    trace = RunTrace("modified-greedy", metadata={"cache_first_pass": cache_first_pass})
    bits = np.zeros(ensemble.n, dtype=bool)
    # f_i(∅) = 0 by normalization
    base = np.zeros(ensemble.m)
    for j in range(1, k + 1):
        candidates = single_additions(bits)
        subsets = [c for _, c in candidates]
        first = np.array(ensemble.evaluate_batch(subsets))
        best_gains = (first - base).max(axis=0)
        second = first if cache_first_pass else np.array(ensemble.evaluate_batch(subsets))
        scores = gain_ratios(second - base, best_gains).min(axis=1)
        best = int(np.argmax(scores))
        item, bits = candidates[best]
        base = second[best]
        trace.record(j, item, bits, base.min(), ensemble.eval_count)
        logger.debug("modified greedy step %d: item %d, score=%.6g", j, item, scores[best])
    return bits, trace
