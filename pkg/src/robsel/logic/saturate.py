"""SATURATE: bisection over a target value with a truncated-mean greedy subroutine."""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from robsel.errors import InvalidArgumentError
from robsel.logic.greedy import RunTrace, check_budget, single_additions
from robsel.logic.objective import ObjectiveEnsemble

logger = logging.getLogger(__name__)

TARGET_SLACK = 1e-9


@dataclass(frozen=True)
class SaturateConfig:
    alpha: float = 1.0
    epsilon: float = 1e-3
    max_rounds: int = 60

    def __post_init__(self):
        if self.alpha < 1:
            raise InvalidArgumentError(f"alpha must be >= 1, got {self.alpha}")
        if self.epsilon <= 0:
            raise InvalidArgumentError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_rounds < 1:
            raise InvalidArgumentError(f"max_rounds must be >= 1, got {self.max_rounds}")


def truncated_mean(profile: np.ndarray, c: float) -> float:
    """Ĥ_c = mean_i min(f_i, c)."""
    return float(np.minimum(profile, c).mean())


def _target_met(value: float, c: float) -> bool:
    return value >= c * (1 - TARGET_SLACK)


def _truncated_greedy(ensemble: ObjectiveEnsemble, c: float, limit: int) -> Tuple[np.ndarray, np.ndarray]:
    bits = np.zeros(ensemble.n, dtype=bool)
    profile = np.zeros(ensemble.m)
    current = 0.0
    while not _target_met(current, c) and bits.sum() < limit:
        candidates = single_additions(bits)
        if not candidates:
            break
        profiles = ensemble.evaluate_batch([cand for _, cand in candidates])
        values = np.array([truncated_mean(p, c) for p in profiles])
        best = int(np.argmax(values))
        if values[best] - current <= 0:
            break
        _, bits = candidates[best]
        profile = profiles[best]
        current = float(values[best])
    return bits, profile


def truncated_greedy(ensemble: ObjectiveEnsemble, c: float, limit: int) -> np.ndarray:
    """Greedily raises Ĥ_c until it reaches c, |X| hits `limit`, or no item helps."""
    if c < 0:
        raise InvalidArgumentError(f"target c must be >= 0, got {c}")
    if limit < 1:
        raise InvalidArgumentError(f"limit must be >= 1, got {limit}")
    bits, _ = _truncated_greedy(ensemble, c, limit)
    return bits


def saturate_select(
    ensemble: ObjectiveEnsemble, k: int, config: SaturateConfig = SaturateConfig()
) -> Tuple[np.ndarray, RunTrace]:
    """Bisects the target c over [0, min_i f_i(V)] and keeps the best feasible subset by F."""
    check_budget(k, ensemble.n)
    limit = min(ensemble.n, int(math.floor(config.alpha * k)))
    trace = RunTrace("saturate", metadata={"alpha": config.alpha, "epsilon": config.epsilon})

    c_max = ensemble.evaluate_worst_case(np.ones(ensemble.n, dtype=bool))
    tolerance = config.epsilon * max(1.0, c_max)
    lo, hi = 0.0, c_max
    best_bits = np.zeros(ensemble.n, dtype=bool)
    best_value = 0.0
    found = False

    def probe(c: float) -> bool:
        nonlocal best_bits, best_value, found
        bits, profile = _truncated_greedy(ensemble, c, limit)
        feasible = bits.sum() <= limit and _target_met(truncated_mean(profile, c), c)
        if feasible:
            value = float(profile.min())
            if not found or value > best_value:
                best_bits, best_value, found = bits, value, True
        return feasible

    rounds = 0
    while hi - lo > tolerance and rounds < config.max_rounds:
        c = (lo + hi) / 2
        if probe(c):
            lo = c
        else:
            hi = c
        rounds += 1
        trace.record(rounds, None, best_bits, best_value, ensemble.eval_count)

    # closing probe at the upper bound catches instances where F(V) itself is reachable
    if c_max > 0 and lo < c_max and rounds < config.max_rounds:
        probe(c_max)
        rounds += 1
        trace.record(rounds, None, best_bits, best_value, ensemble.eval_count)

    trace.metadata.update({"rounds": rounds, "c_max": c_max, "lower": lo, "upper": hi})
    if not found or best_value <= 0:
        logger.warning("SATURATE found no feasible target above 0; returning the empty set")
        trace.metadata["status"] = "no-feasible-target"
        best_bits, best_value = np.zeros(ensemble.n, dtype=bool), 0.0
    else:
        trace.metadata["status"] = "ok"
    if not trace.steps:
        trace.record(0, None, best_bits, best_value, ensemble.eval_count)
    return best_bits, trace
