"""Deterministic monotone set-function families used for synthetic instances."""

from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence

import numpy as np

from robsel.errors import InvalidArgumentError
from robsel.logic.objective import GroundSet, SetFunctionOracle


def _ground(n: int, labels: Optional[Sequence[str]]) -> GroundSet:
    return GroundSet(n, tuple(labels) if labels else ())


class ModularFunction(SetFunctionOracle):
    """f(X) = sum of non-negative item weights."""

    def __init__(self, weights: Sequence[float], labels: Optional[Sequence[str]] = None):
        self.weights = np.asarray(weights, dtype=float)
        if np.any(self.weights < 0):
            raise InvalidArgumentError("modular weights must be non-negative")
        super().__init__(_ground(len(self.weights), labels))

    def evaluate(self, bits, rng=None) -> float:
        return float(self.weights[bits].sum())


class PowerModularFunction(SetFunctionOracle):
    """f(X) = (sum of weights)^power.

    power <= 1 gives a concave-of-modular (submodular) function; power > 1 a
    monotone supermodular one.
    """

    def __init__(self, weights: Sequence[float], power: float = 0.5, labels: Optional[Sequence[str]] = None):
        self.weights = np.asarray(weights, dtype=float)
        if np.any(self.weights < 0):
            raise InvalidArgumentError("weights must be non-negative")
        if power <= 0:
            raise InvalidArgumentError(f"power must be positive, got {power}")
        self.power = float(power)
        super().__init__(_ground(len(self.weights), labels))

    def evaluate(self, bits, rng=None) -> float:
        return float(self.weights[bits].sum() ** self.power)


class CoverageFunction(SetFunctionOracle):
    """Weighted coverage: total weight of universe elements covered by the chosen items."""

    def __init__(
        self,
        item_sets: Sequence[Iterable[int]],
        element_weights: Optional[Sequence[float]] = None,
        labels: Optional[Sequence[str]] = None,
    ):
        self.item_sets = [frozenset(int(e) for e in s) for s in item_sets]
        universe = max((max(s) for s in self.item_sets if s), default=-1) + 1
        if element_weights is None:
            element_weights = [1.0] * universe
        self.element_weights = np.asarray(element_weights, dtype=float)
        if len(self.element_weights) < universe:
            raise InvalidArgumentError("element_weights shorter than the covered universe")
        # item x element incidence, so a subset's cover is one boolean reduction
        self._incidence = np.zeros((len(self.item_sets), len(self.element_weights)), dtype=bool)
        for i, s in enumerate(self.item_sets):
            self._incidence[i, list(s)] = True
        super().__init__(_ground(len(self.item_sets), labels))

    def evaluate(self, bits, rng=None) -> float:
        covered = self._incidence[bits].any(axis=0)
        return float(self.element_weights[covered].sum())


class TableFunction(SetFunctionOracle):
    """f(X) = max value of any listed subset contained in X (0 if none).

    The max-closure keeps any table monotone and normalized.
    """

    def __init__(self, n: int, values: Mapping[Iterable[int], float], labels: Optional[Sequence[str]] = None):
        super().__init__(_ground(n, labels))
        self.values: Dict[FrozenSet[int], float] = {frozenset(k): float(v) for k, v in values.items()}
        for key in self.values:
            if any(not 0 <= i < n for i in key):
                raise InvalidArgumentError(f"table subset {sorted(key)} outside the ground set")

    def evaluate(self, bits, rng=None) -> float:
        chosen = set(np.flatnonzero(bits).tolist())
        return max((v for k, v in self.values.items() if k <= chosen), default=0.0)
