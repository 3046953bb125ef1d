"""Set-function oracles and the robust worst-case objective F(X) = min_i f_i(X).

Subsets travel between solvers as fixed-width boolean numpy vectors of length n.
Public helpers also accept an iterable of item indices and convert it.
"""

import enum
import hashlib
import logging
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from robsel.errors import InvalidArgumentError, InvalidSubsetError

logger = logging.getLogger(__name__)

Subset = Union[np.ndarray, Iterable[int]]


class SeedPolicy(str, enum.Enum):
    """How a stochastic oracle draws randomness for one evaluation."""

    MEMOIZED_PER_SUBSET = "memoized-per-subset"
    FRESH_SAMPLE = "fresh-sample"


@dataclass(frozen=True)
class GroundSet:
    """The n items a subset is selected from."""

    n: int
    labels: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError(f"ground set needs at least one item, got n={self.n}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"v{i + 1}" for i in range(self.n)))
        else:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != self.n:
                raise InvalidArgumentError(f"expected {self.n} labels, got {len(labels)}")
            if len(set(labels)) != self.n:
                raise InvalidArgumentError("item labels must be distinct")
            object.__setattr__(self, "labels", labels)

    def describe(self, bits: np.ndarray) -> str:
        """Semicolon-joined labels of the items in `bits`."""
        return ";".join(self.labels[i] for i in indices_of(bits))


def to_bits(X: Subset, n: int) -> np.ndarray:
    """Converts a subset (bit vector or iterable of indices) to a boolean vector."""
    if isinstance(X, np.ndarray) and X.dtype == bool:
        if X.shape != (n,):
            raise InvalidSubsetError(f"bit vector has shape {X.shape}, expected ({n},)")
        return X
    bits = np.zeros(n, dtype=bool)
    for item in X:
        index = int(item)
        if not 0 <= index < n:
            raise InvalidSubsetError(f"item index {item} outside [0, {n})")
        bits[index] = True
    return bits


def indices_of(bits: np.ndarray) -> List[int]:
    """Sorted item indices set in `bits`."""
    return np.flatnonzero(bits).tolist()


def subset_key(bits: np.ndarray) -> bytes:
    return np.packbits(bits).tobytes()


def subset_seed(run_seed: int, function_index: int, bits: np.ndarray) -> np.random.SeedSequence:
    """Seed sequence keyed by (run seed, function index, subset hash)."""
    digest = hashlib.blake2b(subset_key(bits), digest_size=8).digest()
    return np.random.SeedSequence([run_seed, function_index, int.from_bytes(digest, "little"), int(bits.size)])


class SetFunctionOracle(ABC):
    """A monotone, normalized set function over a ground set.

    Stochastic subclasses receive a numpy Generator per evaluation; deterministic
    ones ignore it.
    """

    stochastic: bool = False

    def __init__(self, ground: GroundSet, seed_policy: SeedPolicy = SeedPolicy.MEMOIZED_PER_SUBSET, seed: int = 0):
        self.ground = ground
        self.seed_policy = SeedPolicy(seed_policy)
        self.seed = seed

    @property
    def n(self) -> int:
        return self.ground.n

    @abstractmethod
    def evaluate(self, bits: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
        """Value of the subset `bits`."""

    def __call__(self, X: Subset) -> float:
        bits = to_bits(X, self.n)
        rng = np.random.default_rng(subset_seed(self.seed, 0, bits)) if self.stochastic else None
        return float(self.evaluate(bits, rng))


def memoizes_noise(oracle_mode: str) -> bool:
    """True when some stochastic oracle fixes one draw per subset for a whole run."""
    return oracle_mode.startswith("stochastic") and SeedPolicy.MEMOIZED_PER_SUBSET.value in oracle_mode


class ObjectiveEnsemble:
    """m oracles over a common ground set plus evaluation accounting.

    One call of the worst-case objective (all m functions on one subset) counts
    as one evaluation.
    """

    def __init__(self, functions: Sequence[SetFunctionOracle], seed: int = 0, workers: int = 1):
        if not functions:
            raise InvalidArgumentError("an ensemble needs at least one function")
        sizes = {f.n for f in functions}
        if len(sizes) != 1:
            raise InvalidArgumentError(f"all functions must share the same ground set size, got {sorted(sizes)}")
        self.functions: List[SetFunctionOracle] = list(functions)
        self.ground: GroundSet = self.functions[0].ground
        self.seed = seed
        self.workers = max(1, int(workers))
        self.eval_count = 0
        self.per_function_counts: List[int] = [0] * self.m
        self._lock = threading.Lock()
        self._memo: Dict[Tuple[int, bytes], float] = {}
        self._streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(self.m)]

    @property
    def m(self) -> int:
        return len(self.functions)

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def stochastic(self) -> bool:
        return any(f.stochastic for f in self.functions)

    @property
    def oracle_mode(self) -> str:
        if not self.stochastic:
            return "deterministic"
        policies = sorted({f.seed_policy.value for f in self.functions if f.stochastic})
        return "stochastic/" + ",".join(policies)

    @property
    def memoized_noise(self) -> bool:
        return memoizes_noise(self.oracle_mode)

    def fresh(self, seed: Optional[int] = None) -> "ObjectiveEnsemble":
        """Same oracles, zeroed counters, empty memo, optionally a new run seed."""
        return ObjectiveEnsemble(self.functions, seed=self.seed if seed is None else seed, workers=self.workers)

    def _function_value(self, index: int, bits: np.ndarray) -> float:
        f = self.functions[index]
        if f.stochastic and f.seed_policy is SeedPolicy.FRESH_SAMPLE:
            with self._lock:
                child_seed = int(self._streams[index].integers(2**63))
            return float(f.evaluate(bits, np.random.default_rng(child_seed)))
        key = (index, subset_key(bits))
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        rng = np.random.default_rng(subset_seed(self.seed, index, bits)) if f.stochastic else None
        value = float(f.evaluate(bits, rng))
        with self._lock:
            self._memo[key] = value
        return value

    def evaluate_profile(self, X: Subset, *, counted: bool = True) -> np.ndarray:
        """Vector (f_1(X), ..., f_m(X)); counts one worst-case evaluation."""
        bits = to_bits(X, self.n)
        profile = np.array([self._function_value(i, bits) for i in range(self.m)], dtype=float)
        if counted:
            with self._lock:
                self.eval_count += 1
                for i in range(self.m):
                    self.per_function_counts[i] += 1
        return profile

    def evaluate_batch(self, subsets: Sequence[np.ndarray], *, counted: bool = True) -> List[np.ndarray]:
        """Profiles of several subsets, in input order, fanned out over workers."""
        if self.workers > 1 and len(subsets) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(lambda bits: self.evaluate_profile(bits, counted=counted), subsets))
        return [self.evaluate_profile(bits, counted=counted) for bits in subsets]

    def evaluate_worst_case(self, X: Subset) -> float:
        return float(self.evaluate_profile(X).min())


def evaluate_worst_case(ensemble: ObjectiveEnsemble, X: Subset) -> float:
    """F(X) = min_i f_i(X); increments the ensemble's counters."""
    return ensemble.evaluate_worst_case(X)


def marginal_gain(f: SetFunctionOracle, X: Subset, v: int) -> float:
    """f(X ∪ {v}) - f(X) for an item v not in X."""
    bits = to_bits(X, f.n)
    if not 0 <= v < f.n:
        raise InvalidSubsetError(f"item index {v} outside [0, {f.n})")
    if bits[v]:
        raise InvalidArgumentError(f"item {v} is already in the subset")
    extended = bits.copy()
    extended[v] = True
    return f(extended) - f(bits)
