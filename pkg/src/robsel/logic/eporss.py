"""EPORSS: evolutionary Pareto optimization for robust subset selection.

The problem is recast as maximizing (g1, g2) = (F(x) or -inf when |x| >= 2k, -|x|).
An archive of mutually incomparable solutions is evolved by uniform parent
selection and bit-wise mutation; the best archived solution with |x| <= k wins.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from robsel.errors import PopulationInvariantError
from robsel.logic.greedy import RunTrace, check_budget
from robsel.logic.objective import ObjectiveEnsemble, indices_of

logger = logging.getLogger(__name__)

NEG_INFINITY = float("-inf")
TRACE_SAMPLES = 200


class Relation(str, enum.Enum):
    A_DOMINATES = "a-dominates"
    B_DOMINATES = "b-dominates"
    A_WEAKLY_DOMINATES = "a-weakly-dominates"
    B_WEAKLY_DOMINATES = "b-weakly-dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True, eq=False)
class Solution:
    bits: np.ndarray
    g1: float
    g2: int

    @property
    def size(self) -> int:
        return -self.g2

    def weakly_dominates(self, other: "Solution") -> bool:
        return self.g1 >= other.g1 and self.g2 >= other.g2

    def strictly_dominates(self, other: "Solution") -> bool:
        return self.weakly_dominates(other) and (self.g1 > other.g1 or self.g2 > other.g2)


def default_iterations(n: int, k: int) -> int:
    """⌊2e·k²·n⌋."""
    return int(math.floor(2 * math.e * k * k * n))


def bi_objective(bits: np.ndarray, k: int, ensemble: ObjectiveEnsemble) -> Tuple[float, int]:
    """(g1, g2); F is only evaluated when |bits| < 2k."""
    size = int(bits.sum())
    if size >= 2 * k:
        return NEG_INFINITY, -size
    return ensemble.evaluate_worst_case(bits), -size


def evaluate_solution(bits: np.ndarray, k: int, ensemble: ObjectiveEnsemble) -> Solution:
    g1, g2 = bi_objective(bits, k, ensemble)
    return Solution(bits, g1, g2)


def dominates(a: Solution, b: Solution) -> Relation:
    """Domination relation between two evaluated solutions; -inf ranks below every real."""
    a_weak = a.weakly_dominates(b)
    b_weak = b.weakly_dominates(a)
    if a_weak and b_weak:
        return Relation.EQUAL
    if a_weak:
        return Relation.A_DOMINATES if a.strictly_dominates(b) else Relation.A_WEAKLY_DOMINATES
    if b_weak:
        return Relation.B_DOMINATES if b.strictly_dominates(a) else Relation.B_WEAKLY_DOMINATES
    return Relation.INCOMPARABLE


def mutate(bits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Flips each bit independently with probability 1/n; the parent is left untouched."""
    flips = rng.random(bits.size) < 1.0 / bits.size
    return bits ^ flips


class Population:
    """Archive of mutually incomparable solutions, at most one per size below 2k."""

    def __init__(self, k: int, initial: Solution):
        self.k = k
        self._by_size: Dict[int, Solution] = {}
        self._by_size[initial.size] = initial

    def __len__(self) -> int:
        return len(self._by_size)

    def __iter__(self) -> Iterator[Solution]:
        return iter(self.solutions())

    def solutions(self) -> List[Solution]:
        """Archived solutions ordered by size."""
        return [self._by_size[s] for s in sorted(self._by_size)]

    def check_invariants(self):
        members = self.solutions()
        if len(members) > 2 * self.k:
            raise PopulationInvariantError(f"archive holds {len(members)} > 2k={2 * self.k} solutions")
        for s in members:
            if s.size >= 2 * self.k:
                raise PopulationInvariantError(f"archived solution has size {s.size} >= 2k")
            if int(s.bits.sum()) != s.size:
                raise PopulationInvariantError("archived solution size disagrees with its bits")
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if dominates(a, b) is not Relation.INCOMPARABLE:
                    raise PopulationInvariantError(f"sizes {a.size} and {b.size} are comparable")
        empty_slot = self._by_size.get(0)
        if empty_slot is not None and empty_slot.g1 < 0:
            raise PopulationInvariantError("size-0 slot holds a negative g1")

    def best_feasible(self) -> Solution:
        """Largest F among sizes <= k; ties go to the smaller size, then the smallest index tuple."""
        feasible = [s for s in self._by_size.values() if s.size <= self.k]
        return min(feasible, key=lambda s: (-s.g1, s.size, indices_of(s.bits)))


def population_insert(population: Population, candidate: Solution) -> Population:
    """Adds `candidate` unless an archived solution strictly dominates it.

    Everything the candidate weakly dominates is removed first.
    """
    if candidate.size >= 2 * population.k:
        return population
    archive = population._by_size
    if any(z.strictly_dominates(candidate) for z in archive.values()):
        return population
    for size in [s for s, z in archive.items() if candidate.weakly_dominates(z)]:
        del archive[size]
    archive[candidate.size] = candidate
    return population


def eporss_run(
    ensemble: ObjectiveEnsemble,
    k: int,
    T: Optional[int] = None,
    seed: Optional[int] = None,
    check_invariants: bool = False,
) -> Tuple[np.ndarray, RunTrace]:
    """Runs T iterations (default ⌊2e·k²·n⌋) from the all-zeros archive."""
    check_budget(k, ensemble.n)
    if T is None:
        T = default_iterations(ensemble.n, k)
    rng = np.random.default_rng(seed)
    trace = RunTrace(
        "eporss",
        seed=seed,
        metadata={
            "iterations": T,
            "oracle_mode": ensemble.oracle_mode,
            "memoized_noise": ensemble.memoized_noise,
        },
    )

    population = Population(k, evaluate_solution(np.zeros(ensemble.n, dtype=bool), k, ensemble))
    cadence = max(1, math.ceil(T / TRACE_SAMPLES)) if T > 0 else 1
    best = population.best_feasible()
    trace.record(0, None, best.bits, best.g1, ensemble.eval_count)

    for t in range(1, T + 1):
        members = population.solutions()
        parent = members[int(rng.integers(len(members)))]
        child = mutate(parent.bits, rng)
        population_insert(population, evaluate_solution(child, k, ensemble))
        if check_invariants:
            population.check_invariants()
        if t % cadence == 0 or t == T:
            best = population.best_feasible()
            trace.record(t, None, best.bits, best.g1, ensemble.eval_count)

    best = population.best_feasible()
    trace.metadata["archive_size"] = len(population)
    logger.info("EPORSS finished %d iterations: F=%.6g, |X|=%d", T, best.g1, best.size)
    return best.bits.copy(), trace
