"""Per-edge activation probabilities: construction, perturbation, distances and I/O."""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence, TextIO

import numpy as np

from robsel.errors import EdgeListParseError, InvalidArgumentError
from robsel.influence.graph import DirectedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProbabilityVector:
    """θ: one probability per edge, in the graph's edge order."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1:
            raise InvalidArgumentError("probability vector must be one-dimensional")
        if np.any((probs < 0) | (probs > 1)):
            raise InvalidArgumentError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, edge: int) -> float:
        return float(self.probs[edge])


def weighted_cascade_probs(graph: DirectedGraph) -> ProbabilityVector:
    """p(u,v) = weight(u,v) / indegree(v), clamped to [0, 1]."""
    in_degrees = np.array([graph.in_degree(v) for v in graph.targets], dtype=float)
    return ProbabilityVector(np.clip(graph.weights / np.maximum(in_degrees, 1.0), 0.0, 1.0))


def perturb_probs(
    theta: ProbabilityVector, lo: float = 0.9, hi: float = 1.1, m: int = 2, rng: np.random.Generator = None
) -> List[ProbabilityVector]:
    """m vectors with entries drawn uniformly from [lo·p, hi·p], clamped to [0, 1]."""
    if not 0 <= lo <= hi:
        raise InvalidArgumentError(f"need 0 <= lo <= hi, got lo={lo}, hi={hi}")
    rng = rng if rng is not None else np.random.default_rng()
    return [
        ProbabilityVector(np.clip(rng.uniform(lo * theta.probs, hi * theta.probs), 0.0, 1.0))
        for _ in range(m)
    ]


def vector_distance(theta: ProbabilityVector, other: ProbabilityVector) -> float:
    """δ(θ, θ′) = Σ |θ_i − θ′_i|."""
    if len(theta) != len(other):
        raise InvalidArgumentError(f"length mismatch: {len(theta)} vs {len(other)}")
    return float(np.abs(theta.probs - other.probs).sum())


def delta_max(thetas: Sequence[ProbabilityVector]) -> float:
    """Largest pairwise distance in an ensemble (0 for a single vector)."""
    return max((vector_distance(a, b) for a, b in combinations(thetas, 2)), default=0.0)


def beta_lower_bound(n: int, delta: float) -> float:
    """1 − 2e·n·δ_max; non-positive values make the bound vacuous."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if delta < 0:
        raise InvalidArgumentError(f"delta_max must be >= 0, got {delta}")
    return 1 - 2 * math.e * n * delta


def write_probability_vector(theta: ProbabilityVector, stream: TextIO):
    stream.write(f"#edges={len(theta)}\n")
    for p in theta.probs:
        stream.write(f"{float(p)!r}\n")


def read_probability_vector(stream: TextIO) -> ProbabilityVector:
    header = stream.readline().strip()
    if not header.startswith("#edges="):
        raise EdgeListParseError(f"expected '#edges=<E>' header, got {header!r}", 1)
    try:
        expected = int(header.split("=", 1)[1])
    except ValueError:
        raise EdgeListParseError(f"bad edge count in header {header!r}", 1) from None
    values = []
    for line_number, raw in enumerate(stream, start=2):
        line = raw.strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise EdgeListParseError(f"unparseable probability {line!r}", line_number) from None
    if len(values) != expected:
        raise EdgeListParseError(f"header announces {expected} edges, found {len(values)}", 1)
    return ProbabilityVector(np.array(values))
