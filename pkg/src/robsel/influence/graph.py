"""Directed graphs for influence spread: SNAP-style ingestion and subsampling."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, TextIO, Tuple

import networkx as nx
import numpy as np

from robsel.errors import EdgeListParseError, EmptyGraphError, InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass
class DirectedGraph:
    """Nodes 0..n-1, collapsed weighted edges, and per-node edge indices.

    `labels[i]` is node i's id in the source file.
    """

    n: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    labels: Tuple[str, ...] = field(default=())
    out_edges: List[List[int]] = field(init=False, repr=False)
    in_edges: List[List[int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.sources = np.asarray(self.sources, dtype=np.int64)
        self.targets = np.asarray(self.targets, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=float)
        if not self.labels:
            self.labels = tuple(str(i) for i in range(self.n))
        if len(self.labels) != self.n:
            raise InvalidArgumentError(f"expected {self.n} labels, got {len(self.labels)}")
        if self.edge_count and (self.sources.max() >= self.n or self.targets.max() >= self.n):
            raise InvalidArgumentError("edge endpoint outside [0, n)")
        self.out_edges = [[] for _ in range(self.n)]
        self.in_edges = [[] for _ in range(self.n)]
        # edges sorted by (source, target) so out-neighbors come in ascending node id
        for e in np.lexsort((self.targets, self.sources)):
            self.out_edges[self.sources[e]].append(int(e))
        for e in range(self.edge_count):
            self.in_edges[self.targets[e]].append(e)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int, float]], labels: Sequence[str] = ()) -> "DirectedGraph":
        """Builds a graph, dropping self-loops and summing parallel edges."""
        collapsed: Dict[Tuple[int, int], float] = {}
        for u, v, w in edges:
            if u == v:
                logger.warning("ignoring self-loop on node %s", labels[u] if labels else u)
                continue
            collapsed[(u, v)] = collapsed.get((u, v), 0.0) + float(w)
        pairs = list(collapsed)
        return cls(
            n=n,
            sources=[u for u, _ in pairs],
            targets=[v for _, v in pairs],
            weights=[collapsed[p] for p in pairs],
            labels=tuple(labels),
        )

    @property
    def edge_count(self) -> int:
        return int(self.sources.size)

    def edges(self) -> List[Tuple[int, int, float]]:
        return [(int(u), int(v), float(w)) for u, v, w in zip(self.sources, self.targets, self.weights)]

    def in_degree(self, v: int) -> int:
        return len(self.in_edges[v])

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        for e, (u, v, w) in enumerate(self.edges()):
            g.add_edge(u, v, weight=w, index=e)
        return g

    @classmethod
    def from_networkx(cls, g: nx.DiGraph) -> "DirectedGraph":
        """Graph over g's nodes in iteration order; missing weights count as 1."""
        position = {node: i for i, node in enumerate(g.nodes)}
        edges = [(position[u], position[v], data.get("weight", 1.0)) for u, v, data in g.edges(data=True)]
        return cls.from_edges(len(position), edges, tuple(str(node) for node in g.nodes))

    def restrict_to_labels(self, labels: Sequence[str]) -> "DirectedGraph":
        """Graph over exactly `labels` (in that order); absent labels become isolated nodes."""
        position = {label: i for i, label in enumerate(labels)}
        kept = []
        for u, v, w in self.edges():
            a, b = position.get(self.labels[u]), position.get(self.labels[v])
            if a is not None and b is not None:
                kept.append((a, b, w))
        return DirectedGraph.from_edges(len(labels), kept, labels)


def load_edge_list(stream: TextIO) -> DirectedGraph:
    """Parses "u v [weight]" lines; '#' lines are comments.

    Nodes are re-indexed densely in order of first appearance.
    """
    index: Dict[str, int] = {}
    edges: List[Tuple[int, int, float]] = []
    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise EdgeListParseError(f"expected 'u v [weight]', got {len(tokens)} tokens", line_number)
        weight = 1.0
        if len(tokens) == 3:
            try:
                weight = float(tokens[2])
            except ValueError:
                raise EdgeListParseError(f"unparseable weight {tokens[2]!r}", line_number) from None
            if not weight > 0:
                raise EdgeListParseError(f"weight must be positive, got {tokens[2]!r}", line_number)
        ends = []
        for token in tokens[:2]:
            if token not in index:
                index[token] = len(index)
            ends.append(index[token])
        edges.append((ends[0], ends[1], weight))
    if not index:
        raise EmptyGraphError("edge list contains no nodes")
    graph = DirectedGraph.from_edges(len(index), edges, tuple(index))
    logger.info("loaded graph: %d nodes, %d edges", graph.n, graph.edge_count)
    return graph


def top_active_subgraph(graph: DirectedGraph, limit: int = 200) -> DirectedGraph:
    """Induced subgraph on the `limit` nodes of highest total degree (ties: lower id)."""
    if not 1 <= limit <= graph.n:
        raise InvalidArgumentError(f"limit {limit} outside [1, {graph.n}]")
    g = graph.to_networkx()
    ranked = sorted(g.nodes, key=lambda node: (-g.degree(node), node))
    chosen = sorted(ranked[:limit])
    sub = g.subgraph(chosen)
    position = {node: i for i, node in enumerate(chosen)}
    edges = [(position[u], position[v], data["weight"]) for u, v, data in sub.edges(data=True)]
    return DirectedGraph.from_edges(limit, edges, tuple(graph.labels[node] for node in chosen))
