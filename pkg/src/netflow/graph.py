"""Directed graphs, incidence algebra, structural metrics, random instances.

Nodes are numbered 1..n to match the on-disk text format; edge e is a
(tail, head) pair and is column e of the incidence matrix. All structural
metrics (degree, diameter, bipartiteness) are taken on the undirected
support of the graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DisconnectedGraph,
    EndpointOutOfRange,
    InfeasibleEdgeCount,
    RejectionLimitExceeded,
    SelfLoop,
)

DEFAULT_REJECTION_LIMIT = 1000


@dataclass(frozen=True)
class DirectedGraph:
    """Validated directed graph with stable edge order.

    adjacency[i] lists (edge_index, sign) for node i+1, sign +1 when the
    node is the tail of the edge and -1 when it is the head.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbor_lists(self) -> list[list[int]]:
        """Undirected neighbor lists, 0-indexed nodes."""
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for tail, head in self.edges:
            nbrs[tail - 1].append(head - 1)
            nbrs[head - 1].append(tail - 1)
        return nbrs


@dataclass(frozen=True)
class GraphMetrics:
    max_degree: int
    diameter: int
    bipartite: bool


def build_graph(n: int, edges: list[tuple[int, int]]) -> DirectedGraph:
    """Validate and construct a :class:`DirectedGraph`.

    Requires n >= 2, endpoints in [1, n], no self-loops, and a connected
    undirected support. Parallel edges are accepted.
    """
    if n < 2:
        raise EndpointOutOfRange(f"need at least 2 nodes, got n={n}")
    edge_tuple: list[tuple[int, int]] = []
    for tail, head in edges:
        if not (1 <= tail <= n) or not (1 <= head <= n):
            raise EndpointOutOfRange(f"edge ({tail}, {head}) outside [1, {n}]")
        if tail == head:
            raise SelfLoop(f"self-loop at node {tail}")
        edge_tuple.append((int(tail), int(head)))

    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for e, (tail, head) in enumerate(edge_tuple):
        adjacency[tail - 1].append((e, +1))
        adjacency[head - 1].append((e, -1))

    graph = DirectedGraph(
        n=n,
        edges=tuple(edge_tuple),
        adjacency=tuple(tuple(a) for a in adjacency),
    )
    if not _is_connected(graph):
        raise DisconnectedGraph(f"graph on {n} nodes is not connected")
    return graph


def incidence_matrix(graph: DirectedGraph) -> np.ndarray:
    """n x E incidence matrix: column e has +1 at the tail, -1 at the head."""
    A = np.zeros((graph.n, graph.num_edges))
    for e, (tail, head) in enumerate(graph.edges):
        A[tail - 1, e] = 1.0
        A[head - 1, e] = -1.0
    return A


def bfs_distances(graph: DirectedGraph, source: int) -> list[int]:
    """Undirected hop distances from 0-indexed ``source`` (-1 if unreachable)."""
    nbrs = graph.neighbor_lists()
    dist = [-1] * graph.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def all_pairs_distances(graph: DirectedGraph) -> list[list[int]]:
    return [bfs_distances(graph, s) for s in range(graph.n)]


def metrics(graph: DirectedGraph) -> GraphMetrics:
    """Exact max degree, diameter, and bipartiteness of the undirected support."""
    degree = [len(adj) for adj in graph.adjacency]
    diameter = 0
    for s in range(graph.n):
        diameter = max(diameter, max(bfs_distances(graph, s)))
    return GraphMetrics(
        max_degree=max(degree),
        diameter=diameter,
        bipartite=_is_bipartite(graph),
    )


def _is_connected(graph: DirectedGraph) -> bool:
    return min(bfs_distances(graph, 0)) >= 0


def _is_bipartite(graph: DirectedGraph) -> bool:
    nbrs = graph.neighbor_lists()
    color = [-1] * graph.n
    for start in range(graph.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in nbrs[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def _pair_from_index(n: int, k: int) -> tuple[int, int]:
    # Unrank k in [0, n(n-1)/2) to the k-th unordered pair (i, j), i < j,
    # in lexicographic order over 1-indexed nodes.
    i = 1
    remaining = k
    while remaining >= n - i:
        remaining -= n - i
        i += 1
    return i, i + 1 + remaining


def random_connected_graph(
    n: int,
    num_edges: int,
    seed: int,
    max_attempts: int = DEFAULT_REJECTION_LIMIT,
) -> DirectedGraph:
    """Sample a connected, non-bipartite directed graph uniformly.

    Draws ``num_edges`` distinct unordered node pairs uniformly at random
    (at most one edge per pair), orients each uniformly, and resamples
    until the result is connected and non-bipartite. Deterministic for a
    fixed seed.
    """
    if n < 2:
        raise InfeasibleEdgeCount(f"need at least 2 nodes, got n={n}")
    max_pairs = n * (n - 1) // 2
    if num_edges < n - 1 or num_edges > max_pairs:
        raise InfeasibleEdgeCount(
            f"E={num_edges} infeasible for n={n}: need {n - 1} <= E <= {max_pairs}"
        )
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        pair_indices = rng.choice(max_pairs, size=num_edges, replace=False)
        flips = rng.integers(0, 2, size=num_edges)
        edges = []
        for k, flip in zip(pair_indices, flips):
            i, j = _pair_from_index(n, int(k))
            edges.append((j, i) if flip else (i, j))
        try:
            graph = build_graph(n, edges)
        except DisconnectedGraph:
            continue
        if not _is_bipartite(graph):
            return graph
    raise RejectionLimitExceeded(
        f"no connected non-bipartite graph with n={n}, E={num_edges} "
        f"after {max_attempts} attempts"
    )


def graph_to_text(graph: DirectedGraph) -> str:
    """Serialize to the text format: 'n E' then one 'tail head' line per edge."""
    lines = [f"{graph.n} {graph.num_edges}"]
    lines.extend(f"{tail} {head}" for tail, head in graph.edges)
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> DirectedGraph:
    """Parse the text format produced by :func:`graph_to_text`."""
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("graph text must start with 'n E'")
    n, num_edges = int(tokens[0]), int(tokens[1])
    if len(tokens) != 2 + 2 * num_edges:
        raise ValueError(
            f"expected {2 * num_edges} endpoint tokens, got {len(tokens) - 2}"
        )
    edges = [
        (int(tokens[2 + 2 * e]), int(tokens[3 + 2 * e])) for e in range(num_edges)
    ]
    return build_graph(n, edges)


def write_graph(graph: DirectedGraph, path: str | Path) -> None:
    Path(path).write_text(graph_to_text(graph))


def read_graph(path: str | Path) -> DirectedGraph:
    return graph_from_text(Path(path).read_text())
