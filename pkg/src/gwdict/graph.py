"""Undirected weighted graphs and first-order difference operators.

Nodes are dense integers ``0..n-1``. Edges are stored once, canonicalized to
``j < k`` and sorted lexicographically, so two graphs built from the same edge
set are identical regardless of input order.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .exceptions import DisconnectedGraphError, GraphError

__all__ = [
    "Graph",
    "Piece",
    "build_graph",
    "laplacian",
    "incidence",
    "cut_count",
    "quadratic_variation",
    "connected_components",
    "geodesic_matrix",
    "is_connected",
]

CUT_ATOL = 1e-12


def _readonly(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph with positive edge weights.

    Use :func:`build_graph` to construct one from user input; the dataclass
    constructor trusts its arguments.

    Attributes
    ----------
    n : int
        Number of nodes.
    edges : ndarray of shape (E, 2)
        Edge endpoints with ``edges[i, 0] < edges[i, 1]``, lexicographically sorted.
    weights : ndarray of shape (E,)
        Positive edge weights aligned with ``edges``.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray

    @property
    def n_edges(self):
        return len(self.weights)

    @cached_property
    def adjacency(self):
        """Symmetric CSR adjacency matrix."""
        j, k = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([j, k])
        cols = np.concatenate([k, j])
        data = np.concatenate([self.weights, self.weights])
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degree(self):
        deg = np.zeros(self.n)
        np.add.at(deg, self.edges[:, 0], self.weights)
        np.add.at(deg, self.edges[:, 1], self.weights)
        return _readonly(deg)

    def subgraph(self, nodes):
        """Induced subgraph on ``nodes``, relabelled to ``0..len(nodes)-1`` in sorted order."""
        nodes = np.asarray(sorted(nodes), dtype=np.int64)
        sub = self.adjacency[nodes][:, nodes]
        upper = sp.triu(sub, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        edges = np.column_stack([upper.row[order], upper.col[order]]).astype(np.int64)
        return Graph(len(nodes), _readonly(edges), _readonly(upper.data[order].astype(float)))

    def __repr__(self):
        return f"Graph(n={self.n}, n_edges={self.n_edges})"


@dataclass(frozen=True)
class Piece:
    """A nonempty node subset whose induced subgraph is connected.

    ``Piece(nodes)`` does not check connectivity; :meth:`of` does.
    """

    nodes: tuple

    @classmethod
    def of(cls, graph: Graph, nodes: Iterable[int]) -> "Piece":
        nodes = tuple(sorted(set(int(v) for v in nodes)))
        if not nodes:
            raise GraphError("a piece must be nonempty")
        if nodes[0] < 0 or nodes[-1] >= graph.n:
            raise GraphError(f"piece nodes out of range for a graph with {graph.n} nodes")
        comps = connected_components(graph, nodes)
        if len(comps) != 1:
            raise DisconnectedGraphError(
                f"induced subgraph has {len(comps)} connected components",
                components=[c.nodes for c in comps],
            )
        return cls(nodes)

    @property
    def array(self):
        return np.asarray(self.nodes, dtype=np.int64)

    @property
    def min(self):
        return self.nodes[0]

    def indicator(self, n):
        out = np.zeros(n)
        out[list(self.nodes)] = 1.0
        return out

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, v):
        i = bisect_left(self.nodes, v)
        return i < len(self.nodes) and self.nodes[i] == v


def build_graph(n: int, edges: Iterable[Sequence]) -> Graph:
    """Validate and canonicalize an edge list into a :class:`Graph`.

    Parameters
    ----------
    n : int
        Number of nodes.
    edges : iterable of (j, k) or (j, k, w)
        Missing weights default to 1.0. A repeated edge is accepted only if
        it carries the same weight.

    Raises
    ------
    GraphError
        On self-loops, out-of-range indices, nonpositive weights or
        conflicting duplicate edges.
    """
    if n < 0:
        raise GraphError("node count must be nonnegative")
    seen = {}
    for e in edges:
        if len(e) == 2:
            j, k = e
            w = 1.0
        elif len(e) == 3:
            j, k, w = e
        else:
            raise GraphError(f"edge must be (j, k) or (j, k, w), got {e!r}")
        j, k, w = int(j), int(k), float(w)
        if j == k:
            raise GraphError(f"self-loop at node {j}")
        if not (0 <= j < n and 0 <= k < n):
            raise GraphError(f"edge ({j}, {k}) out of range for {n} nodes")
        if not w > 0 or not np.isfinite(w):
            raise GraphError(f"edge ({j}, {k}) has nonpositive weight {w}")
        key = (j, k) if j < k else (k, j)
        if key in seen and seen[key] != w:
            raise GraphError(f"duplicate edge {key} with conflicting weights {seen[key]} and {w}")
        seen[key] = w
    keys = sorted(seen)
    edge_arr = np.array(keys, dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[key] for key in keys], dtype=float)
    return Graph(n, _readonly(edge_arr), _readonly(weights))


def laplacian(graph: Graph, sparse: bool = False):
    """Combinatorial Laplacian ``D - A``."""
    lap = sp.diags(graph.degree) - graph.adjacency
    return lap.tocsr() if sparse else lap.toarray()


def incidence(graph: Graph, sparse: bool = False):
    """Edge-by-node difference operator with ``incidence.T @ incidence == laplacian``.

    Row ``i`` for edge ``(j, k)``, ``j < k``, holds ``-sqrt(w)`` at column ``j``
    and ``+sqrt(w)`` at column ``k``.
    """
    e = graph.n_edges
    s = np.sqrt(graph.weights)
    rows = np.repeat(np.arange(e), 2)
    cols = graph.edges.reshape(-1)
    data = np.column_stack([-s, s]).reshape(-1)
    mat = sp.csr_matrix((data, (rows, cols)), shape=(e, graph.n))
    return mat if sparse else mat.toarray()


def _as_signal(graph, x):
    x = np.asarray(x)
    if x.shape != (graph.n,):
        raise GraphError(f"signal of shape {x.shape} does not match a graph with {graph.n} nodes")
    return x


def cut_count(graph: Graph, x, atol: float = CUT_ATOL) -> int:
    """Number of edges whose endpoints carry different values (the cut cost)."""
    x = _as_signal(graph, x)
    a, b = x[graph.edges[:, 0]], x[graph.edges[:, 1]]
    if np.issubdtype(x.dtype, np.integer):
        return int(np.count_nonzero(a != b))
    return int(np.count_nonzero(np.abs(a - b) > atol))


def quadratic_variation(graph: Graph, x) -> float:
    """``x^T L x``, the weighted sum of squared differences across edges."""
    x = _as_signal(graph, x).astype(float)
    d = x[graph.edges[:, 1]] - x[graph.edges[:, 0]]
    return float(np.sum(graph.weights * d * d))


def connected_components(graph: Graph, subset=None) -> list:
    """Connected components of the subgraph induced by ``subset``.

    Components are returned as pieces sorted by size, then by smallest node.
    """
    if subset is None:
        nodes = np.arange(graph.n)
    else:
        nodes = np.asarray(sorted(set(int(v) for v in subset)), dtype=np.int64)
    if len(nodes) == 0:
        return []
    sub = graph.adjacency[nodes][:, nodes]
    _, labels = csgraph.connected_components(sub, directed=False)
    groups = {}
    for v, lab in zip(nodes.tolist(), labels.tolist()):
        groups.setdefault(lab, []).append(v)
    comps = [Piece(tuple(g)) for g in groups.values()]
    comps.sort(key=lambda p: (len(p), p.min))
    return comps


def is_connected(graph: Graph) -> bool:
    if graph.n <= 1:
        return graph.n == 1
    n_comp, _ = csgraph.connected_components(graph.adjacency, directed=False)
    return n_comp == 1


def geodesic_matrix(graph: Graph, weighted: bool = False) -> np.ndarray:
    """All-pairs shortest-path distances.

    By default distances are hop counts. With ``weighted=True`` an edge of
    weight ``w`` has length ``1/w`` (weights encode similarity).

    Raises
    ------
    DisconnectedGraphError
        If some pair of nodes is unreachable.
    """
    if graph.n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if weighted:
        adj = graph.adjacency.copy()
        adj.data = 1.0 / adj.data
        dist = csgraph.shortest_path(adj, method="D", directed=False)
    else:
        dist = csgraph.shortest_path(graph.adjacency, method="D", directed=False, unweighted=True)
    if not np.all(np.isfinite(dist)):
        comps = connected_components(graph)
        raise DisconnectedGraphError(
            f"graph has {len(comps)} connected components; geodesic distances are infinite",
            components=[c.nodes for c in comps],
        )
    if not weighted:
        dist = dist.astype(np.int64)
    return dist
