"""Coarse-to-fine partition tree and the Haar-like wavelet basis it induces.

Starting from the whole node set, every piece with two or more nodes is split
by :func:`gwdict.partition.bisect` on its induced subgraph until only
singletons remain. Each split ``(S1, S2)`` contributes one highpass vector
that is constant on ``S1``, constant on ``S2``, zero-sum and unit norm;
together with the normalized constant vector they form an orthonormal basis.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .exceptions import DisconnectedGraphError, GraphError
from .graph import Graph, Piece, connected_components, is_connected
from .partition import bisect

__all__ = [
    "TreeNode",
    "PartitionTree",
    "WaveletBasis",
    "decompose",
    "lowpass_template",
    "highpass_template",
    "wavelet_basis",
    "analyze",
    "synthesize",
]


@dataclass(frozen=True)
class TreeNode:
    piece: Piece
    level: int
    parent: Optional[int] = None
    children: Optional[tuple] = None
    repaired: bool = False
    adjusted: bool = False

    @property
    def is_leaf(self):
        return self.children is None


@dataclass(frozen=True, eq=False)
class PartitionTree:
    """Binary tree of pieces; root is the full node set, leaves are singletons.

    ``nodes`` is in breadth-first order with each level sorted by the smallest
    node index of its pieces; the two children of a node are ordered the
    same way.
    """

    graph: Graph
    nodes: tuple
    depth: int

    @property
    def n(self):
        return self.graph.n

    @property
    def root(self):
        return self.nodes[0]

    def internal(self):
        """Indices of internal (split) nodes, in tree order."""
        return [i for i, t in enumerate(self.nodes) if not t.is_leaf]

    def leaves(self):
        return [i for i, t in enumerate(self.nodes) if t.is_leaf]

    def level(self, ell):
        return [i for i, t in enumerate(self.nodes) if t.level == ell]

    def __len__(self):
        return len(self.nodes)


def _split(graph, piece, weighted=False):
    if len(piece) == 2:
        a, b = piece.nodes
        return Piece((a,)), Piece((b,)), False, False
    local = graph.subgraph(piece.nodes)
    b = bisect(local, weighted=weighted)
    idx = piece.array
    left = Piece(tuple(idx[list(b.left.nodes)].tolist()))
    right = Piece(tuple(idx[list(b.right.nodes)].tolist()))
    first, second = (left, right) if left.min < right.min else (right, left)
    return first, second, b.repaired, b.adjusted


def decompose(graph: Graph, n_jobs: Optional[int] = None, weighted: bool = False) -> PartitionTree:
    """Recursively bisect ``graph`` down to singletons.

    Parameters
    ----------
    graph : Graph
        Connected graph.
    n_jobs : int, optional
        Threads used to split the pieces of one level concurrently. The
        result does not depend on it. Defaults to ``GWDICT_THREADS`` or 1.
    weighted : bool
        Hub distances use edge lengths ``1/w`` instead of hop counts.

    Raises
    ------
    DisconnectedGraphError
        If ``graph`` is not connected.
    """
    if graph.n == 0:
        raise GraphError("cannot decompose an empty graph")
    if not is_connected(graph):
        comps = connected_components(graph)
        raise DisconnectedGraphError(
            f"cannot decompose a disconnected graph ({len(comps)} components)",
            components=[c.nodes for c in comps],
        )
    if n_jobs is None:
        n_jobs = int(os.environ.get("GWDICT_THREADS", "1") or 1)

    records = [dict(piece=Piece(tuple(range(graph.n))), level=0, parent=None)]
    frontier = [0]
    ell = 0
    executor = ThreadPoolExecutor(n_jobs) if n_jobs > 1 else None
    try:
        while frontier:
            to_split = [i for i in frontier if len(records[i]["piece"]) > 1]
            if executor is not None:
                results = list(executor.map(lambda i: _split(graph, records[i]["piece"], weighted), to_split))
            else:
                results = [_split(graph, records[i]["piece"], weighted) for i in to_split]
            children = []
            for i, (first, second, repaired, adjusted) in zip(to_split, results):
                records[i].update(repaired=repaired, adjusted=adjusted)
                for child in (first, second):
                    children.append(dict(piece=child, level=ell + 1, parent=i))
            children.sort(key=lambda r: r["piece"].min)
            frontier = []
            for rec in children:
                records.append(rec)
                k = len(records) - 1
                frontier.append(k)
                parent = records[rec["parent"]]
                parent.setdefault("children", []).append(k)
            if children:
                ell += 1
    finally:
        if executor is not None:
            executor.shutdown()

    nodes = []
    for rec in records:
        kids = rec.get("children")
        if kids is not None:
            kids = tuple(sorted(kids, key=lambda k: records[k]["piece"].min))
        nodes.append(
            TreeNode(
                piece=rec["piece"],
                level=rec["level"],
                parent=rec["parent"],
                children=kids,
                repaired=rec.get("repaired", False),
                adjusted=rec.get("adjusted", False),
            )
        )
    return PartitionTree(graph, tuple(nodes), ell)


def _check_disjoint(s1, s2):
    s1, s2 = set(s1), set(s2)
    if not s1 or not s2:
        raise ValueError("template pieces must be nonempty")
    if s1 & s2:
        raise ValueError(f"template pieces overlap on {sorted(s1 & s2)[:10]}")
    return sorted(s1), sorted(s2)


def _template(s1, s2, n, sign):
    s1, s2 = _check_disjoint(s1, s2)
    n1, n2 = len(s1), len(s2)
    scale = np.sqrt(n1 * n2 / (n1 + n2))
    if n is None:
        n = max(s1[-1], s2[-1]) + 1
    out = np.zeros(n)
    out[s1] = scale / n1
    out[s2] = sign * scale / n2
    return out


def lowpass_template(s1, s2, n=None):
    """Unit-norm vector constant on each piece, weighted by inverse piece size."""
    return _template(s1, s2, n, 1.0)


def highpass_template(s1, s2, n=None):
    """Like :func:`lowpass_template` but negated on ``s2``; sums to zero."""
    return _template(s1, s2, n, -1.0)


@dataclass(frozen=True, eq=False)
class WaveletBasis:
    """Orthonormal Haar-like basis stored as a sparse column matrix.

    Column 0 is the normalized constant vector; column ``c >= 1`` is the
    highpass vector of tree node ``column_nodes[c]``.
    """

    matrix: sp.csc_matrix
    tree: PartitionTree = field(repr=False)
    column_nodes: tuple

    @property
    def n(self):
        return self.matrix.shape[0]

    def toarray(self):
        return self.matrix.toarray()


def wavelet_basis(tree: PartitionTree) -> WaveletBasis:
    n = tree.n
    rows, cols, vals = [np.arange(n)], [np.zeros(n, dtype=np.int64)], [np.full(n, 1 / np.sqrt(n))]
    column_nodes = [0]
    for c, i in enumerate(tree.internal(), start=1):
        first, second = (tree.nodes[k].piece for k in tree.nodes[i].children)
        n1, n2 = len(first), len(second)
        scale = np.sqrt(n1 * n2 / (n1 + n2))
        rows += [first.array, second.array]
        cols += [np.full(n1 + n2, c, dtype=np.int64)]
        vals += [np.full(n1, scale / n1), np.full(n2, -scale / n2)]
        column_nodes.append(i)
    mat = sp.csc_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    mat.sort_indices()
    return WaveletBasis(mat, tree, tuple(column_nodes))


def _basis_matrix(w):
    return w.matrix if isinstance(w, WaveletBasis) else w


def analyze(w, x):
    """Wavelet coefficients ``W.T @ x`` (``x`` may be 1-D or ``(N, k)``)."""
    mat = _basis_matrix(w)
    x = np.asarray(x, dtype=float)
    if x.shape[0] != mat.shape[0]:
        raise ValueError(f"signal length {x.shape[0]} does not match basis size {mat.shape[0]}")
    return np.asarray(mat.T @ x)


def synthesize(w, a):
    """Signal ``W @ a`` from wavelet coefficients."""
    mat = _basis_matrix(w)
    a = np.asarray(a, dtype=float)
    if a.shape[0] != mat.shape[1]:
        raise ValueError(f"coefficient length {a.shape[0]} does not match basis size {mat.shape[1]}")
    return np.asarray(mat @ a)
