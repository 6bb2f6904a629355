"""Redundant dictionaries induced by a partition tree.

* piecewise-constant (PC): one normalized indicator per tree piece,
  ``2N - 1`` atoms in total;
* piecewise-smooth (PS): per tree piece, the first ``min(K, |piece|)``
  Laplacian eigenvectors of the induced subgraph, zero-padded to length N.

Orthonormal baselines (graph Fourier basis, Kronecker deltas) are exposed
through the same :class:`Dictionary` container so that approximation code
can treat every representation uniformly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from .graph import Graph, Piece, laplacian
from .multires import PartitionTree
from .spectral import gft, sym_eig

__all__ = [
    "Atom",
    "Dictionary",
    "DictStats",
    "build_pc_dict",
    "build_ps_dict",
    "fourier_dict",
    "delta_dict",
    "epsilon_par",
    "dict_stats",
]

NNZ_TOL = 1e-12


@dataclass(frozen=True)
class Atom:
    """Provenance of one dictionary column."""

    piece: Piece
    level: int
    piece_id: int
    spectral_index: int = 0


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Sparse ``N x n_atoms`` matrix of unit-norm atoms plus their provenance.

    Attributes
    ----------
    matrix : scipy.sparse.csc_matrix
    atoms : tuple of Atom
    kind : {"pc", "ps", "gft", "delta"}
    bandwidth : int or None
        Per-piece bandwidth of a PS dictionary.
    tree : PartitionTree or None
    """

    matrix: sp.csc_matrix
    atoms: tuple
    kind: str
    bandwidth: Optional[int] = None
    tree: Optional[PartitionTree] = field(default=None, repr=False)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def orthonormal(self):
        return self.kind in ("gft", "delta")

    def atom(self, i):
        return self.matrix[:, i].toarray().ravel()

    def toarray(self):
        return self.matrix.toarray()

    def __len__(self):
        return self.matrix.shape[1]


def _assemble(n, columns):
    """``columns`` is a list of (row indices, values); returns a CSC matrix."""
    indptr = np.zeros(len(columns) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r, _ in columns])
    if columns:
        indices = np.concatenate([r for r, _ in columns]).astype(np.int64)
        data = np.concatenate([v for _, v in columns]).astype(float)
    else:
        indices, data = np.zeros(0, dtype=np.int64), np.zeros(0)
    mat = sp.csc_matrix((data, indices, indptr), shape=(n, len(columns)))
    mat.sort_indices()
    return mat


def build_pc_dict(tree: PartitionTree, normalize: bool = True) -> Dictionary:
    """One indicator atom per tree piece, in tree order.

    With ``normalize=False`` the raw 0/1 indicators are returned (for
    inspection only; pursuit algorithms expect unit-norm atoms).
    """
    columns, atoms = [], []
    for i, node in enumerate(tree.nodes):
        rows = node.piece.array
        value = 1.0 / np.sqrt(len(rows)) if normalize else 1.0
        columns.append((rows, np.full(len(rows), value)))
        atoms.append(Atom(node.piece, node.level, i, 0))
    return Dictionary(_assemble(tree.n, columns), tuple(atoms), "pc", None, tree)


def build_ps_dict(tree: PartitionTree, bandwidth: int, n_jobs: Optional[int] = None) -> Dictionary:
    """Per-piece leading subgraph Fourier vectors for every tree piece."""
    if bandwidth < 1:
        raise ValueError("bandwidth must be at least 1")
    if n_jobs is None:
        n_jobs = int(os.environ.get("GWDICT_THREADS", "1") or 1)
    graph = tree.graph

    def piece_basis(node):
        return gft(graph, bandwidth, nodes=node.piece.nodes)

    if n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as ex:
            bases = list(ex.map(piece_basis, tree.nodes))
    else:
        bases = [piece_basis(node) for node in tree.nodes]

    columns, atoms = [], []
    for i, (node, fb) in enumerate(zip(tree.nodes, bases)):
        mat = fb.matrix
        for k in range(fb.bandwidth):
            col = mat[:, k]
            keep = np.abs(col) > NNZ_TOL
            columns.append((fb.nodes[keep], col[keep]))
            atoms.append(Atom(node.piece, node.level, i, k))
    return Dictionary(_assemble(tree.n, columns), tuple(atoms), "ps", int(bandwidth), tree)


def fourier_dict(graph: Graph) -> Dictionary:
    """Global graph Fourier basis as a dictionary (orthonormal)."""
    fb = gft(graph)
    whole = Piece(tuple(range(graph.n)))
    columns, atoms = [], []
    for k in range(graph.n):
        col = fb.eig.vectors[:, k]
        keep = np.abs(col) > NNZ_TOL
        columns.append((np.flatnonzero(keep), col[keep]))
        atoms.append(Atom(whole, 0, 0, k))
    return Dictionary(_assemble(graph.n, columns), tuple(atoms), "gft")


def delta_dict(n: int) -> Dictionary:
    """Kronecker delta basis as a dictionary."""
    columns = [(np.array([i]), np.array([1.0])) for i in range(n)]
    atoms = tuple(Atom(Piece((i,)), 0, i, 0) for i in range(n))
    return Dictionary(_assemble(n, columns), atoms, "delta")


def _cut_laplacian(graph, labels):
    j, k = graph.edges[:, 0], graph.edges[:, 1]
    cut = labels[j] != labels[k]
    w = graph.weights[cut]
    cj, ck = j[cut], k[cut]
    lap = np.zeros((graph.n, graph.n))
    np.add.at(lap, (cj, cj), w)
    np.add.at(lap, (ck, ck), w)
    np.add.at(lap, (cj, ck), -w)
    np.add.at(lap, (ck, cj), -w)
    return lap


def epsilon_par(graph: Graph, pieces, x, bandwidth: int) -> float:
    """Partition-quality constant bounding per-piece bandlimited approximation error.

    Computes ``x^T (lam_K I - L_cut) x / (min_c lam^{(S_c)}_{K+1} * ||x||^2)``
    where ``lam_K`` is the K-th smallest eigenvalue of the graph Laplacian,
    ``L_cut`` the Laplacian of the edges joining different pieces and
    ``lam^{(S_c)}_{K+1}`` the (K+1)-th smallest eigenvalue of piece ``S_c``.

    Raises
    ------
    ValueError
        If the pieces do not partition the nodes, if some piece has at most
        ``bandwidth`` nodes, or if ``x`` is zero.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (graph.n,):
        raise ValueError(f"signal of shape {x.shape} does not match {graph.n} nodes")
    energy = float(x @ x)
    if energy == 0.0:
        raise ValueError("epsilon_par is undefined for the zero signal")
    if bandwidth < 1:
        raise ValueError("bandwidth must be at least 1")
    labels = np.full(graph.n, -1, dtype=np.int64)
    for c, piece in enumerate(pieces):
        nodes = list(piece)
        if np.any(labels[nodes] >= 0):
            raise ValueError("pieces overlap")
        labels[nodes] = c
    if np.any(labels < 0):
        raise ValueError("pieces do not cover every node")
    small = [len(list(p)) for p in pieces if len(list(p)) <= bandwidth]
    if small:
        raise ValueError(
            f"every piece needs more than K={bandwidth} nodes for lambda_(K+1) to exist; "
            f"got piece sizes {sorted(small)}"
        )
    lam_k = sym_eig(laplacian(graph)).values[bandwidth - 1]
    lam_next = min(
        sym_eig(laplacian(graph.subgraph(list(p)))).values[bandwidth] for p in pieces
    )
    numer = lam_k * energy - float(x @ _cut_laplacian(graph, labels) @ x)
    return float(numer / (lam_next * energy))


class DictStats(NamedTuple):
    n_atoms: int
    nnz: int
    coherence: float


def dict_stats(d: Dictionary) -> DictStats:
    """Atom count, nonzero count and mutual coherence (max |<d_i, d_j>|, i != j)."""
    mat = d.matrix
    nnz = int(np.count_nonzero(np.abs(mat.data) > NNZ_TOL))
    if len(d) < 2:
        return DictStats(len(d), nnz, 0.0)
    gram = (mat.T @ mat).tocoo()
    off = gram.row != gram.col
    coherence = float(np.max(np.abs(gram.data[off]))) if np.any(off) else 0.0
    return DictStats(len(d), nnz, coherence)
