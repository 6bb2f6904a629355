"""Symmetric eigendecomposition and (sub)graph Fourier bases.

Eigenvectors are returned with a fixed convention so that every derived
dictionary is reproducible: ascending eigenvalues, each vector's first
nonzero entry positive, and vectors inside a numerically degenerate cluster
ordered lexicographically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConvergenceError, DisconnectedGraphError, GraphError
from .graph import Graph, connected_components, is_connected, laplacian

__all__ = [
    "EigenPairs",
    "FourierBasis",
    "sym_eig",
    "jacobi_eig",
    "gft",
    "spectral_energy_ratio",
    "write_eigenpairs_csv",
    "read_eigenpairs_csv",
]

SIGN_TOL = 1e-9
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenPairs:
    """Ascending eigenvalues with column-aligned orthonormal eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self):
        return len(self.values)


def _off_norm(a):
    # Norm of the off-diagonal part taken directly; ||A||_F^2 - sum(diag^2)
    # cancels catastrophically once the matrix is nearly diagonal.
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eig(m, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi rotations for a dense symmetric matrix.

    Sweeps over every off-diagonal pair until the off-diagonal Frobenius norm
    drops below ``tol * ||m||_F``. Returns unsorted ``(values, vectors)``.

    Raises
    ------
    ConvergenceError
        If ``max_sweeps`` sweeps are not enough.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= target:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = np.copysign(1.0, tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = _off_norm(a)
    if off <= target:
        return np.diag(a).copy(), v
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")


def _canonicalize(values, vectors, scale):
    order = np.argsort(values, kind="stable")
    values, vectors = values[order], vectors[:, order]

    for i in range(vectors.shape[1]):
        col = vectors[:, i]
        nz = np.flatnonzero(np.abs(col) > SIGN_TOL)
        if len(nz) and col[nz[0]] < 0:
            vectors[:, i] = -col

    # order vectors inside each degenerate cluster lexicographically
    gap_tol = 1e-9 * max(1.0, scale)
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= gap_tol:
            stop += 1
        if stop - start > 1:
            block = np.round(vectors[:, start:stop], 8)
            idx = np.lexsort(block[::-1]) + start
            vectors[:, start:stop] = vectors[:, idx]
            values[start:stop] = values[idx]
        start = stop
    return values, vectors


def sym_eig(m, method: str = "lapack") -> EigenPairs:
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    m : array-like of shape (n, n)
        Symmetric within ``1e-12`` (relative to its largest entry).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls :func:`numpy.linalg.eigh`; ``"jacobi"`` uses the
        in-house cyclic Jacobi solver. Both go through the same ordering and
        sign convention.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) if m.size else 0.0
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL * max(1.0, scale):
        raise ValueError("matrix is not symmetric")
    if method == "lapack":
        values, vectors = np.linalg.eigh(m)
    elif method == "jacobi":
        values, vectors = jacobi_eig(m)
    else:
        raise ValueError(f"unknown method {method!r}")
    values, vectors = _canonicalize(np.array(values), np.array(vectors), scale)
    return EigenPairs(values, vectors)


@dataclass(frozen=True)
class FourierBasis:
    """Laplacian eigenbasis of a connected (sub)graph, optionally truncated.

    Attributes
    ----------
    nodes : ndarray
        Node indices (in the parent graph) that the rows refer to.
    eig : EigenPairs
        Full eigendecomposition of the (sub)graph Laplacian.
    bandwidth : int
        Number of leading columns kept, ``min(K, len(nodes))``.
    """

    nodes: np.ndarray
    eig: EigenPairs
    bandwidth: int

    @property
    def matrix(self):
        return self.eig.vectors[:, : self.bandwidth]

    @property
    def values(self):
        return self.eig.values[: self.bandwidth]


def gft(graph: Graph, bandwidth: Optional[int] = None, nodes=None, method="lapack") -> FourierBasis:
    """Graph Fourier basis of ``graph`` or of the subgraph induced by ``nodes``.

    The first column is exactly the normalized constant vector, which is the
    zero-eigenvalue eigenvector of any connected graph.

    Raises
    ------
    DisconnectedGraphError
        If the (sub)graph is not connected.
    """
    if nodes is None:
        nodes = np.arange(graph.n)
        sub = graph
    else:
        nodes = np.asarray(sorted(set(int(v) for v in nodes)), dtype=np.int64)
        sub = graph.subgraph(nodes)
    size = len(nodes)
    if size == 0:
        raise GraphError("empty node set has no Fourier basis")
    if not is_connected(sub):
        comps = connected_components(sub)
        raise DisconnectedGraphError(
            f"subgraph is disconnected ({len(comps)} components)",
            components=[tuple(nodes[list(c.nodes)].tolist()) for c in comps],
        )
    if bandwidth is None:
        bandwidth = size
    if bandwidth < 1:
        raise ValueError("bandwidth must be at least 1")
    if size == 1:
        eig = EigenPairs(np.zeros(1), np.ones((1, 1)))
    else:
        eig = sym_eig(laplacian(sub), method=method)
        vectors = eig.vectors.copy()
        vectors[:, 0] = 1.0 / np.sqrt(size)
        values = eig.values.copy()
        values[0] = 0.0
        eig = EigenPairs(values, vectors)
    return FourierBasis(nodes, eig, min(int(bandwidth), size))


def spectral_energy_ratio(graph: Graph, x, bandwidth: int) -> float:
    """Fraction of the energy of ``x`` in the first ``bandwidth`` Fourier modes."""
    x = np.asarray(x, dtype=float)
    if x.shape != (graph.n,):
        raise GraphError(f"signal of shape {x.shape} does not match {graph.n} nodes")
    total = float(x @ x)
    if total == 0.0:
        raise ValueError("zero signal has no spectral energy distribution")
    coeffs = gft(graph, bandwidth).matrix.T @ x
    return float(min(1.0, coeffs @ coeffs / total))


def write_eigenpairs_csv(path, eig: EigenPairs):
    """Values on the first row, then one row per vector entry (columns = vectors)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([repr(float(v)) for v in eig.values])
        for row in eig.vectors:
            w.writerow([repr(float(v)) for v in row])


def read_eigenpairs_csv(path) -> EigenPairs:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    return EigenPairs(np.array(rows[0]), np.array(rows[1:]))
