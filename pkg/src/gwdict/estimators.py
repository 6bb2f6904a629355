"""scikit-learn style wrappers.

Both estimators take the graph as a constructor parameter and treat each row
of ``X`` as one signal on its nodes, so they drop into ``Pipeline`` and
``clone`` like any other transformer.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .approx import omp, reconstruct
from .dictionary import build_pc_dict, build_ps_dict, delta_dict, fourier_dict
from .graph import Graph
from .multires import decompose, wavelet_basis

__all__ = ["HaarGraphWavelet", "GraphDictionaryCoder", "check_graph", "check_signals"]

DICT_KINDS = ("pc", "ps", "gft", "delta")


def check_graph(graph):
    if not isinstance(graph, Graph):
        raise TypeError(f"expected a gwdict Graph, got {type(graph).__name__}")
    return graph


def check_signals(X, n):
    """2-D float array with one length-``n`` signal per row."""
    X = check_array(X, dtype=np.float64)
    if X.shape[1] != n:
        raise ValueError(f"X has {X.shape[1]} features but the graph has {n} nodes")
    return X


class HaarGraphWavelet(TransformerMixin, BaseEstimator):
    """Orthonormal Haar-like wavelet transform on a fixed graph.

    Parameters
    ----------
    graph : Graph
        Connected graph whose nodes index the features.
    weighted : bool, default=False
        Use weighted geodesics when choosing bisection hubs.
    n_jobs : int, optional
        Threads for building the partition tree.

    Attributes
    ----------
    tree_ : PartitionTree
    basis_ : WaveletBasis
    n_features_in_ : int
    """

    def __init__(self, graph=None, weighted=False, n_jobs=None):
        self.graph = graph
        self.weighted = weighted
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        graph = check_graph(self.graph)
        if X is not None:
            check_signals(X, graph.n)
        self.tree_ = decompose(graph, n_jobs=self.n_jobs, weighted=self.weighted)
        self.basis_ = wavelet_basis(self.tree_)
        self.n_features_in_ = graph.n
        return self

    def transform(self, X):
        """Wavelet coefficients, one row per signal."""
        check_is_fitted(self, "basis_")
        X = check_signals(X, self.n_features_in_)
        return np.asarray((self.basis_.matrix.T @ X.T).T)

    def inverse_transform(self, A):
        check_is_fitted(self, "basis_")
        A = check_signals(A, self.n_features_in_)
        return np.asarray((self.basis_.matrix @ A.T).T)


class GraphDictionaryCoder(TransformerMixin, BaseEstimator):
    """Sparse codes over a graph dictionary, computed by orthogonal matching pursuit.

    Parameters
    ----------
    graph : Graph
    kind : {"pc", "ps", "gft", "delta"}, default="ps"
        Piecewise-constant or piecewise-smooth multiscale dictionary, or one
        of the two orthonormal baselines.
    bandwidth : int, default=10
        Eigenvectors per piece for ``kind="ps"``.
    n_nonzero_coefs : int, optional
        Atom budget per signal. Defaults to the number of nodes.
    tol : float, default=1e-9
        Relative residual at which pursuit stops.
    n_jobs : int, optional
        Threads for building the tree and the per-piece eigenbases.
    """

    def __init__(self, graph=None, kind="ps", bandwidth=10, n_nonzero_coefs=None, tol=1e-9, n_jobs=None):
        self.graph = graph
        self.kind = kind
        self.bandwidth = bandwidth
        self.n_nonzero_coefs = n_nonzero_coefs
        self.tol = tol
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        graph = check_graph(self.graph)
        if self.kind not in DICT_KINDS:
            raise ValueError(f"kind must be one of {DICT_KINDS}, got {self.kind!r}")
        if X is not None:
            check_signals(X, graph.n)
        if self.kind in ("pc", "ps"):
            self.tree_ = decompose(graph, n_jobs=self.n_jobs)
            if self.kind == "pc":
                self.dictionary_ = build_pc_dict(self.tree_)
            else:
                self.dictionary_ = build_ps_dict(self.tree_, self.bandwidth, n_jobs=self.n_jobs)
        elif self.kind == "gft":
            self.tree_ = None
            self.dictionary_ = fourier_dict(graph)
        else:
            self.tree_ = None
            self.dictionary_ = delta_dict(graph.n)
        self.components_ = self.dictionary_.matrix.T.tocsr()
        self.n_features_in_ = graph.n
        return self

    def _budget(self):
        return self.n_nonzero_coefs if self.n_nonzero_coefs is not None else self.n_features_in_

    def transform(self, X):
        """Dense ``(n_samples, n_atoms)`` code matrix."""
        check_is_fitted(self, "dictionary_")
        X = check_signals(X, self.n_features_in_)
        n_atoms = len(self.dictionary_)
        codes = np.zeros((X.shape[0], n_atoms))
        for i, x in enumerate(X):
            if not np.any(x):
                continue
            codes[i] = omp(self.dictionary_, x, self._budget(), self.tol).to_dense(n_atoms)
        return codes

    def inverse_transform(self, codes):
        check_is_fitted(self, "dictionary_")
        codes = check_array(codes, dtype=np.float64)
        return np.asarray(self.components_.T @ codes.T).T

    def denoise(self, X, sigma):
        """Pursue each row only down to the expected noise norm ``sigma * sqrt(N)``."""
        check_is_fitted(self, "dictionary_")
        X = check_signals(X, self.n_features_in_)
        out = np.zeros_like(X)
        for i, y in enumerate(X):
            ynorm = np.linalg.norm(y)
            if ynorm == 0:
                continue
            tol = sigma * np.sqrt(len(y)) / ynorm if sigma else self.tol
            out[i] = reconstruct(self.dictionary_, omp(self.dictionary_, y, self._budget(), tol))
        return out
