"""Sparse approximation: nonlinear approximation, orthogonal matching pursuit,
error metrics, denoising-based localization and the sparsity bounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dictionary import Dictionary
from .graph import Graph, cut_count
from .multires import PartitionTree, WaveletBasis

__all__ = [
    "SparseCode",
    "ApproxReport",
    "nonlinear_approx",
    "omp",
    "reconstruct",
    "nmse",
    "snr_db",
    "localize",
    "approximation_curve",
    "pc_sparsity_bound",
    "ps_sparsity_bound",
    "l0",
    "SNR_CAP_DB",
    "EXACT_NMSE",
    "L0_TOL",
]

SNR_CAP_DB = 300.0
# Relative error 1e-12: anything below is rounding residue of an exact fit.
EXACT_NMSE = 1e-24
L0_TOL = 1e-10
_RANK_TOL = 1e-10
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class SparseCode:
    """Output of :func:`omp`.

    ``residual_history[t]`` is the residual norm after ``t`` selected atoms
    (so ``residual_history[0] == ||x||``).
    """

    support: tuple
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    residual_history: tuple

    def to_dense(self, n_atoms):
        a = np.zeros(n_atoms)
        a[list(self.support)] = self.coefficients
        return a


@dataclass(frozen=True)
class ApproxReport:
    method: str
    budget: int
    nmse: float
    snr_db: float


def _matrix(d):
    if isinstance(d, (Dictionary, WaveletBasis)):
        return d.matrix
    if sp.issparse(d):
        return d.tocsc()
    return np.asarray(d, dtype=float)


def _column(mat, j):
    if sp.issparse(mat):
        return mat[:, j].toarray().ravel()
    return mat[:, j]


def l0(a, tol=L0_TOL):
    """Number of entries with magnitude above ``tol``."""
    return int(np.count_nonzero(np.abs(np.asarray(a)) > tol))


def nmse(x_hat, x) -> float:
    """``||x_hat - x||^2 / ||x||^2``."""
    x = np.asarray(x, dtype=float)
    ref = float(x @ x)
    if ref == 0.0:
        raise ValueError("NMSE is undefined for a zero reference signal")
    err = np.asarray(x_hat, dtype=float) - x
    return float(err @ err / ref)


def snr_db(x_hat, x) -> float:
    """``-10 log10(nmse)``; reconstructions with NMSE at or below
    :data:`EXACT_NMSE` count as exact and report :data:`SNR_CAP_DB`."""
    return _snr_from_nmse(nmse(x_hat, x))


def _snr_from_nmse(e):
    if e <= EXACT_NMSE:
        return SNR_CAP_DB
    return float(-10.0 * np.log10(e))


def _report(method, budget, x_hat, x):
    return ApproxReport(method, int(budget), nmse(x_hat, x), snr_db(x_hat, x))


def nonlinear_approx(w, x, m: int, refit: bool = False):
    """Keep the ``m`` largest-magnitude analysis coefficients.

    For an orthonormal basis this is the best ``m``-term approximation.
    ``refit=True`` replaces the kept coefficients by the least-squares fit on
    the chosen atoms, which is what a redundant dictionary needs (and is a
    no-op for an orthonormal one).

    Returns
    -------
    x_hat : ndarray
    report : ApproxReport
    """
    mat = _matrix(w)
    x = np.asarray(x, dtype=float)
    n_atoms = mat.shape[1]
    if not 1 <= m <= n_atoms:
        raise ValueError(f"budget m={m} outside [1, {n_atoms}]")
    a = np.asarray(mat.T @ x).ravel()
    keep = np.argsort(-np.abs(a), kind="stable")[:m]
    if refit:
        sub = mat[:, keep]
        sub = sub.toarray() if sp.issparse(sub) else sub
        coef, *_ = np.linalg.lstsq(sub, x, rcond=None)
        x_hat = sub @ coef
    else:
        kept = np.zeros_like(a)
        kept[keep] = a[keep]
        x_hat = np.asarray(mat @ kept).ravel()
    return x_hat, _report("nla", m, x_hat, x)


def omp(d, x, max_atoms: int, tol: float = 1e-9) -> SparseCode:
    """Orthogonal matching pursuit.

    Each step selects the atom with the largest ``|<r, d_j>| / ||d_j||``
    (ties go to the lower index), projects ``x`` onto the span of all
    selected atoms and updates the residual. Stops once
    ``||r|| / ||x|| <= tol`` or ``max_atoms`` atoms are selected. A candidate
    that is numerically in the span of the selected atoms is discarded and
    the next best is tried.
    """
    mat = _matrix(d)
    x = np.asarray(x, dtype=float)
    n, n_atoms = mat.shape
    if x.shape != (n,):
        raise ValueError(f"signal of shape {x.shape} does not match dictionary with {n} rows")
    if max_atoms < 1:
        raise ValueError("max_atoms must be at least 1")
    xnorm = float(np.linalg.norm(x))
    if xnorm == 0.0:
        raise ValueError("cannot run pursuit on the zero signal")

    if sp.issparse(mat):
        col_norms = np.sqrt(np.asarray(mat.multiply(mat).sum(axis=0)).ravel())
    else:
        col_norms = np.linalg.norm(mat, axis=0)
    usable = col_norms > 0
    inv_norms = np.where(usable, 1.0 / np.where(usable, col_norms, 1.0), 0.0)

    budget = min(max_atoms, n_atoms, n)
    q = np.zeros((n, budget))
    support = []
    blocked = ~usable
    r = x.copy()
    history = [xnorm]
    rnorm = xnorm
    while len(support) < budget and rnorm / xnorm > tol:
        corr = np.abs(np.asarray(mat.T @ r).ravel()) * inv_norms
        corr[blocked] = -1.0
        best = corr.max()
        if best <= 1e-14 * xnorm:
            break
        j = int(np.flatnonzero(corr >= best * (1 - _TIE_RTOL))[0])
        atom = _column(mat, j) * inv_norms[j]
        k = len(support)
        u = atom.copy()
        for _ in range(2):
            u -= q[:, :k] @ (q[:, :k].T @ u)
        unorm = np.linalg.norm(u)
        if unorm < _RANK_TOL:
            blocked[j] = True
            continue
        q[:, k] = u / unorm
        support.append(j)
        blocked[j] = True
        r = r - q[:, k] * (q[:, k] @ r)
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)

    if support:
        sub = mat[:, support]
        sub = sub.toarray() if sp.issparse(sub) else np.asarray(sub)
        coef, *_ = np.linalg.lstsq(sub, x, rcond=None)
        rnorm = float(np.linalg.norm(x - sub @ coef))
    else:
        coef = np.zeros(0)
    return SparseCode(tuple(support), coef, rnorm, len(support), tuple(history))


def reconstruct(d, code: SparseCode):
    mat = _matrix(d)
    if not code.support:
        return np.zeros(mat.shape[0])
    return np.asarray(mat[:, list(code.support)] @ code.coefficients).ravel()


def localize(d, y, max_atoms=None, tol=None, sigma=None, truth=None):
    """Denoise ``y`` by sparse coding over ``d``.

    If ``tol`` is not given and the noise level ``sigma`` is, pursuit stops
    when the residual reaches the expected noise norm ``sigma * sqrt(N)``.
    The report compares against ``truth`` when provided, else against ``y``.
    """
    y = np.asarray(y, dtype=float)
    mat = _matrix(d)
    if max_atoms is None:
        max_atoms = mat.shape[0]
    if tol is None:
        tol = 1e-9 if not sigma else sigma * np.sqrt(len(y)) / np.linalg.norm(y)
    code = omp(mat, y, max_atoms, tol)
    x_hat = reconstruct(mat, code)
    ref = y if truth is None else np.asarray(truth, dtype=float)
    return x_hat, _report("omp", code.iterations, x_hat, ref)


def approximation_curve(d, x, budgets, strategy: str = "best"):
    """NMSE/SNR per budget for strategy ``"nla"``, ``"omp"`` or ``"best"``.

    ``"best"`` runs both and keeps the lower error at each budget. NLA on a
    redundant dictionary refits the kept atoms by least squares.
    """
    if strategy not in ("best", "nla", "omp"):
        raise ValueError(f"unknown strategy {strategy!r}")
    mat = _matrix(d)
    x = np.asarray(x, dtype=float)
    budgets = sorted(set(int(b) for b in budgets))
    if not budgets or budgets[0] < 1:
        raise ValueError("budgets must be positive integers")
    redundant = not (isinstance(d, Dictionary) and d.orthonormal)
    reports = []
    omp_curve = None
    if strategy in ("best", "omp"):
        code = omp(mat, x, max(budgets), tol=0.0)
        hist = np.asarray(code.residual_history)
        xnorm2 = float(x @ x)
        omp_curve = {}
        for b in budgets:
            rn = hist[min(b, len(hist) - 1)]
            e = float(rn * rn / xnorm2)
            omp_curve[b] = ApproxReport("omp", b, e, _snr_from_nmse(e))
    for b in budgets:
        cands = []
        if strategy in ("best", "nla"):
            m = min(b, mat.shape[1])
            cands.append(nonlinear_approx(mat, x, m, refit=redundant)[1])
            cands[-1] = ApproxReport("nla", b, cands[-1].nmse, cands[-1].snr_db)
        if omp_curve is not None:
            cands.append(omp_curve[b])
        reports.append(min(cands, key=lambda rep: (rep.nmse, rep.method)))
    return reports


def pc_sparsity_bound(graph: Graph, tree: PartitionTree, x) -> int:
    """``1 + cut_count(x) * depth``: wavelet/PC-dictionary sparsity bound."""
    return 1 + cut_count(graph, x) * tree.depth


def ps_sparsity_bound(graph: Graph, tree: PartitionTree, x_pc, bandwidth: int) -> int:
    """``1 + 2 K cut_count(x_pc) depth``: PS-dictionary sparsity bound."""
    return 1 + 2 * bandwidth * cut_count(graph, x_pc) * tree.depth
