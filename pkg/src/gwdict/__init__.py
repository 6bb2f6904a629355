"""Haar-like graph wavelets and piecewise-smooth graph dictionaries."""

__version__ = "0.1.0"

from .approx import (
    approximation_curve,
    localize,
    nmse,
    nonlinear_approx,
    omp,
    pc_sparsity_bound,
    ps_sparsity_bound,
    reconstruct,
    snr_db,
)
from .dictionary import (
    Dictionary,
    build_pc_dict,
    build_ps_dict,
    delta_dict,
    dict_stats,
    epsilon_par,
    fourier_dict,
)
from .estimators import GraphDictionaryCoder, HaarGraphWavelet
from .exceptions import ConvergenceError, DisconnectedGraphError, GraphError, InvariantError
from .graph import Graph, Piece, build_graph, cut_count, incidence, laplacian
from .multires import PartitionTree, WaveletBasis, analyze, decompose, synthesize, wavelet_basis
from .partition import Bisection, bisect, verify_bisection
from .spectral import gft, jacobi_eig, sym_eig

__all__ = [name for name in dir() if not name.startswith("_")]
