"""Synthetic graphs and graph signals.

All randomness flows through an explicitly passed :class:`numpy.random.Generator`
(or a seed turned into one), so every generator is a pure function of its
inputs and seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GraphError
from .graph import Graph, Piece, build_graph, is_connected
from .multires import PartitionTree
from .spectral import gft

__all__ = [
    "PcSignal",
    "PblSignal",
    "gen_pieces",
    "grow_pieces",
    "gen_pc",
    "gen_pbl",
    "gen_one_piece",
    "add_noise",
    "gen_graph",
    "GRAPH_FAMILIES",
]

MAX_RETRIES = 100


def _rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


@dataclass(frozen=True)
class PcSignal:
    """Piecewise-constant signal ``sum_c a_c 1_{S_c}``."""

    values: np.ndarray
    pieces: tuple
    piece_values: np.ndarray


@dataclass(frozen=True)
class PblSignal:
    """Piecewise-bandlimited signal: per piece, a combination of the piece's
    first ``bandwidth`` Laplacian eigenvectors."""

    values: np.ndarray
    pieces: tuple
    bandwidth: int
    coefficients: tuple


def _frontier(tree, depth):
    return [i for i, t in enumerate(tree.nodes) if t.level == depth or (t.is_leaf and t.level < depth)]


def gen_pieces(tree: PartitionTree, n_pieces: int, rng=None):
    """Tree-consistent partition into ``n_pieces`` connected pieces.

    Cuts the tree at the shallowest level whose frontier has at least
    ``n_pieces`` pieces, then merges random sibling pairs back into their
    parent until exactly ``n_pieces`` remain. Pieces are returned sorted by
    smallest node.
    """
    rng = _rng(rng)
    if not 1 <= n_pieces <= tree.n:
        raise ValueError(f"number of pieces must be in [1, {tree.n}], got {n_pieces}")
    depth = 0
    front = _frontier(tree, depth)
    while len(front) < n_pieces:
        depth += 1
        front = _frontier(tree, depth)
    front = set(front)
    while len(front) > n_pieces:
        pairs = sorted(
            i
            for i in front
            if tree.nodes[i].parent is not None
            and set(tree.nodes[tree.nodes[i].parent].children) <= front
            and tree.nodes[tree.nodes[i].parent].children[0] == i
        )
        first = pairs[int(rng.integers(len(pairs)))]
        parent = tree.nodes[first].parent
        front.difference_update(tree.nodes[parent].children)
        front.add(parent)
    pieces = [tree.nodes[i].piece for i in front]
    return sorted(pieces, key=lambda p: p.min)


def grow_pieces(graph: Graph, n_pieces: int, rng=None):
    """Arbitrary connected pieces grown by randomized multi-source BFS.

    Unlike :func:`gen_pieces` the pieces need not align with any partition tree.
    """
    rng = _rng(rng)
    if not 1 <= n_pieces <= graph.n:
        raise ValueError(f"number of pieces must be in [1, {graph.n}], got {n_pieces}")
    adj = graph.adjacency
    label = np.full(graph.n, -1, dtype=np.int64)
    seeds = rng.choice(graph.n, size=n_pieces, replace=False)
    label[seeds] = np.arange(n_pieces)
    frontier = [(int(s), c) for c, s in enumerate(seeds)]
    while frontier:
        idx = int(rng.integers(len(frontier)))
        u, c = frontier[idx]
        nbrs = [int(v) for v in adj.indices[adj.indptr[u] : adj.indptr[u + 1]] if label[v] < 0]
        if not nbrs:
            frontier[idx] = frontier[-1]
            frontier.pop()
            continue
        v = nbrs[int(rng.integers(len(nbrs)))]
        label[v] = c
        frontier.append((v, c))
    if np.any(label < 0):
        raise GraphError("graph is disconnected; some nodes were not reached")
    pieces = [Piece(tuple(np.flatnonzero(label == c).tolist())) for c in range(n_pieces)]
    return sorted(pieces, key=lambda p: p.min)


def _piece_values(n_pieces, rng, distinct):
    span = max(8, -(-n_pieces // 2)) if distinct else 8
    pool = np.concatenate([np.arange(-span, 0), np.arange(1, span + 1)])
    if distinct:
        return rng.choice(pool, size=n_pieces, replace=False).astype(float)
    return rng.choice(pool, size=n_pieces).astype(float)


def gen_pc(pieces, rng=None, distinct: bool = False, n=None) -> PcSignal:
    """Piecewise-constant signal with small nonzero integer piece values.

    ``distinct=True`` makes all piece values different (widening the value
    range beyond +-8 when there are more than 16 pieces).
    """
    rng = _rng(rng)
    pieces = tuple(pieces)
    if n is None:
        n = sum(len(p) for p in pieces)
    values = _piece_values(len(pieces), rng, distinct)
    x = np.zeros(n)
    for a, p in zip(values, pieces):
        x[list(p)] = a
    return PcSignal(x, pieces, values)


def gen_pbl(graph: Graph, pieces, bandwidth: int, rng=None) -> PblSignal:
    """Piecewise-bandlimited signal with standard normal spectral coefficients."""
    rng = _rng(rng)
    if bandwidth < 1:
        raise ValueError("bandwidth must be at least 1")
    pieces = tuple(pieces)
    x = np.zeros(graph.n)
    coeffs = []
    for p in pieces:
        fb = gft(graph, bandwidth, nodes=list(p))
        c = rng.standard_normal(fb.bandwidth)
        x[fb.nodes] += fb.matrix @ c
        coeffs.append(c)
    return PblSignal(x, pieces, int(bandwidth), tuple(coeffs))


def gen_one_piece(tree: PartitionTree, bandwidth: int, rng=None, min_size=2, max_size=None):
    """A signal supported on one random tree piece and smooth on it.

    Returns ``(x, piece)``; the piece is drawn uniformly among tree pieces
    whose size lies in ``[min_size, max_size]``.
    """
    rng = _rng(rng)
    max_size = tree.n if max_size is None else max_size
    choices = [t.piece for t in tree.nodes if min_size <= len(t.piece) <= max_size]
    if not choices:
        raise ValueError("no tree piece in the requested size range")
    piece = choices[int(rng.integers(len(choices)))]
    sig = gen_pbl(tree.graph, [piece], bandwidth, rng)
    return sig.values, piece


def add_noise(x, sigma: float, rng=None):
    """``x`` plus i.i.d. Gaussian noise of standard deviation ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    rng = _rng(rng)
    x = np.asarray(x, dtype=float)
    if sigma == 0:
        return x.copy()
    return x + sigma * rng.standard_normal(x.shape)


def _path(n, **_):
    return n, [(i, i + 1) for i in range(n - 1)]


def _ring(n, **_):
    if n < 3:
        raise ValueError("a ring needs at least 3 nodes")
    return n, [(i, (i + 1) % n) for i in range(n)]


def _grid(rows, cols=None, **_):
    cols = rows if cols is None else cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return rows * cols, edges


def _star(leaves, **_):
    return leaves + 1, [(0, i) for i in range(1, leaves + 1)]


def _random_geometric(n, radius=None, rng=None, **_):
    if radius is None:
        radius = 1.5 * np.sqrt(np.log(max(n, 2)) / (np.pi * n))
    pts = rng.random((n, 2))
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    j, k = np.nonzero(np.triu(d2 <= radius * radius, k=1))
    return n, list(zip(j.tolist(), k.tolist()))


def _erdos_renyi(n, p=None, rng=None, **_):
    if p is None:
        p = min(1.0, 2.0 * np.log(max(n, 2)) / n)
    mask = np.triu(rng.random((n, n)) < p, k=1)
    j, k = np.nonzero(mask)
    return n, list(zip(j.tolist(), k.tolist()))


GRAPH_FAMILIES = {
    "path": _path,
    "ring": _ring,
    "grid": _grid,
    "star": _star,
    "random_geometric": _random_geometric,
    "erdos_renyi": _erdos_renyi,
}
_RANDOM = {"random_geometric", "erdos_renyi"}


def gen_graph(family: str, seed=None, weights: str = "unit", **params) -> Graph:
    """Connected synthetic graph.

    Parameters
    ----------
    family : {"path", "ring", "grid", "star", "random_geometric", "erdos_renyi"}
    seed : int or Generator, optional
    weights : {"unit", "random"}
        ``"random"`` draws edge weights uniformly from [0.5, 2).
    **params
        ``n`` for path/ring/random families, ``rows``/``cols`` for grid,
        ``leaves`` for star, ``radius`` for random_geometric, ``p`` for
        erdos_renyi.

    Raises
    ------
    GraphError
        If a random family is still disconnected after 100 draws.
    """
    if family not in GRAPH_FAMILIES:
        raise ValueError(f"unknown graph family {family!r}; choose from {sorted(GRAPH_FAMILIES)}")
    rng = _rng(seed)
    make = GRAPH_FAMILIES[family]
    for _ in range(MAX_RETRIES if family in _RANDOM else 1):
        n, edges = make(rng=rng, **params)
        if weights == "random":
            w = rng.uniform(0.5, 2.0, size=len(edges))
            edges = [(j, k, float(x)) for (j, k), x in zip(edges, w)]
        elif weights != "unit":
            raise ValueError(f"unknown weights mode {weights!r}")
        g = build_graph(n, edges)
        if is_connected(g):
            return g
    raise GraphError(f"could not draw a connected {family} graph with {params} in {MAX_RETRIES} tries")
