"""Connectivity-preserving near-bisection of a connected graph.

The split is driven by two hub nodes at maximal geodesic distance. Each node
is scored by the difference of its distances to the hubs; nodes scoring above
the median go to one side, nodes scoring exactly the median form a boundary
set whose connected components are added (smallest first) until the side is
as close to half the graph as possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import DisconnectedGraphError, GraphError, InvariantError
from .graph import Graph, Piece, connected_components, geodesic_matrix, is_connected

__all__ = ["Bisection", "Certificate", "bisect", "verify_bisection"]


@dataclass(frozen=True)
class Bisection:
    """Result of :func:`bisect`.

    Attributes
    ----------
    left, right : Piece
        The two node sets. ``left`` is the side grown from the boundary
        components.
    boundary_component_size : int
        Size of the last boundary component added to ``left``; the balance
        guarantee is ``balance_gap <= 2 * boundary_component_size``.
    balance_gap : int
        ``abs(len(left) - len(right))``.
    median : float
        Threshold on the hub-distance difference that produced the split.
    hubs : tuple of int
        The two hub nodes.
    repaired : bool
        True if the raw split had a disconnected side and fragments were moved.
    adjusted : bool
        True if the boundary-component count differs from the plain argmin
        because the plain choice would break the balance guarantee.
    """

    left: Piece
    right: Piece
    boundary_component_size: int
    balance_gap: int
    median: float
    hubs: tuple
    repaired: bool = False
    adjusted: bool = False


class Certificate(NamedTuple):
    connected_left: bool
    connected_right: bool
    gap: int
    bound: int
    repaired: bool

    @property
    def bound_holds(self):
        return self.gap <= self.bound


def _hubs(dist):
    # first row-major maximum is the lexicographically smallest (i, j) with i < j
    flat = int(np.argmax(dist))
    i, j = divmod(flat, dist.shape[1])
    return (i, j) if i < j else (j, i)


def _split_at(graph, diff, p, tol=0.0):
    """Steps 4-8 for threshold ``p``; returns (left set, |C_m*|, adjusted) or None.

    ``m*`` minimizes ``|q_m - n/2|`` over the indices whose own component is
    at least that far from half (``|q_m - n/2| <= |C_m|``), which makes the
    balance guarantee hold. The component crossing ``n/2`` always qualifies.
    ``adjusted`` reports whether this restriction changed the plain argmin.
    ``tol`` widens the boundary ``diff == p`` for weighted (float) distances.
    """
    n = graph.n
    s1 = np.flatnonzero(diff > p + tol)
    s2 = np.flatnonzero(np.abs(diff - p) <= tol)
    comps = connected_components(graph, s2)
    half = n / 2
    q = len(s1)
    plain = certified = None
    for m, comp in enumerate(comps, start=1):
        q += len(comp)
        if q >= n:
            break
        score = abs(q - half)
        if plain is None or score < plain[0]:
            plain = (score, m)
        if score <= len(comp) and (certified is None or score < certified[0]):
            certified = (score, m)
    if plain is None:
        return None
    m_star = (certified or plain)[1]
    left = set(s1.tolist())
    for comp in comps[:m_star]:
        left.update(comp.nodes)
    return left, len(comps[m_star - 1]), m_star != plain[1]


def _repair(graph, left, right):
    """Move stray fragments across until both sides are connected.

    Each move removes one component from the source side and cannot add one
    to the destination (the fragment touches it), so the loop terminates.
    """
    left, right = set(left), set(right)
    repaired = False
    while True:
        moved = False
        for src, dst in ((left, right), (right, left)):
            comps = connected_components(graph, src)
            if len(comps) > 1:
                frag = comps[0]
                src.difference_update(frag.nodes)
                dst.update(frag.nodes)
                repaired = moved = True
                break
        if not moved:
            return left, right, repaired


def _bfs_fallback(graph, source):
    order = [source]
    seen = {source}
    adj = graph.adjacency
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in adj.indices[adj.indptr[u] : adj.indptr[u + 1]]:
            v = int(v)
            if v not in seen:
                seen.add(v)
                order.append(v)
    left = set(order[: graph.n // 2])
    right = set(order[graph.n // 2 :])
    return _repair(graph, left, right)


def bisect(graph: Graph, *, weighted: bool = False) -> Bisection:
    """Split a connected graph into two connected, nearly equal halves.

    The median of the hub-distance differences is ambiguous for an even
    number of nodes, so both the lower and upper median are tried and the
    more balanced split is kept (ties go to the lower threshold). A split
    whose sides are not connected is repaired, and repaired candidates are
    only used when no candidate is clean.

    Parameters
    ----------
    graph : Graph
        Connected graph with at least two nodes.
    weighted : bool
        Use weighted shortest paths (length ``1/w``) instead of hop counts.

    Raises
    ------
    GraphError
        If the graph has fewer than two nodes.
    DisconnectedGraphError
        If the graph is not connected.
    """
    if graph.n < 2:
        raise GraphError("graph too small to bisect (need at least 2 nodes)")
    if not is_connected(graph):
        comps = connected_components(graph)
        raise DisconnectedGraphError(
            f"cannot bisect a disconnected graph ({len(comps)} components)",
            components=[c.nodes for c in comps],
        )
    dist = geodesic_matrix(graph, weighted=weighted)
    vi, vj = _hubs(dist)
    diff = dist[vi] - dist[vj]
    # hop counts are exact integers; weighted path lengths need slack
    tol = 1e-9 * max(1.0, float(dist[vi, vj])) if weighted else 0.0
    ordered = np.sort(diff)
    n = graph.n
    medians = sorted({float(ordered[(n - 1) // 2]), float(ordered[n // 2])})

    everything = set(range(n))
    candidates = []
    for p in medians:
        split = _split_at(graph, diff, p, tol)
        if split is None:
            continue
        left, csize, adjusted = split
        right = everything - left
        left, right, repaired = _repair(graph, left, right)
        gap = abs(len(left) - len(right))
        candidates.append((repaired, gap, p, left, right, csize, adjusted))

    if candidates:
        repaired, gap, p, left, right, csize, adjusted = min(candidates, key=lambda c: c[:3])
    else:  # pragma: no cover - the upper median always yields a valid split
        left, right, repaired = _bfs_fallback(graph, vi)
        gap, p, csize, adjusted = abs(len(left) - len(right)), float("nan"), 0, False
    return Bisection(
        left=Piece(tuple(sorted(left))),
        right=Piece(tuple(sorted(right))),
        boundary_component_size=int(csize),
        balance_gap=int(gap),
        median=float(p),
        hubs=(int(vi), int(vj)),
        repaired=bool(repaired),
        adjusted=bool(adjusted),
    )


def verify_bisection(graph: Graph, b: Bisection, *, strict: bool = True) -> Certificate:
    """Check the partition, connectivity and balance guarantees of ``b``.

    Returns a :class:`Certificate`. With ``strict=True`` (default) any
    violated clause raises :class:`InvariantError` naming the clause.
    """
    left, right = set(b.left.nodes), set(b.right.nodes)
    if left & right:
        raise InvariantError(f"partition: sides overlap on {sorted(left & right)[:10]}")
    if left | right != set(range(graph.n)):
        missing = sorted(set(range(graph.n)) - (left | right))
        raise InvariantError(f"partition: sides do not cover the node set (missing {missing[:10]})")
    conn_left = len(left) > 0 and len(connected_components(graph, left)) == 1
    conn_right = len(right) > 0 and len(connected_components(graph, right)) == 1
    gap = abs(len(left) - len(right))
    cert = Certificate(conn_left, conn_right, gap, 2 * b.boundary_component_size, b.repaired)
    if strict:
        if not conn_left:
            raise InvariantError("connectivity: left side is not connected")
        if not conn_right:
            raise InvariantError("connectivity: right side is not connected")
        if gap != b.balance_gap:
            raise InvariantError(f"balance: recorded gap {b.balance_gap} != actual gap {gap}")
        if not cert.bound_holds:
            raise InvariantError(
                f"balance bound: gap {gap} exceeds 2 * boundary component size = {cert.bound}"
            )
    return cert
