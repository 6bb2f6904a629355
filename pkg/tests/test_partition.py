import numpy as np
import pytest
from hypothesis import given, settings

from conftest import connected_graphs
from gwdict.exceptions import DisconnectedGraphError, GraphError, InvariantError
from gwdict.graph import Piece, build_graph
from gwdict.partition import Bisection, bisect, verify_bisection
from gwdict.signals import gen_graph
from oracles import edge_triples, is_connected_subset


def test_single_edge():
    b = bisect(build_graph(2, [(0, 1)]))
    assert (b.left.nodes, b.right.nodes) == ((1,), (0,))
    assert b.balance_gap == 0


def test_path4():
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    b = bisect(g)
    assert (b.left.nodes, b.right.nodes) == ((2, 3), (0, 1))
    assert b.hubs == (0, 3)
    assert b.median == 1.0
    cert = verify_bisection(g, b)
    assert (cert.connected_left, cert.connected_right, cert.gap, cert.bound) == (True, True, 0, 2)


def test_triangle(triangle):
    b = bisect(triangle)
    assert sorted([len(b.left), len(b.right)]) == [1, 2]
    assert b.balance_gap == 1
    cert = verify_bisection(triangle, b)
    assert cert.connected_left and cert.connected_right


def test_star_sides_connected():
    g = gen_graph("star", leaves=5)
    b = bisect(g)
    cert = verify_bisection(g, b)
    assert cert.connected_left and cert.connected_right
    assert cert.bound_holds


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10, 16, 32, 64, 100])
def test_even_paths_split_evenly(n):
    b = bisect(gen_graph("path", n=n))
    assert b.balance_gap == 0


def test_too_small():
    with pytest.raises(GraphError, match="too small"):
        bisect(build_graph(1, []))


def test_disconnected_names_components():
    with pytest.raises(DisconnectedGraphError) as info:
        bisect(build_graph(4, [(0, 1), (2, 3)]))
    assert [tuple(c) for c in info.value.components] == [(0, 1), (2, 3)]


def test_verify_flags_disconnected_side(path4):
    bad = Bisection(
        left=Piece((0, 2)), right=Piece((1, 3)), boundary_component_size=1,
        balance_gap=0, median=0.0, hubs=(0, 3),
    )
    with pytest.raises(InvariantError, match="connectivity"):
        verify_bisection(path4, bad)
    cert = verify_bisection(path4, bad, strict=False)
    assert not cert.connected_left


def test_verify_flags_overlap_and_gap(path4):
    overlap = Bisection(Piece((0, 1, 2)), Piece((2, 3)), 1, 1, 0.0, (0, 3))
    with pytest.raises(InvariantError, match="partition"):
        verify_bisection(path4, overlap)
    too_wide = Bisection(Piece((0,)), Piece((1, 2, 3)), 0, 2, 0.0, (0, 3))
    with pytest.raises(InvariantError, match="balance bound"):
        verify_bisection(path4, too_wide)


@settings(max_examples=150, deadline=None)
@given(connected_graphs(min_nodes=2, max_nodes=40))
def test_guarantees_on_random_graphs(g):
    b = bisect(g)
    cert = verify_bisection(g, b)
    assert cert.bound_holds
    triples = edge_triples(g)
    assert is_connected_subset(g.n, triples, b.left.nodes)
    assert is_connected_subset(g.n, triples, b.right.nodes)
    assert set(b.left.nodes) | set(b.right.nodes) == set(range(g.n))


@settings(max_examples=40, deadline=None)
@given(connected_graphs(min_nodes=2, max_nodes=30, weighted=True))
def test_weighted_hubs_also_certified(g):
    verify_bisection(g, bisect(g, weighted=True))


def test_deterministic():
    g = gen_graph("random_geometric", seed=4, n=120)
    a, b = bisect(g), bisect(g)
    assert a == b


def test_hub_pair_is_a_diameter_pair():
    g = gen_graph("erdos_renyi", seed=9, n=60)
    from oracles import bfs_distances

    d = bfs_distances(g.n, edge_triples(g))
    b = bisect(g)
    assert d[b.hubs] == d.max()
    ties = np.argwhere(d == d.max())
    assert tuple(ties[0]) == b.hubs
