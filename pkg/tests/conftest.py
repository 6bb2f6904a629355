import numpy as np
import pytest
from hypothesis import strategies as st

from gwdict.graph import build_graph

ACCEPTANCE_LINES = []


@st.composite
def connected_graphs(draw, min_nodes=2, max_nodes=24, weighted=False):
    """Random spanning tree plus random extra edges, so always connected."""
    n = draw(st.integers(min_nodes, max_nodes))
    edges = set()
    for v in range(1, n):
        u = draw(st.integers(0, v - 1))
        edges.add((u, v))
    extra = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=2 * n))
    for a, b in extra:
        if a != b:
            edges.add((min(a, b), max(a, b)))
    edges = sorted(edges)
    if weighted:
        ws = draw(st.lists(st.floats(0.1, 10.0), min_size=len(edges), max_size=len(edges)))
        return build_graph(n, [(j, k, w) for (j, k), w in zip(edges, ws)])
    return build_graph(n, edges)


@pytest.fixture
def path4():
    return build_graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
