import numpy as np
import pytest
from hypothesis import strategies as st

from ndpool.generators import gen_ring
from ndpool.graph import Graph


def edge_graph(n, edges, w=1.0):
    a = np.zeros((n, n))
    for i, j in edges:
        a[i, j] = a[j, i] = w
    return Graph(a)


@pytest.fixture
def path3():
    return edge_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def cycle4():
    return gen_ring(4)


@pytest.fixture
def triangle():
    return edge_graph(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def k4():
    return edge_graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


def random_weighted(n, p, seed, connected=False):
    """Uniform(0.1, 1) weights on a G(n, p) skeleton, optionally chained to be connected."""
    rng = np.random.default_rng(seed)
    mask = np.triu(rng.random((n, n)) < p, k=1)
    if connected:
        perm = rng.permutation(n)
        mask[np.minimum(perm[:-1], perm[1:]), np.maximum(perm[:-1], perm[1:])] = True
    a = np.where(mask, rng.uniform(0.1, 1.0, (n, n)), 0.0)
    return Graph(a + a.T)


@st.composite
def graphs(draw, min_n=2, max_n=12, connected=False):
    n = draw(st.integers(min_n, max_n))
    p = draw(st.floats(0.1, 0.9))
    seed = draw(st.integers(0, 2**31 - 1))
    return random_weighted(n, p, seed, connected=connected)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
