import numpy as np
import pytest
from hypothesis import given, settings

from conftest import edge_graph, graphs, random_weighted
from ndpool.cut import top_eigenpair
from ndpool.generators import gen_grid, gen_ring
from ndpool.graph import (
    Graph,
    connected_components,
    disjoint_union,
    is_connected,
    laplacian,
    loopy_laplacian,
    normalized_adjacency,
    sym_laplacian,
    two_coloring,
)
from ndpool.kron import adjacency_from_laplacian
from ndpool.linalg import eigvalsh


def test_graph_validation():
    with pytest.raises(ValueError):
        Graph(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(ValueError):
        Graph(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(ValueError):
        Graph(np.array([[0.0, np.nan], [np.nan, 0.0]]))
    with pytest.raises(ValueError):
        Graph(np.ones((2, 3)))


def test_graph_is_immutable():
    g = gen_ring(4)
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = 5.0


def test_laplacian_examples(path3):
    assert np.array_equal(laplacian(edge_graph(2, [(0, 1)])), [[1, -1], [-1, 1]])
    assert np.array_equal(laplacian(path3), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]])
    assert np.array_equal(laplacian(Graph(np.zeros((3, 3)))), np.zeros((3, 3)))


def test_sym_laplacian_examples(cycle4):
    assert np.allclose(sym_laplacian(edge_graph(2, [(0, 1)])), [[1, -1], [-1, 1]])
    assert eigvalsh(sym_laplacian(cycle4))[0] == pytest.approx(2.0)
    ls = sym_laplacian(edge_graph(3, [(0, 1)]))
    assert np.all(np.isfinite(ls))
    assert ls[2, 2] == 1.0 and not np.any(ls[2, :2]) and not np.any(ls[:2, 2])


def test_isolated_node_normalized_row_is_zero():
    ahat = normalized_adjacency(edge_graph(3, [(0, 1)]))
    assert not np.any(ahat[2])


def test_loopy_laplacian_examples(path3):
    assert np.array_equal(loopy_laplacian(path3), laplacian(path3))
    assert np.array_equal(loopy_laplacian(Graph(np.array([[2.0]]))), [[4.0]])


@settings(max_examples=60, deadline=None)
@given(graphs(1, 10))
def test_loopy_round_trip_with_self_loops(g):
    a = g.adjacency.copy()
    np.fill_diagonal(a, np.linspace(0.0, 1.5, g.n))
    q = loopy_laplacian(Graph(a))
    assert np.allclose(adjacency_from_laplacian(q, loopy=True), a, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(graphs(1, 14))
def test_laplacian_properties(g):
    lap = laplacian(g)
    assert np.array_equal(lap, lap.T)
    assert np.allclose(lap.sum(axis=1), 0.0, atol=1e-10)
    assert np.array_equal(np.diag(lap), g.degrees)
    assert eigvalsh(lap).min() >= -1e-9
    w = eigvalsh(sym_laplacian(g))
    assert w.min() >= -1e-9 and w.max() <= 2 + 1e-9


def test_zero_multiplicity_equals_components():
    for seed in range(100):
        n = 4 + seed % 12
        g = random_weighted(n, 0.15, seed)
        zeros = int(np.sum(eigvalsh(laplacian(g)) < 1e-8))
        assert zeros == len(connected_components(g))


def test_connectivity_examples(path3):
    assert is_connected(path3)
    assert not is_connected(edge_graph(4, [(0, 1), (2, 3)]))
    assert is_connected(Graph(np.zeros((1, 1))))


def test_negligible_weight_is_no_edge():
    g = edge_graph(2, [(0, 1)], w=1e-16)
    assert not is_connected(g)


def test_two_coloring():
    assert two_coloring(gen_grid(3, 4)) is not None
    assert two_coloring(gen_ring(6)) is not None
    assert two_coloring(gen_ring(5)) is None
    colors = two_coloring(gen_ring(6))
    assert all(colors[i] != colors[(i + 1) % 6] for i in range(6))


@settings(max_examples=40, deadline=None)
@given(graphs(2, 12, connected=True))
def test_top_eigenvector_sign_pattern_survives_degree_rescaling(g):
    # v of L_s and D^{-1/2} v share signs because D^{-1/2} is positive
    _, v = top_eigenpair(sym_laplacian(g))
    scaled = v / np.sqrt(g.degrees)
    big = np.abs(v) > 1e-8
    assert np.array_equal(np.sign(v[big]), np.sign(scaled[big]))


def test_disjoint_union_examples(path3):
    x = np.arange(6.0).reshape(3, 2)
    u, ux, off = disjoint_union([path3], [x])
    assert np.array_equal(u.adjacency, path3.adjacency) and np.array_equal(ux, x)
    assert list(off) == [0, 3]

    e = edge_graph(2, [(0, 1)])
    u, ux, off = disjoint_union([e, e], [np.ones((2, 1)), np.zeros((2, 1))])
    expected = np.zeros((4, 4))
    expected[0, 1] = expected[1, 0] = expected[2, 3] = expected[3, 2] = 1.0
    assert np.array_equal(u.adjacency, expected)
    assert list(off) == [0, 2, 4]
    assert ux[:, 0].tolist() == [1, 1, 0, 0]


def test_disjoint_union_component_counts_add():
    gs = [random_weighted(n, 0.2, seed) for seed, n in enumerate([5, 8, 3, 11])]
    u, _, _ = disjoint_union(gs, [np.zeros((g.n, 1)) for g in gs])
    assert len(connected_components(u)) == sum(len(connected_components(g)) for g in gs)


def test_disjoint_union_feature_mismatch(path3):
    with pytest.raises(ValueError):
        disjoint_union([path3, path3], [np.zeros((3, 2)), np.zeros((3, 3))])
