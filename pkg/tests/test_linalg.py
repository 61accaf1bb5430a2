import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import graphs
from ndpool.graph import laplacian, sym_laplacian
from ndpool.generators import gen_ring
from ndpool.linalg import (
    NotConvergedError,
    Singular,
    eigh,
    jacobi_eigh,
    matmul,
    power_iteration,
    pseudo_inverse,
    solve_sym,
)


def random_psd(n, seed):
    b = np.random.default_rng(seed).normal(size=(n, n))
    return b @ b.T


def random_sym(n, seed):
    b = np.random.default_rng(seed).normal(size=(n, n))
    return b + b.T


# -- matmul --

def test_matmul_identity_and_hand_product():
    m = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(matmul(np.eye(3), m), m)
    assert np.array_equal(matmul([[1, 2], [3, 4]], [[1], [1]]), [[3], [7]])


def test_matmul_associative():
    rng = np.random.default_rng(1)
    a, b, c = (rng.normal(size=(5, 5)) for _ in range(3))
    assert np.allclose(matmul(matmul(a, b), c), matmul(a, matmul(b, c)), atol=1e-12, rtol=0)


def test_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


# -- power iteration --

def test_power_iteration_diagonal():
    lam, v = power_iteration(np.diag([1.0, 3.0]))
    assert lam == pytest.approx(3.0, abs=1e-10)
    assert np.allclose(v, [0.0, 1.0], atol=1e-5)


def test_power_iteration_bipartite_sym_laplacian():
    lam, _ = power_iteration(sym_laplacian(gen_ring(4)))
    assert lam == pytest.approx(2.0, abs=1e-9)


def test_power_iteration_matches_jacobi_on_spd():
    m = random_psd(8, 3) + np.eye(8)
    lam, v = power_iteration(m)
    assert lam == pytest.approx(jacobi_eigh(m).eigenvalues[0], abs=1e-8)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert v[np.argmax(np.abs(v))] > 0


def test_power_iteration_is_deterministic_and_reports_steps():
    m = random_psd(6, 2)
    a = power_iteration(m, seed=5, return_iterations=True)
    b = power_iteration(m, seed=5, return_iterations=True)
    assert a[0] == b[0] and np.array_equal(a[1], b[1]) and a[2] == b[2] >= 1


def test_power_iteration_reports_non_convergence():
    # a nearly tied top pair cannot settle within two steps
    m = np.diag([1.0, 0.999999, 0.0])
    with pytest.raises(NotConvergedError):
        power_iteration(m, tol=1e-16, max_iter=2)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 32), st.integers(0, 10**6))
def test_power_iteration_agrees_with_jacobi(n, seed):
    m = random_psd(n, seed)
    lam, _ = power_iteration(m, max_iter=20000)
    top = jacobi_eigh(m).eigenvalues[0]
    assert abs(lam - top) <= 1e-8 * max(1.0, top)


# -- Jacobi --

def test_jacobi_diagonal_and_cycle():
    assert np.allclose(jacobi_eigh(np.diag([1.0, 4.0, 0.0])).eigenvalues, [4, 1, 0])
    w = jacobi_eigh(laplacian(gen_ring(4))).eigenvalues
    assert np.allclose(w, [4, 2, 2, 0], atol=1e-12)


def test_jacobi_rejects_asymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_jacobi_reconstruction_and_order(n):
    m = random_sym(n, n)
    spec = jacobi_eigh(m)
    u, w = spec.eigenvectors, spec.eigenvalues
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(np.linalg.norm(u, axis=0), 1.0)
    assert np.max(np.abs(m - (u * w) @ u.T)) < 1e-9 * np.max(np.abs(m))


def test_jacobi_matches_lapack():
    m = random_sym(30, 7)
    assert np.allclose(jacobi_eigh(m).eigenvalues, eigh(m).eigenvalues, atol=1e-10)


@settings(max_examples=50, deadline=None)
@given(graphs(1, 16))
def test_laplacian_spectrum_nonnegative_with_zero(g):
    w = jacobi_eigh(laplacian(g)).eigenvalues
    assert w.min() >= -1e-9
    assert abs(w[-1]) < 1e-9


# -- solve_sym --

def test_solve_identity_and_scalar():
    b = np.array([[1.0], [2.0], [3.0]])
    assert np.array_equal(solve_sym(np.eye(3), b), b)
    assert np.allclose(solve_sym(np.array([[2.0]]), np.array([[-1.0, -1.0]])), [[-0.5, -0.5]])


def test_solve_singular_laplacian():
    res = solve_sym(laplacian(gen_ring(5)), np.ones(5))
    assert isinstance(res, Singular)
    assert not res


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_sym(np.eye(3), np.ones(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10**6))
def test_solve_residual(n, seed):
    m = random_psd(n, seed) + 0.1 * np.eye(n)
    rhs = np.random.default_rng(seed + 1).normal(size=(n, 3))
    x = solve_sym(m, rhs)
    assert not isinstance(x, Singular)
    assert np.linalg.norm(m @ x - rhs) <= 1e-8 * np.linalg.norm(rhs)


# -- pseudo-inverse --

def test_pinv_invertible_matches_solve():
    m = random_psd(6, 4) + np.eye(6)
    assert np.allclose(pseudo_inverse(m), solve_sym(m, np.eye(6)), atol=1e-8)


def test_pinv_zero_and_path():
    assert np.array_equal(pseudo_inverse(np.zeros((3, 3))), np.zeros((3, 3)))
    lap = np.array([[1.0, -1.0], [-1.0, 1.0]])
    assert np.max(np.abs(lap @ pseudo_inverse(lap) @ lap - lap)) < 1e-10


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@settings(max_examples=40, deadline=None)
@given(graphs(2, 14))
def test_pinv_moore_penrose_identities(method, g):
    m = laplacian(g)
    p = pseudo_inverse(m, method=method)
    assert np.allclose(m @ p @ m, m, atol=1e-8)
    assert np.allclose(p @ m @ p, p, atol=1e-8)
    assert np.allclose((m @ p).T, m @ p, atol=1e-8)
    assert np.allclose((p @ m).T, p @ m, atol=1e-8)
