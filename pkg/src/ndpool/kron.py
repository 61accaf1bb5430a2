"""Kron reduction, adjacency recovery, threshold sparsification and spectral diagnostics."""

from __future__ import annotations

import numpy as np

from .linalg import Singular, check_symmetric, eigh, eigvalsh, pseudo_inverse, solve_sym

DEFAULT_EPSILON = 1e-2
NONZERO_EIG_TOL = 1e-8
CLAMP_TOL = 1e-12
INVALID_WEIGHT_TOL = 1e-8


class InvalidLaplacianError(ValueError):
    pass


def kron_reduce(lap, keep, pivot_tol: float = 1e-10) -> np.ndarray:
    """Schur complement of a Laplacian onto the ``keep`` nodes.

    ``L_kk - L_kd L_dd^{-1} L_dk`` with ``d`` the dropped nodes. When ``L_dd``
    is singular (some dropped component never touches a kept node) the
    Moore-Penrose inverse is used instead.
    """
    lap = np.asarray(lap, dtype=np.float64)
    check_symmetric(lap)
    n = lap.shape[0]
    keep = np.unique(np.asarray(keep, dtype=np.intp))
    if keep.size == 0 or keep.size == n:
        raise ValueError("keep must be a non-empty proper subset of the nodes")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError("keep index out of range")
    mask = np.zeros(n, dtype=bool)
    mask[keep] = True
    drop = np.flatnonzero(~mask)

    l_kk = lap[np.ix_(keep, keep)]
    l_kd = lap[np.ix_(keep, drop)]
    l_dd = lap[np.ix_(drop, drop)]
    x = solve_sym(l_dd, l_kd.T, pivot_tol=pivot_tol)
    if isinstance(x, Singular):
        x = pseudo_inverse(l_dd) @ l_kd.T
    reduced = l_kk - l_kd @ x
    return 0.5 * (reduced + reduced.T)


def adjacency_from_laplacian(lap, loopy: bool = False) -> np.ndarray:
    """Adjacency whose Laplacian is ``lap``: off-diagonals ``-L_ij``.

    The diagonal is zero for an ordinary Laplacian. With ``loopy=True`` the
    input is read as ``D - A + 2 diag(A)`` and self-loops come back as half
    the row sums. Weights within ``1e-12`` (relative) of zero are clamped to
    zero; anything more negative than ``-1e-8`` raises.
    """
    lap = np.asarray(lap, dtype=np.float64)
    check_symmetric(lap)
    a = -lap.copy()
    np.fill_diagonal(a, 0.0)
    if loopy:
        np.fill_diagonal(a, 0.5 * lap.sum(axis=1))
    scale = max(float(np.max(np.abs(np.diag(lap)))) if lap.size else 0.0, 1e-300)
    if a.size and np.min(a) < -INVALID_WEIGHT_TOL * scale:
        raise InvalidLaplacianError(f"negative edge weight {np.min(a):.3g} recovered")
    a[a < CLAMP_TOL * scale] = 0.0
    return 0.5 * (a + a.T)


def sparsify(a, epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Zero every entry with ``|a_ij| <= epsilon``; keep the rest verbatim."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    a = np.asarray(a, dtype=np.float64)
    return np.where(np.abs(a) > epsilon, a, 0.0)


def _laplacian_of(a: np.ndarray) -> np.ndarray:
    return np.diag(a.sum(axis=1)) - a


def smallest_nonzero_eigenvalues(lap, k: int | None = None, tol: float = NONZERO_EIG_TOL) -> np.ndarray:
    w = np.sort(eigvalsh(lap))
    w = w[w > tol]
    return w if k is None else w[:k]


def spectral_distance(lap, lap_bar, k: int | None = None) -> float:
    """Mean relative deviation of the ``k`` smallest nonzero eigenvalues.

    ``k`` defaults to ``min(10, available)``. Inputs are Laplacians; use
    :func:`adjacency_spectral_distance` for adjacency matrices.
    """
    w = smallest_nonzero_eigenvalues(lap)
    w_bar = smallest_nonzero_eigenvalues(lap_bar)
    if k is None:
        k = min(10, w.size, w_bar.size)
    if k < 1 or w.size < k or w_bar.size < k:
        raise ValueError(
            f"need {max(k, 1)} nonzero eigenvalues, have {w.size} and {w_bar.size}"
        )
    return float(np.mean(np.abs(w_bar[:k] - w[:k]) / w[:k]))


def adjacency_spectral_distance(a, a_bar, k: int | None = None) -> float:
    return spectral_distance(_laplacian_of(np.asarray(a)), _laplacian_of(np.asarray(a_bar)), k)


def removal_matrix(a, epsilon: float) -> np.ndarray:
    """``Q`` with ``-a_ij`` where ``|a_ij| <= epsilon`` so that ``A + Q`` is the sparsified matrix."""
    a = np.asarray(a, dtype=np.float64)
    return np.where(np.abs(a) <= epsilon, -a, 0.0)


def perturbation_bound_margins(a, epsilon: float) -> np.ndarray:
    """``alpha_i + u_i' Q u_i - alpha_bar_i`` for every i, eigenvalues paired in sorted order.

    Nonnegative entries mean the first-order sparsification bound holds for
    that eigenvalue.
    """
    a = np.asarray(a, dtype=np.float64)
    check_symmetric(a)
    q = removal_matrix(a, epsilon)
    spec = eigh(a)
    alpha, u = spec.eigenvalues, spec.eigenvectors
    alpha_bar = eigvalsh(a + q)
    first_order = np.einsum("ji,jk,ki->i", u, q, u)
    return alpha + first_order - alpha_bar


def perturbation_bound_check(a, epsilon: float, tol: float = 1e-6) -> bool:
    """Check ``alpha_bar_i <= alpha_i + u_i' Q u_i + tol`` for all i."""
    return bool(np.all(perturbation_bound_margins(a, epsilon) >= -tol))


def weyl_bound_check(a, epsilon: float, tol: float = 1e-9) -> bool:
    """Rigorous companion bound ``alpha_bar_i <= alpha_i + lambda_max(Q)``."""
    a = np.asarray(a, dtype=np.float64)
    q = removal_matrix(a, epsilon)
    alpha, alpha_bar = eigvalsh(a), eigvalsh(a + q)
    return bool(np.all(alpha_bar <= alpha + eigvalsh(q)[0] + tol))
