"""Dense symmetric linear algebra used by the coarsening pipeline.

Everything here works on plain ``numpy.ndarray`` float64 matrices. The
eigensolver is a cyclic Jacobi method run in parallel (round-robin) order so
that each round of disjoint rotations is a handful of vectorized numpy calls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SYMMETRY_TOL = 1e-10


class NotConvergedError(RuntimeError):
    """Power iteration did not settle within ``max_iter`` steps."""


class Singular:
    """Marker returned by :func:`solve_sym` when a pivot collapses."""

    def __init__(self, pivot: float, index: int):
        self.pivot = pivot
        self.index = index

    def __repr__(self):
        return f"Singular(pivot={self.pivot:.3g}, index={self.index})"

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending, eigenvectors stored column-wise."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


def check_symmetric(m: np.ndarray, tol: float = SYMMETRY_TOL) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and np.max(np.abs(m - m.T)) > tol * scale:
        raise ValueError("matrix is not symmetric")


def matmul(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


SIGN_TIE_TOL = 1e-9


def sign_normalize(v: np.ndarray) -> np.ndarray:
    # largest-magnitude entry positive; entries within SIGN_TIE_TOL of the
    # maximum count as tied and the first of them wins, so roundoff cannot flip it
    mag = np.abs(v)
    k = int(np.argmax(mag >= mag.max() * (1.0 - SIGN_TIE_TOL)))
    return -v if v[k] < 0 else v


def power_iteration(
    m, tol: float = 1e-10, max_iter: int = 500, seed: int = 0, return_iterations: bool = False
):
    """Dominant eigenpair of a symmetric positive semi-definite matrix.

    Iterates ``v <- m v / ||m v||`` from a seeded uniform random start and
    stops once two successive Rayleigh quotients differ by less than ``tol``.

    Returns
    -------
    (eigenvalue, eigenvector)
        The eigenvector has unit norm and its largest-magnitude entry is
        positive. With ``return_iterations`` the step count is appended.

    Raises
    ------
    NotConvergedError
        If ``max_iter`` steps pass without convergence. This usually means the
        top of the spectrum is nearly degenerate; callers fall back to
        :func:`jacobi_eigh`.
    """
    m = _as_matrix(m)
    check_symmetric(m)
    n = m.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1.0, 1.0, size=n)
    v /= np.linalg.norm(v)
    rq = float(v @ m @ v)
    for it in range(1, max_iter + 1):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            # start vector landed in the kernel; m is (numerically) zero here
            out = (0.0, sign_normalize(v))
            return out + (it,) if return_iterations else out
        v = w / norm
        new_rq = float(v @ m @ v)
        if abs(new_rq - rq) < tol:
            out = (new_rq, sign_normalize(v))
            return out + (it,) if return_iterations else out
        rq = new_rq
    raise NotConvergedError(f"power iteration did not converge in {max_iter} steps")


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pairings covering every (p, q) once per sweep, n/2 disjoint per round."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(m, tol: float = 1e-12, max_sweeps: int = 100) -> Spectrum:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps stop when the off-diagonal Frobenius norm falls below
    ``tol * ||m||_F``. Eigenvalues come back sorted descending with matching
    unit-norm eigenvector columns.
    """
    a = _as_matrix(m).copy()
    check_symmetric(a)
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    if n <= 1:
        return Spectrum(np.diag(a).copy(), v)

    total = np.linalg.norm(a)
    rounds = _round_robin(n)
    threshold = tol * total
    for _ in range(max_sweeps):
        off = np.sqrt(max(total**2 - float(np.sum(np.diag(a) ** 2)), 0.0))
        # the cheap estimate above loses precision near convergence
        if off < 1e3 * threshold:
            off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= threshold:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            app, aqq = a[p, p], a[q, q]
            theta = (aqq - app) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0.0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            cols_p, cols_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = c * cols_p - s * cols_q
            a[:, q] = s * cols_p + c * cols_q
            rows_p, rows_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rows_p - s[:, None] * rows_q
            a[q, :] = s[:, None] * rows_p + c[:, None] * rows_q
            a[p, q] = 0.0
            a[q, p] = 0.0

            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], v[:, order])


def eigh(m, method: str = "lapack") -> Spectrum:
    """Descending symmetric eigendecomposition.

    ``method="lapack"`` delegates to :func:`numpy.linalg.eigh` and is what the
    pipeline uses on anything larger than a toy graph; ``"jacobi"`` runs
    :func:`jacobi_eigh`.
    """
    if method == "jacobi":
        return jacobi_eigh(m)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    m = _as_matrix(m)
    check_symmetric(m)
    w, u = np.linalg.eigh(0.5 * (m + m.T))
    return Spectrum(w[::-1].copy(), u[:, ::-1].copy())


def eigvalsh(m, method: str = "lapack") -> np.ndarray:
    """Eigenvalues only, sorted descending."""
    if method == "jacobi":
        return jacobi_eigh(m).eigenvalues
    m = _as_matrix(m)
    check_symmetric(m)
    return np.linalg.eigvalsh(0.5 * (m + m.T))[::-1].copy()


def solve_sym(m, rhs, pivot_tol: float = 1e-10):
    """Solve ``m x = rhs`` by LU with partial pivoting.

    Returns the solution, or a :class:`Singular` marker when some pivot is
    smaller than ``pivot_tol`` times the largest diagonal magnitude of ``m``.
    """
    m = _as_matrix(m)
    check_symmetric(m)
    b = np.asarray(rhs, dtype=np.float64)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b[:, None]
    n = m.shape[0]
    if b.shape[0] != n:
        raise ValueError(f"dimension mismatch: {m.shape} vs rhs {b.shape}")
    if n == 0:
        return b[:, 0].copy() if vector_rhs else b.copy()

    scale = float(np.max(np.abs(np.diag(m))))
    if scale == 0.0:
        scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return Singular(0.0, 0)
    cutoff = pivot_tol * scale

    lu = m.copy()
    x = b.copy()
    for k in range(n):
        r = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[r, k]) < cutoff:
            return Singular(float(lu[r, k]), k)
        if r != k:
            lu[[k, r]] = lu[[r, k]]
            x[[k, r]] = x[[r, k]]
        factors = lu[k + 1 :, k] / lu[k, k]
        lu[k + 1 :, k:] -= np.outer(factors, lu[k, k:])
        x[k + 1 :] -= np.outer(factors, x[k])
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - lu[k, k + 1 :] @ x[k + 1 :]) / lu[k, k]
    return x[:, 0] if vector_rhs else x


def pseudo_inverse(m, rank_tol: float = 1e-10, method: str = "lapack") -> np.ndarray:
    """Moore-Penrose inverse of a symmetric matrix via its eigendecomposition.

    Eigenvalues with ``|w| < rank_tol * max|w|`` are treated as zero.
    """
    m = _as_matrix(m)
    check_symmetric(m)
    if m.size == 0:
        return m.copy()
    spec = eigh(m, method=method)
    w, u = spec.eigenvalues, spec.eigenvectors
    top = float(np.max(np.abs(w)))
    if top == 0.0:
        return np.zeros_like(m)
    keep = np.abs(w) >= rank_tol * top
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    out = (u * inv) @ u.T
    return 0.5 * (out + out.T)
