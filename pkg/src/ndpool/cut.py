"""Spectral MAXCUT partitioning, cut evaluation and the exact enumeration oracle."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, laplacian, sym_laplacian
from .linalg import NotConvergedError, eigh, power_iteration, sign_normalize

log = logging.getLogger(__name__)

TREVISAN_TAU = 0.0549
TREVISAN_THRESHOLD = 2.0 * (1.0 - TREVISAN_TAU)
TREVISAN_RATIO = 0.5311
RANDOM_CUT_FRACTION = 0.5
BRUTE_FORCE_MAX_N = 22


@dataclass(frozen=True, eq=False)
class Partition:
    assignment: np.ndarray
    gamma: float
    method: str
    lambda_s_max: float | None = None

    @property
    def keep(self) -> np.ndarray:
        return np.flatnonzero(self.assignment > 0)

    @property
    def drop(self) -> np.ndarray:
        return np.flatnonzero(self.assignment < 0)


@dataclass(frozen=True)
class CutReport:
    gamma: float
    upper_bound: float
    lambda_s_max: float
    trevisan_ok: bool
    lower_bound: float = RANDOM_CUT_FRACTION


def cut_fraction(g: Graph, assignment) -> float:
    """Fraction of edge weight crossing the partition, ``z'Lz / (2 sum a_ij)``."""
    z = np.asarray(assignment, dtype=np.float64)
    if z.shape != (g.n,) or not np.all(np.abs(z) == 1.0):
        raise ValueError("assignment must hold one +1/-1 entry per node")
    total = float(np.sum(g.adjacency))
    if total == 0.0:
        return 0.0
    return float(z @ laplacian(g) @ z) / (2.0 * total)


ZERO_ENTRY_TOL = 1e-12


def round_signs(v, zero_tol: float = 0.0) -> np.ndarray:
    """Nearest +-1 vector: nonnegative entries go to +1.

    Entries with ``|v_i| <= zero_tol * max|v|`` count as zero (and so +1);
    this keeps e.g. isolated nodes from being placed by roundoff.
    """
    v = np.asarray(v, dtype=np.float64)
    tiny = np.abs(v) <= zero_tol * (np.max(np.abs(v)) if v.size else 0.0)
    return np.where((v >= 0) | tiny, 1, -1)


def top_eigenpair(m: np.ndarray, seed: int = 0, tol: float = 1e-10, max_iter: int = 500):
    """Largest eigenpair of a PSD matrix, power method first, full solve on failure."""
    try:
        return power_iteration(m, tol=tol, max_iter=max_iter, seed=seed)
    except NotConvergedError:
        log.debug("power iteration stalled on n=%d, using full eigensolve", m.shape[0])
        spec = eigh(m)
        return float(spec.eigenvalues[0]), sign_normalize(spec.eigenvectors[:, 0])


def spectral_partition(g: Graph, seed: int = 0) -> Partition:
    """Split nodes by the sign of the top eigenvector of the symmetric Laplacian.

    The eigenvector orientation is chosen so that the kept side V+ is the
    larger one; on a tie the power-method sign convention stands.
    """
    if g.n == 0:
        raise ValueError("graph has no nodes")
    if not np.any(g.adjacency > 0):
        return Partition(np.ones(g.n, dtype=int), 0.0, "spectral", 0.0)
    lam, v = top_eigenpair(sym_laplacian(g), seed=seed)
    z = round_signs(v, ZERO_ENTRY_TOL)
    flipped = round_signs(-v, ZERO_ENTRY_TOL)
    if np.count_nonzero(flipped > 0) > np.count_nonzero(z > 0):
        z = flipped
    return Partition(z, cut_fraction(g, z), "spectral", lam)


def lambda_s_max(g: Graph) -> float:
    """Largest eigenvalue of ``L_s``, clamped to its theoretical range [0, 2]."""
    return float(np.clip(eigh(sym_laplacian(g)).eigenvalues[0], 0.0, 2.0))


def maxcut_upper_bound(g: Graph, assignment=None) -> CutReport:
    """Bounds on the achievable cut fraction: ``0.5 <= MAXCUT/|E| <= lambda_s_max/2``.

    ``gamma`` is the cut fraction of ``assignment`` (default: the spectral
    partition).
    """
    if not np.any(g.adjacency > 0):
        raise ValueError("graph has no edges")
    lam = lambda_s_max(g)
    if assignment is None:
        assignment = spectral_partition(g).assignment
    ok, _ = trevisan_guarantee(lam)
    return CutReport(
        gamma=cut_fraction(g, assignment),
        upper_bound=lam / 2.0,
        lambda_s_max=lam,
        trevisan_ok=ok,
    )


def random_partition(g: Graph, seed=0) -> Partition:
    """Each node lands on either side with probability 1/2.

    ``seed`` may be an int or an existing ``numpy.random.Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = np.where(rng.random(g.n) < 0.5, 1, -1)
    return Partition(z, cut_fraction(g, z), "random")


def partition_with_fallback(g: Graph, seed: int = 0) -> Partition:
    """Spectral partition, replaced by a random one when it cuts less than half."""
    part = spectral_partition(g, seed=seed)
    if part.gamma < RANDOM_CUT_FRACTION:
        rnd = random_partition(g, seed=np.random.default_rng([seed, 1]))
        return Partition(rnd.assignment, rnd.gamma, "random", part.lambda_s_max)
    return part


def trevisan_guarantee(lambda_s_max: float) -> tuple[bool, float]:
    """Whether a recursive spectral cut is provably better than random, and its ratio."""
    if not 0.0 <= lambda_s_max <= 2.0 + 1e-12:
        raise ValueError(f"lambda_s_max must lie in [0, 2], got {lambda_s_max}")
    if lambda_s_max >= TREVISAN_THRESHOLD:
        return True, TREVISAN_RATIO
    return False, RANDOM_CUT_FRACTION


def brute_force_maxcut(g: Graph, chunk: int = 1 << 16) -> tuple[np.ndarray, float]:
    """Exact maximum cut fraction by enumerating all ``2^(n-1)`` partitions.

    Node 0 is pinned to +1. Ties go to the first assignment in enumeration
    order.
    """
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    if n == 0:
        raise ValueError("graph has no nodes")
    total = float(np.sum(g.adjacency))
    if n == 1 or total == 0.0:
        return np.ones(n, dtype=int), 0.0
    lap = laplacian(g)
    bits = np.arange(n - 1, dtype=np.int64)
    best_val, best_code = -1.0, 0
    count = 1 << (n - 1)
    for start in range(0, count, chunk):
        codes = np.arange(start, min(start + chunk, count), dtype=np.int64)
        z = np.ones((codes.size, n))
        z[:, 1:] = 1.0 - 2.0 * ((codes[:, None] >> bits) & 1)
        vals = np.sum((z @ lap) * z, axis=1)
        k = int(np.argmax(vals))
        if vals[k] > best_val + 1e-12 * max(1.0, abs(best_val)):
            best_val, best_code = float(vals[k]), int(codes[k])
    z = np.ones(n, dtype=int)
    z[1:] = 1 - 2 * ((best_code >> np.arange(n - 1)) & 1)
    return z, cut_fraction(g, z)
