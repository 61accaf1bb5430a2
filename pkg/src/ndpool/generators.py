"""Deterministic generators for the six graph families used in the experiments."""

from __future__ import annotations

import numpy as np

from .graph import Graph

FAMILIES = ("grid", "ring", "sbm", "sensor", "erdos", "community")


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _check_prob(name, p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {p}")


def gen_grid(rows: int, cols: int) -> Graph:
    """``rows x cols`` 4-neighbour lattice with unit weights; node ``r*cols + c``."""
    if rows < 2 or cols < 2:
        raise ValueError("grid needs at least 2 rows and 2 columns")
    n = rows * cols
    a = np.zeros((n, n))
    idx = np.arange(n).reshape(rows, cols)
    right = (idx[:, :-1].ravel(), idx[:, 1:].ravel())
    down = (idx[:-1, :].ravel(), idx[1:, :].ravel())
    for i, j in (right, down):
        a[i, j] = a[j, i] = 1.0
    return Graph(a)


def gen_ring(n: int) -> Graph:
    if n < 2:
        raise ValueError("ring needs at least 2 nodes")
    a = np.zeros((n, n))
    i = np.arange(n)
    a[i, (i + 1) % n] = 1.0
    a[(i + 1) % n, i] = 1.0
    return Graph(a)


def _sample_symmetric(probs: np.ndarray, rng) -> np.ndarray:
    n = probs.shape[0]
    draws = rng.random((n, n))
    upper = np.triu(draws < probs, k=1)
    a = upper.astype(np.float64)
    return a + a.T


def gen_sbm(block_sizes, p_in: float, p_out: float, seed=0) -> Graph:
    """Stochastic block model with unit weights."""
    block_sizes = [int(b) for b in block_sizes]
    if not block_sizes or any(b <= 0 for b in block_sizes):
        raise ValueError("block sizes must be positive")
    _check_prob("p_in", p_in)
    _check_prob("p_out", p_out)
    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    probs = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    return Graph(_sample_symmetric(probs, _rng(seed)))


def gen_erdos_renyi(n: int, p: float, seed=0) -> Graph:
    if n < 1:
        raise ValueError("n must be positive")
    _check_prob("p", p)
    return Graph(_sample_symmetric(np.full((n, n), float(p)), _rng(seed)))


def gen_community(n: int, n_communities: int, p_in: float, p_out: float, seed=0) -> Graph:
    """Equal-size communities, each stitched together by a random spanning tree
    before independent intra/inter-community edges are added."""
    if n_communities < 1 or n < n_communities:
        raise ValueError("need 1 <= n_communities <= n")
    _check_prob("p_in", p_in)
    _check_prob("p_out", p_out)
    rng = _rng(seed)
    sizes = [len(c) for c in np.array_split(np.arange(n), n_communities)]
    labels = np.repeat(np.arange(n_communities), sizes)
    probs = np.where(labels[:, None] == labels[None, :], p_in, p_out)
    a = _sample_symmetric(probs, rng)
    start = 0
    for size in sizes:
        order = start + rng.permutation(size)
        for k in range(1, size):
            # attach each node to a uniformly chosen earlier node
            u, v = order[k], order[rng.integers(k)]
            a[u, v] = a[v, u] = 1.0
        start += size
    return Graph(a)


def gen_sensor(n: int, k: int = 8, sigma: float | None = None, seed=0) -> Graph:
    """Random points in the unit square joined to their k nearest neighbours.

    Edge weights are ``exp(-||p_i - p_j||^2 / sigma^2)``; an edge exists if
    either endpoint lists the other among its neighbours. ``sigma`` defaults
    to the mean k-NN distance.
    """
    if k < 1 or k >= n:
        raise ValueError("need 1 <= k < n")
    if sigma is not None and sigma <= 0:
        raise ValueError("sigma must be positive")
    rng = _rng(seed)
    pts = rng.random((n, 2))
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    nbrs = np.argsort(d2, axis=1, kind="stable")[:, :k]
    mask = np.zeros((n, n), dtype=bool)
    mask[np.repeat(np.arange(n), k), nbrs.ravel()] = True
    mask |= mask.T
    if sigma is None:
        sigma = float(np.mean(np.sqrt(np.take_along_axis(d2, nbrs, axis=1))))
    a = np.where(mask, np.exp(-np.where(mask, d2, 0.0) / sigma**2), 0.0)
    return Graph(a)


def generate(family: str, seed=0, **params) -> Graph:
    """Dispatch by family name with the parameters each generator accepts."""
    if family == "grid":
        return gen_grid(params.get("rows", 8), params.get("cols", params.get("rows", 8)))
    if family == "ring":
        return gen_ring(params.get("n", 64))
    if family == "sbm":
        return gen_sbm(params.get("blocks", [16, 16]), params.get("p_in", 0.5), params.get("p_out", 0.1), seed)
    if family == "sensor":
        return gen_sensor(params.get("n", 64), params.get("k", 8), params.get("sigma"), seed)
    if family == "erdos":
        return gen_erdos_renyi(params.get("n", 64), params.get("p", 0.1), seed)
    if family == "community":
        return gen_community(
            params.get("n", 64), params.get("communities", 4),
            params.get("p_in", 0.3), params.get("p_out", 0.02), seed,
        )
    raise ValueError(f"unknown graph family {family!r}; choose from {', '.join(FAMILIES)}")
