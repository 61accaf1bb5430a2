"""Edge-densification and sparsification-threshold sweeps."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .cut import TREVISAN_TAU, lambda_s_max, random_partition, spectral_partition
from .graph import Graph, is_connected, laplacian, two_coloring
from .kron import sparsify, spectral_distance

DENSIFY_FIELDS = ("x", "spectral_gamma", "random_gamma", "upper_bound", "threshold")
EPSILON_FIELDS = ("x", "spectral_distance", "edge_count")


@dataclass(frozen=True)
class SweepRecord:
    x: float
    spectral_gamma: float | None = None
    random_gamma: float | None = None
    upper_bound: float | None = None
    threshold: float | None = None
    spectral_distance: float | None = None
    edge_count: int | None = None

    def row(self, fields) -> dict:
        d = asdict(self)
        return {f: d[f] for f in fields}


def default_eps_grid(points: int = 20) -> np.ndarray:
    """``0`` followed by ``points - 1`` log-spaced thresholds from 1e-4 to 1."""
    if points < 1:
        raise ValueError("need at least one grid point")
    return np.concatenate([[0.0], np.logspace(-4, 0, points - 1)]) if points > 1 else np.zeros(1)


def _edge_density(a: np.ndarray) -> float:
    n = a.shape[0]
    return np.count_nonzero(np.triu(a, k=1)) / (n * (n - 1) / 2)


def densify_sweep(g: Graph, steps: int = 20, seed: int = 0, random_draws: int = 10) -> list[SweepRecord]:
    """Add random unit-weight edges to a bipartite graph until it is complete.

    ``steps`` records are produced, the first on the untouched graph and the
    last on the complete graph. Each record holds the spectral cut fraction,
    the mean of ``random_draws`` random cuts, ``lambda_s_max / 2`` and the
    ``1 - tau`` guarantee line.
    """
    if steps < 2:
        raise ValueError("need at least two steps")
    if two_coloring(g) is None:
        raise ValueError("densification starts from a bipartite graph")
    if not is_connected(g):
        raise ValueError("densification starts from a connected graph")
    rng = np.random.default_rng(seed)
    a = g.adjacency.copy()
    iu, ju = np.nonzero(np.triu(a == 0, k=1))
    order = rng.permutation(iu.size)
    iu, ju = iu[order], ju[order]
    cuts = np.linspace(0, iu.size, steps).round().astype(int)

    records, added = [], 0
    for step, upto in enumerate(cuts):
        a[iu[added:upto], ju[added:upto]] = 1.0
        a[ju[added:upto], iu[added:upto]] = 1.0
        added = upto
        h = Graph(a)
        spectral = spectral_partition(h, seed=seed).gamma
        rand = np.mean([
            random_partition(h, seed=np.random.default_rng([seed, step, d])).gamma
            for d in range(random_draws)
        ])
        records.append(SweepRecord(
            x=_edge_density(a),
            spectral_gamma=spectral,
            random_gamma=float(rand),
            upper_bound=lambda_s_max(h) / 2.0,
            threshold=1.0 - TREVISAN_TAU,
        ))
    return records


def epsilon_sweep(g: Graph, eps_grid=None, k: int = 10) -> list[SweepRecord]:
    """Sparsify ``g`` at each threshold and record spectral distance and surviving edges.

    Once too few edges survive to leave ``k`` nonzero Laplacian eigenvalues
    the distance is undefined and recorded as NaN.
    """
    if not is_connected(g):
        raise ValueError("epsilon sweep expects a connected graph")
    eps_grid = default_eps_grid() if eps_grid is None else np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps_grid) < 0):
        raise ValueError("epsilon grid must be non-decreasing")
    lap = laplacian(g)
    records = []
    for eps in eps_grid:
        a_bar = sparsify(g.adjacency, float(eps))
        lap_bar = np.diag(a_bar.sum(axis=1)) - a_bar
        try:
            sd = spectral_distance(lap, lap_bar, k)
        except ValueError:
            sd = float("nan")
        records.append(SweepRecord(
            x=float(eps),
            spectral_distance=sd,
            edge_count=int(np.count_nonzero(np.triu(a_bar, k=1))),
        ))
    return records

