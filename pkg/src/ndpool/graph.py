"""Undirected weighted graphs stored as dense symmetric adjacency matrices."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

EDGE_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class Graph:
    """Dense undirected graph. Self-loops live on the diagonal of ``adjacency``."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("adjacency contains NaN or Inf")
        if a.size and np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
            raise ValueError("adjacency is not symmetric")
        if np.any(a < 0):
            raise ValueError("adjacency has negative weights")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        # self-loop weight counted once in the degree
        return self.adjacency.sum(axis=1)

    def has_self_loops(self) -> bool:
        return bool(np.any(np.diag(self.adjacency) > EDGE_TOL))

    def num_edges(self, tol: float = 0.0) -> int:
        """Undirected edges (including loops) with weight above ``tol``."""
        return int(np.count_nonzero(np.triu(self.adjacency) > tol))

    def total_weight(self) -> float:
        return float(np.sum(np.triu(self.adjacency)))

    def edges(self) -> list[tuple[int, int, float]]:
        """Edge list ``(i, j, w)`` with ``i < j``; self-loops are not listed."""
        i, j = np.nonzero(np.triu(self.adjacency, k=1))
        return [(int(a), int(b), float(self.adjacency[a, b])) for a, b in zip(i, j)]

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        a = np.zeros((n, n))
        for i, j, *w in edges:
            weight = float(w[0]) if w else 1.0
            a[i, j] = a[j, i] = weight
        return cls(a)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges()})"


def laplacian(g: Graph) -> np.ndarray:
    """Combinatorial Laplacian ``D - A``."""
    a = g.adjacency
    return np.diag(a.sum(axis=1)) - a


def _inv_sqrt_degrees(a: np.ndarray) -> np.ndarray:
    d = a.sum(axis=1)
    # isolated nodes are normalized as if their degree were 1
    return 1.0 / np.sqrt(np.where(d > 0, d, 1.0))


def normalized_adjacency(g: Graph) -> np.ndarray:
    """``D^{-1/2} A D^{-1/2}``; rows of isolated nodes are zero."""
    s = _inv_sqrt_degrees(g.adjacency)
    return s[:, None] * g.adjacency * s[None, :]


def sym_laplacian(g: Graph) -> np.ndarray:
    """Symmetric normalized Laplacian ``I - D^{-1/2} A D^{-1/2}``."""
    return np.eye(g.n) - normalized_adjacency(g)


def loopy_laplacian(g: Graph) -> np.ndarray:
    """``D - A + 2 diag(A)``, the Laplacian variant that keeps self-loops recoverable."""
    a = g.adjacency
    return np.diag(a.sum(axis=1)) - a + 2.0 * np.diag(np.diag(a))


def connected_components(g: Graph) -> list[list[int]]:
    a = g.adjacency > EDGE_TOL
    seen = np.zeros(g.n, dtype=bool)
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp, queue = [], deque([start])
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in np.flatnonzero(a[u]):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1


def two_coloring(g: Graph) -> np.ndarray | None:
    """A proper 2-coloring (+1/-1 per node) or ``None`` if the graph is not bipartite."""
    a = g.adjacency > EDGE_TOL
    if np.any(np.diag(a)):
        return None
    color = np.zeros(g.n, dtype=int)
    for start in range(g.n):
        if color[start]:
            continue
        color[start] = 1
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(a[u]):
                if color[v] == 0:
                    color[v] = -color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return None
    return color


def disjoint_union(gs, xs):
    """Block-diagonal union of graphs with their stacked node features.

    Returns ``(graph, features, offsets)`` where ``offsets[k]:offsets[k+1]``
    is the node range of the k-th input graph.
    """
    gs, xs = list(gs), [np.asarray(x, dtype=np.float64) for x in xs]
    if len(gs) != len(xs) or not gs:
        raise ValueError("need one feature matrix per graph and at least one graph")
    width = xs[0].shape[1]
    for g, x in zip(gs, xs):
        if x.ndim != 2 or x.shape[0] != g.n or x.shape[1] != width:
            raise ValueError("feature matrix shape does not match its graph")
    offsets = np.concatenate([[0], np.cumsum([g.n for g in gs])]).astype(int)
    a = np.zeros((offsets[-1], offsets[-1]))
    for g, lo, hi in zip(gs, offsets[:-1], offsets[1:]):
        a[lo:hi, lo:hi] = g.adjacency
    return Graph(a), np.vstack(xs), offsets
