"""Node decimation pooling: one pooling step and the full coarsening pyramid."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cut import Partition, cut_fraction, partition_with_fallback
from .graph import Graph, laplacian, loopy_laplacian
from .kron import DEFAULT_EPSILON, adjacency_from_laplacian, kron_reduce, sparsify

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecimationSelector:
    """Row selection ``S = I[kept, :]`` from a level with ``parent_n`` nodes."""

    kept: np.ndarray
    parent_n: int

    def __post_init__(self):
        kept = np.array(self.kept, dtype=np.intp).ravel()
        if kept.size and (kept[0] < 0 or kept[-1] >= self.parent_n):
            raise ValueError("selector index out of range")
        if np.any(np.diff(kept) <= 0):
            raise ValueError("selector indices must be strictly increasing")
        kept.setflags(write=False)
        object.__setattr__(self, "kept", kept)

    @property
    def n(self) -> int:
        return self.kept.size

    @classmethod
    def identity(cls, n: int) -> "DecimationSelector":
        return cls(np.arange(n), n)

    def matrix(self) -> np.ndarray:
        return np.eye(self.parent_n)[self.kept]

    def __eq__(self, other):
        return (
            isinstance(other, DecimationSelector)
            and self.parent_n == other.parent_n
            and np.array_equal(self.kept, other.kept)
        )

    def __repr__(self):
        return f"DecimationSelector({self.parent_n} -> {self.n})"


def apply_decimation(x, s: DecimationSelector) -> np.ndarray:
    """``S X``: the rows of ``x`` at the kept indices."""
    x = np.asarray(x)
    if x.shape[0] != s.parent_n:
        raise ValueError(f"features have {x.shape[0]} rows, selector expects {s.parent_n}")
    return x[s.kept]


def compose_selectors(outer: DecimationSelector, inner: DecimationSelector) -> DecimationSelector:
    """Selector for applying ``inner`` first and then ``outer`` (``S_outer S_inner``)."""
    if outer.parent_n != inner.n:
        raise ValueError(f"cannot chain: outer expects {outer.parent_n} nodes, inner yields {inner.n}")
    return DecimationSelector(inner.kept[outer.kept], inner.parent_n)


@dataclass(frozen=True)
class PartitionMeta:
    gamma: float
    method: str
    lambda_s_max: float | None
    step: int = 0

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "method": self.method, "lambda_s_max": self.lambda_s_max}


@dataclass(frozen=True, eq=False)
class CoarsenedLevel:
    adjacency: np.ndarray
    sparsified: np.ndarray
    keep: DecimationSelector
    epsilon: float
    cut_log: tuple[PartitionMeta, ...] = ()

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edges_before(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    @property
    def edges_after(self) -> int:
        return int(np.count_nonzero(np.triu(self.sparsified, k=1)))

    @property
    def graph(self) -> Graph:
        return Graph(self.sparsified)


@dataclass(frozen=True, eq=False)
class Pyramid:
    levels: list[CoarsenedLevel]
    requested_levels: list[int]
    epsilon: float
    n_input: int
    truncated: bool = False
    cut_log: list[PartitionMeta] = field(default_factory=list)

    @property
    def selectors(self) -> list[DecimationSelector]:
        return [lvl.keep for lvl in self.levels]

    @property
    def node_counts(self) -> list[int]:
        return [lvl.n for lvl in self.levels]

    def total_selector(self) -> DecimationSelector:
        """Composition of every emitted selector: original nodes surviving to the last level."""
        s = DecimationSelector.identity(self.n_input)
        for sel in self.selectors:
            s = compose_selectors(sel, s)
        return s


def step_seed(seed: int, step: int) -> int:
    """Seed for coarsening step ``step``; independent of how many levels are built."""
    return int(np.random.SeedSequence([seed, step]).generate_state(1)[0])


def _ensure_proper(part: Partition, g: Graph, seed: int) -> Partition:
    # a random cut can put every node on one side; redraw from the same stream
    if 0 < part.keep.size < g.n:
        return part
    rng = np.random.default_rng([seed, 2])
    while True:
        z = np.where(rng.random(g.n) < 0.5, 1, -1)
        if 0 < np.count_nonzero(z > 0) < g.n:
            return Partition(z, cut_fraction(g, z), part.method, part.lambda_s_max)


def pool_once(g: Graph, seed: int = 0) -> tuple[Graph, DecimationSelector, PartitionMeta]:
    """One decimation step: MAXCUT split, Kron reduction onto V+, adjacency recovery.

    Graphs with self-loops are reduced through the loopy Laplacian so the
    loops survive; loop-free graphs use ``D - A``.
    """
    if g.n < 2:
        raise ValueError("need at least two nodes to pool")
    if not np.any(np.triu(g.adjacency, k=1) > 0):
        raise ValueError("cannot pool an edgeless graph")
    part = _ensure_proper(partition_with_fallback(g, seed=seed), g, seed)
    keep = part.keep
    loopy = g.has_self_loops()
    lap = loopy_laplacian(g) if loopy else laplacian(g)
    reduced = kron_reduce(lap, keep)
    a = adjacency_from_laplacian(reduced, loopy=loopy)
    meta = PartitionMeta(part.gamma, part.method, part.lambda_s_max)
    return Graph(a), DecimationSelector(keep, g.n), meta


def _poolable(g: Graph) -> bool:
    return g.n > 2 and bool(np.any(np.triu(g.adjacency, k=1) > 0))


def build_pyramid(
    g: Graph,
    levels=(0, 1),
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    sparsify_between: bool = False,
) -> Pyramid:
    """Coarsen ``g`` repeatedly and emit the requested pyramid levels.

    Step ``l`` pools the graph produced by step ``l - 1``; when ``l`` is in
    ``levels`` its output is emitted together with the product of every
    selector since the previous emission. Emitted adjacencies are sparsified
    with ``epsilon``. With ``sparsify_between`` the next step also consumes
    the sparsified matrix instead of the raw Kron output.

    Coarsening stops early once a graph has at most two nodes or no edges;
    the pyramid is then flagged ``truncated``.
    """
    levels = [int(l) for l in levels]
    if not levels:
        raise ValueError("levels must be non-empty")
    if levels[0] < 0 or any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be nonnegative and strictly increasing")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")

    wanted = set(levels)
    current = g
    carry = DecimationSelector.identity(g.n)
    emitted: list[CoarsenedLevel] = []
    pending: list[PartitionMeta] = []
    cut_log: list[PartitionMeta] = []
    truncated = False
    for step in range(max(levels) + 1):
        if not _poolable(current):
            truncated = True
            log.warning(
                "coarsening stopped at step %d (n=%d); %d of %d levels emitted",
                step, current.n, len(emitted), len(levels),
            )
            break
        coarse, sel, meta = pool_once(current, seed=step_seed(seed, step))
        meta = PartitionMeta(meta.gamma, meta.method, meta.lambda_s_max, step)
        cut_log.append(meta)
        pending.append(meta)
        carry = compose_selectors(sel, carry)
        sparse = sparsify(coarse.adjacency, epsilon)
        if step in wanted:
            emitted.append(CoarsenedLevel(coarse.adjacency, sparse, carry, epsilon, tuple(pending)))
            carry = DecimationSelector.identity(coarse.n)
            pending = []
        current = Graph(sparse) if sparsify_between else coarse

    return Pyramid(emitted, levels, epsilon, g.n, truncated, cut_log)
