"""A small message-passing network with decimation pooling, trained with Adam.

Architecture: MP(h) - P(s1) - MP(h) - P(s2) - MP(h) - AvgPool - Dense/Softmax,
where each MP layer computes ``ReLU(D^-1/2 A D^-1/2 X W + X V)`` and each P
applies a (possibly composed) decimation selector from a precomputed pyramid.
Gradients are derived by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import Graph, normalized_adjacency
from .pyramid import DecimationSelector, Pyramid, apply_decimation, build_pyramid

N_MP = 3


@dataclass(frozen=True)
class MPLayerParams:
    W: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        if self.W.shape != self.V.shape:
            raise ValueError("W and V must have the same shape")


@dataclass(frozen=True)
class ModelConfig:
    n_features: int
    n_classes: int
    hidden: int = 32
    strides: tuple[int, int] = (2, 2)
    l2: float = 5e-4

    def __post_init__(self):
        if len(self.strides) != N_MP - 1:
            raise ValueError(f"expected {N_MP - 1} pooling strides")
        for s in self.strides:
            if s < 2 or s & (s - 1):
                raise ValueError(f"pool stride must be a power of two >= 2, got {s}")

    @property
    def pyramid_levels(self) -> list[int]:
        """Pyramid levels whose graphs the 2nd and 3rd MP layers run on."""
        steps = np.cumsum([int(math.log2(s)) for s in self.strides])
        return [int(k) - 1 for k in steps]

    @property
    def plan(self) -> list[str]:
        h = self.hidden
        s1, s2 = self.strides
        return [f"MP({h})", f"P({s1})", f"MP({h})", f"P({s2})", f"MP({h})", "AvgPool", "Softmax"]


@dataclass(frozen=True, eq=False)
class Sample:
    """One graph (or one signal on a shared graph) prepared for the network.

    ``adjs`` holds the normalized adjacency for every MP layer and
    ``selectors`` the pooling between consecutive layers.
    """

    adjs: tuple[np.ndarray, ...]
    selectors: tuple[DecimationSelector, ...]
    x: np.ndarray
    y: int


def prepare_sample(g: Graph, pyramid: Pyramid, x, y: int, config: ModelConfig) -> Sample:
    """Pair a graph, its pyramid and features according to ``config``'s strides."""
    levels = config.pyramid_levels
    if pyramid.requested_levels != levels or len(pyramid.levels) != len(levels):
        raise ValueError(
            f"pyramid provides levels {pyramid.requested_levels} "
            f"({len(pyramid.levels)} emitted), architecture needs {levels}"
        )
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != g.n:
        raise ValueError("feature rows must match graph size")
    adjs = [normalized_adjacency(g)] + [normalized_adjacency(lvl.graph) for lvl in pyramid.levels]
    return Sample(tuple(adjs), tuple(pyramid.selectors), x, int(y))


# -- layers ------------------------------------------------------------------


def mp_forward(x, g, p: MPLayerParams) -> np.ndarray:
    """``ReLU(D^-1/2 A D^-1/2 X W + X V)``; ``g`` is a Graph or a normalized adjacency."""
    ahat = normalized_adjacency(g) if isinstance(g, Graph) else np.asarray(g)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != ahat.shape[0] or x.shape[1] != p.W.shape[0]:
        raise ValueError("shape mismatch between features, graph and weights")
    return np.maximum(ahat @ x @ p.W + x @ p.V, 0.0)


def ndp_pool(x, s: DecimationSelector) -> np.ndarray:
    return apply_decimation(x, s)


def ndp_pool_backward(grad, s: DecimationSelector) -> np.ndarray:
    """Scatter upstream gradient rows back to the kept positions."""
    out = np.zeros((s.parent_n,) + grad.shape[1:])
    out[s.kept] = grad
    return out


def global_avg_pool(x, offsets) -> np.ndarray:
    x = np.asarray(x)
    offsets = np.asarray(offsets)
    sizes = np.diff(offsets)
    if np.any(sizes <= 0):
        raise ValueError("empty graph segment in readout")
    return np.stack([x[lo:hi].mean(axis=0) for lo, hi in zip(offsets[:-1], offsets[1:])])


def global_avg_pool_backward(grad, offsets) -> np.ndarray:
    offsets = np.asarray(offsets)
    sizes = np.diff(offsets)
    return np.repeat(grad / sizes[:, None], sizes, axis=0)


def softmax_xent(logits, labels) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient ``(softmax - onehot) / batch``."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=int)
    b, c = logits.shape
    if labels.shape != (b,) or np.any(labels < 0) or np.any(labels >= c):
        raise ValueError("labels must be class indices in [0, n_classes)")
    shifted = logits - logits.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    logp = shifted - logz[:, None]
    loss = -float(np.mean(logp[np.arange(b), labels]))
    grad = np.exp(logp)
    grad[np.arange(b), labels] -= 1.0
    return loss, grad / b


# -- model -------------------------------------------------------------------

PARAM_NAMES = tuple(f"{k}{j}" for j in range(N_MP) for k in ("W", "V")) + ("W_out", "b_out")


def init_params(config: ModelConfig, seed: int = 0) -> dict[str, np.ndarray]:
    """Glorot-uniform weights, zero output bias."""
    rng = np.random.default_rng(seed)

    def glorot(fan_in, fan_out):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-lim, lim, size=(fan_in, fan_out))

    params = {}
    width = config.n_features
    for j in range(N_MP):
        params[f"W{j}"] = glorot(width, config.hidden)
        params[f"V{j}"] = glorot(width, config.hidden)
        width = config.hidden
    params["W_out"] = glorot(config.hidden, config.n_classes)
    params["b_out"] = np.zeros(config.n_classes)
    return params


def layer_params(params, j: int) -> MPLayerParams:
    return MPLayerParams(params[f"W{j}"], params[f"V{j}"])


@dataclass(frozen=True, eq=False)
class Batch:
    adjs: tuple[np.ndarray, ...]
    selectors: tuple[DecimationSelector, ...]
    x: np.ndarray
    y: np.ndarray
    offsets: np.ndarray


def make_batch(samples) -> Batch:
    """Disjoint union of samples: block-diagonal graphs, block selectors, stacked features."""
    samples = list(samples)
    adjs = []
    for j in range(N_MP):
        blocks = [s.adjs[j] for s in samples]
        n = sum(b.shape[0] for b in blocks)
        a = np.zeros((n, n))
        off = 0
        for b in blocks:
            a[off:off + b.shape[0], off:off + b.shape[0]] = b
            off += b.shape[0]
        adjs.append(a)
    selectors = []
    for j in range(N_MP - 1):
        kept, off = [], 0
        for s in samples:
            sel = s.selectors[j]
            kept.append(sel.kept + off)
            off += sel.parent_n
        selectors.append(DecimationSelector(np.concatenate(kept), off))
    last = [s.selectors[-1].n for s in samples]
    offsets = np.concatenate([[0], np.cumsum(last)]).astype(int)
    return Batch(
        tuple(adjs), tuple(selectors),
        np.vstack([s.x for s in samples]), np.array([s.y for s in samples]), offsets,
    )


def forward(params, batch: Batch, l2: float = 5e-4):
    """Loss, logits and the cache needed by :func:`backward`."""
    h = batch.x
    cache = []
    for j in range(N_MP):
        agg = batch.adjs[j] @ h
        pre = agg @ params[f"W{j}"] + h @ params[f"V{j}"]
        out = np.maximum(pre, 0.0)
        cache.append((h, agg, pre))
        h = ndp_pool(out, batch.selectors[j]) if j < N_MP - 1 else out
    readout = global_avg_pool(h, batch.offsets)
    logits = readout @ params["W_out"] + params["b_out"]
    loss, dlogits = softmax_xent(logits, batch.y)
    loss += l2 * sum(float(np.sum(params[k] ** 2)) for k in params if k != "b_out")
    return loss, logits, (cache, readout, dlogits)


def backward(params, batch: Batch, cache, l2: float = 5e-4) -> dict[str, np.ndarray]:
    """Gradients of the regularized loss for every parameter (bias not penalized)."""
    layers, readout, dlogits = cache
    grads = {
        "W_out": readout.T @ dlogits + 2.0 * l2 * params["W_out"],
        "b_out": dlogits.sum(axis=0),
    }
    dout = global_avg_pool_backward(dlogits @ params["W_out"].T, batch.offsets)
    for j in reversed(range(N_MP)):
        h, agg, pre = layers[j]
        dpre = dout * (pre > 0)
        grads[f"W{j}"] = agg.T @ dpre + 2.0 * l2 * params[f"W{j}"]
        grads[f"V{j}"] = h.T @ dpre + 2.0 * l2 * params[f"V{j}"]
        if j > 0:
            # normalized adjacency is symmetric, so its transpose is itself
            dh = batch.adjs[j] @ (dpre @ params[f"W{j}"].T) + dpre @ params[f"V{j}"].T
            dout = ndp_pool_backward(dh, batch.selectors[j - 1])
    return grads


def loss_and_grads(params, batch: Batch, l2: float = 5e-4):
    loss, _, cache = forward(params, batch, l2)
    return loss, backward(params, batch, cache, l2)


def predict(params, batch: Batch) -> np.ndarray:
    _, logits, _ = forward(params, batch, 0.0)
    return np.argmax(logits, axis=1)


# -- optimizer ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrainState:
    params: dict[str, np.ndarray]
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def create(cls, params, lr: float = 5e-4) -> "TrainState":
        zeros = {k: np.zeros_like(p) for k, p in params.items()}
        return cls(dict(params), zeros, {k: z.copy() for k, z in zeros.items()}, 0, lr)


def adam_step(state: TrainState, grads) -> TrainState:
    """Bias-corrected Adam update; returns a new state."""
    t = state.step + 1
    params, m, v = {}, {}, {}
    for k, p in state.params.items():
        g = grads[k]
        if g.shape != p.shape:
            raise ValueError(f"gradient for {k} has shape {g.shape}, expected {p.shape}")
        m[k] = state.beta1 * state.m[k] + (1.0 - state.beta1) * g
        v[k] = state.beta2 * state.v[k] + (1.0 - state.beta2) * g * g
        m_hat = m[k] / (1.0 - state.beta1**t)
        v_hat = v[k] / (1.0 - state.beta2**t)
        params[k] = p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, params=params, m=m, v=v, step=t)


# -- training -----------------------------------------------------------------


@dataclass
class EpochReport:
    epoch: int
    loss: float
    accuracy: float

    def to_dict(self) -> dict:
        return {"epoch": self.epoch, "loss": self.loss, "accuracy": self.accuracy}


@dataclass
class TrainResult:
    history: list[EpochReport] = field(default_factory=list)
    state: TrainState | None = None

    @property
    def final_accuracy(self) -> float:
        return self.history[-1].accuracy if self.history else float("nan")


def evaluate(params, samples, l2: float = 0.0) -> tuple[float, float]:
    batch = make_batch(samples)
    loss, logits, _ = forward(params, batch, l2)
    return loss, float(np.mean(np.argmax(logits, axis=1) == batch.y))


def train(
    samples,
    config: ModelConfig,
    epochs: int = 200,
    lr: float = 5e-4,
    batch_size: int = 1,
    seed: int = 0,
    on_epoch=None,
) -> TrainResult:
    """Fixed-budget Adam training over shuffled mini-batches."""
    samples = list(samples)
    rng = np.random.default_rng(seed)
    state = TrainState.create(init_params(config, seed), lr=lr)
    result = TrainResult()
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(samples))
        for lo in range(0, len(samples), batch_size):
            batch = make_batch(samples[i] for i in order[lo:lo + batch_size])
            _, grads = loss_and_grads(state.params, batch, config.l2)
            state = adam_step(state, grads)
        loss, acc = evaluate(state.params, samples, config.l2)
        report = EpochReport(epoch, loss, acc)
        result.history.append(report)
        if on_epoch is not None:
            on_epoch(report)
    result.state = state
    return result


# -- synthetic task -------------------------------------------------------------


def node_features(g: Graph) -> np.ndarray:
    """Degree and local clustering coefficient per node (unweighted structure)."""
    b = (g.adjacency > 0).astype(np.float64)
    np.fill_diagonal(b, 0.0)
    deg = b.sum(axis=1)
    triangles = np.einsum("ij,jk,ki->i", b, b, b) / 2.0
    pairs = deg * (deg - 1) / 2.0
    clustering = np.divide(triangles, pairs, out=np.zeros_like(deg), where=pairs > 0)
    return np.column_stack([deg, clustering])


def ring_vs_grid_dataset(n_per_class: int = 20, seed: int = 0) -> list[tuple[Graph, int]]:
    """Class 0: rings with a few random chords. Class 1: grids with a few diagonals."""
    rng = np.random.default_rng(seed)
    data = []
    for _ in range(n_per_class):
        n = int(rng.integers(16, 37))
        a = np.zeros((n, n))
        i = np.arange(n)
        a[i, (i + 1) % n] = a[(i + 1) % n, i] = 1.0
        for _ in range(int(rng.integers(0, 3))):
            u, v = rng.choice(n, size=2, replace=False)
            a[u, v] = a[v, u] = 1.0
        data.append((Graph(a), 0))

        rows, cols = int(rng.integers(3, 7)), int(rng.integers(4, 7))
        idx = np.arange(rows * cols).reshape(rows, cols)
        a = np.zeros((rows * cols, rows * cols))
        for p, q in ((idx[:, :-1], idx[:, 1:]), (idx[:-1, :], idx[1:, :])):
            a[p.ravel(), q.ravel()] = a[q.ravel(), p.ravel()] = 1.0
        for _ in range(int(rng.integers(0, 3))):
            r, c = int(rng.integers(rows - 1)), int(rng.integers(cols - 1))
            u, v = idx[r, c], idx[r + 1, c + 1]
            a[u, v] = a[v, u] = 1.0
        data.append((Graph(a), 1))
    return data


def standardize(samples) -> list[Sample]:
    """Z-score node features with statistics pooled over every sample."""
    samples = list(samples)
    x = np.vstack([s.x for s in samples])
    mu, sd = x.mean(axis=0), x.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    return [replace(s, x=(s.x - mu) / sd) for s in samples]


def prepare_dataset(graphs_labels, config: ModelConfig, epsilon: float = 1e-2, seed: int = 0):
    """Standardized degree/clustering features plus a pyramid for each graph."""
    samples = []
    for g, y in graphs_labels:
        pyr = build_pyramid(g, config.pyramid_levels, epsilon=epsilon, seed=seed)
        samples.append(prepare_sample(g, pyr, node_features(g), y, config))
    return standardize(samples)


def signal_dataset(g: Graph, pyramid: Pyramid, signals, labels, config: ModelConfig):
    """Many signals on one shared graph and pyramid."""
    return [prepare_sample(g, pyramid, x, y, config) for x, y in zip(signals, labels)]


def smooth_vs_rough_signals(g: Graph, n_per_class: int = 20, n_modes: int = 4, seed: int = 0):
    """Class 0 mixes the lowest Laplacian modes, class 1 the highest; unit norm."""
    from .graph import laplacian
    from .linalg import eigh

    rng = np.random.default_rng(seed)
    u = eigh(laplacian(g)).eigenvectors  # columns by descending eigenvalue
    low, high = u[:, -n_modes:], u[:, :n_modes]
    signals, labels = [], []
    for _ in range(n_per_class):
        for y, basis in ((0, low), (1, high)):
            x = basis @ rng.normal(size=n_modes)
            signals.append((x / np.linalg.norm(x))[:, None])
            labels.append(y)
    return signals, labels


DEMO_TASKS = ("graphs", "signals")


def train_demo(
    task: str = "graphs",
    seed: int = 0,
    epochs: int = 200,
    hidden: int = 32,
    strides: tuple[int, int] = (2, 2),
    n_per_class: int = 20,
    epsilon: float = 1e-2,
    lr: float = 5e-4,
    batch_size: int = 1,
    pyramid: Pyramid | None = None,
    on_epoch=None,
) -> TrainResult:
    """Train the pooled network on a synthetic two-class task.

    ``graphs``: ring-family vs grid-family graphs, one pyramid per graph.
    ``signals``: smooth vs rough signals on a shared 8x8 grid whose pyramid
    may be passed in; pool strides above 2 use composed selectors.
    """
    if task == "graphs":
        if pyramid is not None:
            raise ValueError("graph classification builds one pyramid per graph")
        config = ModelConfig(2, 2, hidden, tuple(strides))
        samples = prepare_dataset(ring_vs_grid_dataset(n_per_class, seed), config, epsilon, seed)
    elif task == "signals":
        from .generators import gen_grid

        config = ModelConfig(1, 2, hidden, tuple(strides))
        g = gen_grid(8, 8)
        if pyramid is None:
            pyramid = build_pyramid(g, config.pyramid_levels, epsilon=epsilon, seed=seed)
        signals, labels = smooth_vs_rough_signals(g, n_per_class, seed=seed)
        samples = signal_dataset(g, pyramid, signals, labels, config)
    else:
        raise ValueError(f"unknown task {task!r}; choose from {', '.join(DEMO_TASKS)}")
    return train(samples, config, epochs, lr, batch_size, seed, on_epoch=on_epoch)
