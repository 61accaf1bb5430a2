"""JSON file formats for graphs and pyramids.

Floats are written with 17 significant digits so that parse -> serialize
is the identity on finite weights.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .graph import Graph
from .pyramid import PartitionMeta, Pyramid


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _edge_list(a: np.ndarray) -> list[tuple[int, int, float]]:
    i, j = np.nonzero(np.triu(a, k=1))
    return [(int(p), int(q), float(a[p, q])) for p, q in zip(i, j)]


def _edges_json(edges) -> str:
    return "[" + ", ".join(f"[{i}, {j}, {_fmt(w)}]" for i, j, w in edges) + "]"


def _num_json(x) -> str:
    if x is None:
        return "null"
    if not math.isfinite(x):
        raise FormatError(f"cannot serialize non-finite value {x}")
    return _fmt(x)


def graph_to_json(g: Graph) -> str:
    """GraphFile text. Self-loops are not representable and are rejected."""
    if g.has_self_loops():
        raise FormatError("graph files do not carry self-loops")
    return f'{{"n": {g.n}, "edges": {_edges_json(_edge_list(g.adjacency))}}}\n'


def _parse_edges(n: int, edges) -> np.ndarray:
    if not isinstance(edges, list):
        raise FormatError("'edges' must be a list")
    a = np.zeros((n, n))
    for e in edges:
        if not (isinstance(e, list) and len(e) == 3):
            raise FormatError(f"edge {e!r} is not [i, j, w]")
        i, j, w = e
        if not (isinstance(i, int) and isinstance(j, int)) or isinstance(i, bool) or isinstance(j, bool):
            raise FormatError(f"edge {e!r} has non-integer endpoints")
        if not 0 <= i < j < n:
            raise FormatError(f"edge {e!r} needs 0 <= i < j < n")
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not math.isfinite(w) or w <= 0:
            raise FormatError(f"edge {e!r} needs a finite positive weight")
        if a[i, j] != 0:
            raise FormatError(f"duplicate edge ({i}, {j})")
        a[i, j] = a[j, i] = float(w)
    return a


def graph_from_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise FormatError("graph file needs 'n' and 'edges'")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError("'n' must be a positive integer")
    return Graph(_parse_edges(n, obj["edges"]))


def pyramid_to_json(p: Pyramid) -> str:
    levels = []
    for lvl in p.levels:
        log = ", ".join(
            f'{{"gamma": {_num_json(m.gamma)}, "method": {json.dumps(m.method)}, '
            f'"lambda_s_max": {_num_json(m.lambda_s_max)}}}'
            for m in lvl.cut_log
        )
        levels.append(
            f'{{"n": {lvl.n}, "kept": {json.dumps(lvl.keep.kept.tolist())}, '
            f'"edges": {_edges_json(_edge_list(lvl.sparsified))}, "cut_log": [{log}]}}'
        )
    return (
        f'{{"epsilon": {_num_json(p.epsilon)}, "requested_levels": {json.dumps(list(p.requested_levels))}, '
        f'"truncated": {json.dumps(bool(p.truncated))}, "levels": [' + ", ".join(levels) + "]}\n"
    )


def pyramid_from_json(text: str, n_input: int | None = None) -> dict:
    """Parse a PyramidFile into plain data and validate the kept-index chain.

    Returns ``{"epsilon", "requested_levels", "truncated", "levels"}`` with
    each level holding ``n``, ``kept`` (int array), ``adjacency`` and
    ``cut_log`` (list of PartitionMeta).
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    for key in ("epsilon", "requested_levels", "truncated", "levels"):
        if not isinstance(obj, dict) or key not in obj:
            raise FormatError(f"pyramid file needs {key!r}")
    parent = n_input
    levels = []
    for k, lvl in enumerate(obj["levels"]):
        n = lvl.get("n")
        kept = np.asarray(lvl.get("kept", []), dtype=np.intp)
        if not isinstance(n, int) or kept.size != n:
            raise FormatError(f"level {k}: 'kept' length must equal n")
        if np.any(np.diff(kept) <= 0) or (kept.size and kept[0] < 0):
            raise FormatError(f"level {k}: 'kept' must be strictly increasing")
        if parent is not None and kept.size and kept[-1] >= parent:
            raise FormatError(f"level {k}: 'kept' indexes beyond the previous level")
        cut_log = [
            PartitionMeta(c["gamma"], c["method"], c["lambda_s_max"]) for c in lvl.get("cut_log", [])
        ]
        levels.append({"n": n, "kept": kept, "adjacency": _parse_edges(n, lvl["edges"]), "cut_log": cut_log})
        parent = n
    return {
        "epsilon": obj["epsilon"],
        "requested_levels": list(obj["requested_levels"]),
        "truncated": bool(obj["truncated"]),
        "levels": levels,
    }


def read_graph(path) -> Graph:
    with open(path) as fh:
        return graph_from_json(fh.read())


def write_text(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)
