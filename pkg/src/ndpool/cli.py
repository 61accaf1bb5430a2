"""Command-line interface: ``ndpool {gen,coarsen,cut,oracle,sweep,train-demo}``.

Data goes to stdout or ``--out``; diagnostics go to stderr. Seeds default
to 0. Exit codes: 0 success, 2 usage or unreadable input, 3 precondition
violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys

from . import io
from .cut import BRUTE_FORCE_MAX_N, brute_force_maxcut, maxcut_upper_bound, partition_with_fallback
from .generators import FAMILIES, generate
from .gnn import DEMO_TASKS, train_demo
from .graph import Graph
from .pyramid import CoarsenedLevel, DecimationSelector, Pyramid, build_pyramid, step_seed
from .sweeps import DENSIFY_FIELDS, EPSILON_FIELDS, default_eps_grid, densify_sweep, epsilon_sweep

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION = 0, 2, 3

log = logging.getLogger("ndpool")


class UsageError(Exception):
    pass


class PreconditionError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        io.write_text(out, text)


def _load_graph(path: str) -> Graph:
    try:
        return io.read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}")


def cmd_gen(args) -> int:
    params = {
        k: v for k, v in {
            "n": args.n, "rows": args.rows, "cols": args.cols, "p": args.p,
            "p_in": args.p_in, "p_out": args.p_out, "blocks": args.blocks,
            "communities": args.communities, "k": args.k, "sigma": args.sigma,
        }.items() if v is not None
    }
    try:
        g = generate(args.type, seed=args.seed, **params)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(io.graph_to_json(g), args.out)
    return EXIT_OK


def cmd_coarsen(args) -> int:
    g = _load_graph(args.input)
    try:
        pyr = build_pyramid(g, args.levels, epsilon=args.epsilon, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(io.pyramid_to_json(pyr), args.out)
    return EXIT_OK


def cmd_cut(args) -> int:
    g = _load_graph(args.input)
    if g.num_edges() == 0:
        report = {"gamma": 0.0, "method": "none", "no_edges": True, "lower_bound": 0.5}
    else:
        # same seed as coarsening step 0, so this reproduces its cut_log entry
        part = partition_with_fallback(g, seed=step_seed(args.seed, 0))
        bounds = maxcut_upper_bound(g, part.assignment)
        report = {
            "gamma": part.gamma,
            "method": part.method,
            "upper_bound": bounds.upper_bound,
            "lambda_s_max": bounds.lambda_s_max,
            "lower_bound": bounds.lower_bound,
            "trevisan_ok": bounds.trevisan_ok,
        }
    _emit(json.dumps(report) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = _load_graph(args.input)
    if g.n > BRUTE_FORCE_MAX_N:
        raise PreconditionError(f"oracle enumerates all cuts and is limited to n <= {BRUTE_FORCE_MAX_N} (got {g.n})")
    z, gamma = brute_force_maxcut(g)
    _emit(json.dumps({"maxcut_gamma": gamma, "assignment": z.tolist()}) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    g = _load_graph(args.input)
    steps = args.steps
    try:
        if args.mode == "densify":
            records = densify_sweep(g, steps=steps, seed=args.seed)
            fields = DENSIFY_FIELDS
        else:
            records = epsilon_sweep(g, default_eps_grid(steps), k=args.k)
            fields = EPSILON_FIELDS
    except ValueError as exc:
        raise PreconditionError(str(exc))
    fh = sys.stdout if args.out is None else open(args.out, "w", newline="")
    try:
        writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow(r.row(fields))
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def _load_pyramid(path: str, n_input: int) -> Pyramid:
    try:
        with open(path) as fh:
            data = io.pyramid_from_json(fh.read(), n_input=n_input)
    except OSError as exc:
        raise UsageError(f"cannot read pyramid {path}: {exc.strerror}")
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}")
    levels, parent = [], n_input
    for lvl in data["levels"]:
        sel = DecimationSelector(lvl["kept"], parent)
        a = lvl["adjacency"]
        levels.append(CoarsenedLevel(a, a, sel, data["epsilon"], tuple(lvl["cut_log"])))
        parent = lvl["n"]
    return Pyramid(levels, data["requested_levels"], data["epsilon"], n_input, data["truncated"])


def cmd_train_demo(args) -> int:
    pyramid = _load_pyramid(args.pyramid, 64) if args.pyramid else None
    if pyramid is not None and args.task != "signals":
        raise UsageError("--pyramid applies to the signals task only")
    lines = []

    def on_epoch(rep):
        lines.append(json.dumps(rep.to_dict()))

    try:
        result = train_demo(
            args.task, seed=args.seed, epochs=args.epochs, hidden=args.hidden,
            strides=tuple(args.strides), epsilon=args.epsilon, pyramid=pyramid, on_epoch=on_epoch,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    lines.append(json.dumps({"final_accuracy": result.final_accuracy, "epochs": len(result.history)}))
    _emit("\n".join(lines) + "\n", args.out)
    log.info("final training accuracy %.4f", result.final_accuracy)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ndpool", description="Node decimation pooling toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True, out=True):
        if seed:
            p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        if out:
            p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("--type", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--p", type=float, help="edge probability (erdos)")
    p.add_argument("--p-in", type=float)
    p.add_argument("--p-out", type=float)
    p.add_argument("--blocks", type=_int_list, help="block sizes (sbm), e.g. 16,16")
    p.add_argument("--communities", type=int)
    p.add_argument("--k", type=int, help="neighbours per node (sensor)")
    p.add_argument("--sigma", type=float)
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("coarsen", help="build a coarsening pyramid")
    p.add_argument("input")
    p.add_argument("--levels", type=_int_list, default=[0, 1], help="comma list of steps to emit")
    p.add_argument("--epsilon", type=float, default=1e-2)
    common(p)
    p.set_defaults(func=cmd_coarsen)

    p = sub.add_parser("cut", help="spectral MAXCUT with bounds")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_cut)

    p = sub.add_parser("oracle", help="exact MAXCUT by enumeration")
    p.add_argument("input")
    common(p, seed=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="densification or sparsification sweep to CSV")
    p.add_argument("input")
    p.add_argument("--mode", required=True, choices=("densify", "epsilon"))
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--k", type=int, default=10, help="eigenvalues in the spectral distance")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("train-demo", help="train the pooled network on a synthetic task")
    p.add_argument("--task", choices=DEMO_TASKS, default="graphs")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--strides", type=_int_list, default=[2, 2])
    p.add_argument("--epsilon", type=float, default=1e-2)
    p.add_argument("--pyramid", help="pyramid file for the shared 8x8 grid (signals task)")
    common(p)
    p.set_defaults(func=cmd_train_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s", stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ndpool {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"ndpool {args.command}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
