"""``gwdict`` command-line front end.

Every command is a pure function of its input files, flags and ``--seed``.
Results go to ``<out>.*`` files with sorted JSON keys and sorted CSV rows; a
run manifest (command, flags, input hashes, version, duration) goes next to
them as ``<out>.run.json``, or to stderr when there is no ``--out``.

Exit codes: 0 success, 2 invalid input, 3 eigensolver failure, 4 violated
internal invariant.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import __version__
from .approx import (
    approximation_curve,
    localize,
    pc_sparsity_bound,
    snr_db,
)
from .dictionary import build_pc_dict, build_ps_dict, delta_dict, dict_stats, fourier_dict
from .exceptions import ConvergenceError, DisconnectedGraphError, GraphError, InvariantError
from .graph import cut_count
from .io import (
    dictionary_manifest,
    dumps,
    file_sha256,
    read_edge_list,
    read_signal,
    tree_to_dict,
    write_edge_list,
    write_json,
    write_signal,
    write_triplets,
)
from .multires import decompose, wavelet_basis
from .partition import bisect, verify_bisection
from .signals import GRAPH_FAMILIES, add_noise, gen_graph, gen_one_piece, gen_pbl, gen_pc, gen_pieces, grow_pieces

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_INVARIANT = 0, 2, 3, 4


def _threads():
    return int(os.environ.get("GWDICT_THREADS", "1") or 1)


def _label_value(label):
    try:
        return int(label)
    except ValueError:
        return label


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("budgets must be positive integers")
    return values


def _float_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError("noise levels must be nonnegative")
    return values


def _dict_list(text):
    kinds = [v.strip() for v in text.split(",") if v.strip()]
    bad = [k for k in kinds if k not in ("pc", "ps", "gft", "delta")]
    if not kinds or bad:
        raise argparse.ArgumentTypeError(f"dictionaries must be among pc, ps, gft, delta; got {text!r}")
    return kinds


def _load_graph(path):
    graph, labels = read_edge_list(path)
    return graph, labels


def _build_dict(kind, graph, tree, bandwidth):
    if kind == "pc":
        return build_pc_dict(tree)
    if kind == "ps":
        return build_ps_dict(tree, bandwidth, n_jobs=_threads())
    if kind == "gft":
        return fourier_dict(graph)
    return delta_dict(graph.n)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _fmt(v):
    return repr(float(v))


# ---------------------------------------------------------------- commands


def cmd_partition(args):
    graph, labels = _load_graph(args.graph)
    b = bisect(graph, weighted=args.weighted)
    cert = verify_bisection(graph, b)
    result = {
        "V1": [_label_value(labels[i]) for i in b.left.nodes],
        "V2": [_label_value(labels[i]) for i in b.right.nodes],
        "hubs": [_label_value(labels[i]) for i in b.hubs],
        "median": b.median,
        "certificate": {
            "connected_V1": cert.connected_left,
            "connected_V2": cert.connected_right,
            "balance_gap": cert.gap,
            "bound": cert.bound,
            "bound_holds": cert.bound_holds,
            "boundary_component_size": b.boundary_component_size,
            "repaired": b.repaired,
            "adjusted": b.adjusted,
        },
    }
    if args.out:
        write_json(f"{args.out}.json", result)
        return [f"{args.out}.json"]
    sys.stdout.write(dumps(result))
    return []


def cmd_wavelets(args):
    graph, labels = _load_graph(args.graph)
    tree = decompose(graph, n_jobs=_threads(), weighted=args.weighted)
    w = wavelet_basis(tree)
    gram = (w.matrix.T @ w.matrix).toarray()
    err = float(np.max(np.abs(gram - np.eye(graph.n))))
    if err > 1e-10:
        raise InvariantError(f"orthonormality: max |W^T W - I| = {err:.3e}")
    tree_json = tree_to_dict(tree)
    tree_json["labels"] = [_label_value(v) for v in labels]
    tree_json["columns"] = [None] + list(w.column_nodes[1:])
    tree_json["nnz"] = int(w.matrix.nnz)
    write_triplets(f"{args.out}.basis.csv", w.matrix)
    write_json(f"{args.out}.tree.json", tree_json)
    return [f"{args.out}.basis.csv", f"{args.out}.tree.json"]


def cmd_dict(args):
    graph, labels = _load_graph(args.graph)
    tree = decompose(graph, n_jobs=_threads())
    d = _build_dict(args.kind, graph, tree, args.bandwidth)
    manifest = dictionary_manifest(d)
    manifest["pieces"] = [list(t.piece.nodes) for t in tree.nodes]
    manifest["labels"] = [_label_value(v) for v in labels]
    stats = dict_stats(d)
    manifest["nnz"] = stats.nnz
    manifest["coherence"] = stats.coherence
    write_triplets(f"{args.out}.atoms.csv", d.matrix)
    write_json(f"{args.out}.manifest.json", manifest)
    return [f"{args.out}.atoms.csv", f"{args.out}.manifest.json"]


def cmd_approx(args):
    graph, labels = _load_graph(args.graph)
    x = read_signal(args.signal, n=graph.n, labels=labels)
    if not np.any(x):
        raise ValueError("the signal is identically zero; NMSE is undefined")
    tree = decompose(graph, n_jobs=_threads())
    budgets = args.budgets or list(range(1, graph.n + 1))
    rows, per_dict = [], {}
    for kind in args.dict:
        d = _build_dict(kind, graph, tree, args.bandwidth)
        curve = approximation_curve(d, x, budgets, args.strategy)
        exact = [r.budget for r in curve if r.nmse <= args.tol]
        per_dict[kind] = {
            "n_atoms": len(d),
            "final_nmse": curve[-1].nmse,
            "exact_budget": exact[0] if exact else None,
        }
        for r in curve:
            rows.append((f"{kind}:{r.method}", r.budget, r.nmse, r.snr_db))
    rows.sort(key=lambda r: (r[0].split(":")[0], r[1], r[0]))
    _write_csv(
        f"{args.out}.csv",
        ["budget", "nmse", "snr_db", "method"],
        [[b, _fmt(e), _fmt(s), m] for m, b, e, s in rows],
    )
    cuts = cut_count(graph, x)
    summary = {
        "n": graph.n,
        "strategy": args.strategy,
        "budgets": sorted(set(budgets)),
        "exact_nmse_threshold": args.tol,
        "cut_count": cuts,
        "depth": tree.depth,
        "pc_bound": pc_sparsity_bound(graph, tree, x),
        "dictionaries": per_dict,
    }
    if "ps" in args.dict:
        summary["bandwidth"] = args.bandwidth
    write_json(f"{args.out}.summary.json", summary)
    return [f"{args.out}.csv", f"{args.out}.summary.json"]


def _localize_trial(tree, d, sigmas, args, trial):
    rng = np.random.default_rng([args.seed, trial])
    n = tree.n
    lo = args.min_piece if args.min_piece is not None else max(2, n // 16)
    hi = args.max_piece if args.max_piece is not None else max(lo, n // 4)
    x, _ = gen_one_piece(tree, args.signal_bandwidth, rng, min_size=lo, max_size=hi)
    scale = 1.0 if args.absolute_sigma else float(np.max(np.abs(x)))
    out = []
    for s in sigmas:
        sigma = s * scale
        y = add_noise(x, sigma, rng)
        _, rep = localize(d, y, tol=args.tol, sigma=sigma, truth=x)
        out.append((snr_db(y, x), rep.snr_db))
    return out


def cmd_localize(args):
    graph, labels = _load_graph(args.graph)
    if args.trials < 1:
        raise ValueError("--trials must be at least 1")
    tree = decompose(graph, n_jobs=_threads())
    kind = args.dict[0]
    if len(args.dict) != 1:
        raise ValueError("localize takes a single --dict")
    d = _build_dict(kind, graph, tree, args.bandwidth)
    sigmas = args.sigma if args.sigma is not None else [0.05, 0.1, 0.2, 0.5]
    per_trial = [_localize_trial(tree, d, sigmas, args, t) for t in range(args.trials)]
    arr = np.array(per_trial)  # trials x sigmas x 2
    means = arr.mean(axis=0)
    rows = sorted(zip(sigmas, means[:, 0], means[:, 1]))
    _write_csv(f"{args.out}.csv", ["sigma", "snr_in", "snr_out"], [[_fmt(s), _fmt(a), _fmt(b)] for s, a, b in rows])
    return [f"{args.out}.csv"]


def _graph_params(args):
    params = {}
    for key in ("n", "rows", "cols", "leaves", "radius", "p"):
        v = getattr(args, key)
        if v is not None:
            params[key] = v
    return params


def cmd_synth_graph(args):
    params = _graph_params(args)
    g = gen_graph(args.family, seed=args.seed, weights=args.weights, **params)
    write_edge_list(f"{args.out}.tsv", g)
    write_json(
        f"{args.out}.json",
        {
            "family": args.family,
            "params": params,
            "weights": args.weights,
            "seed": args.seed,
            "n": g.n,
            "n_edges": g.n_edges,
        },
    )
    return [f"{args.out}.tsv", f"{args.out}.json"]


def cmd_synth_signal(args):
    graph, labels = _load_graph(args.graph)
    rng = np.random.default_rng(args.seed)
    tree = decompose(graph, n_jobs=_threads())
    if args.arbitrary_pieces:
        pieces = grow_pieces(graph, args.pieces, rng)
    else:
        pieces = gen_pieces(tree, args.pieces, rng)
    side = {"model": args.model, "seed": args.seed, "pieces": [list(p.nodes) for p in pieces],
            "arbitrary_pieces": args.arbitrary_pieces, "depth": tree.depth}
    if args.model == "pc":
        sig = gen_pc(pieces, rng, distinct=True, n=graph.n)
        x = sig.values
        side["piece_values"] = sig.piece_values
        side["cut_count"] = cut_count(graph, x)
        side["pc_bound"] = pc_sparsity_bound(graph, tree, x)
    else:
        small = [len(p) for p in pieces if len(p) < args.bandwidth]
        sig = gen_pbl(graph, pieces, args.bandwidth, rng)
        x = sig.values
        side["bandwidth"] = args.bandwidth
        side["coefficients"] = [c for c in sig.coefficients]
        side["pieces_below_bandwidth"] = len(small)
    if args.noise_sigma:
        x = add_noise(x, args.noise_sigma, rng)
        side["noise_sigma"] = args.noise_sigma
    write_signal(f"{args.out}.csv", x, labels=labels)
    write_json(f"{args.out}.json", side)
    return [f"{args.out}.csv", f"{args.out}.json"]


# ------------------------------------------------------------------ parser


def build_parser():
    parser = argparse.ArgumentParser(prog="gwdict", description="Graph wavelets and multiscale dictionaries.")
    parser.add_argument("--version", action="version", version=f"gwdict {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_arg(p):
        p.add_argument("--graph", required=True, help="edge list: 'j<TAB>k[<TAB>w]' per line")

    p = sub.add_parser("partition", help="bisect a graph into two connected halves")
    graph_arg(p)
    p.add_argument("--weighted", action="store_true", help="hub distances use edge lengths 1/w")
    p.add_argument("--out", help="write <out>.json instead of printing")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("wavelets", help="dump the Haar-like basis and its partition tree")
    graph_arg(p)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_wavelets)

    p = sub.add_parser("dict", help="dump a multiscale dictionary")
    p.add_argument("kind", choices=["pc", "ps"])
    graph_arg(p)
    p.add_argument("--bandwidth", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dict)

    p = sub.add_parser("approx", help="approximation error versus atom budget")
    graph_arg(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--dict", type=_dict_list, default=["ps"], help="comma-separated: pc,ps,gft,delta")
    p.add_argument("--bandwidth", type=int, default=10)
    p.add_argument("--budgets", type=_int_list, help="comma-separated budgets (default 1..N)")
    p.add_argument("--strategy", choices=["best", "nla", "omp"], default="best")
    p.add_argument("--tol", type=float, default=1e-12, help="NMSE counted as exact in the summary")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("localize", help="denoise random one-piece signals")
    graph_arg(p)
    p.add_argument("--dict", type=_dict_list, default=["ps"])
    p.add_argument("--bandwidth", type=int, default=10, help="eigenvectors per piece in the dictionary")
    p.add_argument("--signal-bandwidth", type=int, default=3, help="bandwidth of the generated signals")
    p.add_argument("--sigma", type=_float_list, help="noise levels as fractions of max|x| (default 0.05,0.1,0.2,0.5)")
    p.add_argument("--absolute-sigma", action="store_true", help="treat --sigma as absolute noise levels")
    p.add_argument("--tol", type=float, help="fixed relative-residual stop (default: noise-norm rule)")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-piece", type=int)
    p.add_argument("--max-piece", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_localize)

    synth = sub.add_parser("synth", help="synthetic graphs and signals")
    ssub = synth.add_subparsers(dest="what", required=True)

    p = ssub.add_parser("graph")
    p.add_argument("family", choices=sorted(GRAPH_FAMILIES))
    p.add_argument("--n", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--leaves", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--weights", choices=["unit", "random"], default="unit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_graph)

    p = ssub.add_parser("signal")
    graph_arg(p)
    p.add_argument("--model", choices=["pc", "pbl"], default="pc")
    p.add_argument("--pieces", type=int, default=4)
    p.add_argument("--bandwidth", type=int, default=3)
    p.add_argument("--arbitrary-pieces", action="store_true", help="grow pieces by random BFS instead of cutting the tree")
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth_signal)
    return parser


def _manifest(argv, args, outputs, duration):
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    inputs = {}
    for key in ("graph", "signal"):
        path = flags.get(key)
        if path and os.path.exists(path):
            inputs[path] = file_sha256(path)
    return {
        "command": " ".join(argv),
        "flags": flags,
        "seed": flags.get("seed"),
        "inputs": inputs,
        "outputs": outputs,
        "version": __version__,
        "duration_s": round(duration, 6),
    }


def _describe_components(err, labels):
    comps = err.components
    shown = []
    for comp in comps[:10]:
        names = [str(labels[i]) if labels else str(i) for i in comp[:10]]
        shown.append("{" + ", ".join(names) + (", ..." if len(comp) > 10 else "") + "}")
    more = f" and {len(comps) - 10} more" if len(comps) > 10 else ""
    return f"{len(comps)} components: " + " ".join(shown) + more


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        outputs = args.func(args)
    except DisconnectedGraphError as err:
        labels = None
        if getattr(args, "graph", None):
            try:
                labels = read_edge_list(args.graph)[1]
            except (OSError, GraphError):
                pass
        print(f"gwdict: error: graph is disconnected ({_describe_components(err, labels)})", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as err:
        print(f"gwdict: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvariantError as err:
        print(f"gwdict: invariant violated: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    except (GraphError, ValueError, OSError, KeyError) as err:
        msg = err.strerror + f": {err.filename}" if isinstance(err, OSError) and err.filename else err
        print(f"gwdict: error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    manifest = _manifest(argv, args, outputs, time.perf_counter() - start)
    if getattr(args, "out", None):
        write_json(f"{args.out}.run.json", manifest)
    else:
        sys.stderr.write(dumps(manifest))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
