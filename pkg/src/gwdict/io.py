"""Text formats: edge lists, signals, sparse triplet dumps and JSON sidecars.

Floats are written with ``repr`` so every file parses back to the exact same
values.
"""

from __future__ import annotations

import csv
import hashlib
import json

import numpy as np
import scipy.sparse as sp

from .exceptions import GraphError
from .graph import Graph, build_graph

__all__ = [
    "read_edge_list",
    "write_edge_list",
    "read_signal",
    "write_signal",
    "write_triplets",
    "read_triplets",
    "write_json",
    "tree_to_dict",
    "dictionary_manifest",
    "file_sha256",
]


def _label_order(labels):
    try:
        return sorted(labels, key=int)
    except ValueError:
        return sorted(labels)


def read_edge_list(path):
    """Parse ``j<TAB>k[<TAB>w]`` lines.

    ``#`` starts a comment, blank lines are skipped and a line with a single
    label declares a node without edges. Labels are remapped to ``0..N-1``
    (numerically if all labels are integers, else lexicographically).

    Returns
    -------
    graph : Graph
    labels : list of str
        ``labels[i]`` is the original label of node ``i``.
    """
    raw_edges, nodes = [], set()
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 1:
                nodes.add(parts[0])
                continue
            if len(parts) not in (2, 3):
                raise GraphError(f"{path}:{lineno}: expected 'j k [w]', got {line!r}")
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphError(f"{path}:{lineno}: bad weight {parts[2]!r}") from None
            nodes.update(parts[:2])
            raw_edges.append((parts[0], parts[1], w))
    labels = _label_order(nodes)
    index = {lab: i for i, lab in enumerate(labels)}
    edges = [(index[a], index[b], w) for a, b, w in raw_edges]
    return build_graph(len(labels), edges), labels


def write_edge_list(path, graph: Graph, labels=None):
    with open(path, "w") as fh:
        fh.write(f"# nodes: {graph.n}  edges: {graph.n_edges}\n")
        covered = np.zeros(graph.n, dtype=bool)
        covered[graph.edges.ravel()] = True
        name = (lambda i: labels[i]) if labels is not None else str
        for i in np.flatnonzero(~covered):
            fh.write(f"{name(int(i))}\n")
        for (j, k), w in zip(graph.edges.tolist(), graph.weights.tolist()):
            fh.write(f"{name(j)}\t{name(k)}\t{w!r}\n")


def read_signal(path, n=None, labels=None):
    """Read a signal as ``node,value`` CSV or one value per line.

    ``labels`` (from :func:`read_edge_list`) maps node labels back to indices.
    """
    index = {lab: i for i, lab in enumerate(labels)} if labels is not None else None
    pairs, plain = [], []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "," in line:
                node, value = (s.strip() for s in line.split(",", 1))
                try:
                    v = float(value)
                except ValueError:
                    continue  # header row
                pairs.append((index[node] if index is not None else int(node), v))
            else:
                plain.append(float(line))
    if pairs and plain:
        raise ValueError(f"{path}: mixes 'node,value' rows with bare values")
    if pairs:
        size = n if n is not None else max(i for i, _ in pairs) + 1
        x = np.zeros(size)
        seen = set()
        for i, v in pairs:
            if i in seen:
                raise ValueError(f"{path}: node {i} appears twice")
            seen.add(i)
            x[i] = v
        if n is not None and len(seen) != n:
            raise ValueError(f"{path}: expected values for {n} nodes, got {len(seen)}")
        return x
    x = np.array(plain)
    if n is not None and len(x) != n:
        raise ValueError(f"{path}: expected {n} values, got {len(x)}")
    return x


def write_signal(path, x, labels=None):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "value"])
        for i, v in enumerate(np.asarray(x, dtype=float).tolist()):
            w.writerow([labels[i] if labels is not None else i, repr(v)])


def write_triplets(path, matrix):
    """Sparse ``row,col,value`` dump ordered by column then row."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.row, coo.col))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col", "value"])
        for r, c, v in zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()):
            w.writerow([r, c, repr(float(v))])


def read_triplets(path, shape):
    rows, cols, vals = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for r, c, v in reader:
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(v))
    return sp.csc_matrix((vals, (rows, cols)), shape=shape)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def tree_to_dict(tree, labels=None):
    nodes = []
    for i, t in enumerate(tree.nodes):
        piece = list(t.piece.nodes) if labels is None else [labels[v] for v in t.piece.nodes]
        nodes.append(
            {
                "id": i,
                "level": t.level,
                "parent": t.parent,
                "children": list(t.children) if t.children else None,
                "piece": piece,
                "repaired": t.repaired,
            }
        )
    return {"n": tree.n, "depth": tree.depth, "n_tree_nodes": len(tree.nodes), "nodes": nodes}


def dictionary_manifest(d, labels=None):
    atoms = []
    for j, a in enumerate(d.atoms):
        atoms.append(
            {
                "atom": j,
                "piece_id": a.piece_id,
                "level": a.level,
                "spectral_index": a.spectral_index,
                "size": len(a.piece),
            }
        )
    return {
        "kind": d.kind,
        "bandwidth": d.bandwidth,
        "n": d.n,
        "n_atoms": len(d),
        "depth": d.tree.depth if d.tree is not None else None,
        "atoms": atoms,
    }


def file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
