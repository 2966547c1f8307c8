"""Benchmark graph-classification datasets and cached feature matrices.

Datasets use the common multi-file text layout: ``<name>_A.txt`` holds
comma-separated 1-indexed vertex pairs, ``<name>_graph_indicator.txt`` maps
each vertex to its 1-indexed graph, ``<name>_graph_labels.txt`` holds one
class per graph. Node labels and node attributes are optional.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    EdgeAcrossGraphs,
    MalformedLine,
    MissingFile,
    OrphanVertexIndex,
    SchemaMismatch,
)
from .graph import Graph, build_graph
from .signals import SignalSet, default_signals

log = logging.getLogger(__name__)

DATA_DIR_ENV = "GS_DATA_DIR"


@dataclass(frozen=True, eq=False)
class GraphDataset:
    name: str
    graphs: list[Graph]
    labels: np.ndarray
    label_mapping: dict = field(default_factory=dict)
    node_labels: list[np.ndarray] | None = None
    node_attributes: list[np.ndarray] | None = None
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.graphs)

    @property
    def num_classes(self) -> int:
        return len(self.label_mapping) if self.label_mapping else int(self.labels.max()) + 1

    @property
    def node_label_values(self) -> tuple | None:
        if self.node_labels is None:
            return None
        return tuple(sorted(set(np.concatenate(self.node_labels).tolist())))

    def signals_for(self, i: int, select: Sequence[str] | None = None) -> SignalSet:
        return default_signals(
            self.graphs[i], self.name,
            attributes=None if self.node_attributes is None else self.node_attributes[i],
            labels=None if self.node_labels is None else self.node_labels[i],
            label_values=self.node_label_values,
            select=select,
        )


def resolve_dataset_dir(data_dir: str | os.PathLike | None, name: str) -> Path:
    base = Path(data_dir if data_dir is not None else os.environ.get(DATA_DIR_ENV, "."))
    nested = base / name
    if (nested / f"{name}_A.txt").exists():
        return nested
    return base


def _lines(path: Path):
    if not path.exists():
        raise MissingFile(f"missing dataset file: {path}")
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if s:
                yield lineno, s


def _read_ints(path: Path) -> np.ndarray:
    out = []
    for lineno, s in _lines(path):
        try:
            out.append(int(s))
        except ValueError:
            try:
                f = float(s)
            except ValueError:
                raise MalformedLine(path, lineno, s, "expected an integer") from None
            if f != int(f):
                raise MalformedLine(path, lineno, s, "expected an integer")
            out.append(int(f))
    return np.asarray(out, dtype=np.int64)


def _read_rows(path: Path) -> np.ndarray:
    rows = []
    width = None
    for lineno, s in _lines(path):
        try:
            row = [float(t) for t in s.split(",")]
        except ValueError:
            raise MalformedLine(path, lineno, s, "expected comma-separated reals") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MalformedLine(path, lineno, s, f"expected {width} columns")
        rows.append(row)
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), width or 0)


def _read_pairs(path: Path):
    pairs = []
    for lineno, s in _lines(path):
        parts = s.split(",")
        if len(parts) != 2:
            raise MalformedLine(path, lineno, s, "expected two comma-separated vertex ids")
        try:
            pairs.append((int(parts[0]), int(parts[1]), lineno))
        except ValueError:
            raise MalformedLine(path, lineno, s, "expected integer vertex ids") from None
    return pairs


def load_tu_dataset(data_dir: str | os.PathLike | None, name: str) -> GraphDataset:
    root = resolve_dataset_dir(data_dir, name)
    f = lambda suffix: root / f"{name}_{suffix}.txt"  # noqa: E731

    indicator = _read_ints(f("graph_indicator"))
    graph_labels = _read_ints(f("graph_labels"))
    pairs = _read_pairs(f("A"))
    num_vertices = len(indicator)
    num_graphs = len(graph_labels)
    if num_vertices and (indicator.min() < 1 or indicator.max() > num_graphs):
        raise OrphanVertexIndex(f"graph indicator references graphs outside 1..{num_graphs}")

    # global (0-based) vertex -> (graph, local index)
    gid = indicator - 1
    order = np.argsort(gid, kind="stable")
    local = np.empty(num_vertices, dtype=np.int64)
    sizes = np.bincount(gid, minlength=num_graphs)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    local[order] = np.arange(num_vertices) - np.repeat(offsets, sizes)

    directed: set[tuple[int, int]] = set()
    self_loops = 0
    per_graph: list[dict[tuple[int, int], None]] = [dict() for _ in range(num_graphs)]
    for a, b, lineno in pairs:
        if not (1 <= a <= num_vertices and 1 <= b <= num_vertices):
            raise OrphanVertexIndex(
                f"{f('A')}:{lineno}: vertex id outside 1..{num_vertices}: ({a}, {b})")
        a0, b0 = a - 1, b - 1
        if gid[a0] != gid[b0]:
            raise EdgeAcrossGraphs(
                f"{f('A')}:{lineno}: edge ({a}, {b}) joins graphs {gid[a0] + 1} and {gid[b0] + 1}")
        if a0 == b0:
            self_loops += 1
            continue
        directed.add((a0, b0))
        key = (min(a0, b0), max(a0, b0))
        per_graph[gid[a0]][key] = None
    unpaired = sum(1 for a, b in directed if (b, a) not in directed)
    if unpaired:
        log.warning("%s: %d edges listed without their reverse; symmetrized", name, unpaired)
    if self_loops:
        log.warning("%s: dropped %d self-loops", name, self_loops)

    graphs = []
    for k in range(num_graphs):
        edges = sorted((int(local[u]), int(local[v]), 1.0) for u, v in per_graph[k])
        graphs.append(build_graph(int(sizes[k]), edges))

    values = sorted(set(graph_labels.tolist()))
    mapping = {v: i for i, v in enumerate(values)}
    labels = np.asarray([mapping[v] for v in graph_labels.tolist()], dtype=np.int64)

    def split(arr):
        arr = arr[order]
        return [arr[o:o + s] for o, s in zip(offsets, sizes)]

    node_labels = node_attributes = None
    if f("node_labels").exists():
        nl = _read_ints(f("node_labels"))
        if len(nl) != num_vertices:
            raise MalformedLine(f("node_labels"), len(nl), "", f"expected {num_vertices} rows")
        node_labels = split(nl)
    if f("node_attributes").exists():
        na = _read_rows(f("node_attributes"))
        if len(na) != num_vertices:
            raise MalformedLine(f("node_attributes"), len(na), "", f"expected {num_vertices} rows")
        node_attributes = split(na)

    stats = {"edges_without_reverse": unpaired, "self_loops_dropped": self_loops}
    return GraphDataset(name=name, graphs=graphs, labels=labels, label_mapping=mapping,
                        node_labels=node_labels, node_attributes=node_attributes, stats=stats)


def write_tu_dataset(directory: str | os.PathLike, name: str, graphs: Sequence[Graph],
                     labels: Sequence[int], node_labels=None, node_attributes=None) -> Path:
    """Write graphs in the benchmark layout (both edge directions listed)."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    offset = 0
    with open(root / f"{name}_A.txt", "w") as fa, \
            open(root / f"{name}_graph_indicator.txt", "w") as fi:
        for k, g in enumerate(graphs):
            for u, v, _ in g.edges:
                fa.write(f"{u + offset + 1}, {v + offset + 1}\n")
                fa.write(f"{v + offset + 1}, {u + offset + 1}\n")
            fi.writelines(f"{k + 1}\n" for _ in range(g.n))
            offset += g.n
    (root / f"{name}_graph_labels.txt").write_text("".join(f"{int(y)}\n" for y in labels))
    if node_labels is not None:
        (root / f"{name}_node_labels.txt").write_text(
            "".join(f"{int(v)}\n" for arr in node_labels for v in arr))
    if node_attributes is not None:
        (root / f"{name}_node_attributes.txt").write_text(
            "".join(", ".join(repr(float(t)) for t in row) + "\n"
                    for arr in node_attributes for row in np.atleast_2d(arr)))
    return root


# feature cache

SCHEMA_KEYS = ("J", "Q", "moment_mode", "signal_names")


def schema_of(meta: dict) -> dict:
    # JSON has no tuples; compare sequences as lists
    return {k: list(meta[k]) if isinstance(meta[k], (tuple, list)) else meta[k]
            for k in SCHEMA_KEYS if k in meta}


def schema_hash(meta: dict) -> str:
    blob = json.dumps(schema_of(meta), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def sidecar_path(path: str | os.PathLike) -> Path:
    return Path(str(path) + ".json")


def save_features(path: str | os.PathLike, X: np.ndarray, labels: Sequence[int],
                  meta: dict, ids: Sequence | None = None) -> Path:
    """Write ``graph_id,label,f0..`` CSV plus a JSON sidecar with ``meta``."""
    path = Path(path)
    X = np.asarray(X, dtype=np.float64)
    ids = list(range(len(X))) if ids is None else list(ids)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["graph_id", "label"] + [f"f{k}" for k in range(X.shape[1])])
        for gid, y, row in zip(ids, labels, X):
            w.writerow([gid, int(y)] + ["%.17g" % v for v in row])
    meta = dict(meta, num_features=int(X.shape[1]), num_graphs=int(X.shape[0]))
    meta["schema_hash"] = schema_hash(meta)
    sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def load_features(path: str | os.PathLike, expect: dict | None = None):
    """Return ``(ids, labels, X, meta)``; ``expect`` is checked against the schema."""
    path = Path(path)
    if not path.exists():
        raise MissingFile(f"missing feature file: {path}")
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {}
    if expect is not None:
        want, have = schema_of(expect), schema_of(meta)
        diff = {k: (have.get(k), v) for k, v in want.items() if have.get(k) != v}
        if diff:
            raise SchemaMismatch(f"{path}: cached schema differs (have, want): {diff}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[:2] != ["graph_id", "label"]:
        raise SchemaMismatch(f"{path}: unexpected header {header[:2]}")
    width = len(header) - 2
    if "num_features" in meta and meta["num_features"] != width:
        raise SchemaMismatch(f"{path}: {width} feature columns, sidecar says {meta['num_features']}")
    ids = [r[0] for r in body]
    labels = np.asarray([int(r[1]) for r in body], dtype=np.int64)
    X = np.asarray([[float(t) for t in r[2:]] for r in body], dtype=np.float64).reshape(len(body), width)
    return ids, labels, X, meta
