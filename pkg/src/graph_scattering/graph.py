"""Weighted undirected graphs and the linear operators built on them.

Adjacency is held as a CSR matrix with sorted column indices, i.e. one sorted
neighbour list per vertex. Dense matrices only appear in the test oracles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .errors import (
    DimensionMismatch,
    DuplicateEdge,
    IndexOutOfRange,
    IsolatedVertex,
    NonPositiveWeight,
    SelfLoop,
)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted undirected graph on vertices ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    adjacency: sparse.csr_array = field(repr=False)
    degree: np.ndarray = field(repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[v]:a.indptr[v + 1]]

    def unweighted_adjacency(self) -> sparse.csr_array:
        a = self.adjacency.copy()
        a.data = np.ones_like(a.data)
        return a

    def to_dense(self) -> np.ndarray:
        return self.adjacency.toarray()


def build_graph(n: int, edges: Iterable[Sequence[float]]) -> Graph:
    """Build a graph from ``(u, v, w)`` triples; ``(u, v)`` pairs get weight 1.

    Raises on self-loops, non-positive weights, out-of-range indices and on an
    undirected edge given more than once.
    """
    if n < 0:
        raise IndexOutOfRange(f"vertex count must be nonnegative, got {n}")
    seen: set[tuple[int, int]] = set()
    clean: list[tuple[int, int, float]] = []
    for e in edges:
        if len(e) == 2:
            u, v = e
            w = 1.0
        else:
            u, v, w = e
        u, v, w = int(u), int(v), float(w)
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) outside 0..{n - 1}")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if not (w > 0 and np.isfinite(w)):
            raise NonPositiveWeight(f"edge ({u}, {v}) has weight {w}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} given more than once")
        seen.add(key)
        clean.append((u, v, w))

    if clean:
        arr = np.asarray([(u, v) for u, v, _ in clean], dtype=np.int64)
        wts = np.asarray([w for _, _, w in clean], dtype=np.float64)
        rows = np.concatenate([arr[:, 0], arr[:, 1]])
        cols = np.concatenate([arr[:, 1], arr[:, 0]])
        data = np.concatenate([wts, wts])
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    adj = sparse.csr_array((data, (rows, cols)), shape=(n, n))
    adj.sort_indices()
    degree = np.asarray(adj.sum(axis=1), dtype=np.float64).ravel()
    return Graph(n=n, edges=tuple(clean), adjacency=adj, degree=degree)


def permute_graph(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel vertices so that old vertex ``v`` becomes ``perm[v]``."""
    perm = np.asarray(perm)
    return build_graph(g.n, [(perm[u], perm[v], w) for u, v, w in g.edges])


def induced_subgraph(g: Graph, vertices: Sequence[int]) -> Graph:
    """Subgraph on ``vertices``, relabelled ``0..k-1`` in the given order."""
    index = {int(v): k for k, v in enumerate(vertices)}
    return build_graph(len(index), [(index[u], index[v], w) for u, v, w in g.edges
                                    if u in index and v in index])


def isolated_vertices(g: Graph) -> np.ndarray:
    return np.flatnonzero(g.degree <= 0)


def _check_degrees(g: Graph) -> None:
    if g.n and np.any(g.degree <= 0):
        v = int(np.flatnonzero(g.degree <= 0)[0])
        raise IsolatedVertex(f"vertex {v} has zero degree")


def normalized_laplacian(g: Graph) -> sparse.csr_array:
    """N = I - D^{-1/2} A D^{-1/2} as a sparse symmetric matrix."""
    _check_degrees(g)
    s = 1.0 / np.sqrt(g.degree)
    scaled = sparse.diags_array(s) @ g.adjacency @ sparse.diags_array(s)
    return sparse.csr_array(sparse.eye_array(g.n) - scaled)


def _check_signal(g: Graph, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[0] != g.n:
        raise DimensionMismatch(f"signal of shape {x.shape} on graph with n={g.n}")
    return x


def apply_lazy_walk(g: Graph, x: np.ndarray) -> np.ndarray:
    """Return P x with P = (I + A D^{-1}) / 2.

    ``x`` may be a vector or an ``n x k`` matrix of column signals.
    """
    x = _check_signal(g, x)
    _check_degrees(g)
    inv_d = 1.0 / g.degree
    scaled = x * inv_d if x.ndim == 1 else x * inv_d[:, None]
    return 0.5 * (x + g.adjacency @ scaled)


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex partition into connected components, ordered by smallest vertex."""
    if g.n == 0:
        return []
    _, labels = csgraph.connected_components(g.adjacency, directed=False)
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(labels):
        groups.setdefault(int(c), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1
