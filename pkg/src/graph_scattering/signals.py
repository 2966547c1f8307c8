"""Vertex signals used as scattering inputs when a dataset carries no node features."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csgraph

from .errors import ConfigError, DimensionMismatch, DisconnectedGraph
from .graph import Graph, connected_components

ECCENTRICITY = "eccentricity"
CLUSTERING = "clustering"
DEGREE = "degree"
STRUCTURAL = (ECCENTRICITY, CLUSTERING, DEGREE)

SIGNAL_ALIASES = {
    "ecc": ECCENTRICITY, "eccentricity": ECCENTRICITY,
    "clust": CLUSTERING, "clustering": CLUSTERING,
    "deg": DEGREE, "degree": DEGREE,
    "attr": "attr",
}


def eccentricity(g: Graph) -> np.ndarray:
    """Largest hop distance from each vertex, via BFS from every vertex.

    Edge weights are ignored.
    """
    if g.n == 0:
        return np.zeros(0)
    if len(connected_components(g)) > 1:
        raise DisconnectedGraph("eccentricity needs a connected graph")
    hops = csgraph.shortest_path(g.unweighted_adjacency(), method="D",
                                 directed=False, unweighted=True)
    return hops.max(axis=1)


def clustering_coefficient(g: Graph) -> np.ndarray:
    """Fraction of neighbour pairs that are adjacent; 0 for degree <= 1."""
    a = g.unweighted_adjacency()
    deg = np.asarray(a.sum(axis=1)).ravel()
    triangles = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    pairs = deg * (deg - 1)
    out = np.zeros(g.n)
    ok = deg > 1
    out[ok] = 2.0 * triangles[ok] / pairs[ok]
    return out


def degree_signal(g: Graph) -> np.ndarray:
    return g.degree.copy()


_STRUCTURAL_FUNCS = {
    ECCENTRICITY: eccentricity,
    CLUSTERING: clustering_coefficient,
    DEGREE: degree_signal,
}


@dataclass(frozen=True)
class DatasetProfile:
    """Which signals a dataset family feeds to the scattering transform.

    ``node_features`` is the preferred dataset-provided feature source
    ("attributes" or "labels"); the other source is used as a fallback.
    """

    name: str
    structural: tuple[str, ...] = ()
    node_features: str | None = "attributes"


_SOCIAL_FULL = (ECCENTRICITY, DEGREE, CLUSTERING)
_SOCIAL_DISCONNECTED = (DEGREE, CLUSTERING)

PROFILES = {
    "COLLAB": DatasetProfile("COLLAB", _SOCIAL_FULL, None),
    "IMDB-BINARY": DatasetProfile("IMDB-BINARY", _SOCIAL_FULL, None),
    "IMDB-MULTI": DatasetProfile("IMDB-MULTI", _SOCIAL_FULL, None),
    "REDDIT-BINARY": DatasetProfile("REDDIT-BINARY", _SOCIAL_DISCONNECTED, None),
    "REDDIT-MULTI-5K": DatasetProfile("REDDIT-MULTI-5K", _SOCIAL_DISCONNECTED, None),
    "REDDIT-MULTI-12K": DatasetProfile("REDDIT-MULTI-12K", _SOCIAL_DISCONNECTED, None),
    # three categorical vertex types are the dataset's node features
    "ENZYMES": DatasetProfile("ENZYMES", (), "labels"),
}
_PROFILE_ALIASES = {
    "IMDB-B": "IMDB-BINARY", "IMDB-M": "IMDB-MULTI", "REDDIT-B": "REDDIT-BINARY",
    "REDDIT-5K": "REDDIT-MULTI-5K", "REDDIT-12K": "REDDIT-MULTI-12K",
    "REDDIT": "REDDIT-BINARY", "IMDB": "IMDB-BINARY",
}


def get_profile(dataset_family: str) -> DatasetProfile:
    key = dataset_family.upper()
    key = _PROFILE_ALIASES.get(key, key)
    return PROFILES.get(key, DatasetProfile(key, (), "attributes"))


@dataclass(frozen=True)
class SignalSet:
    signals: dict[str, np.ndarray]
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.signals)


def _feature_matrix(g: Graph, attributes, labels, label_values, preference):
    """Pick dataset-provided features as (names, n x k matrix) or None."""
    def from_attrs():
        if attributes is None:
            return None
        a = np.asarray(attributes, dtype=np.float64).reshape(g.n, -1)
        return [f"attr{k}" for k in range(a.shape[1])], a

    def from_labels():
        if labels is None:
            return None
        lab = np.asarray(labels)
        values = sorted(set(lab.tolist())) if label_values is None else list(label_values)
        onehot = (lab[:, None] == np.asarray(values)[None, :]).astype(np.float64)
        return [f"label={v}" for v in values], onehot

    order = (from_labels, from_attrs) if preference == "labels" else (from_attrs, from_labels)
    for pick in order:
        got = pick()
        if got is not None:
            return got
    return None


def default_signals(g: Graph, dataset_family: str = "", *, attributes=None,
                    labels=None, label_values: Sequence | None = None,
                    select: Sequence[str] | None = None) -> SignalSet:
    """Assemble the ordered signal set for one graph.

    ``select`` overrides the profile with a list drawn from
    ``ecc, clust, deg, attr``; ``attr`` expands to the dataset-provided
    features (numeric attributes, or one-hot categorical vertex labels
    encoded against ``label_values``).
    """
    profile = get_profile(dataset_family)
    if select is None:
        wanted = list(profile.structural)
        if profile.node_features is not None:
            wanted.append("attr")
    else:
        wanted = []
        for s in select:
            if s not in SIGNAL_ALIASES:
                raise ConfigError(f"unknown signal {s!r}")
            wanted.append(SIGNAL_ALIASES[s])

    signals: dict[str, np.ndarray] = {}
    provenance: dict[str, str] = {}
    for name in wanted:
        if name == "attr":
            got = _feature_matrix(g, attributes, labels, label_values, profile.node_features)
            if got is None:
                if select is not None:
                    raise ConfigError("attr requested but the dataset has no node features")
                continue
            names, mat = got
            if mat.shape[0] != g.n:
                raise DimensionMismatch(f"{mat.shape[0]} feature rows for n={g.n}")
            for k, nm in enumerate(names):
                signals[nm] = mat[:, k]
                provenance[nm] = "dataset"
        else:
            signals[name] = _STRUCTURAL_FUNCS[name](g)
            provenance[name] = "computed"
    if not signals and select is None:
        # featureless graph outside any known family: connectivity-safe pair
        for name in _SOCIAL_DISCONNECTED:
            signals[name] = _STRUCTURAL_FUNCS[name](g)
            provenance[name] = "computed"
    return SignalSet(signals, provenance)
