"""PCA of scattering features, per-class affine subspaces and class exchange preferences."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClassTooSmall,
    DegenerateDataWarning,
    DimensionMismatch,
    TooFewSamples,
    ZeroSelfDistance,
)

DEFAULT_THRESHOLD = 0.90
# variances at or below this fraction of the largest are numerical noise
_RANK_TOL = 1e-12


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray          # k x p, rows orthonormal
    variances: np.ndarray           # k, non-increasing
    explained_ratio: np.ndarray     # k, cumulative
    degenerate: bool = False

    @property
    def rank(self) -> int:
        return int(np.sum(self.variances > _RANK_TOL * max(self.variances.max(initial=0.0), 1e-300)))

    def transform(self, X: np.ndarray, k: int | None = None) -> np.ndarray:
        comps = self.components if k is None else self.components[:k]
        return (np.asarray(X, dtype=np.float64) - self.mean) @ comps.T

    def reconstruct(self, Z: np.ndarray) -> np.ndarray:
        k = Z.shape[-1]
        return self.mean + Z @ self.components[:k]

    def truncate(self, k: int) -> "PcaModel":
        return PcaModel(self.mean, self.components[:k], self.variances[:k],
                        self.explained_ratio[:k], self.degenerate)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(len(components)), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def pca_fit(X) -> PcaModel:
    """Principal components of the rows of ``X`` (covariance with m - 1)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TooFewSamples(f"PCA needs at least 2 samples, got shape {X.shape}")
    m = X.shape[0]
    mean = X.mean(axis=0)
    _, s, vt = np.linalg.svd(X - mean, full_matrices=False)
    variances = s ** 2 / (m - 1)
    total = variances.sum()
    degenerate = not total > 0
    if degenerate:
        warnings.warn("all samples identical; no variance to explain", DegenerateDataWarning)
        ratio = np.zeros_like(variances)
    else:
        ratio = np.minimum(np.cumsum(variances) / total, 1.0)
        ratio[-1] = 1.0
    return PcaModel(mean, _fix_signs(vt), variances, ratio, degenerate)


def threshold_dimension(model: PcaModel, fraction: float) -> int:
    """Smallest number of components whose cumulative explained ratio reaches ``fraction``."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if model.degenerate:
        return 0
    # rounding in the cumulative sum must not push the count past full rank
    k = int(np.searchsorted(model.explained_ratio, fraction - 1e-12, side="left")) + 1
    return min(k, len(model.explained_ratio))


@dataclass(frozen=True)
class ClassSubspace:
    class_id: int
    model: PcaModel
    threshold: float

    @property
    def mean(self) -> np.ndarray:
        return self.model.mean

    @property
    def components(self) -> np.ndarray:
        return self.model.components

    @property
    def dimension(self) -> int:
        return len(self.model.components)


def fit_class_subspace(X, class_id: int, threshold: float = DEFAULT_THRESHOLD) -> ClassSubspace:
    model = pca_fit(X)
    k = threshold_dimension(model, threshold)
    return ClassSubspace(class_id, model.truncate(k), threshold)


def subspace_distance(v, s: ClassSubspace) -> float:
    """Norm of the part of ``v - mean`` outside the subspace span."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != s.mean.shape:
        raise DimensionMismatch(f"vector of shape {v.shape}, subspace lives in {s.mean.shape}")
    r = v - s.mean
    if s.dimension:
        r = r - (s.components @ r) @ s.components
    return float(np.linalg.norm(r))


def _distances_to(X: np.ndarray, s: ClassSubspace) -> np.ndarray:
    R = X - s.mean
    if s.dimension:
        R = R - (R @ s.components.T) @ s.components
    return np.linalg.norm(R, axis=1)


def fit_class_subspaces(features, labels, threshold: float = DEFAULT_THRESHOLD) -> list[ClassSubspace]:
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    classes = np.unique(y)
    subs = []
    for c in classes:
        members = X[y == c]
        if len(members) < 2:
            raise ClassTooSmall(f"class {c} has {len(members)} member(s); need at least 2")
        subs.append(fit_class_subspace(members, int(c), threshold))
    return subs


def distances_to_subspaces(features, subspaces) -> np.ndarray:
    """samples x classes matrix of projection residual norms."""
    X = np.asarray(features, dtype=np.float64)
    return np.stack([_distances_to(X, s) for s in subspaces], axis=1)


def class_distance_matrix(features, labels, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    """Mean distance of class-i samples from the subspace of class j.

    Class subspaces are fitted on all members of each class.
    """
    y = np.asarray(labels)
    subs = fit_class_subspaces(features, y, threshold)
    dist = distances_to_subspaces(features, subs)
    return np.stack([dist[y == s.class_id].mean(axis=0) for s in subs])


@dataclass(frozen=True)
class NearestSubspaceStats:
    classes: np.ndarray
    ranks: np.ndarray              # per sample, 1 = true class is nearest
    incoherence: np.ndarray        # w_j: fraction of class j not choosing j
    rank_fractions: np.ndarray     # classes x 3: rank 1, rank 2, rank >= 3

    @property
    def true_nearest_fraction(self) -> float:
        return float(np.mean(self.ranks == 1))


def nearest_subspace_stats(features, labels, threshold: float = DEFAULT_THRESHOLD,
                           distances: np.ndarray | None = None) -> NearestSubspaceStats:
    """Rank of each sample's own class among its subspace distances.

    Ties are broken towards the smaller class id.
    """
    y = np.asarray(labels)
    classes = np.unique(y)
    if distances is None:
        distances = distances_to_subspaces(features, fit_class_subspaces(features, y, threshold))
    col = np.searchsorted(classes, y)
    own = distances[np.arange(len(y)), col]
    ids = np.arange(len(classes))
    ahead = (distances < own[:, None]) | ((distances == own[:, None]) & (ids[None, :] < col[:, None]))
    ranks = ahead.sum(axis=1) + 1
    w = np.array([np.mean(ranks[y == c] != 1) for c in classes])
    fr = np.array([[np.mean(ranks[y == c] == 1), np.mean(ranks[y == c] == 2),
                    np.mean(ranks[y == c] >= 3)] for c in classes])
    return NearestSubspaceStats(classes, ranks, w, fr)


@dataclass(frozen=True)
class PreferenceMatrix:
    D: np.ndarray
    w: np.ndarray
    pref: np.ndarray


def ec_preference(D, w) -> PreferenceMatrix:
    """pref(i, j) = w_j / min(D[i,j] / D[i,i], D[j,i] / D[j,j]) for i != j; diagonal 0."""
    D = np.asarray(D, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    diag = np.diag(D)
    if np.any(diag <= 0):
        raise ZeroSelfDistance("every class needs a positive self-distance")
    ratio = D / diag[:, None]
    factor = np.minimum(ratio, ratio.T)
    with np.errstate(divide="ignore"):
        pref = w[None, :] / factor
    np.fill_diagonal(pref, 0.0)
    return PreferenceMatrix(D, w, pref)
