"""Nested cross-validation with voting, and the reduced-training split study.

Every evaluation follows the same pattern: a test block is held out, the
remaining data is cut into equal chunks, and one SVM is tuned per chunk
(trained on the other chunks, validated on that chunk). The tuned models then
vote on the test block.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .embedding import pca_fit, threshold_dimension
from .errors import FoldTooSmall
from .rng import named_rng
from .svm import KernelSVC, _vote, squared_distances

C_GRID = (1e-2, 1e-1, 1.0, 10.0, 1e2, 1e3)
GAMMA_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)


@dataclass(frozen=True)
class SplitProfile:
    """``outer_folds`` test blocks; the rest is cut into ``chunks`` tuning chunks.

    With ``pool_draws`` set, data is cut into ``outer_folds`` pool folds and
    each draw takes ``chunks`` random folds for training/validation and tests
    on all others.
    """

    name: str
    outer_folds: int
    chunks: int
    pool_draws: int | None = None


SPLITS = {
    "80-10-10": SplitProfile("80-10-10", 10, 9),
    "70-10-20": SplitProfile("70-10-20", 5, 8),
    "40-10-50": SplitProfile("40-10-50", 2, 5),
    "20-10-70": SplitProfile("20-10-70", 10, 3, pool_draws=10),
}


def get_split(name: str) -> SplitProfile:
    key = name.replace("/", "-").replace("%", "")
    if key not in SPLITS:
        raise ValueError(f"unknown split {name!r}; choose from {sorted(SPLITS)}")
    return SPLITS[key]


@dataclass(frozen=True)
class ExperimentProtocol:
    split: str = "80-10-10"
    seed: int = 0
    C_grid: tuple[float, ...] = C_GRID
    gamma_grid: tuple[float, ...] = GAMMA_GRID
    standardize: bool = True
    pca_threshold: float | None = None
    tol: float = 1e-3

    def to_dict(self) -> dict:
        d = asdict(self)
        d["C_grid"] = list(self.C_grid)
        d["gamma_grid"] = list(self.gamma_grid)
        d["gamma_scaling"] = "gamma / (num_features * feature_variance)"
        return d


def stratified_folds(y: np.ndarray, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffle each class and deal its members round-robin into ``k`` folds."""
    y = np.asarray(y)
    folds: list[list[int]] = [[] for _ in range(k)]
    start = 0
    for c in np.unique(y):
        members = rng.permutation(np.flatnonzero(y == c))
        for r, idx in enumerate(members):
            folds[(start + r) % k].append(int(idx))
        start = (start + len(members)) % k
    out = [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]
    if any(len(f) == 0 for f in out):
        raise FoldTooSmall(f"{len(y)} samples cannot fill {k} folds")
    return out


class Preprocessor:
    """Optional PCA (explained-variance threshold) followed by z-scoring, fit on training rows."""

    def __init__(self, standardize: bool = True, pca_threshold: float | None = None):
        self.standardize = standardize
        self.pca_threshold = pca_threshold

    def fit(self, X: np.ndarray) -> "Preprocessor":
        self.pca_ = None
        if self.pca_threshold is not None:
            model = pca_fit(X)
            self.pca_ = model.truncate(max(threshold_dimension(model, self.pca_threshold), 1))
            X = self.pca_.transform(X)
        self.mean_ = X.mean(axis=0) if self.standardize else np.zeros(X.shape[1])
        scale = X.std(axis=0) if self.standardize else np.ones(X.shape[1])
        self.scale_ = np.where(scale > 0, scale, 1.0)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.pca_ is not None:
            X = self.pca_.transform(X)
        return (X - self.mean_) / self.scale_


@dataclass
class InnerModel:
    C: float
    gamma: float
    val_accuracy: float
    scaler_mean: np.ndarray = field(repr=False)
    scaler_scale: np.ndarray = field(repr=False)


@dataclass
class FoldResult:
    test_index: np.ndarray = field(repr=False)
    predictions: np.ndarray = field(repr=False)
    accuracy: float
    inner: list[InnerModel] = field(default_factory=list)


@dataclass
class CVResult:
    split: str
    folds: list[FoldResult]

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([f.accuracy for f in self.folds])

    @property
    def mean(self) -> float:
        return float(self.accuracies.mean())

    @property
    def std(self) -> float:
        return float(self.accuracies.std())


def tune_and_vote(X, y, test_idx, chunks: Sequence[np.ndarray], protocol: ExperimentProtocol) -> FoldResult:
    """Tune one SVM per chunk and let them vote on ``test_idx``."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y).tolist()
    preds, inner = [], []
    for v, val_idx in enumerate(chunks):
        train_idx = np.concatenate([c for u, c in enumerate(chunks) if u != v])
        if len(np.unique(y[train_idx])) < 2 or len(val_idx) == 0:
            raise FoldTooSmall("a training split holds fewer than two classes")
        prep = Preprocessor(protocol.standardize, protocol.pca_threshold).fit(X[train_idx])
        Z = {name: prep.transform(X[idx]) for name, idx in
             (("train", train_idx), ("val", val_idx), ("test", test_idx))}
        scale = 1.0 / (Z["train"].shape[1] * max(Z["train"].var(), 1e-300))
        d_train = squared_distances(Z["train"], Z["train"])
        d_val = squared_distances(Z["val"], Z["train"])

        best = None
        for gi, g0 in enumerate(protocol.gamma_grid):
            gamma = g0 * scale
            K = np.exp(-gamma * d_train)
            K_val = np.exp(-gamma * d_val)
            for ci, C in enumerate(protocol.C_grid):
                clf = KernelSVC(C=C, gamma=gamma, tol=protocol.tol).fit_precomputed(K, y[train_idx])
                acc = float(np.mean(clf.predict_precomputed(K_val) == y[val_idx]))
                key = (-acc, ci, gi)
                if best is None or key < best[0]:
                    best = (key, clf, C, gamma, acc)
        _, clf, C, gamma, acc = best
        K_test = np.exp(-gamma * squared_distances(Z["test"], Z["train"]))
        preds.append(clf.predict_precomputed(K_test))
        inner.append(InnerModel(C, gamma, acc, prep.mean_, prep.scale_))

    final = _vote(len(test_idx), classes, preds)
    return FoldResult(np.asarray(test_idx), final, float(np.mean(final == y[test_idx])), inner)


def _chunk(indices: np.ndarray, y: np.ndarray, k: int, rng) -> list[np.ndarray]:
    return [indices[f] for f in stratified_folds(y[indices], k, rng)]


def plan_splits(y, split: str | SplitProfile, seed: int):
    """Yield ``(test_idx, chunks)`` pairs for a split profile, deterministically."""
    prof = split if isinstance(split, SplitProfile) else get_split(split)
    y = np.asarray(y)
    folds = stratified_folds(y, prof.outer_folds, named_rng(seed, prof.name, "outer"))
    plans = []
    if prof.pool_draws is None:
        for k, test_idx in enumerate(folds):
            rest = np.sort(np.concatenate([f for u, f in enumerate(folds) if u != k]))
            if prof.chunks == prof.outer_folds - 1:
                chunks = [f for u, f in enumerate(folds) if u != k]
            else:
                chunks = _chunk(rest, y, prof.chunks, named_rng(seed, prof.name, "inner", str(k)))
            plans.append((test_idx, chunks))
    else:
        draw_rng = named_rng(seed, prof.name, "pool")
        for _ in range(prof.pool_draws):
            chosen = np.sort(draw_rng.choice(prof.outer_folds, size=prof.chunks, replace=False))
            test_idx = np.sort(np.concatenate(
                [f for u, f in enumerate(folds) if u not in set(chosen.tolist())]))
            plans.append((test_idx, [folds[u] for u in chosen]))
    return plans


def _run_plan(args):
    X, y, test_idx, chunks, protocol = args
    return tune_and_vote(X, y, test_idx, chunks, protocol)


def run_split(X, y, protocol: ExperimentProtocol, workers: int = 1) -> CVResult:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    plans = plan_splits(y, protocol.split, protocol.seed)
    jobs = [(X, y, t, c, protocol) for t, c in plans]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            folds = list(ex.map(_run_plan, jobs))
    else:
        folds = [_run_plan(j) for j in jobs]
    return CVResult(get_split(protocol.split).name, folds)


def nested_cv(X, y, protocol: ExperimentProtocol | None = None, workers: int = 1) -> CVResult:
    """Ten outer folds; nine tuned models per fold vote on the test fold."""
    protocol = protocol or ExperimentProtocol()
    if protocol.split != "80-10-10":
        protocol = replace(protocol, split="80-10-10")
    return run_split(X, y, protocol, workers)


def reduced_split_study(X, y, seed: int = 0, splits: Sequence[str] = tuple(SPLITS),
                        workers: int = 1, **protocol_kw) -> dict[str, CVResult]:
    return {s: run_split(X, y, ExperimentProtocol(split=s, seed=seed, **protocol_kw), workers)
            for s in splits}
