"""RBF-kernel support vector machine trained with SMO.

The binary solver follows the usual SMO scheme with second-order working set
selection on a precomputed kernel matrix. Multi-class problems are handled
one-vs-one with majority voting.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateLabels, DimensionMismatch, NonConvergenceWarning

TAU = 1e-12


def rbf_kernel(u, v, gamma: float) -> float:
    """exp(-gamma * ||u - v||^2)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    return float(np.exp(-gamma * np.sum((u - v) ** 2)))


def squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.maximum(d, 0.0)


def rbf_kernel_matrix(A, B, gamma: float) -> np.ndarray:
    return np.exp(-gamma * squared_distances(A, B))


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    gap: float


def smo_solve(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3,
              max_iter: int = 100_000) -> SmoResult:
    """Solve the soft-margin dual for labels ``y`` in {-1, +1}.

    ``gap`` is the final maximal KKT violation ``m(a) - M(a)``; the solver
    stops once it drops below ``tol``.
    """
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    Q = K * np.outer(y, y)
    QD = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)
    pos = y > 0

    it = 0
    gap = np.inf
    while True:
        at_upper = alpha >= C
        at_lower = alpha <= 0
        up = np.where(pos, ~at_upper, ~at_lower)
        low = np.where(pos, ~at_lower, ~at_upper)
        score = -y * G
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        m = score[i]
        M = np.min(np.where(low, score, np.inf))
        gap = m - M
        if gap < tol or it >= max_iter:
            break

        # second-order choice of j among violating low-set indices
        b = m - score
        cand = low & (b > 0)
        a = QD[i] + QD - 2.0 * y[i] * y * Q[i]
        a = np.where(a > 0, a, TAU)
        obj = np.where(cand, -(b * b) / a, np.inf)
        j = int(np.argmin(obj))

        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(QD[i] + QD[j] + 2.0 * Q[i, j], TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            quad = max(QD[i] + QD[j] - 2.0 * Q[i, j], TAU)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
            elif nj < 0:
                nj, ni = 0.0, total
            if total > C:
                if nj > C:
                    nj, ni = C, total - C
            elif ni < 0:
                ni, nj = 0.0, total

        G += Q[i] * (ni - ai) + Q[j] * (nj - aj)
        alpha[i], alpha[j] = ni, nj
        it += 1

    converged = gap < tol
    if not converged:
        warnings.warn(f"SMO stopped after {it} iterations with KKT gap {gap:.3g}",
                      NonConvergenceWarning)
    return SmoResult(alpha, _bias(alpha, y, G, C), it, converged, float(gap))


def _bias(alpha, y, G, C) -> float:
    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = yG[free].mean()
    else:
        at_upper = alpha >= C
        upper_side = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        ub = yG[upper_side].min(initial=np.inf)
        lb = yG[~upper_side].max(initial=-np.inf)
        rho = 0.5 * (ub + lb) if np.isfinite(ub) and np.isfinite(lb) else (
            ub if np.isfinite(ub) else lb)
    return float(-rho)


@dataclass
class SvmModel:
    """One binary component: predicts ``positive`` where the decision is >= 0."""

    support_index: np.ndarray
    support_vectors: np.ndarray | None
    dual_coef: np.ndarray       # alpha_i * y_i on support vectors
    alpha: np.ndarray           # full dual vector over the training set
    bias: float
    gamma: float
    C: float
    classes: tuple[int, int]    # (negative, positive)
    converged: bool = True
    kkt_gap: float = 0.0

    def decision(self, X) -> np.ndarray:
        K = rbf_kernel_matrix(np.atleast_2d(X), self.support_vectors, self.gamma)
        return K @ self.dual_coef + self.bias

    def decision_precomputed(self, K_rows: np.ndarray) -> np.ndarray:
        """``K_rows`` is test x train over the full training set."""
        return K_rows[:, self.support_index] @ self.dual_coef + self.bias


def _binary_fit(K, y01, classes, C, gamma, X=None, tol=1e-3, max_iter=100_000) -> SvmModel:
    ys = np.where(y01, 1.0, -1.0)
    res = smo_solve(K, ys, C, tol=tol, max_iter=max_iter)
    sv = np.flatnonzero(res.alpha > 0)
    return SvmModel(
        support_index=sv,
        support_vectors=None if X is None else X[sv],
        dual_coef=res.alpha[sv] * ys[sv],
        alpha=res.alpha,
        bias=res.bias,
        gamma=gamma,
        C=C,
        classes=classes,
        converged=res.converged,
        kkt_gap=res.gap,
    )


def svm_train(X, y, C: float, gamma: float, tol: float = 1e-3) -> SvmModel:
    """Binary RBF-SVM on labels with exactly two distinct values."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) != 2:
        raise DegenerateLabels(f"binary SVM needs two classes, got {classes.tolist()}")
    K = rbf_kernel_matrix(X, X, gamma)
    return _binary_fit(K, y == classes[1], (classes[0].item(), classes[1].item()),
                       C, gamma, X=X, tol=tol)


def svm_predict(model: SvmModel, x):
    x = np.asarray(x, dtype=np.float64)
    f = model.decision(x)
    out = np.where(f >= 0, model.classes[1], model.classes[0])
    return out[0] if x.ndim == 1 else out


def _vote(n_samples, classes, pair_predictions) -> np.ndarray:
    """Majority vote over class ids; ties go to the smallest class id."""
    votes = np.zeros((n_samples, len(classes)), dtype=np.int64)
    index = {c: k for k, c in enumerate(classes)}
    for pred in pair_predictions:
        cols = np.fromiter((index[p] for p in pred), dtype=np.int64, count=n_samples)
        votes[np.arange(n_samples), cols] += 1
    return np.asarray(classes)[np.argmax(votes, axis=1)]


@dataclass
class KernelSVC:
    """One-vs-one RBF-SVM classifier."""

    C: float = 1.0
    gamma: float = 1.0
    tol: float = 1e-3
    models: list[SvmModel] = field(default_factory=list, repr=False)
    classes_: np.ndarray | None = field(default=None, repr=False)
    _pair_index: list = field(default_factory=list, repr=False)

    def fit(self, X, y) -> "KernelSVC":
        X = np.asarray(X, dtype=np.float64)
        K = rbf_kernel_matrix(X, X, self.gamma)
        return self.fit_precomputed(K, y, X=X)

    def fit_precomputed(self, K, y, X=None) -> "KernelSVC":
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        if len(self.classes_) < 2:
            raise DegenerateLabels(f"need at least two classes, got {self.classes_.tolist()}")
        self.models, self._pair_index = [], []
        for a, b in combinations(self.classes_.tolist(), 2):
            idx = np.flatnonzero((y == a) | (y == b))
            sub = K[np.ix_(idx, idx)]
            m = _binary_fit(sub, y[idx] == b, (a, b), self.C, self.gamma,
                            X=None if X is None else X[idx], tol=self.tol)
            self.models.append(m)
            self._pair_index.append(idx)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        preds = [np.where(m.decision(X) >= 0, m.classes[1], m.classes[0]) for m in self.models]
        return _vote(len(X), self.classes_.tolist(), preds)

    def predict_precomputed(self, K_rows) -> np.ndarray:
        """``K_rows`` is samples x training-set kernel values."""
        K_rows = np.asarray(K_rows)
        preds = []
        for m, idx in zip(self.models, self._pair_index):
            f = m.decision_precomputed(K_rows[:, idx])
            preds.append(np.where(f >= 0, m.classes[1], m.classes[0]))
        return _vote(len(K_rows), self.classes_.tolist(), preds)
