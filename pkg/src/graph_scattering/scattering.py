"""Geometric scattering moments (orders 0, 1, 2) of graph signals.

Feature layout, per signal in declared order:

* zeroth order, ``q = 1..Q``
* first order, ``j = 1..J`` outer, ``q`` inner
* second order, pairs ``(j, j')`` with ``j < j'`` in lexicographic order, ``q`` inner

This ordering is the serialization contract for cached feature files.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, DimensionMismatch, EmptyVector, MissingSignal
from .graph import Graph, induced_subgraph
from .wavelets import DEFAULT_J, wavelet_transform

UNNORMALIZED = "unnormalized"
NORMALIZED = "normalized"
MODES = (UNNORMALIZED, NORMALIZED)
_MODE_ALIASES = {"unnorm": UNNORMALIZED, "norm": NORMALIZED}

# variance below this is treated as exactly zero (skew and kurtosis reported as 0)
ZERO_VARIANCE = 1e-24


def canonical_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ConfigError(f"unknown moment mode {mode!r}")
    return mode


@dataclass(frozen=True)
class ScatteringConfig:
    J: int = DEFAULT_J
    Q: int = 4
    moment_mode: str = NORMALIZED
    signal_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "moment_mode", canonical_mode(self.moment_mode))
        object.__setattr__(self, "signal_names", tuple(self.signal_names))
        if self.J < 1:
            raise ConfigError(f"J must be >= 1, got {self.J}")
        if self.Q < 1:
            raise ConfigError(f"Q must be >= 1, got {self.Q}")
        if self.moment_mode == NORMALIZED and self.Q > 4:
            raise ConfigError("normalized moments are defined for Q <= 4")

    @property
    def block_size(self) -> int:
        J, Q = self.J, self.Q
        return Q * (1 + J + J * (J - 1) // 2)

    def to_dict(self) -> dict:
        return {"J": self.J, "Q": self.Q, "moment_mode": self.moment_mode,
                "signal_names": list(self.signal_names)}


class FeatureIndex(NamedTuple):
    signal: str
    order: int
    j: int | None
    j2: int | None
    q: int


def feature_layout(cfg: ScatteringConfig, signal_names: Sequence[str] | None = None) -> list[FeatureIndex]:
    names = cfg.signal_names if signal_names is None else tuple(signal_names)
    J, Q = cfg.J, cfg.Q
    out = []
    for s in names:
        out += [FeatureIndex(s, 0, None, None, q) for q in range(1, Q + 1)]
        out += [FeatureIndex(s, 1, j, None, q) for j in range(1, J + 1) for q in range(1, Q + 1)]
        out += [FeatureIndex(s, 2, j, j2, q)
                for j, j2 in combinations(range(1, J + 1), 2) for q in range(1, Q + 1)]
    return out


@dataclass(frozen=True)
class ScatteringFeatures:
    values: np.ndarray
    layout: list[FeatureIndex] = field(repr=False)
    config: ScatteringConfig

    def __len__(self):
        return len(self.values)


def _moments(v: np.ndarray, Q: int, mode: str) -> np.ndarray:
    """Moments along axis 0; returns an array with leading axis of length Q."""
    n = v.shape[0]
    if n == 0:
        raise EmptyVector("moments of an empty vector")
    if mode == UNNORMALIZED:
        return np.stack([np.sum(v ** q, axis=0) for q in range(1, Q + 1)])

    mean = v.mean(axis=0)
    dev = v - mean
    var = np.mean(dev ** 2, axis=0)
    out = [mean, var]
    if Q >= 3:
        flat = var < ZERO_VARIANCE
        safe = np.where(flat, 1.0, var)
        skew = np.mean(dev ** 3, axis=0) / safe ** 1.5
        kurt = np.mean(dev ** 4, axis=0) / safe ** 2
        out += [np.where(flat, 0.0, skew), np.where(flat, 0.0, kurt)]
    return np.stack(out[:Q])


def moment_summary(v, Q: int, mode: str = UNNORMALIZED) -> np.ndarray:
    """Power sums ``sum v^q`` or (mean, variance, skew, kurtosis), first ``Q``.

    Normalized statistics are population (divide-by-n) moments; kurtosis is
    not excess-corrected.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    mode = canonical_mode(mode)
    if mode == NORMALIZED and Q > 4:
        raise ConfigError("normalized moments are defined for Q <= 4")
    return _moments(v, Q, mode)


ISOLATED_POLICIES = ("error", "stay")


def _wavelet_coeffs(g: Graph, X: np.ndarray, J: int, isolated: str) -> np.ndarray:
    """J x n x s coefficients.

    With ``isolated="stay"`` the walk holds still on zero-degree vertices, so
    their coefficients are 0 and the rest of the graph is unaffected.
    """
    if isolated not in ISOLATED_POLICIES:
        raise ConfigError(f"isolated must be one of {ISOLATED_POLICIES}, got {isolated!r}")
    active = g.degree > 0
    if isolated == "error" or active.all():
        return wavelet_transform(g, X, J).coeffs
    out = np.zeros((J,) + X.shape)
    if active.any():
        sub = induced_subgraph(g, np.flatnonzero(active))
        out[:, active] = wavelet_transform(sub, X[active], J).coeffs
    return out


def _scatter_columns(g: Graph, X: np.ndarray, cfg: ScatteringConfig,
                     isolated: str = "error") -> np.ndarray:
    """Scattering blocks for the columns of ``X`` (n x s); returns s x block_size."""
    J, Q, mode = cfg.J, cfg.Q, cfg.moment_mode
    n, s = X.shape
    zeroth = _moments(X, Q, mode)                         # Q x s

    first_w = np.abs(_wavelet_coeffs(g, X, J, isolated))  # J x n x s
    first = _moments(np.moveaxis(first_w, 1, 0), Q, mode)  # Q x J x s

    # second order: wavelets of every |Psi_j x| at once
    U = np.moveaxis(first_w, 0, 1).reshape(n, J * s)      # columns (j, signal)
    second_w = np.abs(_wavelet_coeffs(g, U, J, isolated)).reshape(J, n, J, s)  # j', n, j, s
    pairs = list(combinations(range(J), 2))
    if pairs:
        sel = np.stack([second_w[j2, :, j, :] for j, j2 in pairs], axis=1)  # n x P x s
        second = _moments(sel, Q, mode)                   # Q x P x s
    else:
        second = np.zeros((Q, 0, s))

    blocks = [zeroth.T,
              np.transpose(first, (2, 1, 0)).reshape(s, -1),
              np.transpose(second, (2, 1, 0)).reshape(s, -1)]
    return np.concatenate(blocks, axis=1)


def scatter_signal(g: Graph, x, cfg: ScatteringConfig) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != g.n:
        raise DimensionMismatch(f"signal of shape {x.shape} on graph with n={g.n}")
    return _scatter_columns(g, x[:, None], cfg)[0]


def scatter_graph(g: Graph, signals: Mapping[str, np.ndarray], cfg: ScatteringConfig,
                  isolated: str = "error") -> ScatteringFeatures:
    """Concatenate per-signal blocks in ``cfg.signal_names`` order.

    If the config declares no names, the mapping's own order is used.
    Zero-degree vertices raise ``IsolatedVertex`` unless ``isolated="stay"``.
    """
    names = cfg.signal_names or tuple(signals)
    cols = []
    for name in names:
        if name not in signals:
            raise MissingSignal(name)
        x = np.asarray(signals[name], dtype=np.float64)
        if x.shape != (g.n,):
            raise DimensionMismatch(f"signal {name!r} has shape {x.shape}, graph has n={g.n}")
        cols.append(x)
    if cols:
        values = _scatter_columns(g, np.stack(cols, axis=1), cfg, isolated).ravel()
    else:
        values = np.zeros(0)
    used = cfg if cfg.signal_names else ScatteringConfig(cfg.J, cfg.Q, cfg.moment_mode, names)
    return ScatteringFeatures(values=values, layout=feature_layout(used), config=used)
