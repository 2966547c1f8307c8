"""Dataset -> signals -> scattering feature matrix."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from .datasets import GraphDataset
from .errors import ConfigError
from .scattering import ScatteringConfig, feature_layout, scatter_graph

log = logging.getLogger(__name__)


def _extract_one(args):
    dataset, i, cfg, select, isolated = args
    sigs = dataset.signals_for(i, select)
    try:
        return sigs.names, scatter_graph(dataset.graphs[i], sigs.signals, cfg, isolated).values
    except Exception as exc:
        raise type(exc)(f"{dataset.name} graph {i}: {exc}") from exc


def extract_features(dataset: GraphDataset, J: int = 5, Q: int = 4, mode: str = "normalized",
                     select: Sequence[str] | None = None, workers: int = 1,
                     isolated: str = "stay"):
    """Scattering features for every graph; returns ``(X, config)``.

    The signal names of the first graph fix the layout; every other graph
    must produce the same names. Benchmark files contain a few vertices
    without edges; by default the walk holds still on them (see
    ``scatter_graph``).
    """
    base = ScatteringConfig(J=J, Q=Q, moment_mode=mode)
    n_isolated = sum(int(np.sum(g.degree <= 0)) for g in dataset.graphs)
    if n_isolated:
        log.warning("%s: %d isolated vertices (policy %r)", dataset.name, n_isolated, isolated)
    jobs = [(dataset, i, base, select, isolated) for i in range(len(dataset))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_extract_one, jobs, chunksize=16))
    else:
        results = [_extract_one(j) for j in jobs]
    if not results:
        return np.zeros((0, 0)), base
    names = results[0][0]
    for i, (nm, _) in enumerate(results):
        if nm != names:
            raise ConfigError(f"graph {i} produced signals {nm}, expected {names}")
    cfg = ScatteringConfig(J=J, Q=Q, moment_mode=base.moment_mode, signal_names=names)
    X = np.stack([v for _, v in results])
    assert X.shape[1] == len(feature_layout(cfg))
    return X, cfg
