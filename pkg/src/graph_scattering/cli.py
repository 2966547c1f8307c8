"""Command-line entry point: ``gscatter {extract,classify,pca,explore,wavelets}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .crossval import SPLITS, ExperimentProtocol, run_split
from .datasets import (
    DATA_DIR_ENV,
    load_features,
    load_tu_dataset,
    save_features,
    schema_hash,
)
from .embedding import (
    ec_preference,
    fit_class_subspaces,
    distances_to_subspaces,
    nearest_subspace_stats,
    pca_fit,
    threshold_dimension,
)
from .errors import ConfigError, DatasetError
from .graph import build_graph
from .pipeline import extract_features
from .scattering import canonical_mode
from .wavelets import vertex_wavelets

log = logging.getLogger("graph_scattering")

DEFAULT_MODE = {"extract": "normalized", "classify": "normalized",
                "pca": "unnormalized", "explore": "unnormalized"}


@dataclass
class RunConfig:
    command: str
    dataset: str | None = None
    data_dir: str | None = None
    signals: list[str] | None = None
    J: int = 5
    Q: int = 4
    moment_mode: str = "normalized"
    seed: int = 0
    out: str = "out"
    workers: int = 1
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.J < 1 or self.Q < 1:
            raise ConfigError("--scales and --moments must be >= 1")
        self.moment_mode = canonical_mode(self.moment_mode)
        if self.moment_mode == "normalized" and self.Q > 4:
            raise ConfigError("normalized moments support --moments <= 4")
        if self.command != "wavelets" and not self.dataset:
            raise ConfigError("--dataset is required")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")   # scheduling only; results do not depend on it
        return d


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x) -> str:
    return "%.17g" % x if isinstance(x, (float, np.floating)) else str(x)


def write_table(path: Path, header, rows, cfg: RunConfig, extra: dict | None = None):
    rows = [[_fmt(v) for v in r] for r in rows]
    _atomic_write(path, _csv_text(header, rows))
    meta = {"run_config": cfg.to_dict(), "version": __version__, **(extra or {})}
    _atomic_write(Path(str(path) + ".json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return rows


def cache_path(cfg: RunConfig) -> Path:
    sig = "-".join(cfg.signals) if cfg.signals else "default"
    return Path(cfg.out) / f"{cfg.dataset}_J{cfg.J}_Q{cfg.Q}_{cfg.moment_mode}_{sig}.csv"


def build_or_load_features(cfg: RunConfig, force: bool = False):
    """Return ``(X, labels, meta)``, reusing a cache file whose schema matches."""
    path = cache_path(cfg)
    if path.exists() and not force:
        _, _, _, meta = load_features(path)
        expect = {"J": cfg.J, "Q": cfg.Q, "moment_mode": cfg.moment_mode,
                  "signal_names": meta.get("signal_names")}
        _, labels, X, meta = load_features(path, expect=expect)
        if meta.get("signals_requested") == cfg.signals and meta.get("dataset") == cfg.dataset:
            log.info("using cached features %s", path)
            return X, labels, meta
    dataset = load_tu_dataset(cfg.data_dir, cfg.dataset)
    X, scfg = extract_features(dataset, cfg.J, cfg.Q, cfg.moment_mode, cfg.signals, cfg.workers)
    meta = {**scfg.to_dict(), "dataset": cfg.dataset, "signals_requested": cfg.signals,
            "isolated_vertices": "stay",
            "label_mapping": {str(k): v for k, v in dataset.label_mapping.items()},
            "run_config": cfg.to_dict(), "version": __version__}
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        save_features(tmp, X, dataset.labels, meta)
        os.replace(tmp, path)
        os.replace(Path(str(tmp) + ".json"), Path(str(path) + ".json"))
    finally:
        tmp.unlink(missing_ok=True)
        Path(str(tmp) + ".json").unlink(missing_ok=True)
    meta["schema_hash"] = schema_hash(meta)
    return X, dataset.labels, meta


def cmd_extract(cfg: RunConfig):
    X, labels, meta = build_or_load_features(cfg, force=True)
    path = cache_path(cfg)
    print(f"{path}\t{X.shape[0]} graphs x {X.shape[1]} features")
    return path


def _protocol(cfg: RunConfig, split: str, pca_threshold=None) -> ExperimentProtocol:
    return ExperimentProtocol(split=split, seed=cfg.seed, pca_threshold=pca_threshold)


def cmd_classify(cfg: RunConfig):
    X, y, meta = build_or_load_features(cfg)
    splits = list(SPLITS) if cfg.params["split"] == "all" else [cfg.params["split"]]
    rows, protocols = [], {}
    for s in splits:
        proto = _protocol(cfg, s)
        res = run_split(X, y, proto, cfg.workers)
        protocols[res.split] = proto.to_dict()
        rows.append([res.split, 100 * res.mean, 100 * res.std, len(res.folds),
                     " ".join("%.4f" % (100 * a) for a in res.accuracies)])
    header = ["split", "accuracy_mean", "accuracy_std", "folds", "fold_accuracies"]
    path = Path(cfg.out) / f"classify_{cfg.dataset}_{cfg.moment_mode}_seed{cfg.seed}.csv"
    out = write_table(path, header, rows, cfg,
                      {"protocols": protocols, "feature_schema_hash": meta.get("schema_hash")})
    sys.stdout.write(_csv_text(header, out))
    print(json.dumps({"run_config": cfg.to_dict(), "protocols": protocols}, sort_keys=True))
    return path


def cmd_pca(cfg: RunConfig):
    X, y, meta = build_or_load_features(cfg)
    thresholds = cfg.params["thresholds"]
    model = pca_fit(X)
    rows = []
    for t in thresholds:
        dim = threshold_dimension(model, t)
        row = [t, dim]
        if cfg.params.get("accuracy", True):
            res = run_split(X, y, _protocol(cfg, "80-10-10", pca_threshold=t), cfg.workers)
            row += [100 * res.mean, 100 * res.std]
        else:
            row += ["", ""]
        rows.append(row)
    header = ["threshold", "dimension", "accuracy_mean", "accuracy_std"]
    path = Path(cfg.out) / f"pca_{cfg.dataset}_{cfg.moment_mode}.csv"
    out = write_table(path, header, rows, cfg, {"feature_schema_hash": meta.get("schema_hash")})

    class_rows = []
    for c in np.unique(y):
        m = pca_fit(X[y == c])
        class_rows.append([int(c)] + [threshold_dimension(m, t) for t in thresholds])
    class_rows.append(["all"] + [threshold_dimension(model, t) for t in thresholds])
    write_table(Path(cfg.out) / f"pca_classes_{cfg.dataset}_{cfg.moment_mode}.csv",
                ["class"] + [f"dim_{t:g}" for t in thresholds], class_rows, cfg)
    sys.stdout.write(_csv_text(header, out))
    return path


def cmd_explore(cfg: RunConfig):
    X, y, meta = build_or_load_features(cfg)
    t = cfg.params["threshold"]
    subs = fit_class_subspaces(X, y, t)
    dist = distances_to_subspaces(X, subs)
    D = np.stack([dist[y == s.class_id].mean(axis=0) for s in subs])
    stats = nearest_subspace_stats(X, y, t, distances=dist)
    pref = ec_preference(D, stats.incoherence)
    classes = stats.classes.tolist()
    out = Path(cfg.out)
    stem = f"{cfg.dataset}_{cfg.moment_mode}"
    cols = [f"class_{c}" for c in classes]
    extra = {"feature_schema_hash": meta.get("schema_hash"),
             "subspace_dimensions": [s.dimension for s in subs]}
    write_table(out / f"explore_D_{stem}.csv", ["class"] + cols,
                [[c] + list(r) for c, r in zip(classes, D)], cfg, extra)
    write_table(out / f"explore_w_{stem}.csv",
                ["class", "w", "rank1_fraction", "rank2_fraction", "rank3plus_fraction"],
                [[c, w, *fr] for c, w, fr in zip(classes, stats.incoherence, stats.rank_fractions)],
                cfg, {**extra, "true_nearest_fraction": stats.true_nearest_fraction})
    write_table(out / f"explore_pref_{stem}.csv", ["class"] + cols,
                [[c] + list(r) for c, r in zip(classes, pref.pref)], cfg, extra)
    write_table(out / f"explore_ranks_{stem}.csv", ["sample", "label", "rank"],
                [[i, int(lab), int(r)] for i, (lab, r) in enumerate(zip(y, stats.ranks))], cfg, extra)
    print(f"true-class nearest fraction: {stats.true_nearest_fraction:.4f}")
    return out


def _read_edge_file(path: str):
    edges = []
    with open(path) as fh:
        for line in fh:
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = [p for p in s.replace(",", " ").split()]
            edges.append((int(parts[0]), int(parts[1]), float(parts[2]) if len(parts) > 2 else 1.0))
    n = 1 + max(max(u, v) for u, v, _ in edges) if edges else 0
    return build_graph(n, edges)


def cmd_wavelets(cfg: RunConfig):
    if cfg.params.get("edges"):
        g = _read_edge_file(cfg.params["edges"])
        name = Path(cfg.params["edges"]).stem
    else:
        if not cfg.dataset:
            raise ConfigError("wavelets needs --edges or --dataset with --graph")
        g = load_tu_dataset(cfg.data_dir, cfg.dataset).graphs[cfg.params["graph"]]
        name = f"{cfg.dataset}_g{cfg.params['graph']}"
    centers = cfg.params.get("vertex")
    centers = list(range(g.n)) if centers is None else [centers]
    W = vertex_wavelets(g, cfg.J, centers)                 # J x n x len(centers)
    rows = [[c, v, j + 1, W[j, v, k]]
            for k, c in enumerate(centers) for j in range(cfg.J) for v in range(g.n)]
    path = Path(cfg.out) / f"wavelets_{name}_J{cfg.J}.csv"
    write_table(path, ["center", "vertex", "scale", "value"], rows, cfg)
    print(path)
    return path


COMMANDS = {"extract": cmd_extract, "classify": cmd_classify, "pca": cmd_pca,
            "explore": cmd_explore, "wavelets": cmd_wavelets}


def _floats(s: str):
    return [float(t) for t in s.split(",") if t]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gscatter", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--dataset")
        sp.add_argument("--data-dir", default=os.environ.get(DATA_DIR_ENV),
                        help=f"dataset root (default ${DATA_DIR_ENV})")
        sp.add_argument("--signals", help="comma list from ecc,clust,deg,attr")
        sp.add_argument("--scales", "-J", type=int, default=5, dest="J")
        sp.add_argument("--moments", "-Q", type=int, default=4, dest="Q")
        sp.add_argument("--mode", choices=["norm", "unnorm", "normalized", "unnormalized"])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("-v", "--verbose", action="store_true")
        return sp

    common(sub.add_parser("extract", help="compute and cache scattering features"))
    sp = common(sub.add_parser("classify", help="scattering + SVM accuracy table"))
    sp.add_argument("--split", default="80-10-10", choices=list(SPLITS) + ["all"])
    sp = common(sub.add_parser("pca", help="explained-variance dimensions and accuracy after PCA"))
    sp.add_argument("--threshold", type=_floats, default=[0.5, 0.8, 0.9, 0.99],
                    help="comma list of explained-variance fractions")
    sp.add_argument("--no-accuracy", action="store_true")
    sp = common(sub.add_parser("explore", help="class subspace distances and preferences"))
    sp.add_argument("--threshold", type=float, default=0.90)
    sp = common(sub.add_parser("wavelets", help="per-vertex wavelet values as CSV"))
    sp.add_argument("--edges", help="edge list file (u v [w] per line, 0-indexed)")
    sp.add_argument("--graph", type=int, default=0, help="graph index within --dataset")
    sp.add_argument("--vertex", type=int, help="centre vertex (default: all)")
    return p


def config_from_args(args) -> RunConfig:
    params = {}
    if args.command == "classify":
        params["split"] = args.split
    elif args.command == "pca":
        params["thresholds"] = args.threshold
        params["accuracy"] = not args.no_accuracy
    elif args.command == "explore":
        params["threshold"] = args.threshold
    elif args.command == "wavelets":
        params.update(edges=args.edges, graph=args.graph, vertex=args.vertex)
    mode = args.mode or DEFAULT_MODE.get(args.command, "normalized")
    return RunConfig(
        command=args.command, dataset=args.dataset, data_dir=args.data_dir,
        signals=args.signals.split(",") if args.signals else None,
        J=args.J, Q=args.Q, moment_mode=mode, seed=args.seed, out=args.out,
        workers=args.workers, params=params,
    ).validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        COMMANDS[cfg.command](cfg)
    except (ConfigError, DatasetError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
