"""Accuracy as the training share shrinks (80/10/10 down to 20/10/70)."""
import argparse
import logging

from graph_scattering import load_tu_dataset, reduced_split_study
from graph_scattering.pipeline import extract_features


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("datasets", nargs="+")
    ap.add_argument("--data-dir")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    print("dataset,split,accuracy,std")
    for name in args.datasets:
        ds = load_tu_dataset(args.data_dir, name)
        X, _ = extract_features(ds, workers=args.workers)
        for split, res in reduced_split_study(X, ds.labels, args.seed, workers=args.workers).items():
            print(f"{name},{split},{100 * res.mean:.2f},{100 * res.std:.2f}", flush=True)


if __name__ == "__main__":
    main()
