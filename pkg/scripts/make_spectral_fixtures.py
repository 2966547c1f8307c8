"""Regenerate tests/fixtures/spectral_fixtures.json.

Eigen-decompositions of the normalized Laplacian for a few small graphs,
computed with a dense symmetric eigensolver. The library never decomposes
operators at runtime; these frozen values only serve as test oracles.
"""
import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))
from _oracles import random_connected_edges  # noqa: E402


def fixture(name, n, edges):
    A = np.zeros((n, n))
    for u, v, w in edges:
        A[u, v] = A[v, u] = w
    d = A.sum(1)
    s = 1 / np.sqrt(d)
    N = np.eye(n) - s[:, None] * A * s[None, :]
    lam, phi = np.linalg.eigh(N)
    # sign convention: first eigenvector nonnegative
    if phi[:, 0].sum() < 0:
        phi[:, 0] *= -1
    return {"name": name, "n": n, "edges": [list(e) for e in edges],
            "eigenvalues": lam.tolist(), "eigenvectors": phi.T.tolist()}


def main():
    rng = np.random.default_rng(8)
    graphs = [
        ("K3", 3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]),
        ("P4", 4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]),
        ("random8", 8, random_connected_edges(8, rng, p=0.3, weighted=True)),
    ]
    out = ROOT / "tests" / "fixtures" / "spectral_fixtures.json"
    out.write_text(json.dumps([fixture(*g) for g in graphs], indent=1) + "\n")
    print(out)


if __name__ == "__main__":
    main()
