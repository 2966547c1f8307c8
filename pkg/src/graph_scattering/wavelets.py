"""Dyadic diffusion wavelets built from repeated lazy random walk steps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import Graph, apply_lazy_walk, _check_signal

DEFAULT_J = 5


@dataclass(frozen=True)
class WaveletCoefficients:
    """Wavelet stack for one signal (or one batch of column signals).

    ``coeffs[j - 1]`` holds ``Psi_j x``; ``lowpass`` is ``P^(2^J) x``.
    """

    J: int
    coeffs: np.ndarray
    lowpass: np.ndarray

    def __getitem__(self, j: int) -> np.ndarray:
        """Scale index is 1-based, matching Psi_1..Psi_J."""
        if not 1 <= j <= self.J:
            raise IndexError(f"scale {j} outside 1..{self.J}")
        return self.coeffs[j - 1]


def dyadic_diffusion(g: Graph, x: np.ndarray, J: int) -> list[np.ndarray]:
    """Return ``[P^(2^j) x for j = 0..J]`` using 2^J walk steps in total."""
    if J < 1:
        raise ConfigError(f"J must be >= 1, got {J}")
    cur = _check_signal(g, x)
    out = []
    steps = 0
    for j in range(J + 1):
        while steps < 2 ** j:
            cur = apply_lazy_walk(g, cur)
            steps += 1
        out.append(cur)
    return out


def wavelet_transform(g: Graph, x: np.ndarray, J: int = DEFAULT_J) -> WaveletCoefficients:
    diffused = dyadic_diffusion(g, x, J)
    coeffs = np.stack([diffused[j - 1] - diffused[j] for j in range(1, J + 1)])
    return WaveletCoefficients(J=J, coeffs=coeffs, lowpass=diffused[J])


def vertex_wavelets(g: Graph, J: int = DEFAULT_J, vertices=None) -> np.ndarray:
    """Wavelets centred at vertices: ``out[j - 1, :, k] = Psi_j delta_{vertices[k]}``."""
    if vertices is None:
        vertices = np.arange(g.n)
    vertices = np.asarray(vertices, dtype=int)
    deltas = np.zeros((g.n, len(vertices)))
    deltas[vertices, np.arange(len(vertices))] = 1.0
    return wavelet_transform(g, deltas, J).coeffs
