"""
Gaussian channel models with unit noise variance.

Noise comes from ``numpy.random.Generator.standard_normal`` (ziggurat) on a
caller-supplied generator, so outputs are a pure function of its state.
Every transmit function takes ``noise=False`` to return the noiseless sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOPOLOGIES = ("mac_real", "mac_complex", "interference", "kuser")


@dataclass(frozen=True)
class ChannelScenario:
    topology: str
    gains: tuple
    seed: int = 0

    def __post_init__(self):
        if self.topology not in TOPOLOGIES:
            raise ValueError(f"topology must be one of {TOPOLOGIES}")
        g = tuple(self.gains)
        object.__setattr__(self, "gains", g)
        if self.topology == "interference":
            if len(g) != 1:
                raise ValueError("interference takes a single cross gain")
        elif self.topology == "kuser":
            if not 2 <= len(g) <= 4:
                raise ValueError("kuser supports 2 to 4 users")
        elif len(g) != 2:
            raise ValueError("two-user MAC needs two gains")
        if self.topology != "mac_complex" and any(isinstance(x, complex) and x.imag for x in g):
            raise ValueError("complex gains need the mac_complex topology")

    @property
    def K(self) -> int:
        return 2 if self.topology == "interference" else len(self.gains)


def _same_length(*xs):
    arrs = [np.asarray(x) for x in xs]
    if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 1:
        raise ValueError("input vectors must be 1-D with equal lengths")
    return arrs


def transmit_mac_real(x1, x2, h1, h2, rng: np.random.Generator, noise: bool = True):
    x1, x2 = _same_length(x1, x2)
    y = h1 * x1 + h2 * x2
    if noise:
        y = y + rng.standard_normal(x1.shape)
    return y


def complex_noise(rng: np.random.Generator, n: int) -> np.ndarray:
    """Circularly symmetric noise with ``E|z|^2 = 1``."""
    z = rng.standard_normal((2, n)) * np.sqrt(0.5)
    return z[0] + 1j * z[1]


def transmit_mac_complex(x1, x2, h1, h2, rng: np.random.Generator, noise: bool = True):
    x1, x2 = _same_length(x1, x2)
    y = h1 * x1.astype(complex) + h2 * x2
    if noise:
        y = y + complex_noise(rng, x1.shape[0])
    return y


def transmit_interference(x1, x2, h, rng: np.random.Generator, noise: bool = True):
    """Symmetric interference channel; each receiver draws from its own child stream."""
    x1, x2 = _same_length(x1, x2)
    r1, r2 = rng.spawn(2)
    y1 = transmit_mac_real(x1, x2, 1.0, h, r1, noise)
    y2 = transmit_mac_real(x1, x2, h, 1.0, r2, noise)
    return y1, y2


def transmit_kuser(xs, hs, rng: np.random.Generator, noise: bool = True):
    if len(xs) != len(hs) or len(xs) < 2:
        raise ValueError("need K >= 2 inputs with one gain each")
    arrs = _same_length(*xs)
    y = sum(h * x for h, x in zip(hs, arrs))
    if noise:
        y = y + rng.standard_normal(arrs[0].shape)
    return y
