"""
Flooding sum-product decoder on a Tanner graph.

Check updates run in the phi domain, ``phi(x) = -log tanh(x / 2)``, which is
its own inverse on ``x > 0``. Message magnitudes are kept inside
``[PHI_FLOOR, LLR_CLAMP]`` so phi never returns inf.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2_codes import ParityCheckMatrix
from .llr import LLR_CLAMP

# phi(PHI_FLOOR) ~= LLR_CLAMP
PHI_FLOOR = 2.0 * np.exp(-LLR_CLAMP)


def phi(x):
    x = np.clip(x, PHI_FLOOR, LLR_CLAMP)
    return np.log1p(2.0 / np.expm1(x))


@dataclass(frozen=True)
class DecodeResult:
    hard_bits: np.ndarray
    converged: bool
    iterations_used: int
    final_llrs: np.ndarray


def spa_decode(H: ParityCheckMatrix, init, max_iter: int = 25) -> DecodeResult:
    """Decode with the sum-product algorithm.

    Parameters
    ----------
    H : ParityCheckMatrix
    init : array_like, shape (n,)
        Channel LLRs, positive favouring bit 0.
    max_iter : int
        Maximum number of flooding rounds.

    Returns
    -------
    DecodeResult
        ``hard_bits`` is 0 wherever the posterior LLR is >= 0. Decoding stops
        as soon as the hard decision has zero syndrome, which is checked
        before the first round too.
    """
    L0 = np.asarray(init, dtype=float)
    if L0.shape != (H.n,):
        raise ValueError(f"expected {H.n} LLRs, got shape {L0.shape}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    L0 = np.clip(L0, -LLR_CLAMP, LLR_CLAMP)
    ev, ec, starts = H.edges

    post = L0
    hard = (post < 0).astype(np.uint8)
    if not H.syndrome(hard).any():
        return DecodeResult(hard, True, 0, post)

    r = np.zeros(ev.shape[0])
    it = 0
    for it in range(1, max_iter + 1):
        q = post[ev] - r
        mag = phi(np.abs(q))
        neg = (q < 0).astype(np.int64)
        tot = np.add.reduceat(mag, starts)[ec]
        par = (np.add.reduceat(neg, starts)[ec] - neg) & 1
        r = np.where(par == 1, -1.0, 1.0) * np.minimum(phi(np.maximum(tot - mag, 0.0)), LLR_CLAMP)
        post = L0 + np.bincount(ev, weights=r, minlength=H.n)
        hard = (post < 0).astype(np.uint8)
        if not H.syndrome(hard).any():
            return DecodeResult(hard, True, it, post)
    return DecodeResult(hard, False, it, post)
