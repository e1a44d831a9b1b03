"""
Symbol mappers with exact average-power normalization.

Bit stacks are indexed level first: ``levels[l]`` is the bit vector of level
``l + 1`` and level 1 is the least significant bit of the symbol index
``u = sum_l 2**l * levels[l]``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

FAMILIES = ("bpsk", "pam", "qam")


def _check_power(P):
    if not np.isfinite(P) or P <= 0:
        raise ValueError(f"power must be positive, got {P}")


def pam_scale(P: float, L: int) -> float:
    """Grid spacing half-width for a 2**L-PAM of mean power ``P``."""
    M = 2 ** L
    return float(np.sqrt(3.0 * P / (M * M - 1)))


def qam_scale(P: float, L: int) -> float:
    """Per-axis half-spacing for a (2**L)**2-QAM of mean power ``P``."""
    M = 2 ** L
    return float(np.sqrt(3.0 * P / (2.0 * (M * M - 1))))


def pam_grid(M: int) -> np.ndarray:
    """Odd-integer grid ``2u - M + 1`` for ``u = 0..M-1``."""
    return 2 * np.arange(M) - M + 1


def stack_to_int(levels) -> np.ndarray:
    """Combine a level stack (level 1 first) into integer symbols."""
    lv = np.asarray(levels, dtype=np.int64)
    if lv.ndim == 0:
        raise ValueError("level stack needs at least one level")
    w = (1 << np.arange(lv.shape[0], dtype=np.int64)).reshape((-1,) + (1,) * (lv.ndim - 1))
    return (lv * w).sum(axis=0)


def int_to_stack(u, L: int) -> np.ndarray:
    """Split integer symbols into ``L`` bit levels (level 1 = LSB)."""
    u = np.asarray(u, dtype=np.int64)
    return np.stack([(u >> l) & 1 for l in range(L)]).astype(np.uint8)


def _check_bits(b):
    b = np.asarray(b)
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError("bits must be 0 or 1")
    return b


def map_bpsk(u, P: float):
    """``sqrt(P) * (2u - 1)``."""
    _check_power(P)
    u = _check_bits(u)
    return np.sqrt(P) * (2.0 * u - 1.0)


def map_pam(levels, P: float, L: int):
    """Map ``L`` stacked bits to a real 2**L-PAM point of mean power ``P``."""
    _check_power(P)
    lv = _check_bits(levels)
    if lv.shape[:1] != (L,):
        raise ValueError(f"expected {L} levels, got {lv.shape[:1]}")
    u = stack_to_int(lv)
    return pam_scale(P, L) * pam_grid(2 ** L)[u]


def map_qam(odd_levels, even_levels, P: float, L: int, theta: float = 0.0):
    """Map two ``L``-bit stacks to a rotated QAM point of mean power ``P``.

    ``odd_levels`` drives the imaginary part, ``even_levels`` the real part;
    the result is multiplied by ``exp(1j * theta)``.
    """
    _check_power(P)
    im = _check_bits(odd_levels)
    re = _check_bits(even_levels)
    if im.shape[:1] != (L,) or re.shape[:1] != (L,):
        raise ValueError(f"expected {L} levels per component")
    g = pam_grid(2 ** L)
    x = qam_scale(P, L) * (g[stack_to_int(re)] + 1j * g[stack_to_int(im)])
    return x * np.exp(1j * theta)


@dataclass(frozen=True)
class ModulationSpec:
    """Constellation family, mean power ``P``, levels ``L`` per real axis and rotation."""

    family: str
    P: float
    L: int = 1
    theta: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        _check_power(self.P)
        if self.L < 1:
            raise ValueError("L must be >= 1")
        if self.family == "bpsk" and (self.L != 1 or self.theta != 0.0):
            raise ValueError("bpsk requires L = 1 and theta = 0")
        if self.family == "pam" and self.theta != 0.0:
            raise ValueError("rotation applies to qam only")

    @property
    def is_complex(self) -> bool:
        return self.family == "qam"

    @property
    def M(self) -> int:
        return 2 ** self.L

    @property
    def axis_points(self) -> np.ndarray:
        """Per-axis amplitudes indexed by the integer symbol."""
        a = qam_scale(self.P, self.L) if self.is_complex else pam_scale(self.P, self.L)
        return a * pam_grid(self.M)

    def with_power(self, P: float) -> "ModulationSpec":
        return ModulationSpec(self.family, P, self.L, self.theta)

    def constellation(self, rotated: bool = False) -> np.ndarray:
        """All points ordered by symbol index.

        For QAM the index is ``u_imag * M + u_real``.
        """
        pts = self.axis_points
        if not self.is_complex:
            return pts.astype(float)
        c = (pts[None, :] + 1j * pts[:, None]).ravel()
        return c * np.exp(1j * self.theta) if rotated else c

    def modulate(self, levels, rotate: bool = False) -> np.ndarray:
        """Map a codeword level stack of shape ``(L, n)`` to channel symbols.

        QAM consumes bit pairs: position ``2i`` feeds the imaginary part of
        symbol ``i`` and position ``2i + 1`` the real part.
        """
        lv = np.asarray(levels)
        if lv.ndim == 1:
            lv = lv[None, :]
        if self.family == "bpsk":
            return map_bpsk(lv[0], self.P)
        if self.family == "pam":
            return map_pam(lv, self.P, self.L)
        if lv.shape[1] % 2:
            raise ValueError("qam needs an even codeword length")
        return map_qam(lv[:, 0::2], lv[:, 1::2], self.P, self.L, self.theta if rotate else 0.0)


def constellation_csv(spec: ModulationSpec, rotated: bool = False) -> str:
    buf = io.StringIO()
    buf.write("index,real,imag\n")
    for i, p in enumerate(np.atleast_1d(spec.constellation(rotated))):
        p = complex(p)
        buf.write(f"{i},{p.real:.12g},{p.imag:.12g}\n")
    return buf.getvalue()
