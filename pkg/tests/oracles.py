"""Independent brute-force density oracles built from explicit Gaussian pdfs."""
import itertools

import numpy as np
from scipy.stats import norm

from cfmasim.modulation import ModulationSpec


def pam_points(P, L):
    M = 2 ** L
    return np.sqrt(3 * P / (M * M - 1)) * (2 * np.arange(M) - M + 1)


def multilevel_llrs(y, P, L, level, low1, low2, gains=(1.0, 1.0), s_bit=None):
    """Sum-stage (carry-adjusted) LLR, or user-1 LLR when ``s_bit`` is given."""
    pts = pam_points(P, L)
    M = 2 ** L
    num = den = 0.0
    mod = 2 ** (level - 1)
    for u1, u2 in itertools.product(range(M), repeat=2):
        if u1 % mod != low1 or u2 % mod != low2:
            continue
        s = (u1 + u2) % M
        sb = (s >> (level - 1)) & 1
        d = norm.pdf(y, loc=gains[0] * pts[u1] + gains[1] * pts[u2])
        if s_bit is None:
            bit = sb
        elif sb != s_bit:
            continue
        else:
            bit = (u1 >> (level - 1)) & 1
        if bit:
            den += d
        else:
            num += d
    out = np.log(num / den)
    if s_bit is None and low1 + low2 >= mod and level > 1:
        out = -out
    return float(np.clip(out, -50, 50))


def complex_pair_llrs(y, P, theta, gains=(1.0, 1.0)):
    """4-QAM: sum-stage LLRs for (imag, real) bits of one complex symbol."""
    spec = ModulationSpec("qam", P, 1, theta)
    a = np.sqrt(P / 2)
    num = np.zeros(2)
    den = np.zeros(2)
    for b in itertools.product((0, 1), repeat=4):
        i1, r1, i2, r2 = b
        x1 = a * ((2 * r1 - 1) + 1j * (2 * i1 - 1))
        x2 = a * ((2 * r2 - 1) + 1j * (2 * i2 - 1)) * np.exp(1j * spec.theta)
        d = np.exp(-abs(y - gains[0] * x1 - gains[1] * x2) ** 2) / np.pi
        for ax, bit in enumerate((i1 ^ i2, r1 ^ r2)):
            if bit:
                den[ax] += d
            else:
                num[ax] += d
    return np.log(num / den)
