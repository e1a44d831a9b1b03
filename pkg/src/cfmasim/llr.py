"""
Initial LLRs for the compute-forward decoding stages.

Every LLR is ``log p(bit = 0 | evidence) - log p(bit = 1 | evidence)``,
evaluated as a ratio of conditional Gaussian mixtures over all user-symbol
tuples consistent with the evidence. Equal-weight terms need no
normalization because the weights cancel in each ratio. Outputs are clamped
to ``[-LLR_CLAMP, LLR_CLAMP]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .modulation import ModulationSpec

LLR_CLAMP = 50.0
_LOG2 = np.log(2.0)


def clamp(x):
    return np.clip(x, -LLR_CLAMP, LLR_CLAMP)


def logcosh(x):
    """Overflow-free ``log(cosh(x))``."""
    a = np.abs(x)
    return a + np.log1p(np.exp(-2.0 * a)) - _LOG2


def mixture_llr(ll, target, allowed=None):
    """Log-ratio of the ``target == 0`` and ``target == 1`` sub-mixtures.

    Parameters
    ----------
    ll : ndarray, shape (n, C)
        Per-symbol component log-likelihoods.
    target : ndarray, shape (C,) or (n, C)
        Bit carried by each component.
    allowed : ndarray of bool, shape (n, C), optional
        Components consistent with the conditioning of each symbol.
    """
    target = np.broadcast_to(np.asarray(target, dtype=bool), ll.shape)
    ok = np.ones(ll.shape, bool) if allowed is None else allowed
    with np.errstate(divide="ignore"):
        num = logsumexp(np.where(ok & ~target, ll, -np.inf), axis=1)
        den = logsumexp(np.where(ok & target, ll, -np.inf), axis=1)
    out = num - den
    # both empty cannot happen for a consistent conditioning; treat as erasure
    out = np.where(np.isnan(out), 0.0, out)
    return clamp(out)


# ---------------------------------------------------------------------------
# binary two-user kernels


def _binary_means(h1, h2, P):
    u1 = np.array([0, 0, 1, 1])
    u2 = np.array([0, 1, 0, 1])
    mu = np.sqrt(np.asarray(P, float))[..., None] * (h1 * (2 * u1 - 1) + h2 * (2 * u2 - 1))
    return u1, u2, mu


def _real_ll(y, mu):
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return -0.5 * (y[:, None] - np.atleast_2d(mu)) ** 2


def _unit(h1, h2):
    return h1 == 1 and h2 == 1


def llr_sum_closed(y, P):
    """Unit-gain sum LLR: ``log cosh(2 y sqrt(P)) - 2P``."""
    return clamp(logcosh(2.0 * np.asarray(y, float) * np.sqrt(P)) - 2.0 * P)


def llr_user_closed(y, s, P):
    """Unit-gain user LLR given the sum bit: ``-4 y sqrt(P)`` if ``s = 0``, else 0."""
    y = np.asarray(y, float)
    return clamp(np.where(np.asarray(s) == 0, -4.0 * y * np.sqrt(P), 0.0))


def _scalar_out(out, y, P):
    if np.ndim(y) or np.ndim(P):
        return out
    return float(np.ravel(out)[0])


def llr_sum_binary(y, h1, h2, P, method: str = "auto"):
    """LLR of ``s = u1 xor u2`` for BPSK users.

    ``method`` is ``"generic"`` (mixture ratio), ``"closed"`` (unit gains
    only) or ``"auto"`` (closed form when both gains are 1). ``P`` may be an
    array broadcasting against ``y``.
    """
    if np.any(np.asarray(P) <= 0):
        raise ValueError("P must be positive")
    if method == "closed" or (method == "auto" and _unit(h1, h2)):
        if not _unit(h1, h2):
            raise ValueError("closed form needs unit gains")
        out = llr_sum_closed(y, P)
    else:
        u1, u2, mu = _binary_means(h1, h2, P)
        out = mixture_llr(_real_ll(y, mu), u1 ^ u2)
    return _scalar_out(out, y, P)


def llr_user_given_sum_binary(y, s, h1, h2, P, method: str = "auto", target_user: int = 1):
    """LLR of user ``target_user``'s bit given the decoded sum bit ``s``."""
    if np.any(np.asarray(P) <= 0):
        raise ValueError("P must be positive")
    if method == "closed" or (method == "auto" and _unit(h1, h2)):
        if not _unit(h1, h2):
            raise ValueError("closed form needs unit gains")
        out = llr_user_closed(y, s, P)
    else:
        u1, u2, mu = _binary_means(h1, h2, P)
        ll = _real_ll(y, mu)
        s_arr = np.broadcast_to(np.atleast_1d(s), (ll.shape[0],))
        allowed = (u1 ^ u2)[None, :] == s_arr[:, None]
        out = mixture_llr(ll, u1 if target_user == 1 else u2, allowed)
    return _scalar_out(out, y, P)


# ---------------------------------------------------------------------------
# multilevel / complex two-user engine


def carry_bits(low1, low2, level: int) -> np.ndarray:
    """Carry into ``level`` from the integer values of the lower levels."""
    if level < 2:
        return np.zeros(np.shape(low1), dtype=np.uint8)
    return ((np.asarray(low1) + np.asarray(low2)) >= (1 << (level - 1))).astype(np.uint8)


class PairMixture:
    """All ``(x1, x2)`` symbol pairs of a two-user constellation with their noiseless outputs.

    Real constellations have one axis; QAM has two, axis 0 imaginary and
    axis 1 real. ``U1[c, a]`` and ``U2[c, a]`` are the integer symbols of
    component ``c`` on axis ``a``.
    """

    def __init__(self, spec: ModulationSpec, gains):
        self.spec = spec
        M = spec.M
        self.M = M
        self.axes = 2 if spec.is_complex else 1
        grids = np.meshgrid(*[np.arange(M)] * (2 * self.axes), indexing="ij")
        lab = np.stack([g.ravel() for g in grids], axis=1)
        self.U1 = lab[:, : self.axes]
        self.U2 = lab[:, self.axes:]
        self.S = (self.U1 + self.U2) % M
        pts = spec.axis_points
        h1, h2 = gains
        if spec.is_complex:
            x1 = pts[self.U1[:, 1]] + 1j * pts[self.U1[:, 0]]
            x2 = (pts[self.U2[:, 1]] + 1j * pts[self.U2[:, 0]]) * np.exp(1j * spec.theta)
            self.means = h1 * x1 + h2 * x2
        else:
            if np.iscomplexobj(np.asarray(gains)):
                raise ValueError("real constellation with complex gains")
            self.means = h1 * pts[self.U1[:, 0]] + h2 * pts[self.U2[:, 0]]

    @property
    def C(self) -> int:
        return len(self.means)

    def loglik(self, y) -> np.ndarray:
        y = np.atleast_1d(y)
        if self.spec.is_complex:
            return -np.abs(y[:, None] - self.means[None, :]) ** 2
        return -0.5 * (y.real[:, None] - self.means[None, :]) ** 2

    def _lower_mask(self, level, low1, low2):
        n = low1.shape[0]
        ok = np.ones((n, self.C), bool)
        if level > 1:
            mod = 1 << (level - 1)
            for a in range(self.axes):
                ok &= (self.U1[None, :, a] % mod) == low1[:, None, a]
                ok &= (self.U2[None, :, a] % mod) == low2[:, None, a]
        return ok

    def sum_star(self, ll, level, low1, low2) -> np.ndarray:
        """LLR of the sum digit at ``level`` given the lower digits of both users.

        Returns shape ``(n_sym, axes)``.
        """
        ok = self._lower_mask(level, low1, low2)
        sbit = (self.S >> (level - 1)) & 1
        return np.stack([mixture_llr(ll, sbit[:, a], ok) for a in range(self.axes)], axis=1)

    def sum_llr(self, ll, level, low1, low2) -> np.ndarray:
        """Sum-digit LLR with the carry sign rule applied.

        This is the LLR of ``u1^(l) xor u2^(l)``, the bit that forms a codeword.
        """
        c = carry_bits(low1, low2, level)
        return np.where(c == 1, -1.0, 1.0) * self.sum_star(ll, level, low1, low2)

    def user_llr(self, ll, level, low1, low2, s_bits, target_user=1) -> np.ndarray:
        """LLR of the target user's digit at ``level`` given the sum digits there."""
        ok = self._lower_mask(level, low1, low2)
        sbit = (self.S >> (level - 1)) & 1
        for a in range(self.axes):
            ok &= sbit[None, :, a] == s_bits[:, None, a]
        U = self.U1 if target_user == 1 else self.U2
        ubit = (U >> (level - 1)) & 1
        return np.stack([mixture_llr(ll, ubit[:, a], ok) for a in range(self.axes)], axis=1)


def to_symbols(bits, axes: int) -> np.ndarray:
    """Reshape code-position values ``(n,)`` to ``(n_sym, axes)``."""
    b = np.asarray(bits)
    return b.reshape(-1, axes)


@dataclass(frozen=True)
class LevelContext:
    """Decoded lower levels of both users for one level of a multilevel chain.

    ``lower1`` and ``lower2`` have shape ``(level - 1, n)`` in code-position
    order; the carry follows from them.
    """

    level: int
    lower1: np.ndarray
    lower2: np.ndarray
    spec: ModulationSpec
    gains: tuple

    def __post_init__(self):
        if not 1 <= self.level <= self.spec.L:
            raise ValueError("level out of range")
        l1, l2 = (np.atleast_2d(np.asarray(x, dtype=np.int64)) for x in (self.lower1, self.lower2))
        if self.level == 1:
            l1, l2 = l1[:0], l2[:0]
        if l1.shape != l2.shape or l1.shape[0] != self.level - 1:
            raise ValueError("lower-level stacks must have level - 1 rows of equal length")
        object.__setattr__(self, "lower1", l1)
        object.__setattr__(self, "lower2", l2)

    @cached_property
    def mixture(self) -> PairMixture:
        return PairMixture(self.spec, self.gains)

    def _low(self, stack, n):
        w = (1 << np.arange(self.level - 1))[:, None]
        v = (stack.astype(np.int64) * w).sum(axis=0) if self.level > 1 else np.zeros(n, np.int64)
        return to_symbols(v, self.mixture.axes)

    def lows(self, n):
        return self._low(self.lower1, n), self._low(self.lower2, n)

    def carry(self, n: int) -> np.ndarray:
        """Carry bits ``c^(level)`` in code-position order."""
        lo1, lo2 = self.lows(n)
        return carry_bits(lo1, lo2, self.level).ravel()


def _n_bits(y, ctx):
    return np.size(y) * ctx.mixture.axes


def llr_multilevel_sum_star(y, ctx: LevelContext) -> np.ndarray:
    """Sum-digit LLR at ``ctx.level`` before the carry sign rule."""
    n = _n_bits(y, ctx)
    lo1, lo2 = ctx.lows(n)
    return ctx.mixture.sum_star(ctx.mixture.loglik(y), ctx.level, lo1, lo2).ravel()


def llr_multilevel_sum(y, ctx: LevelContext) -> np.ndarray:
    """Sum-stage input LLR at ``ctx.level``: the star LLR negated where the carry is 1."""
    n = _n_bits(y, ctx)
    lo1, lo2 = ctx.lows(n)
    return ctx.mixture.sum_llr(ctx.mixture.loglik(y), ctx.level, lo1, lo2).ravel()


def llr_multilevel_user(y, ctx: LevelContext, s_level, target_user: int = 1) -> np.ndarray:
    """User-stage input LLR at ``ctx.level`` given the decoded sum digits ``s_level``."""
    n = _n_bits(y, ctx)
    lo1, lo2 = ctx.lows(n)
    s = to_symbols(np.asarray(s_level, dtype=np.int64), ctx.mixture.axes)
    return ctx.mixture.user_llr(ctx.mixture.loglik(y), ctx.level, lo1, lo2, s, target_user).ravel()


def llr_complex_sum(y, ctx: LevelContext) -> np.ndarray:
    """Complex-channel sum LLRs, interleaved imaginary then real per symbol."""
    if not ctx.spec.is_complex:
        raise ValueError("complex kernel needs a qam spec")
    return llr_multilevel_sum(np.asarray(y, complex), ctx)


def llr_complex_user(y, ctx: LevelContext, s_level, target_user: int = 1) -> np.ndarray:
    if not ctx.spec.is_complex:
        raise ValueError("complex kernel needs a qam spec")
    return llr_multilevel_user(np.asarray(y, complex), ctx, s_level, target_user)


# ---------------------------------------------------------------------------
# K-user chain


def _kuser_table(K):
    bits = ((np.arange(2 ** K)[:, None] >> np.arange(K)[None, :]) & 1).astype(np.int64)
    prefix = np.cumsum(bits, axis=1) & 1  # prefix[:, m-1] = u1 xor ... xor um
    return bits, prefix


def llr_kuser_stage(y, m: int, decoded_sums, gains, P: float) -> np.ndarray:
    """LLR of ``e^m = u1 xor ... xor um`` for BPSK users.

    ``decoded_sums`` maps each ``j`` in ``m+1..K`` to the decoded bit vector
    of ``e^j``; every user tuple consistent with them enters the mixture.
    """
    K = len(gains)
    if not 2 <= K <= 4:
        raise ValueError("K must be between 2 and 4")
    if not 1 <= m <= K:
        raise ValueError("stage out of range")
    bits, prefix = _kuser_table(K)
    mu = np.sqrt(P) * ((2 * bits - 1) * np.asarray(gains, float)[None, :]).sum(axis=1)
    ll = _real_ll(y, mu)
    ok = np.ones(ll.shape, bool)
    for j in range(m + 1, K + 1):
        e = np.asarray(decoded_sums[j])
        ok &= prefix[None, :, j - 1] == e[:, None]
    return mixture_llr(ll, prefix[:, m - 1], ok)


def level_density(y, spec: ModulationSpec, gains, level: int, low1: int, low2: int,
                  s_bit: int | None = None, u1_bit: int | None = None) -> np.ndarray:
    """Conditional output density of a real multilevel pair at ``level``.

    Conditions on the lower ``level - 1`` digits of both users and
    optionally on the sum digit and user 1's digit at ``level``; each
    consistent pair gets weight ``1 / count``.
    """
    if spec.is_complex:
        raise ValueError("real constellations only")
    mix = PairMixture(spec, gains)
    mod = 1 << (level - 1)
    ok = (mix.U1[:, 0] % mod == low1) & (mix.U2[:, 0] % mod == low2)
    if s_bit is not None:
        ok &= ((mix.S[:, 0] >> (level - 1)) & 1) == s_bit
    if u1_bit is not None:
        ok &= ((mix.U1[:, 0] >> (level - 1)) & 1) == u1_bit
    mu = mix.means[ok]
    if mu.size == 0:
        raise ValueError("conditioning admits no symbol pair")
    y = np.asarray(y, float)
    g = np.exp(-0.5 * (y[..., None] - mu) ** 2) / np.sqrt(2.0 * np.pi)
    return g.mean(axis=-1)
