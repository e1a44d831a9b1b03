"""
Compute-forward decoding chains.

Two-user chains decode, level by level, first the modulo sum of the two
codewords and then one user's codeword given that sum; the other user
follows by subtraction. Binary, multilevel PAM and rotated QAM share one
implementation. A K-user chain and a two-receiver interference driver sit
on top.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import channels
from .gf2_codes import ParityCheckMatrix, encode
from .llr import PairMixture, carry_bits, llr_kuser_stage, to_symbols
from .modulation import ModulationSpec, int_to_stack, stack_to_int
from .spa import spa_decode


def sum_mod(u1, u2, L: int) -> np.ndarray:
    M = 1 << L
    u1 = np.asarray(u1, dtype=np.int64)
    u2 = np.asarray(u2, dtype=np.int64)
    if u1.shape != u2.shape:
        raise ValueError("length mismatch")
    if ((u1 < 0) | (u1 >= M) | (u2 < 0) | (u2 >= M)).any():
        raise ValueError(f"symbols must lie in [0, {M})")
    return (u1 + u2) % M


def carry_vector(u1_levels, u2_levels, level: int) -> np.ndarray:
    """Carry into ``level`` given the stacks of levels ``1..level-1`` (level 1 first)."""
    if level < 2:
        raise ValueError("carry is defined for level >= 2")
    a = np.asarray(u1_levels)[: level - 1]
    b = np.asarray(u2_levels)[: level - 1]
    return carry_bits(stack_to_int(a), stack_to_int(b), level)


def sum_digits_oracle(u1_levels, u2_levels, L: int) -> np.ndarray:
    """Digits of the modulo sum built level by level from XORs and carries."""
    a = np.asarray(u1_levels, dtype=np.uint8)
    b = np.asarray(u2_levels, dtype=np.uint8)
    if a.shape != b.shape or a.shape[0] != L:
        raise ValueError("level stacks must both have L rows")
    out = np.empty_like(a)
    out[0] = a[0] ^ b[0]
    for l in range(2, L + 1):
        out[l - 1] = a[l - 1] ^ b[l - 1] ^ carry_vector(a, b, l)
    return out


@dataclass(frozen=True)
class CfmaCodebook:
    """Per-level nested code pairs shared by two users.

    ``super_user`` holds the supercode on every level, the other user the
    subcode. The first decoding step always targets the sum with unit
    coefficients.
    """

    pairs: tuple
    spec: ModulationSpec
    super_user: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if len(self.pairs) != self.spec.L:
            raise ValueError(f"need {self.spec.L} code pairs, got {len(self.pairs)}")
        ns = {p.n for p in self.pairs}
        if len(ns) != 1:
            raise ValueError("all levels need the same block length")
        if self.spec.is_complex and self.n % 2:
            raise ValueError("qam needs an even block length")
        if self.super_user not in (1, 2):
            raise ValueError("super_user must be 1 or 2")

    @property
    def n(self) -> int:
        return self.pairs[0].n

    @property
    def sub_user(self) -> int:
        return 3 - self.super_user

    def user_matrix(self, user: int, level: int) -> ParityCheckMatrix:
        p = self.pairs[level - 1]
        return p.H_super if user == self.super_user else p.H_sub

    def user_encoder(self, user: int, level: int):
        sub, sup = self.pairs[level - 1].encoders
        return sup if user == self.super_user else sub

    def k(self, user: int) -> int:
        return sum(self.user_encoder(user, l).k for l in range(1, self.spec.L + 1))

    def random_codewords(self, rng: np.random.Generator):
        """Uniform codeword level stacks ``(L, n)`` for users 1 and 2."""
        out = []
        for user in (1, 2):
            lv = []
            for l in range(1, self.spec.L + 1):
                enc = self.user_encoder(user, l)
                lv.append(encode(enc, rng.integers(0, 2, enc.k, dtype=np.uint8)))
            out.append(np.stack(lv))
        return out[0], out[1]

    def with_power(self, P: float) -> "CfmaCodebook":
        return CfmaCodebook(self.pairs, self.spec.with_power(P), self.super_user)


@dataclass(frozen=True)
class StageInfo:
    name: str
    level: int
    converged: bool
    iterations: int
    upstream_failed: bool


@dataclass
class CfmaResult:
    """Decoded level stacks; ``levelwise_other`` keeps the per-level rebuild of the other user."""

    s_levels: np.ndarray
    u1_levels: np.ndarray
    u2_levels: np.ndarray
    stages: list = field(default_factory=list)
    L: int = 1
    levelwise_other: np.ndarray | None = None
    other_user: int = 1

    @property
    def s_hat(self) -> np.ndarray:
        return stack_to_int(self.s_levels)

    @property
    def u1_hat(self) -> np.ndarray:
        return stack_to_int(self.u1_levels)

    @property
    def u2_hat(self) -> np.ndarray:
        return stack_to_int(self.u2_levels)

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.stages)


def _chain(y, cb: CfmaCodebook, gains, target_user, max_iter) -> CfmaResult:
    spec = cb.spec
    mix = PairMixture(spec, gains)
    ll = mix.loglik(y)
    n, L = cb.n, spec.L
    if ll.shape[0] * mix.axes != n:
        raise ValueError(f"received {ll.shape[0]} symbols, code needs {n // mix.axes}")
    t = cb.sub_user if target_user is None else target_user
    o = 3 - t
    lows = {1: np.zeros((n // mix.axes, mix.axes), np.int64), 2: None}
    lows[2] = lows[1].copy()
    s_lv, u_lv = np.zeros((L, n), np.uint8), {1: np.zeros((L, n), np.uint8), 2: np.zeros((L, n), np.uint8)}
    stages = []
    failed = False
    for l in range(1, L + 1):
        c = carry_bits(lows[1], lows[2], l).ravel()
        rs = spa_decode(cb.pairs[l - 1].H_super, mix.sum_llr(ll, l, lows[1], lows[2]).ravel(), max_iter)
        stages.append(StageInfo("sum", l, rs.converged, rs.iterations_used, failed))
        failed |= not rs.converged
        v = rs.hard_bits
        s_lv[l - 1] = v ^ c
        lu = mix.user_llr(ll, l, lows[1], lows[2], to_symbols(s_lv[l - 1], mix.axes), t).ravel()
        ru = spa_decode(cb.user_matrix(t, l), lu, max_iter)
        stages.append(StageInfo(f"user{t}", l, ru.converged, ru.iterations_used, failed))
        failed |= not ru.converged
        u_lv[t][l - 1] = ru.hard_bits
        u_lv[o][l - 1] = v ^ ru.hard_bits
        for k in (1, 2):
            lows[k] = lows[k] + (to_symbols(u_lv[k][l - 1], mix.axes).astype(np.int64) << (l - 1))
    levelwise = u_lv[o].copy()
    u_o = (stack_to_int(s_lv) - stack_to_int(u_lv[t])) % spec.M
    u_lv[o] = int_to_stack(u_o, L)
    return CfmaResult(s_lv, u_lv[1], u_lv[2], stages, L, levelwise, o)


def _power(cb, P):
    return cb if P is None or P == cb.spec.P else cb.with_power(P)


def decode_cfma_binary(y, cb: CfmaCodebook, gains, P=None, target_user=None, max_iter: int = 25) -> CfmaResult:
    """Decode the sum codeword, then ``target_user`` (default: the subcode user)."""
    if cb.spec.L != 1 or cb.spec.is_complex:
        raise ValueError("binary chain needs a real single-level code")
    return _chain(np.asarray(y, float), _power(cb, P), gains, target_user, max_iter)


def decode_cfma_multilevel(y, cb: CfmaCodebook, gains, P=None, target_user=None, max_iter: int = 25) -> CfmaResult:
    """Level-by-level chain for real 2**L-PAM."""
    if cb.spec.is_complex:
        raise ValueError("use decode_cfma_complex for qam")
    return _chain(np.asarray(y, float), _power(cb, P), gains, target_user, max_iter)


def decode_cfma_complex(y, cb: CfmaCodebook, gains, P=None, target_user=None, max_iter: int = 25) -> CfmaResult:
    """Chain for rotated QAM; ``y`` holds ``n / 2`` complex symbols."""
    if not cb.spec.is_complex:
        raise ValueError("complex chain needs a qam spec")
    if cb.n % 2:
        raise ValueError("odd block length")
    return _chain(np.asarray(y, complex), _power(cb, P), gains, target_user, max_iter)


def decode_cfma(y, cb: CfmaCodebook, gains, P=None, target_user=None, max_iter: int = 25) -> CfmaResult:
    if cb.spec.is_complex:
        return decode_cfma_complex(y, cb, gains, P, target_user, max_iter)
    return decode_cfma_multilevel(y, cb, gains, P, target_user, max_iter)


def transmit_pair(cb: CfmaCodebook, u1_levels, u2_levels, gains, rng, noise=True):
    """Modulate both users and pass them through the two-user MAC."""
    x1 = cb.spec.modulate(u1_levels)
    x2 = cb.spec.modulate(u2_levels, rotate=True)
    if cb.spec.is_complex:
        return channels.transmit_mac_complex(x1, x2, gains[0], gains[1], rng, noise)
    return channels.transmit_mac_real(x1, x2, gains[0], gains[1], rng, noise)


# ---------------------------------------------------------------------------
# K users


def build_kuser_codes(H_base: ParityCheckMatrix, merges, seed: int = 0):
    """Chain of nested codes, each enlarging the previous one by merging checks.

    Returns matrices ordered from the largest code to the smallest, so user
    1 receives the largest code.
    """
    from .gf2_codes import build_nested_pair
    mats = [H_base]
    for i, t in enumerate(merges):
        mats.append(build_nested_pair(mats[-1], t, seed + i).H_super)
    return mats[::-1]


def _largest(mats):
    """Index of the matrix with the largest code (smallest rank)."""
    return int(np.argmin([H.rank for H in mats]))


@dataclass
class KUserResult:
    users: list
    sums: dict
    stages: list

    @property
    def converged(self) -> bool:
        return all(s.converged for s in self.stages)


def decode_kuser(y, codes, gains, P: float, max_iter: int = 25) -> KUserResult:
    """Decode ``e^K, ..., e^2`` and ``u1``, where ``e^m = u1 xor ... xor um``.

    Stage ``m`` decodes on the largest of the codes of users ``1..m``, which
    contains every partial sum when the codes form a nested chain.
    """
    K = len(gains)
    if len(codes) != K or not 2 <= K <= 4:
        raise ValueError("need 2 to 4 users with one code each")
    y = np.asarray(y, float)
    sums, stages, failed = {}, [], False
    for m in range(K, 0, -1):
        lv = llr_kuser_stage(y, m, sums, gains, P)
        H = codes[_largest(codes[:m])] if m > 1 else codes[0]
        r = spa_decode(H, lv, max_iter)
        name = f"e{m}" if m > 1 else "user1"
        stages.append(StageInfo(name, 1, r.converged, r.iterations_used, failed))
        failed |= not r.converged
        sums[m] = r.hard_bits
    users = [sums[1]] + [sums[m] ^ sums[m - 1] for m in range(2, K + 1)]
    return KUserResult(users, sums, stages)


# ---------------------------------------------------------------------------
# interference channel


def run_interference(u1_levels, u2_levels, cb: CfmaCodebook, h: float, rng, noise=True,
                     target_user=None, max_iter: int = 25):
    """Send one codeword pair over the symmetric interference channel.

    Each receiver runs the binary chain with its own gain pair, ``(1, h)``
    and ``(h, 1)``, and draws independent noise.
    """
    x1 = cb.spec.modulate(u1_levels)
    x2 = cb.spec.modulate(u2_levels)
    y1, y2 = channels.transmit_interference(x1, x2, h, rng, noise)
    r1 = decode_cfma_binary(y1, cb, (1.0, h), target_user=target_user, max_iter=max_iter)
    r2 = decode_cfma_binary(y2, cb, (h, 1.0), target_user=target_user, max_iter=max_iter)
    return r1, r2
