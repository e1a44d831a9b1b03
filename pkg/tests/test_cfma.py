import numpy as np
import pytest

from cfmasim import channels
from cfmasim.cfma import (CfmaCodebook, build_kuser_codes, carry_vector, decode_cfma,
                          decode_cfma_binary, decode_cfma_complex, decode_cfma_multilevel,
                          decode_kuser, run_interference, sum_digits_oracle, sum_mod, transmit_pair)
from cfmasim.gf2_codes import build_nested_pair, derive_encoder, encode, regular_ldpc
from cfmasim.modulation import ModulationSpec, int_to_stack, stack_to_int

SQ3 = np.sqrt(3.0)


@pytest.fixture(scope="module")
def low_rate_pair():
    # rate 1/4 base survives the 50% erasures of unit-gain noiseless user stages
    return build_nested_pair(regular_ldpc(512, 3, 4, seed=1), 16, seed=2)


@pytest.fixture(scope="module")
def high_rate_pair():
    return build_nested_pair(regular_ldpc(1024, 3, 24, seed=3), 32, seed=4)


def test_sum_mod():
    assert np.array_equal(sum_mod([0, 1, 0, 1], [0, 0, 1, 1], 1), [0, 1, 1, 0])
    assert np.array_equal(sum_mod([1, 2], [3, 3], 2), [0, 1])
    assert sum_mod([5], [6], 3)[0] == 3
    with pytest.raises(ValueError):
        sum_mod([4], [0], 2)


@pytest.mark.parametrize("u1, u2, digits", [(1, 3, (0, 0)), (2, 3, (1, 0))])
def test_sum_digits_examples(u1, u2, digits):
    s = sum_digits_oracle(int_to_stack([u1], 2), int_to_stack([u2], 2), 2)
    assert tuple(s[:, 0]) == digits


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_digit_sum_exhaustive(L):
    M = 2 ** L
    u1, u2 = (a.ravel() for a in np.meshgrid(np.arange(M), np.arange(M)))
    s = sum_digits_oracle(int_to_stack(u1, L), int_to_stack(u2, L), L)
    assert np.array_equal(stack_to_int(s), sum_mod(u1, u2, L))


def test_carry_vector():
    assert carry_vector([[1]], [[1]], 2)[0] == 1
    assert carry_vector([[0]], [[1]], 2)[0] == 0
    assert carry_vector([[1], [1]], [[1], [0]], 3)[0] == 1
    with pytest.raises(ValueError):
        carry_vector([[1]], [[1]], 1)


def _bpsk(pair, P, super_user=1):
    return CfmaCodebook([pair], ModulationSpec("bpsk", P), super_user)


def _exact(r, u1, u2):
    return (np.array_equal(r.u1_levels, u1) and np.array_equal(r.u2_levels, u2)
            and np.array_equal(r.s_levels, sum_digits_oracle(u1, u2, len(u1))))


def test_binary_noiseless_unit_gains(low_rate_pair):
    cb = _bpsk(low_rate_pair, 10.0)
    rng = np.random.default_rng(0)
    for _ in range(5):
        u1, u2 = cb.random_codewords(rng)
        y = transmit_pair(cb, u1, u2, (1.0, 1.0), rng, noise=False)
        r = decode_cfma_binary(y, cb, (1.0, 1.0))
        assert r.converged and _exact(r, u1, u2)
        assert np.array_equal(r.u2_levels, r.s_levels ^ r.u1_levels)


def test_binary_noiseless_unequal_gains(high_rate_pair):
    cb = _bpsk(high_rate_pair, 10.0)
    rng = np.random.default_rng(1)
    u1, u2 = cb.random_codewords(rng)
    y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng, noise=False)
    for t in (1, 2):
        r = decode_cfma_binary(y, cb, (1.0, SQ3), target_user=t)
        assert _exact(r, u1, u2)


def test_target_user_mirror(high_rate_pair):
    """Swapping user labels and gains mirrors the whole chain exactly."""
    cb = _bpsk(high_rate_pair, 10 ** 0.9)
    cbm = _bpsk(high_rate_pair, 10 ** 0.9, super_user=2)
    rng = np.random.default_rng(2)
    for _ in range(5):
        u1, u2 = cb.random_codewords(rng)
        y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng)
        a = decode_cfma_binary(y, cb, (1.0, SQ3), target_user=2)
        b = decode_cfma_binary(y, cbm, (SQ3, 1.0), target_user=1)
        assert np.array_equal(a.u1_levels, b.u2_levels) and np.array_equal(a.u2_levels, b.u1_levels)
        assert np.array_equal(a.s_levels, b.s_levels)


def test_multilevel_L1_equals_binary(high_rate_pair):
    cb = _bpsk(high_rate_pair, 10 ** 0.85)
    cbp = CfmaCodebook([high_rate_pair], ModulationSpec("pam", 10 ** 0.85, 1))
    rng = np.random.default_rng(3)
    u1, u2 = cb.random_codewords(rng)
    y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng)
    a = decode_cfma_binary(y, cb, (1.0, SQ3))
    b = decode_cfma_multilevel(y, cbp, (1.0, SQ3))
    assert np.array_equal(a.u1_levels, b.u1_levels) and np.array_equal(a.s_levels, b.s_levels)


def test_multilevel_noiseless(high_rate_pair):
    cb = CfmaCodebook([high_rate_pair] * 2, ModulationSpec("pam", 10 ** 3, 2))
    rng = np.random.default_rng(4)
    for _ in range(3):
        u1, u2 = cb.random_codewords(rng)
        y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng, noise=False)
        r = decode_cfma_multilevel(y, cb, (1.0, SQ3))
        assert r.converged and _exact(r, u1, u2)
        assert np.array_equal(r.s_hat, sum_mod(r.u1_hat, r.u2_hat, 2))


def test_multilevel_reconstructions_agree(high_rate_pair):
    cb = CfmaCodebook([high_rate_pair] * 2, ModulationSpec("pam", 10 ** 1.5, 2))
    rng = np.random.default_rng(5)
    for _ in range(4):
        u1, u2 = cb.random_codewords(rng)
        y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng)
        r = decode_cfma_multilevel(y, cb, (1.0, SQ3))
        other = r.u1_levels if r.other_user == 1 else r.u2_levels
        assert np.array_equal(r.levelwise_other, other)
        assert np.array_equal(sum_digits_oracle(r.u1_levels, r.u2_levels, 2), r.s_levels)


def test_failed_stage_flags(high_rate_pair):
    cb = _bpsk(high_rate_pair, 10 ** -0.5)
    rng = np.random.default_rng(6)
    u1, u2 = cb.random_codewords(rng)
    r = decode_cfma_binary(transmit_pair(cb, u1, u2, (1.0, SQ3), rng), cb, (1.0, SQ3))
    assert not r.stages[0].converged
    assert r.stages[1].upstream_failed and not r.stages[0].upstream_failed


def test_complex_noiseless_4qam_theta0(low_rate_pair):
    cb = CfmaCodebook([low_rate_pair], ModulationSpec("qam", 20.0, 1, 0.0))
    rng = np.random.default_rng(7)
    u1, u2 = cb.random_codewords(rng)
    y = transmit_pair(cb, u1, u2, (1.0, 1.0), rng, noise=False)
    assert _exact(decode_cfma_complex(y, cb, (1.0, 1.0)), u1, u2)


def test_complex_user_stage_rotation_invariant(high_rate_pair):
    cb = CfmaCodebook([high_rate_pair], ModulationSpec("qam", 10 ** 1.2, 1, np.pi / 6))
    rng = np.random.default_rng(8)
    u1, u2 = cb.random_codewords(rng)
    y = transmit_pair(cb, u1, u2, (1.0, 1.0), rng)
    rot = np.exp(0.7j)
    a = decode_cfma_complex(y, cb, (1.0, 1.0))
    b = decode_cfma_complex(y * rot, cb, (rot, rot))
    assert np.array_equal(a.u1_levels, b.u1_levels) and np.array_equal(a.u2_levels, b.u2_levels)


def test_complex_odd_length():
    pair = build_nested_pair(regular_ldpc(12, 3, 4, seed=0, full_rank=False), 0)
    odd = build_nested_pair(regular_ldpc(9, 2, 3, seed=0, full_rank=False), 0)
    with pytest.raises(ValueError):
        CfmaCodebook([odd], ModulationSpec("qam", 1.0, 1))
    assert CfmaCodebook([pair], ModulationSpec("qam", 1.0, 1)).n == 12


def test_decode_dispatch(high_rate_pair):
    cb = CfmaCodebook([high_rate_pair], ModulationSpec("qam", 100.0, 1, np.pi / 6))
    rng = np.random.default_rng(9)
    u1, u2 = cb.random_codewords(rng)
    y = transmit_pair(cb, u1, u2, (1.0, 1.0), rng, noise=False)
    assert _exact(decode_cfma(y, cb, (1.0, 1.0)), u1, u2)
    with pytest.raises(ValueError):
        decode_cfma_binary(y, cb, (1.0, 1.0))


def test_kuser_two_matches_binary(high_rate_pair):
    cb = _bpsk(high_rate_pair, 10 ** 0.9)
    rng = np.random.default_rng(10)
    for _ in range(3):
        u1, u2 = cb.random_codewords(rng)
        y = transmit_pair(cb, u1, u2, (1.0, SQ3), rng)
        a = decode_cfma_binary(y, cb, (1.0, SQ3), target_user=1)
        k = decode_kuser(y, [high_rate_pair.H_super, high_rate_pair.H_sub], (1.0, SQ3), 10 ** 0.9)
        assert np.array_equal(a.u1_levels[0], k.users[0]) and np.array_equal(a.u2_levels[0], k.users[1])
        assert np.array_equal(a.s_levels[0], k.sums[2])


def test_kuser_noiseless_three():
    mats = build_kuser_codes(regular_ldpc(512, 3, 8, seed=5), [16, 16], seed=6)
    ranks = [H.rank for H in mats]
    assert ranks[0] < ranks[1] < ranks[2]
    rng = np.random.default_rng(11)
    gains = (1.0, np.sqrt(2.0), SQ3)
    for _ in range(3):
        us = [encode(derive_encoder(H), rng.integers(0, 2, derive_encoder(H).k)) for H in mats]
        y = channels.transmit_kuser([30 ** 0.5 * (2.0 * u - 1) for u in us], gains, rng, noise=False)
        r = decode_kuser(y, mats, gains, 30.0)
        assert r.converged
        for got, want in zip(r.users, us):
            assert np.array_equal(got, want)
        assert np.array_equal(r.users[0] ^ r.users[1] ^ r.users[2], r.sums[3])


def test_kuser_bad_k(high_rate_pair):
    with pytest.raises(ValueError):
        decode_kuser(np.zeros(1024), [high_rate_pair.H_sub] * 5, (1,) * 5, 1.0)


def test_interference_noiseless(high_rate_pair):
    cb = _bpsk(high_rate_pair, 10.0)
    rng = np.random.default_rng(12)
    u1, u2 = cb.random_codewords(rng)
    r1, r2 = run_interference(u1, u2, cb, SQ3, rng, noise=False)
    assert _exact(r1, u1, u2) and _exact(r2, u1, u2)


def test_interference_unit_cross_gain(low_rate_pair):
    cb = _bpsk(low_rate_pair, 10.0)
    rng = np.random.default_rng(13)
    u1, u2 = cb.random_codewords(rng)
    r1, r2 = run_interference(u1, u2, cb, 1.0, rng, noise=False)
    assert np.array_equal(r1.u1_levels, r2.u1_levels) and np.array_equal(r1.s_levels, r2.s_levels)
