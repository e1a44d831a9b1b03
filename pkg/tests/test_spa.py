import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cfmasim.gf2_codes import ParityCheckMatrix, derive_encoder, encode, is_codeword, regular_ldpc
from cfmasim.spa import spa_decode


def _codebook(H):
    enc = derive_encoder(H)
    return np.array([encode(enc, np.array(m)) for m in itertools.product((0, 1), repeat=enc.k)])


def test_saturated_zero(small_h):
    r = spa_decode(small_h, np.full(8, 50.0))
    assert r.converged and r.iterations_used <= 1 and not r.hard_bits.any()


def test_saturated_codeword(small_h):
    for c in _codebook(small_h):
        r = spa_decode(small_h, 50.0 * (1 - 2.0 * c))
        assert r.converged and np.array_equal(r.hard_bits, c)


@pytest.mark.parametrize("pos", range(8))
def test_single_corruption_matches_ml(small_h, pos):
    book = _codebook(small_h)
    for c in book[[3, 9, 14]]:
        llr = 50.0 * (1 - 2.0 * c)
        llr[pos] = -5.0 if c[pos] == 0 else 5.0
        ml = book[np.argmax(book.astype(float) @ -llr)]
        r = spa_decode(small_h, llr, 25)
        assert np.array_equal(ml, c)
        assert r.converged and np.array_equal(r.hard_bits, c)


def test_tie_breaks_to_zero(small_h):
    r = spa_decode(small_h, np.zeros(8))
    assert r.converged and not r.hard_bits.any()


def test_length_mismatch(small_h):
    with pytest.raises(ValueError):
        spa_decode(small_h, np.zeros(7))
    with pytest.raises(ValueError):
        spa_decode(small_h, np.zeros(8), max_iter=0)


H96 = regular_ldpc(96, 3, 6, seed=11)


@given(st.integers(0, 2 ** 31 - 1), st.floats(0.5, 4.0))
@settings(max_examples=40, deadline=None)
def test_converged_implies_codeword(seed, sigma):
    rng = np.random.default_rng(seed)
    llr = 2.0 * (1.0 + sigma * rng.standard_normal(96)) / sigma ** 2
    r = spa_decode(H96, llr, 10)
    if r.converged:
        assert is_codeword(H96, r.hard_bits)
    assert np.array_equal(r.hard_bits, (r.final_llrs < 0).astype(np.uint8))


def test_column_permutation_equivariance(rng):
    perm = rng.permutation(96)
    D = H96.dense()
    Hp = ParityCheckMatrix.from_dense(D[:, perm])
    for _ in range(10):
        llr = 1.5 + 1.5 * rng.standard_normal(96)
        a = spa_decode(H96, llr, 25)
        b = spa_decode(Hp, llr[perm], 25)
        assert a.converged == b.converged
        assert np.array_equal(a.hard_bits[perm], b.hard_bits)


def test_ber_monotone_in_power():
    H = regular_ldpc(504, 3, 6, seed=2)
    enc = derive_encoder(H)
    errs = []
    for pdb in (-4.0, -2.0, 0.0):
        P, e = 10 ** (pdb / 10), 0
        rng = np.random.default_rng(77)
        for _ in range(30):
            c = encode(enc, rng.integers(0, 2, enc.k))
            y = np.sqrt(P) * (2.0 * c - 1) + rng.standard_normal(H.n)
            r = spa_decode(H, -2 * np.sqrt(P) * y, 25)
            e += int(np.count_nonzero(r.hard_bits != c))
        errs.append(e)
    assert errs[0] > errs[1] > errs[2] or (errs[0] > errs[1] and errs[2] == 0)
