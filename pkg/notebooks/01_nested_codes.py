"""
Nested LDPC codes by merging checks
===================================

A supercode is obtained from a base parity-check matrix by replacing pairs
of checks with their sum. Every codeword of the base code still satisfies
the merged checks, so the base code sits inside the supercode.
"""

# %%
# A tiny matrix first, to see a single merge by hand.
import numpy as np

from cfmasim.gf2_codes import (ParityCheckMatrix, build_nested_pair, derive_encoder, encode,
                               merge_checks_xor, regular_ldpc)

H = ParityCheckMatrix.from_dense(np.array([
    [1, 0, 0, 0, 0, 1, 1, 1],
    [0, 1, 0, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 1, 0, 1],
    [0, 0, 0, 1, 1, 1, 1, 0],
]))
H2 = merge_checks_xor(H, 2, 3)
print(H2.dense())
print("dimension", H.n - H.rank, "->", H2.n - H2.rank)

# %%
# A (3, 48) regular code of length 4096 and 128 merges gives a pair
# with rates close to 0.97 and 0.94.
pair = build_nested_pair(regular_ldpc(4096, 3, 48, seed=1), 128, seed=1)
r_sup, r_sub = pair.rates
print(f"super rate {r_sup:.5f}  sub rate {r_sub:.5f}")

# %%
# Subcode codewords pass the supercode checks.
sub, sup = pair.encoders
rng = np.random.default_rng(0)
words = encode(sub, rng.integers(0, 2, (20, sub.k), dtype=np.uint8))
print("all nested:", not ((pair.H_super.dense().astype(int) @ words.T) % 2).any())
