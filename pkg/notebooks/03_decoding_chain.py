"""
The decoding chain, one block at a time
=======================================

The receiver decodes the modulo sum on the supercode, then the subcode
user given the sum, and recovers the remaining user by subtraction.
"""

# %%
import numpy as np

from cfmasim.cfma import CfmaCodebook, decode_cfma, sum_digits_oracle, transmit_pair
from cfmasim.gf2_codes import build_nested_pair, regular_ldpc
from cfmasim.modulation import ModulationSpec

pair = build_nested_pair(regular_ldpc(1024, 3, 24, seed=3), 32, seed=4)
gains = (1.0, np.sqrt(3.0))
rng = np.random.default_rng(1)


def errors(cb, P_db):
    cb = cb.with_power(10 ** (P_db / 10))
    u1, u2 = cb.random_codewords(rng)
    r = decode_cfma(transmit_pair(cb, u1, u2, gains, rng), cb, gains)
    s = sum_digits_oracle(u1, u2, cb.spec.L)
    return [int((a != b).sum()) for a, b in ((r.s_levels, s), (r.u1_levels, u1), (r.u2_levels, u2))], r


# %%
# Binary: errors per stage across a few powers.
cb = CfmaCodebook([pair], ModulationSpec("bpsk", 1.0))
for p in (6.0, 8.0, 10.0):
    e, r = errors(cb, p)
    print(f"{p:5.1f} dB  sum/user/other errors {e}  iterations {[s.iterations for s in r.stages]}")

# %%
# Two-level PAM runs the same chain once per level; carries from the lower
# level enter the sum stage of the next. The lower level sees the upper
# level as extra noise and needs noticeably more power.
cb2 = CfmaCodebook([pair, pair], ModulationSpec("pam", 1.0, 2))
for p in (22.0, 26.0):
    e, r = errors(cb2, p)
    print(f"{p:5.1f} dB  errors {e}  stages {[(s.name, s.level, s.converged) for s in r.stages]}")
