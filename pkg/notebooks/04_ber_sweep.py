"""
A seeded BER sweep
==================

Configurations are plain text. Every trial draws its randomness from the
master seed, the power and the trial index, so the CSV does not depend on
the number of worker processes.
"""

# %%
from cfmasim.simharness import parse_config, run_sweep

text = """
[channel]
topology = mac_real
gains = 1, 1.7320508075688772

[codes]
source = regular
n = 1024
dc = 24
merges = 32
code_seed = 3

[modulation]
family = bpsk

[sweep]
scenario = demo
powers_db = 6, 7, 8, 9
trials = 20
seed = 7
"""
cfg = parse_config(text)
res = run_sweep(cfg)
print(res.csv)
print(f"bound for these code rates: {res.bound_db:.3f} dB")
