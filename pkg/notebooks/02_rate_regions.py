"""
Rate regions with discrete inputs
=================================

Corner points of the two-user region and the two compute-forward points,
evaluated by Gauss-Hermite quadrature over the finite output mixture.
"""

# %%
import numpy as np

from cfmasim.modulation import ModulationSpec
from cfmasim.rate_region import min_power_db, region_csv, region_report

bpsk = ModulationSpec("bpsk", 1.0)
gains = (1.0, np.sqrt(3.0))

# %%
# A sweep in CSV form, ready for any plotting tool.
print(region_csv(np.arange(0.0, 13.0, 2.0), gains, bpsk))

# %%
# Near 7.9 dB the compute-forward point on the R1-heavy side meets corner B.
r = region_report(10 ** 0.7912, gains, bpsk)
print("B ", r.B)
print("B'", r.Bp)
print("faces", r.faces)

# %%
# Smallest power for a target pair, against the single-user limit.
print("two users  ", round(min_power_db((0.9742, 0.9355), gains, bpsk), 3), "dB")
print("one user   ", round(min_power_db(0.9355, (1.0,), bpsk), 3), "dB")

# %%
# Rotating the second user's QAM grid keeps the sum constellation from
# collapsing; compare two angles at the same power.
for theta in (0.0, np.pi / 6):
    q = ModulationSpec("qam", 1.0, 1, theta)
    rr = region_report(10 ** 1.093, (1, 1), q)
    print(f"theta={theta:.3f}  B'=({rr.Bp.R1:.4f}, {rr.Bp.R2:.4f})")
