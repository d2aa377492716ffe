"""Traveling waves: the peakon is a weak solution, the cusp is not.

A profile v moving at speed c is a weak traveling wave iff
(v - c)^2/2 + K*v is constant.  For the peakon (4/3) exp(-|x|/2) a residual
scan over c finds the speed 4/3 and the first integral is flat.  The cusped
profile (square-root crest, c > 4/3) solves the traveling-wave ODE away
from the crest but its first integral has slope lambda1 * K' with
lambda1 != 0: a certified non-solution.
"""

import numpy as np

from fwlab import (cusp_profile, cusp_seed_slope, measured_cusp_jump, peakon,
                   residual_scan, tw_defect, tw_first_integral)

# --- peakon: speed scan and flat first integral
wave = peakon(n=8000, window=(-30, 30))
print("peakon speed from the residual scan:", wave.c, " (4/3 =", 4 / 3, ")")
fi = tw_first_integral(wave)
print("first-integral oscillation:", fi.values.max() - fi.values.min())
lam1, mism = tw_defect(wave)
print("peakon defect lambda1:", lam1, " mismatch:", mism)

cs = np.linspace(1.0, 2.0, 11)
_, osc = residual_scan(wave.profile, cs)
print("scan over c in [1, 2]:")
for c, o in zip(cs, osc):
    print(f"   c = {c:.2f}  oscillation = {o:.5f}")

# --- cusp at c = 1.5: constructed from the traveling-wave ODE
c = 1.5
wave = cusp_profile(c, n=8000, window=(-30, 30))
sigma = cusp_seed_slope(c)
print("\ncusp at c = 1.5: seed slope of (v-c)^2/2 is", sigma)
print("measured jump of d/dxi (v-c)^2/2 across the crest:",
      measured_cusp_jump(wave), " (2 sigma =", 2 * sigma, ")")
lam1, mism = tw_defect(wave)
print("defect fit lambda1:", lam1, " relative mismatch:", mism)
print("nonzero lambda1 certifies the cusp is NOT a weak solution")
fi = tw_first_integral(wave)
x = wave.profile.x
m = np.abs(x) < 10
print("cusp first-integral oscillation:", fi.values[m].max() - fi.values[m].min())
