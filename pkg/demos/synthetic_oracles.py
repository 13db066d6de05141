"""
Consistency on processes with a known answer
============================================

For iid N(0, 1) draws the asymptotic variance of the sample mean is 1; for
an AR(1) with coefficient ``phi`` and unit innovations it is
``1 / (1 - phi)^2``. Growing the trace length should shrink the error of the
lag-window estimate. The table reports the relative root mean squared error
over 20 seeds with ``b = n^(-1/3)``.
"""
import numpy as np

from avarkit import FixedExponent, estimate
from avarkit.models import ar1_long_run_variance, ar1_simulate, iid_simulate

SIZES = (1_000, 10_000, 100_000)
SEEDS = range(20)
PLAN = FixedExponent(1.0, 1 / 3)

print(f"{'process':>14} {'kernel':>9} " + " ".join(f"{'n=' + str(n):>10}" for n in SIZES))
for phi in (0.0, 0.5, -0.5, 0.9):
    oracle = ar1_long_run_variance(phi)
    label = "iid" if phi == 0 else f"AR(1) {phi:+.1f}"
    for kernel in ("bartlett", "parzen"):
        cells = []
        for n in SIZES:
            traces = [iid_simulate(n, seed=s) if phi == 0 else ar1_simulate(phi, n, seed=s)
                      for s in SEEDS]
            g = np.array([estimate(t, kernel, PLAN).gamma2 for t in traces])
            cells.append(np.sqrt(np.mean(((g - oracle) / oracle) ** 2)))
        print(f"{label:>14} {kernel:>9} " + " ".join(f"{c:>10.3f}" for c in cells))

# %%
# Strong positive correlation (phi = 0.9) converges slowly: at n = 1e5 the
# window still holds only about 46 lags, while the autocorrelation at lag 46
# is 0.9^46, roughly 0.008; the down-weighted lags below that cutoff still
# carry most of the bias.
