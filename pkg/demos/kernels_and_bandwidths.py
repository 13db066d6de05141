"""
Lag windows and bandwidths
==========================

A lag-window estimate of the asymptotic variance is a weighted sum of sample
autocovariances,

    gamma2 = gamma(0) + 2 * sum_{k >= 1} w(k b) gamma(k),

where ``w`` is a window vanishing outside ``(-1, 1)`` and ``b`` is the
bandwidth. This script looks at the windows, the lag count that each
bandwidth implies, and how the estimate moves with ``b`` on an AR(1) trace
with a known answer.
"""
import numpy as np

from avarkit import Explicit, FixedExponent, NeweyWest, estimate, get_kernel
from avarkit.lag_kernels import classify, custom
from avarkit.models import ar1_long_run_variance, ar1_simulate

# %%
# The windows
# -----------
# Bartlett is the triangle ``1 - |x|``; Parzen is a piecewise cubic that is
# flatter near zero. ``power:q`` gives ``1 - |x|^q``. Each window carries a
# smoothness class, which some plans check before running.
grid = np.linspace(0, 1, 6)
for name in ("bartlett", "parzen", "power:2", "power:3"):
    k = get_kernel(name)
    print(f"{name:>9}: {np.round(k(grid), 3)}  class {classify(k)}")

# Custom windows are interpolated from a table and classified as unverified.
tukey = custom(lambda x: 0.5 * (1 + np.cos(np.pi * x)), "tukey-hanning")
print(f"{tukey.name}: class {classify(tukey)}")

# %%
# Bandwidth plans
# ---------------
# A fixed plan uses ``b = coef * n^-delta``; the Newey-West plan picks the
# constant from low-order autocorrelations of the trace itself.
x = ar1_simulate(0.5, 100_000, seed=1)
truth = ar1_long_run_variance(0.5)
print(f"\nAR(1) phi=0.5, n={x.n}, true long-run variance {truth:g}")
for plan in (FixedExponent(1.0, 1 / 3), FixedExponent(1.0, 0.2), NeweyWest(1.5)):
    for kernel in ("bartlett", "parzen"):
        e = estimate(x, kernel, plan)
        print(f"  {str(plan):<40} {kernel:>8}: gamma2 = {e.gamma2:.4f}, "
              f"lags used = {e.lags_used}")

# %%
# Too many or too few lags
# ------------------------
# A very small window misses the correlation (downward bias); a very wide
# one averages in noisy high-lag autocovariances (extra variance).
print("\nBartlett estimate against the number of retained lags:")
for b in (0.5, 0.1, 0.02, 0.005, 0.001, 0.0002):
    e = estimate(x, "bartlett", Explicit(b))
    print(f"  b = {b:<7g} K = {e.max_lag:>5}: gamma2 = {e.gamma2:.4f}")

# %%
# Windows that are not positive semidefinite
# ------------------------------------------
# ``power:2`` is not a psd lag window; on short, strongly alternating traces
# the estimate can go negative. The result is flagged and no interval is
# built from it.
alt = np.array([(-1.0) ** i for i in range(8)])
e = estimate(alt, "power:2", Explicit(0.5))
print(f"\nalternating trace, power:2, b=0.5: gamma2 = {e.gamma2:g}, "
      f"negative_flag = {e.negative_flag}")
