"""
Asymptotic variance of a GARCH(1,1) average
===========================================

The squared returns ``u^2`` of a GARCH(1,1) process with Gaussian shocks
have a closed-form asymptotic variance. With ``omega = 1``, ``alpha = 0.1``,
``beta = 0.7`` it is about 119.1. This script simulates a few seeds, tracks
the running lag-window estimate, and shows the resulting confidence interval
for the mean of ``u^2`` (whose true value is 5).

The full protocol (20 seeds, 250,000 steps) is what ``avarkit run
--experiment garch --seeds 0-19`` executes.
"""
import numpy as np

from avarkit import NeweyWest, confidence_interval, estimate, running_estimates
from avarkit.models import GarchParams, garch_mean_u2, garch_sigma2_oracle, garch_simulate

params = GarchParams(omega=1.0, alpha=0.1, beta=0.7)
oracle = garch_sigma2_oracle(params)
print(f"closed-form asymptotic variance: {oracle:.4f}; stationary mean {garch_mean_u2(params):g}")

# %%
# Running estimates
# -----------------
# The estimate is recomputed every 40,000 steps; with the Newey-West plan the
# bandwidth is re-chosen each time.
trace = garch_simulate(params, 250_000, seed=0).drop(10_000)
for e in running_estimates(trace, "bartlett", NeweyWest(1.5), stride=40_000):
    print(f"  n = {e.n:>7}: gamma2 = {e.gamma2:8.3f}  (1/b = {1 / e.bandwidth:6.1f})")

# %%
# Several seeds, two kernels
# --------------------------
finals = {"bartlett": [], "parzen": []}
for seed in range(5):
    t = garch_simulate(params, 250_000, seed=seed).drop(10_000)
    for kernel in finals:
        finals[kernel].append(estimate(t, kernel, NeweyWest(1.5)).gamma2)
for kernel, vals in finals.items():
    print(f"{kernel:>9}: mean over seeds {np.mean(vals):.2f} (sd {np.std(vals, ddof=1):.2f})")

# %%
# An interval for the mean of u^2
# -------------------------------
e = estimate(trace, "parzen", NeweyWest(1.5))
lo, hi = confidence_interval(e, 0.95)
print(f"mean of u^2: {e.mean:.4f}, 95% interval [{lo:.4f}, {hi:.4f}]")
