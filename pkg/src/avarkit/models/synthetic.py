"""Synthetic traces with known long-run variance, used as test oracles."""
from __future__ import annotations

import math

import numpy as np
from scipy import signal

from ..autocovariance import SampleTrace

__all__ = ["ar1_simulate", "iid_simulate", "ar1_long_run_variance"]


def ar1_long_run_variance(phi: float) -> float:
    """``1 / (1 - phi)^2`` for unit-variance innovations."""
    if abs(phi) >= 1:
        raise ValueError(f"|phi| must be < 1, got {phi}")
    return 1.0 / (1.0 - phi) ** 2


def ar1_simulate(phi: float, n: int, seed=None, stationary_start: bool = True) -> SampleTrace:
    """``x_t = phi x_{t-1} + e_t`` with ``e_t ~ N(0, 1)``.

    With ``stationary_start`` the first value is drawn from the stationary law
    ``N(0, 1 / (1 - phi^2))``; otherwise the recursion starts from 0.
    """
    if abs(phi) >= 1:
        raise ValueError(f"|phi| must be < 1, got {phi}")
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(int(n))
    if stationary_start:
        e[0] /= math.sqrt(1.0 - phi * phi)
    x = signal.lfilter([1.0], [1.0, -phi], e)
    return SampleTrace(x, f"ar1(phi={phi:g})")


def iid_simulate(n: int, mean: float = 0.0, var: float = 1.0, seed=None) -> SampleTrace:
    """iid ``N(mean, var)``; the long-run variance is ``var``."""
    if var < 0:
        raise ValueError("var must be nonnegative")
    rng = np.random.default_rng(seed)
    return SampleTrace(mean + math.sqrt(var) * rng.standard_normal(int(n)), "iid")
