"""Linear GARCH(1,1) as a test chain with a closed-form asymptotic variance.

    u_n = sqrt(h_n) eps_n,   h_n = omega + beta h_{n-1} + alpha u_{n-1}^2,

with ``eps_n`` iid standard normal. The functional of interest is ``u^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..autocovariance import SampleTrace

__all__ = [
    "GarchParams",
    "e1_moment",
    "garch_simulate",
    "garch_rho1",
    "garch_var_u2",
    "garch_mean_u2",
    "garch_sigma2_oracle",
]


def _double_factorial_odd(k: int) -> int:
    """``(2k - 1)!!`` with ``(-1)!! = 1``, i.e. ``E[Z^(2k)]``."""
    return math.prod(range(2 * k - 1, 0, -2))


def e1_moment(alpha: float, beta: float, nu: int) -> float:
    """``E[(beta + alpha Z^2)^nu]`` for ``Z ~ N(0, 1)`` and integer ``nu >= 1``.

    Binomial expansion with ``E[Z^(2k)] = (2k - 1)!!``.
    """
    if int(nu) != nu or nu < 1:
        raise ValueError(f"nu must be a positive integer, got {nu}")
    nu = int(nu)
    return float(
        sum(
            math.comb(nu, k) * beta ** (nu - k) * alpha**k * _double_factorial_odd(k)
            for k in range(nu + 1)
        )
    )


@dataclass(frozen=True)
class GarchParams:
    """GARCH(1,1) coefficients.

    Construction fails unless ``E[(beta + alpha Z^2)^nu] < 1``, which makes the
    chain geometrically ergodic with ``E|u|^(2 nu) < inf``.
    """

    omega: float
    alpha: float
    beta: float
    nu: int = 4

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")
        m = e1_moment(self.alpha, self.beta, self.nu)
        if not m < 1.0:
            raise ValueError(
                f"moment condition fails: E[(beta + alpha Z^2)^{self.nu}] = {m:.6g} >= 1"
            )


def garch_simulate(params: GarchParams, n: int, h0: float = 1.0, seed=None) -> SampleTrace:
    """Simulate ``n`` steps and return the trace of ``u_0^2, ..., u_{n-1}^2``.

    ``u_0 ~ N(0, h0)``; nothing is discarded here, burn-in is the caller's job.
    """
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    eps2 = rng.standard_normal(n) ** 2
    omega, alpha, beta = params.omega, params.alpha, params.beta
    out = np.empty(n)
    h = float(h0)
    u2 = h * eps2[0]
    out[0] = u2
    for t in range(1, n):
        h = omega + beta * h + alpha * u2
        u2 = h * eps2[t]
        out[t] = u2
    return SampleTrace(out, "u2", burn_in_removed=False)


def _check_fourth_moment(p: GarchParams):
    a, b = p.alpha, p.beta
    d1 = 1.0 - a - b
    d2 = 1.0 - b * b - 2.0 * a * b - 3.0 * a * a
    d3 = 1.0 - 2.0 * a * b - b * b
    if d1 <= 0 or d2 <= 0 or d3 <= 0:
        raise ValueError(
            "the fourth moment of u does not exist for "
            f"alpha={a}, beta={b} (denominators {d1:.4g}, {d2:.4g}, {d3:.4g})"
        )
    return d1, d2, d3


def garch_mean_u2(p: GarchParams) -> float:
    """Stationary mean ``omega / (1 - alpha - beta)``."""
    d1 = 1.0 - p.alpha - p.beta
    if d1 <= 0:
        raise ValueError("alpha + beta must be < 1")
    return p.omega / d1


def garch_rho1(p: GarchParams) -> float:
    """Lag-one autocorrelation of ``u^2``; lag ``k`` is ``rho1 (alpha + beta)^(k-1)``."""
    _, _, d3 = _check_fourth_moment(p)
    a, b = p.alpha, p.beta
    return a * (1.0 - a * b - b * b) / d3


def garch_var_u2(p: GarchParams) -> float:
    """Stationary variance of ``u^2``."""
    d1, d2, _ = _check_fourth_moment(p)
    a, b, w = p.alpha, p.beta, p.omega
    return 3.0 * w * w * (1.0 + a + b) / (d1 * d2) - (w / d1) ** 2


def garch_sigma2_oracle(p: GarchParams) -> float:
    """Asymptotic variance of the average of ``u^2``:
    ``Var(u^2) (1 + 2 rho1 / (1 - alpha - beta))``."""
    d1, _, _ = _check_fourth_moment(p)
    return garch_var_u2(p) * (1.0 + 2.0 * garch_rho1(p) / d1)
