"""Lag-window estimators of the asymptotic variance of an MCMC average.

The estimator is

    gamma2 = sum_{|k| < 1/b} w(k b) gamma(k)
           = gamma(0) + 2 sum_{k=1}^{K} w(k b) gamma(k),   K = max{k : k b < 1},

with ``gamma`` the ``1/n``-normalized sample autocovariance, ``w`` a truncated
lag window and ``b`` the bandwidth. Bandwidths come from a
:class:`BandwidthPlan`: a fixed power of ``n``, an explicit value, or the
Newey-West style plug-in ``b = 1 / (c n^(1/3))`` with ``c`` estimated from
low-order autocorrelations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import stats

from .autocovariance import (
    DegenerateTraceError,
    SampleTrace,
    acvf,
    as_trace,
    sample_autocorrelations,
)
from .lag_kernels import LagKernel, get_kernel

__all__ = [
    "BandwidthPlan",
    "FixedExponent",
    "NeweyWest",
    "Explicit",
    "VarianceEstimate",
    "NegativeEstimateError",
    "KernelClassError",
    "default_delta",
    "newey_west_c",
    "newey_west_m",
    "parse_bandwidth",
    "window_size",
    "estimate",
    "confidence_interval",
    "running_estimates",
]

C_MIN = 1e-3
C_MAX = 1e3
PLUGIN_EXPONENT = 1.0 / 3.0


class NegativeEstimateError(ValueError):
    """A negative variance estimate was passed where a variance is needed."""


class KernelClassError(ValueError):
    """The kernel does not carry the smoothness class a caller asked for."""


def default_delta(p: float) -> float:
    """Bandwidth exponent ``(2/3)(1 - max(1/2, 1/p))`` for an ``L^p`` rate."""
    p = float(p)
    if not p > 1.0:
        raise ValueError(f"need p > 1, got {p}")
    return (2.0 / 3.0) * (1.0 - max(0.5, 1.0 / p))


def newey_west_m(n: int, exponent: float = 2.0 / 9.0) -> int:
    """Number of autocorrelations used by the plug-in, ``floor(n**exponent)``
    but at least 1."""
    return max(1, int(math.floor(n**exponent)))


def _plugin_ratio(trace, m: int):
    rho = sample_autocorrelations(trace, m)
    lags = np.arange(1, m + 1)
    num = 2.0 * np.dot(lags, rho)
    den = 1.0 + 2.0 * np.sum(rho)
    if abs(den) < 1e-12:
        raise DegenerateTraceError(
            f"plug-in denominator 1 + 2 sum(rho) = {den:.3e} is numerically zero"
        )
    return num, den


def newey_west_c(trace, c0: float, m: Optional[int] = None) -> float:
    """Data-driven bandwidth constant ``c0 * |2 sum l rho_l / (1 + 2 sum rho_l)|^(1/3)``.

    Parameters
    ----------
    trace : SampleTrace or array_like
        Non-constant trace.
    c0 : float
        Positive tuning constant.
    m : int, optional
        Number of autocorrelations; defaults to ``floor(n**(2/9))``.

    Notes
    -----
    The ratio can be negative for negatively correlated traces. Its absolute
    value is used so the cube root is real; :func:`estimate` records when this
    happens. No clamping is applied here.
    """
    trace = as_trace(trace)
    if not c0 > 0:
        raise ValueError(f"c0 must be positive, got {c0}")
    if m is None:
        m = newey_west_m(trace.n)
    num, den = _plugin_ratio(trace, m)
    return float(c0 * abs(num / den) ** (1.0 / 3.0))


@dataclass(frozen=True)
class FixedExponent:
    """``b_n = coef * n**(-delta)``."""

    coef: float = 1.0
    delta: float = 1.0 / 3.0

    def __post_init__(self):
        if not self.coef > 0:
            raise ValueError(f"coef must be positive, got {self.coef}")
        if not 0.0 < self.delta <= 0.5:
            raise ValueError(f"delta must lie in (0, 1/2], got {self.delta}")

    def bandwidth(self, n: int) -> float:
        return self.coef * float(n) ** (-self.delta)

    def __str__(self) -> str:
        return f"fixed:delta={self.delta:g},coef={self.coef:g}"


@dataclass(frozen=True)
class NeweyWest:
    """Plug-in ``b_n = 1 / (c n^(1/3))`` with ``c`` from :func:`newey_west_c`.

    ``c`` is clamped to ``[c_min, c_max]`` and the window length ``1/b`` to
    ``[1, n - 1]``.
    """

    c0: float = 1.5
    m_exponent: float = 2.0 / 9.0
    m: Optional[int] = None
    c_min: float = C_MIN
    c_max: float = C_MAX

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError(f"c0 must be positive, got {self.c0}")
        if not self.m_exponent > 0:
            raise ValueError("m_exponent must be positive")
        if not 0 < self.c_min <= self.c_max:
            raise ValueError("need 0 < c_min <= c_max")

    def __str__(self) -> str:
        return f"nw:c0={self.c0:g}"


@dataclass(frozen=True)
class Explicit:
    """A bandwidth given directly."""

    b: float

    def bandwidth(self, n: int) -> float:
        return float(self.b)

    def __str__(self) -> str:
        return f"explicit:b={self.b:g}"


BandwidthPlan = Union[FixedExponent, NeweyWest, Explicit]


def _parse_kv(body: str, spec: str) -> dict:
    out = {}
    if not body:
        return out
    for part in body.split(","):
        if "=" not in part:
            raise ValueError(f"bad bandwidth spec {spec!r}: expected key=value in {part!r}")
        key, value = part.split("=", 1)
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise ValueError(f"bad bandwidth spec {spec!r}: {value!r} is not a number") from None
    return out


def parse_bandwidth(spec: Union[str, BandwidthPlan]) -> BandwidthPlan:
    """Parse ``"fixed:delta=0.333,coef=1"``, ``"nw:c0=1.5"`` or ``"explicit:b=0.01"``.

    ``nw`` also accepts ``m`` (fixed number of autocorrelations) and
    ``m_exponent``.
    """
    if isinstance(spec, (FixedExponent, NeweyWest, Explicit)):
        return spec
    text = str(spec).strip()
    kind, _, body = text.partition(":")
    kind = kind.lower()
    kv = _parse_kv(body, text)
    try:
        if kind == "fixed":
            unknown = set(kv) - {"delta", "coef"}
            if unknown:
                raise ValueError(f"unknown keys {sorted(unknown)}")
            return FixedExponent(**kv)
        if kind in ("nw", "newey-west", "neweywest"):
            unknown = set(kv) - {"c0", "m", "m_exponent"}
            if unknown:
                raise ValueError(f"unknown keys {sorted(unknown)}")
            if "m" in kv:
                kv["m"] = int(kv["m"])
            return NeweyWest(**kv)
        if kind == "explicit":
            if set(kv) != {"b"}:
                raise ValueError("explicit plan needs exactly b=<value>")
            return Explicit(kv["b"])
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad bandwidth spec {text!r}: {exc}") from None
    raise ValueError(
        f"unknown bandwidth plan {text!r}; expected 'fixed:...', 'nw:...' or 'explicit:...'"
    )


def window_size(b: float) -> int:
    """``K = max{k >= 0 : k * b < 1}``, evaluated in floating point exactly as
    the weights are."""
    if not b > 0:
        raise ValueError(f"bandwidth must be positive, got {b}")
    k = max(int(math.ceil(1.0 / b)) - 1, 0)
    while (k + 1) * b < 1.0:
        k += 1
    while k > 0 and k * b >= 1.0:
        k -= 1
    return k


@dataclass(frozen=True)
class VarianceEstimate:
    """Result of :func:`estimate`.

    ``lags_used`` counts every ``k`` (negative, zero and positive) with
    ``|k| b < 1``, i.e. ``2 * max_lag + 1``.
    """

    gamma2: float
    bandwidth: float
    lags_used: int
    max_lag: int
    negative_flag: bool
    mean: float
    n: int
    kernel: str = ""
    plan: str = ""
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def std_error(self) -> float:
        """``sqrt(gamma2 / n)``; NaN when the estimate is negative."""
        return math.sqrt(self.gamma2 / self.n) if self.gamma2 >= 0 else float("nan")

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "gamma2": self.gamma2,
            "bandwidth": self.bandwidth,
            "lags_used": self.lags_used,
            "max_lag": self.max_lag,
            "negative_flag": self.negative_flag,
            "kernel": self.kernel,
            "plan": self.plan,
            "diagnostics": dict(self.diagnostics),
        }


def _resolve_bandwidth(trace: SampleTrace, plan: BandwidthPlan):
    n = trace.n
    diag = {}
    if isinstance(plan, NeweyWest):
        m = plan.m if plan.m is not None else newey_west_m(n, plan.m_exponent)
        m = min(m, n - 1)
        num, den = _plugin_ratio(trace, m)
        ratio = num / den
        c = plan.c0 * abs(ratio) ** (1.0 / 3.0)
        diag.update(nw_c_raw=float(c), nw_m=int(m), nw_ratio=float(ratio))
        if ratio < 0:
            diag["nw_negative_ratio"] = True
        if c < plan.c_min or c > plan.c_max:
            diag["c_clamped"] = True
            c = min(max(c, plan.c_min), plan.c_max)
        diag["nw_c"] = float(c)
        inv_b = c * n**PLUGIN_EXPONENT
        upper = max(1.0, float(n - 1))
        if inv_b < 1.0 or inv_b > upper:
            diag["window_clamped"] = True
            inv_b = min(max(inv_b, 1.0), upper)
        return 1.0 / inv_b, diag
    b = plan.bandwidth(n)
    if not b > 0 or not math.isfinite(b):
        raise ValueError(f"bandwidth must be positive and finite, got {b}")
    if 1.0 / b > n:
        raise ValueError(f"window 1/b = {1.0 / b:.6g} exceeds the trace length n = {n}")
    return b, diag


def estimate(
    trace,
    kernel: Union[str, LagKernel] = "bartlett",
    plan: Union[str, BandwidthPlan] = FixedExponent(),
    require: Optional[str] = None,
    allow_unverified: bool = False,
    acvf_method: str = "auto",
) -> VarianceEstimate:
    """Lag-window estimate of the asymptotic variance of ``mean(trace)``.

    Parameters
    ----------
    trace : SampleTrace or array_like
        At least two values.
    kernel : LagKernel or str
        Lag window, or a name understood by :func:`~avarkit.lag_kernels.get_kernel`.
    plan : BandwidthPlan or str
        Bandwidth rule, or a spec string for :func:`parse_bandwidth`.
    require : {"A3", "A4"}, optional
        Refuse kernels whose smoothness class does not imply this.
    allow_unverified : bool
        Let ``Unverified`` (custom) kernels through a ``require`` check.

    Returns
    -------
    VarianceEstimate
        Negative values are returned as they are, with ``negative_flag`` set.
    """
    trace = as_trace(trace)
    kernel = get_kernel(kernel)
    plan = parse_bandwidth(plan)
    if trace.n < 2:
        raise ValueError("need at least two values to estimate a variance")
    if require is not None:
        cls = kernel.smoothness
        if not cls.satisfies(require) and not (allow_unverified and cls.name == "Unverified"):
            raise KernelClassError(f"kernel {kernel.name} is {cls}, which does not satisfy {require}")

    b, diag = _resolve_bandwidth(trace, plan)
    K = window_size(b)
    res = acvf(trace, K, method=acvf_method)
    if K > 0:
        weights = kernel(np.arange(1, K + 1) * b)
        gamma2 = float(res.gamma[0] + 2.0 * np.dot(weights, res.gamma[1:]))
    else:
        gamma2 = float(res.gamma[0])
    return VarianceEstimate(
        gamma2=gamma2,
        bandwidth=float(b),
        lags_used=2 * K + 1,
        max_lag=K,
        negative_flag=gamma2 < 0,
        mean=res.mean,
        n=trace.n,
        kernel=kernel.name,
        plan=str(plan),
        diagnostics=diag,
    )


def confidence_interval(est: VarianceEstimate, level: float = 0.95):
    """Normal interval ``mean +/- z sqrt(gamma2 / n)`` for the chain average.

    Raises
    ------
    NegativeEstimateError
        When the estimate is negative; switch to a positive semidefinite
        window (Bartlett, Parzen) or a different bandwidth.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    if est.negative_flag:
        raise NegativeEstimateError(
            f"variance estimate {est.gamma2:.4g} is negative; use a positive "
            "semidefinite kernel such as 'bartlett' or 'parzen', or change the bandwidth"
        )
    z = stats.norm.ppf(0.5 * (1.0 + level))
    half = z * math.sqrt(est.gamma2 / est.n)
    return est.mean - half, est.mean + half


def running_estimates(trace, kernel="bartlett", plan=FixedExponent(), stride: int = 1000,
                      start: Optional[int] = None):
    """Estimates on the prefixes of length ``start, start + stride, ..., n``.

    Each checkpoint is computed from scratch, since the bandwidth moves with
    ``n``. The full length is always included as the last checkpoint.
    """
    trace = as_trace(trace)
    kernel = get_kernel(kernel)
    plan = parse_bandwidth(plan)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    first = stride if start is None else int(start)
    first = max(first, 2)
    steps = list(range(first, trace.n + 1, stride))
    if not steps or steps[-1] != trace.n:
        steps.append(trace.n)
    out = []
    for n in steps:
        out.append(estimate(trace.head(n), kernel, plan))
    return out
