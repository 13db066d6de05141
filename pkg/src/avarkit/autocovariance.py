"""Sample mean and sample autocovariances of a scalar trace.

Autocovariances always use the ``1/n`` divisor, so the sequence
``gamma[0], gamma[1], ...`` extended by symmetry and by zeros for
``|k| >= n`` is positive semidefinite.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

__all__ = [
    "SampleTrace",
    "AcvfResult",
    "DegenerateTraceError",
    "as_trace",
    "sample_mean",
    "acvf",
    "acvf_direct",
    "acvf_fft",
    "sample_autocorrelations",
]

# Below this many lags the direct sum beats the transform.
_DIRECT_MAX_LAG = 24


class DegenerateTraceError(ValueError):
    """Raised when a constant trace is used where variation is required."""


@dataclass(frozen=True)
class SampleTrace:
    """Values ``h(X_1), ..., h(X_n)`` of one functional along a chain.

    Parameters
    ----------
    values : array_like
        One-dimensional, finite, non-empty.
    label : str
        Name of the functional, used in reports.
    burn_in_removed : bool
        Whether the leading burn-in segment has already been dropped.
    """

    values: np.ndarray
    label: str = ""
    burn_in_removed: bool = True
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"trace must be one-dimensional, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("trace is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("trace contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    def head(self, n: int) -> "SampleTrace":
        """The first ``n`` values as a new trace."""
        return SampleTrace(self.values[:n], self.label, self.burn_in_removed)

    def drop(self, burn_in: int) -> "SampleTrace":
        """Discard the first ``burn_in`` values."""
        return SampleTrace(self.values[burn_in:], self.label, True)


def as_trace(data, label: str = "") -> SampleTrace:
    if isinstance(data, SampleTrace):
        return data
    return SampleTrace(np.asarray(data, dtype=float), label)


@dataclass(frozen=True)
class AcvfResult:
    """Sample mean and ``gamma[k]`` for ``k = 0 .. max_lag``."""

    mean: float
    gamma: np.ndarray
    n: int

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1

    def at(self, k: int) -> float:
        """``gamma(k)`` for any integer ``k``, using ``gamma(-k) = gamma(k)``
        and ``gamma(k) = 0`` for ``|k| >= n``."""
        k = abs(int(k))
        if k >= self.n:
            return 0.0
        if k > self.max_lag:
            raise IndexError(f"lag {k} was not computed (max_lag={self.max_lag})")
        return float(self.gamma[k])


def sample_mean(trace) -> float:
    """Arithmetic mean of the trace values."""
    values = np.asarray(trace.values if isinstance(trace, SampleTrace) else trace, dtype=float)
    if values.size == 0:
        raise ValueError("cannot take the mean of an empty trace")
    return float(np.mean(values))


def _check_lag(n: int, max_lag: int) -> int:
    max_lag = int(max_lag)
    if max_lag < 0:
        raise ValueError(f"max_lag must be >= 0, got {max_lag}")
    if max_lag >= n:
        raise ValueError(f"max_lag={max_lag} must be smaller than the trace length {n}")
    return max_lag


def acvf_direct(centered: np.ndarray, max_lag: int) -> np.ndarray:
    """Lag-by-lag dot products of an already centered series."""
    n = centered.size
    out = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        out[k] = np.dot(centered[: n - k], centered[k:]) / n
    return out


def acvf_fft(centered: np.ndarray, max_lag: int) -> np.ndarray:
    """Same as :func:`acvf_direct` through a zero-padded circular correlation.

    Padding to at least ``2n`` removes wrap-around, so every lag is exact up to
    rounding.
    """
    n = centered.size
    size = sp_fft.next_fast_len(2 * n, real=True)
    spec = sp_fft.rfft(centered, size)
    corr = sp_fft.irfft(spec.real**2 + spec.imag**2, size)
    return corr[: max_lag + 1] / n


def acvf(trace, max_lag: int, method: str = "auto") -> AcvfResult:
    """Sample autocovariances ``gamma[0 .. max_lag]`` with the ``1/n`` divisor.

    Parameters
    ----------
    trace : SampleTrace or array_like
    max_lag : int
        Largest lag, ``0 <= max_lag < n``.
    method : {"auto", "direct", "fft"}
        ``"auto"`` sums directly for few lags or short traces and uses the
        transform otherwise.
    """
    trace = as_trace(trace)
    x = trace.values
    n = x.size
    max_lag = _check_lag(n, max_lag)
    if np.all(x == x[0]):
        # exact zeros; rounding in the mean would otherwise leave residue
        mean = float(x[0])
        centered = np.zeros(n)
    else:
        mean = float(np.mean(x))
        centered = x - mean
    if method == "auto":
        method = "direct" if (max_lag <= _DIRECT_MAX_LAG or n < 64) else "fft"
    if method == "direct":
        gamma = acvf_direct(centered, max_lag)
    elif method == "fft":
        gamma = acvf_fft(centered, max_lag)
    else:
        raise ValueError(f"unknown acvf method {method!r}")
    return AcvfResult(mean=mean, gamma=gamma, n=n)


def sample_autocorrelations(trace, m: int) -> np.ndarray:
    """``rho[l] = gamma(l) / gamma(0)`` for ``l = 1 .. m``.

    Raises
    ------
    DegenerateTraceError
        If the trace is constant.
    """
    trace = as_trace(trace)
    m = int(m)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    res = acvf(trace, m)
    if res.gamma[0] <= 0.0:
        raise DegenerateTraceError("trace is constant; autocorrelations are undefined")
    return res.gamma[1:] / res.gamma[0]
