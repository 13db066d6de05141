"""Lag-window estimates of the asymptotic variance of MCMC averages,
for plain and adaptive random-walk Metropolis chains."""

from .autocovariance import SampleTrace, acvf, sample_autocorrelations, sample_mean
from .lag_kernels import LagKernel, bartlett, classify, get_kernel, parzen, power
from .variance import (
    Explicit,
    FixedExponent,
    NeweyWest,
    VarianceEstimate,
    confidence_interval,
    default_delta,
    estimate,
    newey_west_c,
    parse_bandwidth,
    running_estimates,
)

__version__ = "0.1.0"

__all__ = [
    "SampleTrace",
    "acvf",
    "sample_autocorrelations",
    "sample_mean",
    "LagKernel",
    "bartlett",
    "classify",
    "get_kernel",
    "parzen",
    "power",
    "Explicit",
    "FixedExponent",
    "NeweyWest",
    "VarianceEstimate",
    "confidence_interval",
    "default_delta",
    "estimate",
    "newey_west_c",
    "parse_bandwidth",
    "running_estimates",
]
