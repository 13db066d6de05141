import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from avarkit.autocovariance import DegenerateTraceError
from avarkit.lag_kernels import custom, get_kernel
from avarkit.models import GarchParams, ar1_simulate, garch_simulate, iid_simulate
from avarkit.variance import (
    Explicit,
    FixedExponent,
    KernelClassError,
    NegativeEstimateError,
    NeweyWest,
    VarianceEstimate,
    confidence_interval,
    default_delta,
    estimate,
    newey_west_c,
    newey_west_m,
    parse_bandwidth,
    running_estimates,
    window_size,
)

finite_traces = arrays(
    np.float64,
    st.integers(8, 400),
    elements=st.floats(-100, 100, allow_nan=False, allow_infinity=False),
).filter(lambda x: np.ptp(x) > 1e-3)


def brute_estimate(x, kernel, b):
    """Sum of w(k b) gamma(k) over every k in [-n, n], straight from the
    definitions."""
    x = list(map(float, x))
    n = len(x)
    m = sum(x) / n
    total = 0.0
    for k in range(-n, n + 1):
        a = abs(k)
        if a >= n:
            continue
        g = sum((x[j] - m) * (x[j + a] - m) for j in range(n - a)) / n
        total += float(kernel(k * b)) * g
    return total


@pytest.mark.parametrize("p, delta", [(2, 1 / 3), (4, 1 / 3), (4 / 3, 1 / 6), (1.5, 2 / 9)])
def test_default_delta(p, delta):
    assert default_delta(p) == pytest.approx(delta, abs=1e-15)


@pytest.mark.parametrize("p", [1, 0.5, -2])
def test_default_delta_rejects(p):
    with pytest.raises(ValueError):
        default_delta(p)


@pytest.mark.parametrize("b, K", [(0.6, 1), (0.5, 1), (0.25, 3), (0.3, 3), (1.0, 0), (2.0, 0),
                                  (0.01, 99), (1 / 3, 2)])
def test_window_size(b, K):
    assert window_size(b) == K
    assert K * b < 1 and (K + 1) * b >= 1


def test_hand_example():
    e = estimate([1, -1, 1, -1], "bartlett", Explicit(0.6))
    assert e.gamma2 == pytest.approx(0.4, abs=1e-15)
    assert e.max_lag == 1 and e.lags_used == 3
    assert not e.negative_flag
    assert e.mean == 0 and e.n == 4


@pytest.mark.parametrize("kernel", ["bartlett", "parzen", "power:2", "power:3"])
@pytest.mark.parametrize("b", [0.9, 0.3, 0.13, 0.05])
def test_matches_brute_force(kernel, b, rng):
    x = ar1_simulate(0.4, 60, seed=int(b * 100)).values + 3.0
    k = get_kernel(kernel)
    got = estimate(x, k, Explicit(b)).gamma2
    assert got == pytest.approx(brute_estimate(x, k, b), rel=1e-11, abs=1e-12)


def test_bandwidth_errors():
    with pytest.raises(ValueError):
        estimate([1.0, 2.0, 0.5], "bartlett", Explicit(0.0))
    with pytest.raises(ValueError):
        estimate([1.0, 2.0, 0.5], "bartlett", Explicit(-0.1))
    with pytest.raises(ValueError):
        estimate([1.0, 2.0, 0.5], "bartlett", Explicit(0.2))  # 1/b = 5 > n
    with pytest.raises(ValueError):
        estimate([1.0], "bartlett", Explicit(1.0))


def test_truncation_invariance(rng):
    x = rng.standard_normal(500)
    b = 0.07
    e = estimate(x, "parzen", Explicit(b))
    from avarkit.autocovariance import acvf

    g = acvf(x, 200).gamma
    w = get_kernel("parzen")(np.arange(1, 201) * b)
    assert np.all(w[e.max_lag:] == 0)
    assert e.gamma2 == pytest.approx(g[0] + 2 * np.dot(w, g[1:]), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(finite_traces, st.floats(-50, 50), st.sampled_from(["bartlett", "parzen", "power:2"]))
def test_shift_invariance(x, c, kernel):
    plan = FixedExponent(1.0, 1 / 3)
    a = estimate(x, kernel, plan).gamma2
    b = estimate(x + c, kernel, plan).gamma2
    scale = estimate(x, kernel, Explicit(1.0)).gamma2  # gamma(0)
    assert abs(a - b) <= 1e-9 * scale


@settings(max_examples=60, deadline=None)
@given(finite_traces, st.sampled_from([-3.0, 0.5, 2.0, 17.0]), st.sampled_from(["bartlett", "parzen"]))
def test_scale_equivariance(x, a, kernel):
    plan = FixedExponent(1.0, 1 / 3)
    base = estimate(x, kernel, plan).gamma2
    scaled = estimate(a * x, kernel, plan).gamma2
    assert scaled == pytest.approx(a * a * base, rel=1e-11, abs=1e-12 * a * a * abs(base))


@settings(max_examples=150, deadline=None)
@given(finite_traces, st.sampled_from(["bartlett", "parzen"]), st.floats(0.02, 1.0))
def test_psd_windows_never_negative(x, kernel, b):
    if 1 / b > x.size:
        b = 1.0
    e = estimate(x, kernel, Explicit(b))
    gamma0 = estimate(x, kernel, Explicit(1.0)).gamma2
    assert e.gamma2 >= -1e-12 * gamma0


def test_negative_flag_and_ci_refusal():
    x = np.array([(-1.0) ** i for i in range(8)])
    e = estimate(x, "power:2", Explicit(0.5))
    assert e.gamma2 == pytest.approx(-0.3125)
    assert e.negative_flag
    with pytest.raises(NegativeEstimateError, match="bartlett"):
        confidence_interval(e)


def test_iid_bartlett_unit_variance():
    hits = 0
    for seed in range(20):
        g = estimate(iid_simulate(100_000, seed=seed), "bartlett", FixedExponent(1, 1 / 3)).gamma2
        hits += 0.9 <= g <= 1.1
    assert hits >= 19


def test_ar1_parzen():
    g = estimate(ar1_simulate(0.5, 250_000, seed=5), "parzen", FixedExponent(1, 1 / 3)).gamma2
    assert abs(g - 4.0) <= 0.4


def _est(gamma2, mean, n):
    return VarianceEstimate(gamma2=gamma2, bandwidth=0.1, lags_used=19, max_lag=9,
                            negative_flag=gamma2 < 0, mean=mean, n=n)


def test_ci_examples():
    lo, hi = confidence_interval(_est(4.0, 0.0, 400), 0.95)
    assert lo == pytest.approx(-0.196, abs=2e-4) and hi == pytest.approx(0.196, abs=2e-4)
    assert hi == pytest.approx(1.959963984540054 * 0.1, rel=1e-12)
    assert confidence_interval(_est(0.0, 2.5, 10)) == (2.5, 2.5)
    lo90, hi90 = confidence_interval(_est(4.0, 0.0, 400), 0.9)
    assert hi90 < hi
    with pytest.raises(ValueError):
        confidence_interval(_est(4.0, 0.0, 400), 1.0)


def test_newey_west_iid_small():
    c = newey_west_c(iid_simulate(50_000, seed=2), c0=1.0)
    assert 0 < c < 0.5


def test_newey_west_matches_manual_formula():
    x = ar1_simulate(0.5, 300, seed=9).values
    n = len(x)
    m = newey_west_m(n)
    assert m == math.floor(300 ** (2 / 9))
    xc = x - x.mean()
    g0 = np.dot(xc, xc)
    rho = [np.dot(xc[:-l], xc[l:]) / g0 for l in range(1, m + 1)]
    num = 2 * sum(l * r for l, r in zip(range(1, m + 1), rho))
    den = 1 + 2 * sum(rho)
    assert newey_west_c(x, 1.5) == pytest.approx(1.5 * abs(num / den) ** (1 / 3), rel=1e-12)


def test_newey_west_garch_positive():
    tr = garch_simulate(GarchParams(1, 0.1, 0.7), 50_000, seed=4).drop(5000)
    c = newey_west_c(tr, 1.5)
    assert 0 < c < 100 and math.isfinite(c)
    e = estimate(tr, "bartlett", NeweyWest(1.5))
    assert e.bandwidth == pytest.approx(1 / (c * tr.n ** (1 / 3)))
    assert e.diagnostics["nw_c"] == pytest.approx(c)


def test_newey_west_constant_trace():
    with pytest.raises(DegenerateTraceError):
        newey_west_c([5.0] * 100, 1.0)
    with pytest.raises(DegenerateTraceError):
        estimate([5.0] * 100, "bartlett", NeweyWest(1.0))


def test_newey_west_clamping_diagnostics():
    x = iid_simulate(1000, seed=1)
    e = estimate(x, "bartlett", NeweyWest(c0=1e-6))
    assert e.diagnostics.get("c_clamped") and e.diagnostics.get("window_clamped")
    assert e.bandwidth == 1.0 and e.max_lag == 0
    e = estimate(x, "bartlett", NeweyWest(c0=1e6))
    assert e.diagnostics.get("c_clamped")
    assert 1 / e.bandwidth <= x.n - 1


def test_newey_west_negative_ratio_is_recorded():
    x = ar1_simulate(-0.5, 20_000, seed=3)
    e = estimate(x, "bartlett", NeweyWest(1.0))
    assert e.diagnostics["nw_ratio"] < 0
    assert e.diagnostics["nw_negative_ratio"] is True
    assert e.diagnostics["nw_c"] > 0


@pytest.mark.parametrize(
    "spec, expected",
    [
        ("fixed:delta=0.25,coef=2", FixedExponent(2.0, 0.25)),
        ("fixed", FixedExponent()),
        ("nw:c0=1.5", NeweyWest(1.5)),
        ("nw:c0=5,m=4", NeweyWest(5.0, m=4)),
        ("explicit:b=0.01", Explicit(0.01)),
    ],
)
def test_parse_bandwidth(spec, expected):
    assert parse_bandwidth(spec) == expected


@pytest.mark.parametrize("spec", ["fixed:delta=0.7", "nw:c0=-1", "explicit", "foo:b=1",
                                  "fixed:gamma=1", "nw:c0=abc"])
def test_parse_bandwidth_rejects(spec):
    with pytest.raises(ValueError):
        parse_bandwidth(spec)


def test_fixed_plan_is_monotone():
    plan = FixedExponent(1.0, 1 / 3)
    b = [plan.bandwidth(n) for n in (10, 100, 1000, 10_000)]
    assert all(x >= y for x, y in zip(b, b[1:]))


def test_kernel_class_requirements():
    x = iid_simulate(500, seed=0)
    with pytest.raises(KernelClassError):
        estimate(x, "parzen", require="A4")
    estimate(x, "power:3", require="A4")
    estimate(x, "parzen", require="A3")
    k = custom([1.0, 0.0])
    with pytest.raises(KernelClassError):
        estimate(x, k, require="A3")
    estimate(x, k, require="A3", allow_unverified=True)


def test_running_estimates():
    x = ar1_simulate(0.3, 5500, seed=8)
    runs = running_estimates(x, "bartlett", NeweyWest(1.5), stride=1000)
    assert [r.n for r in runs] == [1000, 2000, 3000, 4000, 5000, 5500]
    final = estimate(x, "bartlett", NeweyWest(1.5))
    assert runs[-1].gamma2 == final.gamma2
    assert runs[1].gamma2 == estimate(x.head(2000), "bartlett", NeweyWest(1.5)).gamma2
