import math
import warnings

import numpy as np
import pytest

from avarkit.models import (
    GarchParams,
    LogisticPosterior,
    ar1_long_run_variance,
    ar1_simulate,
    e1_moment,
    garch_mean_u2,
    garch_rho1,
    garch_sigma2_oracle,
    garch_simulate,
    garch_var_u2,
    iid_simulate,
    load_heart_dataset,
    logistic_log_gradient,
    logistic_log_posterior,
)

P = GarchParams(1.0, 0.1, 0.7)


def moment_recursion_oracle(omega, alpha, beta, n_lags=2000):
    """Long-run variance of u^2 from raw moment recursions, no closed forms.

    E h = omega + (alpha + beta) E h
    E h^2 = omega^2 + 2 omega (alpha + beta) E h + (beta^2 + 2 alpha beta + 3 alpha^2) E h^2
    Cov(u_0^2, u_k^2) for k >= 1 follows from E[u_0^2 h_k], which obeys
    E[u_0^2 h_{k+1}] = omega E u^2 + (alpha + beta) E[u_0^2 h_k],
    started at E[u_0^2 h_1] = omega E u^2 + (beta + 3 alpha) E h^2.
    """
    s = alpha + beta
    Eh = omega / (1 - s)
    Eh2 = (omega**2 + 2 * omega * s * Eh) / (1 - beta**2 - 2 * alpha * beta - 3 * alpha**2)
    Eu2, Eu4 = Eh, 3 * Eh2
    var = Eu4 - Eu2**2
    total = var
    m = omega * Eu2 + (beta + 3 * alpha) * Eh2
    for _ in range(n_lags):
        total += 2 * (m - Eu2**2)  # E[u_0^2 u_k^2] = E[u_0^2 h_k]
        m = omega * Eu2 + s * m
    return total, var, (omega * Eu2 + (beta + 3 * alpha) * Eh2 - Eu2**2) / var


def test_e1_moment_examples():
    assert e1_moment(0.1, 0.7, 4) == pytest.approx(0.5180, abs=1e-4)
    assert e1_moment(0.0, 0.5, 3) == pytest.approx(0.125)
    assert e1_moment(1.0, 0.0, 2) == pytest.approx(3.0)
    assert e1_moment(1.0, 0.0, 4) == pytest.approx(105.0)
    with pytest.raises(ValueError):
        e1_moment(0.1, 0.7, 2.5)


def test_e1_moment_monte_carlo():
    z2 = np.random.default_rng(0).standard_normal(10_000_000) ** 2
    mc = np.mean((0.7 + 0.1 * z2) ** 4)
    assert abs(mc - e1_moment(0.1, 0.7, 4)) < 1e-3


def test_garch_closed_forms():
    assert garch_sigma2_oracle(P) == pytest.approx(119.12, abs=0.005)
    assert garch_rho1(P) == pytest.approx(0.118919, abs=1e-6)
    assert garch_mean_u2(P) == pytest.approx(5.0)
    assert garch_var_u2(P) == pytest.approx(54.4118, abs=1e-4)


@pytest.mark.parametrize("a, b", [(0.1, 0.7), (0.05, 0.9), (0.2, 0.5), (0.0, 0.3)])
def test_garch_oracle_against_moment_recursion(a, b):
    p = GarchParams(1.3, a, b)
    sigma2, var, rho1 = moment_recursion_oracle(1.3, a, b)
    assert garch_sigma2_oracle(p) == pytest.approx(sigma2, rel=1e-10)
    assert garch_var_u2(p) == pytest.approx(var, rel=1e-12)
    if a > 0:
        assert garch_rho1(p) == pytest.approx(rho1, rel=1e-12)


def test_garch_no_dynamics_is_iid():
    p = GarchParams(2.0, 0.0, 0.0)
    assert garch_mean_u2(p) == 2.0
    assert garch_var_u2(p) == pytest.approx(8.0)  # 2 omega^2
    assert garch_sigma2_oracle(p) == pytest.approx(8.0)
    tr = garch_simulate(p, 200_000, h0=2.0, seed=1)
    assert tr.values.mean() == pytest.approx(2.0, rel=0.01)


def test_garch_moment_condition():
    with pytest.raises(ValueError, match="moment condition"):
        GarchParams(1.0, 0.3, 0.7)
    with pytest.raises(ValueError):
        GarchParams(0.0, 0.1, 0.7)
    # moment condition with nu=1 passes but the fourth moment is infinite
    p = GarchParams(1.0, 0.5, 0.45, nu=1)
    with pytest.raises(ValueError, match="fourth moment"):
        garch_sigma2_oracle(p)


def test_garch_stationary_mean():
    tr = garch_simulate(P, 400_000, seed=3).drop(10_000)
    assert tr.values.mean() == pytest.approx(5.0, rel=0.02)
    assert tr.label == "u2"


def test_garch_determinism():
    a = garch_simulate(P, 1000, seed=9).values
    b = garch_simulate(P, 1000, seed=9).values
    assert np.array_equal(a, b)
    assert not np.array_equal(a, garch_simulate(P, 1000, seed=10).values)


@pytest.mark.slow
def test_garch_block_sum_variance():
    """Brute-force check: n Var(mean of u^2 over a block) across independent
    stationary replicates, vectorized over replicates."""
    rng = np.random.default_rng(77)
    reps, warm, n = 8000, 300, 2000
    h = np.full(reps, 5.0)
    u2 = h * rng.standard_normal(reps) ** 2
    for _ in range(warm):
        h = 1.0 + 0.7 * h + 0.1 * u2
        u2 = h * rng.standard_normal(reps) ** 2
    total = np.zeros(reps)
    for _ in range(n):
        h = 1.0 + 0.7 * h + 0.1 * u2
        u2 = h * rng.standard_normal(reps) ** 2
        total += u2
    # finite-n correction: n Var(mean) = sigma2 - (2/n) sum k rho-terms, small here
    est = n * np.var(total / n, ddof=1)
    assert est == pytest.approx(garch_sigma2_oracle(P), rel=0.05)


def test_ar1_and_iid_oracles():
    assert ar1_long_run_variance(0.5) == 4.0
    assert ar1_long_run_variance(-0.5) == pytest.approx(4 / 9)
    assert ar1_long_run_variance(0.0) == 1.0
    with pytest.raises(ValueError):
        ar1_long_run_variance(1.0)
    with pytest.raises(ValueError):
        ar1_simulate(-1.2, 10)


def test_ar1_simulation_moments():
    x = ar1_simulate(0.5, 400_000, seed=2).values
    assert np.var(x) == pytest.approx(4 / 3, rel=0.02)
    assert np.corrcoef(x[:-1], x[1:])[0, 1] == pytest.approx(0.5, abs=0.01)
    y = iid_simulate(100_000, mean=3.0, var=4.0, seed=0).values
    assert y.mean() == pytest.approx(3.0, abs=0.03) and y.var() == pytest.approx(4.0, rel=0.02)


def test_logistic_log_posterior_examples():
    X = np.random.default_rng(0).standard_normal((25, 3))
    y = (X[:, 0] > 0).astype(float)
    post = LogisticPosterior(X, y, s=10.0)
    assert logistic_log_posterior(post, np.zeros(3)) == pytest.approx(-25 * math.log(2))
    one = LogisticPosterior([[1.0]], [1.0], s=math.inf)
    assert logistic_log_posterior(one, [10.0]) == pytest.approx(10 - math.log1p(math.exp(10)))
    # extreme linear predictor stays finite
    assert math.isfinite(logistic_log_posterior(one, [-1e4]))
    prior = LogisticPosterior([[1.0]], [1.0], s=2.0)
    assert logistic_log_posterior(prior, [3.0]) == pytest.approx(3 - math.log1p(math.exp(3)) - 9 / 8)


def test_logistic_gradient_matches_finite_differences():
    data = load_heart_dataset()
    post = data.posterior()
    rng = np.random.default_rng(4)
    for _ in range(10):
        beta = 0.3 * rng.standard_normal(post.dim)
        g = logistic_log_gradient(post, beta)
        fd = np.empty(post.dim)
        for j in range(post.dim):
            e = np.zeros(post.dim)
            e[j] = 1e-5
            fd[j] = (post.log_density(beta + e) - post.log_density(beta - e)) / 2e-5
        assert np.linalg.norm(g - fd) <= 1e-6 * max(np.linalg.norm(g), 1.0)


def test_prior_only_gradient():
    post = LogisticPosterior(np.zeros((4, 2)), [0, 1, 0, 1], s=2.0)
    np.testing.assert_allclose(post.gradient([1.0, -2.0]), [-0.25, 0.5])


def test_logistic_validation():
    with pytest.raises(ValueError):
        LogisticPosterior(np.zeros((3, 2)), [0, 1])
    with pytest.raises(ValueError):
        LogisticPosterior(np.zeros((2, 2)), [0, 2])
    with pytest.raises(ValueError):
        LogisticPosterior(np.zeros((2, 2)), [0, 1], s=0.0)


def test_heart_dataset_shape():
    data = load_heart_dataset()
    assert data.n_obs == 270 and data.d == 14
    assert data.columns[0] == "intercept"
    assert set(np.unique(data.y)) == {0.0, 1.0} and data.y.sum() == 120
    np.testing.assert_allclose(data.X[:, 1:].mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(data.X[:, 1:].std(axis=0), 1.0)
    assert len(data.sha256) == 64


def test_heart_raw_units():
    data = load_heart_dataset(standardize=False, intercept=False)
    assert data.d == 13
    assert data.columns[0] == "age"


def test_loader_remaps_one_two(tmp_path):
    f = tmp_path / "d.csv"
    f.write_text("a,b,y\n1,2,1\n3,5,2\n2,2,2\n")
    with pytest.warns(UserWarning, match="1 -> 0"):
        data = load_heart_dataset(f, response="y")
    np.testing.assert_array_equal(data.y, [0, 1, 1])
    assert data.response_mapping == {1: 0, 2: 1}


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        ("a,b,y\n", "no data"),
        ("a,b,y\n1,2,0\n1,2\n", "line 3"),
        ("a,b,y\n1,x,0\n", "line 2"),
        ("a,b,y\n1,2,3\n", "not binary"),
        ("a,b,z\n1,2,0\n", "response column"),
        ("a,b,y\n1,2,0\n1,2,1\n", "constant"),
    ],
)
def test_loader_errors(tmp_path, text, match):
    f = tmp_path / "bad.csv"
    f.write_text(text)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ValueError, match=match):
            load_heart_dataset(f, response="y")
