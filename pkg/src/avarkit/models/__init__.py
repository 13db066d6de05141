"""Experiment targets: GARCH(1,1), Bayesian logistic regression, and
synthetic oracles."""

from .garch import (
    GarchParams,
    e1_moment,
    garch_mean_u2,
    garch_rho1,
    garch_sigma2_oracle,
    garch_simulate,
    garch_var_u2,
)
from .logistic import (
    DEFAULT_PRIOR_SD,
    HeartData,
    LogisticPosterior,
    heart_dataset_path,
    load_heart_dataset,
    logistic_log_gradient,
    logistic_log_posterior,
)
from .synthetic import ar1_long_run_variance, ar1_simulate, iid_simulate

__all__ = [
    "GarchParams",
    "e1_moment",
    "garch_mean_u2",
    "garch_rho1",
    "garch_sigma2_oracle",
    "garch_simulate",
    "garch_var_u2",
    "DEFAULT_PRIOR_SD",
    "HeartData",
    "LogisticPosterior",
    "heart_dataset_path",
    "load_heart_dataset",
    "logistic_log_gradient",
    "logistic_log_posterior",
    "ar1_long_run_variance",
    "ar1_simulate",
    "iid_simulate",
]
