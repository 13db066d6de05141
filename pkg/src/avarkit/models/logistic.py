"""Bayesian logistic regression with an isotropic Gaussian prior."""
from __future__ import annotations

import csv
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import expit

from ..sampler import TargetDensity

__all__ = [
    "LogisticPosterior",
    "HeartData",
    "logistic_log_posterior",
    "logistic_log_gradient",
    "load_heart_dataset",
    "heart_dataset_path",
    "DEFAULT_PRIOR_SD",
]

DEFAULT_PRIOR_SD = 10.0


@dataclass(frozen=True)
class LogisticPosterior:
    """Posterior of ``beta`` for ``y_i ~ Bernoulli(expit(x_i beta))`` under a
    ``N(0, s^2 I)`` prior. ``s = inf`` drops the prior."""

    X: np.ndarray
    y: np.ndarray
    s: float = DEFAULT_PRIOR_SD

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.shape[0] != y.size:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.size} entries")
        if not np.all(np.isfinite(X)):
            raise ValueError("design matrix has non-finite entries")
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("y must be 0/1")
        if not self.s > 0:
            raise ValueError("prior sd must be positive")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    def log_density(self, beta) -> float:
        return logistic_log_posterior(self, beta)

    def gradient(self, beta) -> np.ndarray:
        return logistic_log_gradient(self, beta)

    def target(self) -> TargetDensity:
        return TargetDensity(self.dim, self.log_density)


def logistic_log_posterior(post: LogisticPosterior, beta) -> float:
    """``sum_i y_i x_i beta - log(1 + exp(x_i beta)) - |beta|^2 / (2 s^2)``,
    with ``log(1 + e^t)`` evaluated as ``logaddexp(0, t)``."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    t = post.X @ beta
    ll = float(np.dot(post.y, t) - np.sum(np.logaddexp(0.0, t)))
    if math.isinf(post.s):
        return ll
    return ll - float(np.dot(beta, beta)) / (2.0 * post.s**2)


def logistic_log_gradient(post: LogisticPosterior, beta) -> np.ndarray:
    """``sum_i (y_i - p_beta(x_i)) x_i - beta / s^2``."""
    beta = np.asarray(beta, dtype=float).reshape(-1)
    resid = post.y - expit(post.X @ beta)
    grad = post.X.T @ resid
    if not math.isinf(post.s):
        grad = grad - beta / post.s**2
    return grad


@dataclass(frozen=True)
class HeartData:
    """Design matrix and response loaded by :func:`load_heart_dataset`.

    ``center`` and ``scale`` record the standardization applied to the
    covariate columns (intercept excluded), so raw-unit coefficients are
    ``beta_j / scale_j``.
    """

    X: np.ndarray
    y: np.ndarray
    columns: list
    center: np.ndarray
    scale: np.ndarray
    source: str
    sha256: str
    response_mapping: dict = field(default_factory=dict)

    @property
    def n_obs(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def posterior(self, s: float = DEFAULT_PRIOR_SD) -> LogisticPosterior:
        return LogisticPosterior(self.X, self.y, s)


def heart_dataset_path() -> Path:
    """Location of the bundled Statlog heart CSV."""
    return Path(str(resources.files("avarkit.models").joinpath("data/heart.csv")))


def load_heart_dataset(path=None, response: str = "disease", standardize: bool = True,
                       intercept: bool = True) -> HeartData:
    """Read a heart-disease style CSV into a logistic-regression design.

    Parameters
    ----------
    path : path-like, optional
        CSV with a header row. Defaults to the bundled Statlog heart data.
    response : str
        Name of the binary response column. Values in ``{0, 1}`` are used as
        they are; ``{1, 2}`` (the original Statlog coding) is mapped to
        ``{0, 1}`` with a warning.
    standardize : bool
        Center each covariate and divide by its standard deviation.
    intercept : bool
        Put a column of ones in front of the covariates.

    Raises
    ------
    ValueError
        Empty file, missing response column, ragged or unparsable rows (the
        message names the line), or a response that is not binary.
    """
    path = Path(path) if path is not None else heart_dataset_path()
    raw = path.read_bytes()
    text = raw.decode("utf-8")
    reader = csv.reader(text.splitlines())
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ValueError(f"{path}: file is empty") from None
    if not any(header):
        raise ValueError(f"{path}: file is empty")
    if response not in header:
        raise ValueError(f"{path}: response column {response!r} not in header {header}")
    r_idx = header.index(response)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ValueError(
                f"{path}, line {lineno}: expected {len(header)} columns, got {len(row)}"
            )
        try:
            rows.append([float(c) for c in row])
        except ValueError:
            raise ValueError(f"{path}, line {lineno}: unparsable value in {row}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    data = np.array(rows)
    if not np.all(np.isfinite(data)):
        bad = int(np.nonzero(~np.all(np.isfinite(data), axis=1))[0][0]) + 2
        raise ValueError(f"{path}, line {bad}: non-finite value")

    y = data[:, r_idx]
    levels = set(np.unique(y).tolist())
    mapping = {}
    if levels <= {0.0, 1.0}:
        pass
    elif levels <= {1.0, 2.0}:
        mapping = {1: 0, 2: 1}
        warnings.warn(f"{path}: response coded {{1, 2}}; mapping 1 -> 0 and 2 -> 1", stacklevel=2)
        y = y - 1.0
    else:
        raise ValueError(f"{path}: response {response!r} is not binary (levels {sorted(levels)})")

    cov_cols = [h for i, h in enumerate(header) if i != r_idx]
    X = np.delete(data, r_idx, axis=1)
    center = np.zeros(X.shape[1])
    scale = np.ones(X.shape[1])
    if standardize:
        center = X.mean(axis=0)
        scale = X.std(axis=0)
        if np.any(scale == 0):
            const = [c for c, s in zip(cov_cols, scale) if s == 0]
            raise ValueError(f"{path}: constant covariate(s) {const} cannot be standardized")
        X = (X - center) / scale
    columns = list(cov_cols)
    if intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
        columns = ["intercept"] + columns
    return HeartData(
        X=X,
        y=y,
        columns=columns,
        center=center,
        scale=scale,
        source=str(path),
        sha256=hashlib.sha256(raw).hexdigest(),
        response_mapping=mapping,
    )
