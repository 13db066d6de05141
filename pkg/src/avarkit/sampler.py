"""Random-walk Metropolis, plain and adaptive.

The adaptive chain follows the Haario-type recursion with projections:

    mu'    = P_mu(mu + g (x - mu))
    Sigma' = P_+(Sigma + g ((x - mu)(x - mu)^T - Sigma))

with step size ``g = 1/(n+1)`` (or ``(n+1)**-0.7``), both lines using the
pre-update ``mu``, and proposals ``N(x, (2.38**2/d) Sigma + eps I)``. ``P_mu``
and ``P_+`` scale their argument radially back onto the balls of radius
``r1`` (Euclidean) and ``r2`` (Frobenius).

Randomness comes from :class:`numpy.random.Generator` (PCG64). Normal
variates use the generator's ``standard_normal`` and uniforms ``random``,
drawn in fixed-size blocks, so a seed fixes the chain bit for bit.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .autocovariance import SampleTrace

__all__ = [
    "TargetDensity",
    "AdaptiveState",
    "FixedProposal",
    "AdaptiveProposal",
    "ChainConfig",
    "ChainResult",
    "OPTIMAL_SCALE",
    "project_ball",
    "rwm_step",
    "adapt_update",
    "adaptive_proposal_cov",
    "proposal_factor",
    "run_chain",
    "write_state_log",
]

OPTIMAL_SCALE = 2.38**2
_BLOCK = 4096


@dataclass(frozen=True)
class TargetDensity:
    """An unnormalized log density on ``R^dim``.

    ``log_density`` may return ``-inf`` outside the support. NaN is treated as
    ``-inf``.
    """

    dim: int
    log_density: Callable[[np.ndarray], float]

    def __post_init__(self):
        if int(self.dim) < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    def __call__(self, x) -> float:
        value = float(self.log_density(x))
        return -math.inf if math.isnan(value) else value


def project_ball(v: np.ndarray, radius: float, norm: Optional[float] = None) -> np.ndarray:
    """Radial projection onto ``{|v| <= radius}`` (Euclidean or Frobenius)."""
    if norm is None:
        norm = float(np.linalg.norm(v))
    if norm <= radius:
        return v
    return (radius / norm) * v


@dataclass(frozen=True)
class AdaptiveState:
    """Running mean and covariance of the adaptive Metropolis recursion.

    Attributes
    ----------
    mu, sigma : ndarray
        Current mean (``d``) and covariance (``d x d``) estimates.
    step : int
        Number of updates applied so far.
    r1, r2 : float
        Radii of the mean ball and the Frobenius covariance ball.
    epsilon : float
        Regularization added to every proposal covariance.
    step_size : {"harmonic", "power"}
        ``1/(n+1)`` or ``(n+1)**-exponent``.
    """

    mu: np.ndarray
    sigma: np.ndarray
    step: int = 0
    r1: float = 1e6
    r2: float = 1e6
    epsilon: float = 1e-5
    step_size: str = "harmonic"
    exponent: float = 0.7

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        sigma = np.array(self.sigma, dtype=float)
        d = mu.size
        if sigma.shape != (d, d):
            raise ValueError(f"sigma must be {d}x{d}, got {sigma.shape}")
        if not (self.r1 > 0 and self.r2 > 0 and self.epsilon > 0):
            raise ValueError("r1, r2 and epsilon must be positive")
        if self.step_size not in ("harmonic", "power"):
            raise ValueError(f"unknown step_size {self.step_size!r}")
        if np.linalg.norm(mu) > self.r1 * (1 + 1e-12):
            raise ValueError("|mu| exceeds r1")
        if np.linalg.norm(sigma) > self.r2 * (1 + 1e-12):
            raise ValueError("|sigma|_F exceeds r2")
        sigma = 0.5 * (sigma + sigma.T)
        if np.linalg.eigvalsh(sigma)[0] < -1e-10:
            raise ValueError("sigma is not positive semidefinite")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.size

    @classmethod
    def initial(cls, x0, sigma0: Union[float, np.ndarray] = 0.1, **kwargs) -> "AdaptiveState":
        """State with ``mu = x0`` and ``sigma = sigma0 * I`` (or a full matrix)."""
        x0 = np.asarray(x0, dtype=float).reshape(-1)
        sigma0 = np.asarray(sigma0, dtype=float)
        if sigma0.ndim == 0:
            sigma0 = float(sigma0) * np.eye(x0.size)
        return cls(mu=x0.copy(), sigma=sigma0, **kwargs)

    def gain(self) -> float:
        if self.step_size == "harmonic":
            return 1.0 / (self.step + 1)
        return (self.step + 1.0) ** (-self.exponent)


def adapt_update(state: AdaptiveState, x_next) -> AdaptiveState:
    """One step of the projected mean/covariance recursion."""
    x = np.asarray(x_next, dtype=float).reshape(-1)
    g = state.gain()
    diff = x - state.mu
    mu = project_ball(state.mu + g * diff, state.r1)
    sigma = state.sigma + g * (np.outer(diff, diff) - state.sigma)
    sigma = 0.5 * (sigma + sigma.T)
    sigma = project_ball(sigma, state.r2)
    # bypass __post_init__: the update preserves every invariant by construction
    new = object.__new__(AdaptiveState)
    for name, value in (
        ("mu", mu),
        ("sigma", sigma),
        ("step", state.step + 1),
        ("r1", state.r1),
        ("r2", state.r2),
        ("epsilon", state.epsilon),
        ("step_size", state.step_size),
        ("exponent", state.exponent),
    ):
        object.__setattr__(new, name, value)
    return new


def adaptive_proposal_cov(state: AdaptiveState) -> np.ndarray:
    """``(2.38**2 / d) Sigma + epsilon I``."""
    d = state.dim
    return (OPTIMAL_SCALE / d) * state.sigma + state.epsilon * np.eye(d)


def proposal_factor(cov) -> np.ndarray:
    """A matrix ``L`` with ``L L^T = cov``.

    Raises
    ------
    ValueError
        If ``cov`` is not symmetric positive semidefinite.
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape[0] != cov.shape[1]:
        raise ValueError(f"proposal covariance must be square, got {cov.shape}")
    if not np.all(np.isfinite(cov)):
        raise ValueError("proposal covariance has non-finite entries")
    scale = max(float(np.max(np.abs(cov))), 1.0)
    if np.max(np.abs(cov - cov.T)) > 1e-10 * scale:
        raise ValueError("proposal covariance is not symmetric")
    cov = 0.5 * (cov + cov.T)
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        if vals[0] < -1e-10 * scale:
            raise ValueError(
                f"proposal covariance is not positive semidefinite (min eigenvalue {vals[0]:.3g})"
            ) from None
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


def _accept(log_u: float, log_py: float, log_px: float) -> bool:
    # log_u < 0 almost surely, so equal densities always accept
    return log_u < log_py - log_px


def rwm_step(target: TargetDensity, x, proposal_cov, rng: np.random.Generator,
             log_px: Optional[float] = None):
    """One random-walk Metropolis transition.

    Proposes ``Y ~ N(x, proposal_cov)`` and accepts with probability
    ``min(1, pi(Y)/pi(x))`` evaluated on the log scale.

    Returns
    -------
    (x_next, accepted)
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    L = proposal_factor(proposal_cov)
    if log_px is None:
        log_px = target(x)
    if log_px == -math.inf:
        raise ValueError("current point has zero target density")
    y = x + L @ rng.standard_normal(x.size)
    u = rng.random()
    log_u = math.log(u) if u > 0.0 else -math.inf
    log_py = target(y)
    if _accept(log_u, log_py, log_px):
        return y, True
    return x, False


@dataclass(frozen=True)
class FixedProposal:
    """Plain RWM with a fixed proposal covariance."""

    cov: np.ndarray

    @classmethod
    def isotropic(cls, dim: int, variance: float) -> "FixedProposal":
        return cls(variance * np.eye(dim))


@dataclass(frozen=True)
class AdaptiveProposal:
    """Adaptive Metropolis; ``state`` of ``None`` means the defaults
    (``mu0 = x0``, ``Sigma0 = 0.1 I``, ``eps = 1e-5``, ``r1 = r2 = 1e6``)."""

    state: Optional[AdaptiveState] = None
    sigma0: float = 0.1
    epsilon: float = 1e-5
    r1: float = 1e6
    r2: float = 1e6
    step_size: str = "harmonic"


@dataclass(frozen=True)
class ChainConfig:
    """Run settings for :func:`run_chain`.

    Iterations are numbered ``1 .. n_iter``; values at iterations
    ``k > burn_in`` are recorded every ``stride``-th iteration.
    """

    n_iter: int
    x0: np.ndarray
    proposal: Union[FixedProposal, AdaptiveProposal]
    burn_in: int = 0
    seed: int = 0
    stride: int = 1
    record_log: bool = False

    def __post_init__(self):
        if self.n_iter < 1:
            raise ValueError("n_iter must be >= 1")
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError(f"need 0 <= burn_in < n_iter, got burn_in={self.burn_in}")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float).reshape(-1))


@dataclass
class ChainResult:
    """Output of :func:`run_chain`.

    ``samples`` holds the recorded states (rows), ``values`` the recorded
    ``h`` values. ``log`` is a dict of per-iteration arrays when
    ``record_log`` was set.
    """

    samples: np.ndarray
    values: np.ndarray
    n_accepted: int
    n_iter: int
    final_state: Optional[AdaptiveState] = None
    log: Optional[dict] = field(default=None, repr=False)

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_iter

    def trace(self, index: Optional[int] = None, label: str = "") -> SampleTrace:
        """Trace of ``values`` (or of ``values[:, index]`` for vector ``h``)."""
        v = self.values if index is None else self.values[:, index]
        return SampleTrace(v, label)


def run_chain(target: TargetDensity, config: ChainConfig,
              h: Optional[Callable[[np.ndarray], Union[float, np.ndarray]]] = None) -> ChainResult:
    """Run a plain or adaptive RWM chain and record ``h`` after burn-in.

    ``h`` defaults to the identity, in which case ``values`` equals
    ``samples``.
    """
    d = target.dim
    x = config.x0.copy()
    if x.size != d:
        raise ValueError(f"x0 has length {x.size}, target dimension is {d}")
    log_px = target(x)
    if log_px == -math.inf:
        raise ValueError("initial point has zero target density")

    adaptive = isinstance(config.proposal, AdaptiveProposal)
    if adaptive:
        p = config.proposal
        state = p.state or AdaptiveState.initial(
            x, p.sigma0, r1=p.r1, r2=p.r2, epsilon=p.epsilon, step_size=p.step_size
        )
        if state.dim != d:
            raise ValueError("adaptive state dimension does not match the target")
        L = None
    else:
        state = None
        cov = np.atleast_2d(np.asarray(config.proposal.cov, dtype=float))
        if cov.shape != (d, d):
            raise ValueError(f"proposal covariance must be {d}x{d}")
        L = proposal_factor(cov)

    rng = np.random.default_rng(config.seed)
    n_iter = config.n_iter
    n_keep = len(range(config.burn_in + 1, n_iter + 1, config.stride))
    samples = np.empty((n_keep, d))
    h_values = None
    kept = 0
    n_acc = 0
    if config.record_log:
        log = {
            "step": np.arange(1, n_iter + 1),
            "accepted": np.zeros(n_iter, dtype=bool),
            "h": [],
            "mu_norm": np.full(n_iter, np.nan),
            "sigma_fro": np.full(n_iter, np.nan),
        }
    else:
        log = None

    it = 0
    while it < n_iter:
        block = min(_BLOCK, n_iter - it)
        z = rng.standard_normal((block, d))
        with np.errstate(divide="ignore"):
            log_u = np.log(rng.random(block))
        for j in range(block):
            it += 1
            if adaptive:
                L = np.linalg.cholesky(adaptive_proposal_cov(state))
            y = x + L @ z[j]
            log_py = target(y)
            accepted = _accept(log_u[j], log_py, log_px)
            if accepted:
                x, log_px = y, log_py
                n_acc += 1
            if adaptive:
                state = adapt_update(state, x)
            if log is not None:
                log["accepted"][it - 1] = accepted
                if adaptive:
                    log["mu_norm"][it - 1] = np.linalg.norm(state.mu)
                    log["sigma_fro"][it - 1] = np.linalg.norm(state.sigma)
                log["h"].append(x if h is None else h(x))
            if it > config.burn_in and (it - config.burn_in - 1) % config.stride == 0:
                samples[kept] = x
                kept += 1

    if h is None:
        values = samples
    else:
        values = np.array([h(s) for s in samples], dtype=float)
    if log is not None:
        log["h"] = np.array(log["h"], dtype=float)
    return ChainResult(samples, values, n_acc, n_iter, state, log)


def write_state_log(result: ChainResult, path, h_index: int = 0) -> None:
    """CSV with columns ``step, accepted, h, mu_norm, sigma_fro``.

    Vector-valued ``h`` logs only component ``h_index``.
    """
    if result.log is None:
        raise ValueError("chain was run without record_log=True")
    lg = result.log
    hv = lg["h"] if lg["h"].ndim == 1 else lg["h"][:, h_index]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "accepted", "h", "mu_norm", "sigma_fro"])
        for row in zip(lg["step"], lg["accepted"], hv, lg["mu_norm"], lg["sigma_fro"]):
            w.writerow([int(row[0]), int(row[1]), repr(float(row[2])), repr(float(row[3])),
                        repr(float(row[4]))])
