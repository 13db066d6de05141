"""Experiment harness: run chains or simulators, track running variance
estimates, and write CSV/JSON results.

Four experiments are available:

``garch``
    GARCH(1,1) squared returns; the oracle is the closed-form asymptotic
    variance.
``logistic-plain`` / ``logistic-adaptive``
    Plain RWM with proposal ``N(x, e^c I)`` or adaptive Metropolis on the
    heart-data logistic posterior; reports the first ``n_coef`` coefficients.
``synthetic-oracle``
    AR(1) with coefficient ``phi`` (iid N(0, 1) when ``phi = 0``).

Every output file embeds the resolved configuration. Wall-clock time and the
timestamp live only under ``metadata`` so everything else is reproducible
bit for bit from the config and seeds.
"""
from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .autocovariance import DegenerateTraceError
from .lag_kernels import get_kernel
from .models import (
    GarchParams,
    ar1_long_run_variance,
    ar1_simulate,
    garch_sigma2_oracle,
    garch_simulate,
    iid_simulate,
    load_heart_dataset,
)
from .sampler import AdaptiveProposal, ChainConfig, FixedProposal, run_chain
from .variance import confidence_interval, estimate, parse_bandwidth

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "EXPERIMENTS",
    "load_config_file",
    "parse_seeds",
    "run_seed",
    "run_experiment",
    "compare_report",
    "format_compare",
]

EXPERIMENTS = ("garch", "logistic-plain", "logistic-adaptive", "synthetic-oracle")

RUNNING_COLUMNS = ["step", "gamma2", "bandwidth", "lags_used", "mean", "negative_flag"]

# Per-experiment defaults; anything left unset falls back to these.
_DEFAULTS = {
    "garch": dict(n_iter=250_000, burn_in=10_000, kernel="bartlett", bandwidth="nw:c0=1.5"),
    "logistic-plain": dict(n_iter=250_000, burn_in=50_000, kernel="parzen", bandwidth="nw:c0=20"),
    "logistic-adaptive": dict(n_iter=250_000, burn_in=50_000, kernel="parzen", bandwidth="nw:c0=5"),
    "synthetic-oracle": dict(n_iter=100_000, burn_in=0, kernel="bartlett",
                             bandwidth="fixed:delta=0.3333333333333333,coef=1"),
}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "garch"
    n_iter: Optional[int] = None
    burn_in: Optional[int] = None
    kernel: Optional[str] = None
    bandwidth: Optional[str] = None
    stride: int = 1000
    seeds: tuple = (0,)
    level: float = 0.95
    out: str = "results"
    workers: int = 1
    # garch
    omega: float = 1.0
    alpha: float = 0.1
    beta: float = 0.7
    h0: float = 1.0
    # synthetic
    phi: float = 0.0
    # logistic
    data: Optional[str] = None
    prior_sd: float = 10.0
    log_step: float = -2.3
    n_coef: int = 4
    epsilon: float = 1e-5
    sigma0: float = 0.1
    r1: float = 1e6
    r2: float = 1e6
    step_size: str = "harmonic"

    def resolved(self) -> "ExperimentConfig":
        """Fill experiment-specific defaults and validate."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        fills = {k: v for k, v in _DEFAULTS[self.experiment].items() if getattr(self, k) is None}
        cfg = dataclasses.replace(self, **fills, seeds=tuple(int(s) for s in self.seeds))
        try:
            get_kernel(cfg.kernel)
            parse_bandwidth(cfg.bandwidth)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if cfg.n_iter < 2:
            raise ConfigError("n_iter must be >= 2")
        if not 0 <= cfg.burn_in < cfg.n_iter - 1:
            raise ConfigError("need 0 <= burn_in < n_iter - 1")
        if cfg.stride < 1:
            raise ConfigError("stride must be >= 1")
        if not 0 < cfg.level < 1:
            raise ConfigError("level must lie in (0, 1)")
        if not cfg.seeds:
            raise ConfigError("at least one seed is required")
        if cfg.workers < 1:
            raise ConfigError("workers must be >= 1")
        if cfg.experiment == "synthetic-oracle" and abs(cfg.phi) >= 1:
            raise ConfigError("synthetic-oracle needs |phi| < 1")
        if cfg.experiment == "garch":
            try:
                GarchParams(cfg.omega, cfg.alpha, cfg.beta)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if cfg.step_size not in ("harmonic", "power"):
            raise ConfigError("step_size must be 'harmonic' or 'power'")
        return cfg

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["seeds"] = list(self.seeds)
        return d


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def parse_seeds(text) -> tuple:
    """``"3"``, ``"0,1,5"`` or ``"0-19"`` (inclusive ranges) to a tuple of ints."""
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"(\d+)\s*-\s*(\d+)", part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ConfigError(f"bad seed range {part!r}")
            seeds.extend(range(lo, hi + 1))
        elif re.fullmatch(r"\d+", part):
            seeds.append(int(part))
        else:
            raise ConfigError(f"bad seed list {text!r}")
    return tuple(seeds)


def coerce_option(key: str, value):
    """Convert a string option to the type of the ``ExperimentConfig`` field."""
    key = key.strip().replace("-", "_")
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown option {key!r}")
    if value is None:
        return key, None
    if key == "seeds":
        return key, parse_seeds(value)
    typ = str(_FIELD_TYPES[key])
    try:
        if "int" in typ:
            return key, int(value)
        if "float" in typ:
            return key, float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"option {key}: {value!r} is not a valid number") from None
    return key, str(value).strip()


def load_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys use the flag
    names with either dashes or underscores."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}, line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        k, v = coerce_option(key, value)
        out[k] = v
    return out


# -- per-seed work -----------------------------------------------------------


def _target_description(cfg: ExperimentConfig) -> dict:
    if cfg.experiment == "garch":
        return {"model": "garch", "omega": cfg.omega, "alpha": cfg.alpha, "beta": cfg.beta,
                "h0": cfg.h0, "functional": "u^2"}
    if cfg.experiment == "synthetic-oracle":
        return {"model": "iid" if cfg.phi == 0 else "ar1", "phi": cfg.phi}
    data = load_heart_dataset(cfg.data)
    return {"model": "logistic", "data_sha256": data.sha256, "n_obs": data.n_obs, "d": data.d,
            "prior_sd": cfg.prior_sd, "columns": data.columns}


def _oracle(cfg: ExperimentConfig) -> Optional[float]:
    if cfg.experiment == "garch":
        return garch_sigma2_oracle(GarchParams(cfg.omega, cfg.alpha, cfg.beta))
    if cfg.experiment == "synthetic-oracle":
        return ar1_long_run_variance(cfg.phi)
    return None


def _simulate(cfg: ExperimentConfig, seed: int):
    """Returns ({series name: post-burn-in values}, acceptance rate or None)."""
    if cfg.experiment == "garch":
        params = GarchParams(cfg.omega, cfg.alpha, cfg.beta)
        tr = garch_simulate(params, cfg.n_iter, h0=cfg.h0, seed=seed)
        return {"u2": tr.values[cfg.burn_in:]}, None
    if cfg.experiment == "synthetic-oracle":
        if cfg.phi == 0:
            tr = iid_simulate(cfg.n_iter, seed=seed)
        else:
            tr = ar1_simulate(cfg.phi, cfg.n_iter, seed=seed)
        return {"x": tr.values[cfg.burn_in:]}, None
    data = load_heart_dataset(cfg.data)
    post = data.posterior(cfg.prior_sd)
    d = post.dim
    if cfg.experiment == "logistic-plain":
        proposal = FixedProposal.isotropic(d, math.exp(cfg.log_step))
    else:
        proposal = AdaptiveProposal(sigma0=cfg.sigma0, epsilon=cfg.epsilon, r1=cfg.r1,
                                    r2=cfg.r2, step_size=cfg.step_size)
    chain = ChainConfig(n_iter=cfg.n_iter, x0=np.zeros(d), proposal=proposal,
                        burn_in=cfg.burn_in, seed=seed)
    res = run_chain(post.target(), chain)
    k = min(cfg.n_coef, d)
    series = {f"beta{j + 1}": res.samples[:, j].copy() for j in range(k)}
    return series, res.acceptance_rate


def _running_rows(values, cfg: ExperimentConfig):
    kernel = get_kernel(cfg.kernel)
    plan = parse_bandwidth(cfg.bandwidth)
    n = values.size
    steps = list(range(cfg.stride, n + 1, cfg.stride))
    if not steps or steps[-1] != n:
        steps.append(n)
    rows = []
    for m in steps:
        if m < 2:
            continue
        try:
            e = estimate(values[:m], kernel, plan)
            rows.append([cfg.burn_in + m, e.gamma2, e.bandwidth, e.lags_used, e.mean,
                         e.negative_flag])
        except DegenerateTraceError:
            rows.append([cfg.burn_in + m, math.nan, math.nan, 0, float(np.mean(values[:m])),
                         False])
    return rows


def run_seed(cfg: ExperimentConfig, seed: int) -> dict:
    """Simulate one seed and compute final and running estimates."""
    cfg = cfg.resolved()
    series, acc = _simulate(cfg, seed)
    oracle = _oracle(cfg)
    out = {"seed": int(seed), "acceptance_rate": acc, "series": {}, "running": {}}
    for name, values in series.items():
        e = estimate(values, cfg.kernel, cfg.bandwidth)
        entry = e.as_dict()
        entry["level"] = cfg.level
        entry["ci"] = None if e.negative_flag else list(confidence_interval(e, cfg.level))
        entry["oracle"] = oracle
        entry["rel_error"] = None if oracle is None else (e.gamma2 - oracle) / oracle
        out["series"][name] = entry
        out["running"][name] = _running_rows(values, cfg)
    return out


def _aggregate(per_seed: list) -> dict:
    agg = {}
    names = per_seed[0]["series"].keys()
    for name in names:
        g = np.array([r["series"][name]["gamma2"] for r in per_seed])
        entry = {"n_seeds": len(per_seed), "mean_gamma2": float(np.mean(g)),
                 "sd_gamma2": float(np.std(g, ddof=1)) if len(g) > 1 else 0.0}
        oracle = per_seed[0]["series"][name]["oracle"]
        if oracle is not None:
            rel = (g - oracle) / oracle
            entry["oracle"] = oracle
            entry["rel_error_of_mean"] = float((np.mean(g) - oracle) / oracle)
            entry["rel_rmse"] = float(np.sqrt(np.mean(rel**2)))
        agg[name] = entry
    return agg


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run every seed and write results under ``cfg.out``.

    Files written:

    * ``running_<series>_seed<seed>.csv`` with columns
      ``step, gamma2, bandwidth, lags_used, mean, negative_flag``; ``step``
      counts iterations including burn-in;
    * ``per_seed.csv``, one row per seed and series;
    * ``summary.json`` with the resolved config, target description,
      per-seed results, aggregates and run metadata.

    Returns the summary dictionary.
    """
    cfg = cfg.resolved()
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc

    t0 = time.perf_counter()
    if cfg.workers > 1 and len(cfg.seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_seed = list(pool.map(run_seed, [cfg] * len(cfg.seeds), cfg.seeds))
    else:
        per_seed = [run_seed(cfg, s) for s in cfg.seeds]
    wall = time.perf_counter() - t0

    config_echo = cfg.as_dict()
    for r in per_seed:
        for name, rows in r["running"].items():
            path = out / f"running_{name}_seed{r['seed']}.csv"
            with open(path, "w", newline="") as fh:
                fh.write("# config: " + json.dumps(config_echo, sort_keys=True) + "\n")
                w = csv.writer(fh)
                w.writerow(RUNNING_COLUMNS)
                for row in rows:
                    w.writerow([_fmt(v) for v in row])

    with open(out / "per_seed.csv", "w", newline="") as fh:
        fh.write("# config: " + json.dumps(config_echo, sort_keys=True) + "\n")
        w = csv.writer(fh)
        w.writerow(["seed", "series", "n", "gamma2", "bandwidth", "lags_used", "mean",
                    "ci_lo", "ci_hi", "oracle", "rel_error", "acceptance_rate"])
        for r in per_seed:
            for name, s in r["series"].items():
                ci = s["ci"] or [math.nan, math.nan]
                w.writerow([r["seed"], name, s["n"], _fmt(s["gamma2"]), _fmt(s["bandwidth"]),
                            s["lags_used"], _fmt(s["mean"]), _fmt(ci[0]), _fmt(ci[1]),
                            "" if s["oracle"] is None else _fmt(s["oracle"]),
                            "" if s["rel_error"] is None else _fmt(s["rel_error"]),
                            "" if r["acceptance_rate"] is None else _fmt(r["acceptance_rate"])])

    summary = {
        "config": config_echo,
        "target": _target_description(cfg),
        "seeds": [{k: v for k, v in r.items() if k != "running"} for r in per_seed],
        "aggregate": _aggregate(per_seed),
        "metadata": {
            "wall_clock_s": wall,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "version": __version__,
        },
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return summary


# -- plain vs adaptive comparison --------------------------------------------


def _load_summary(path) -> dict:
    p = Path(path)
    if p.is_dir():
        p = p / "summary.json"
    try:
        return json.loads(p.read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"summary file not found: {p}") from None


def compare_report(first, second, seed: Optional[int] = None) -> list:
    """Side-by-side interval table for two runs on the same target.

    Parameters
    ----------
    first, second : path or dict
        ``summary.json`` files (or their directories, or loaded dicts),
        typically the plain and the adaptive run.
    seed : int, optional
        Which seed to compare; defaults to the first seed of each run.

    Returns
    -------
    list of dict
        One row per series present in both runs with both intervals, their
        half-widths, ``overlap`` and ``narrower`` (which run has the
        narrower interval).

    Raises
    ------
    ValueError
        If the runs do not describe the same target.
    """
    a = first if isinstance(first, dict) else _load_summary(first)
    b = second if isinstance(second, dict) else _load_summary(second)
    if a["target"] != b["target"]:
        raise ValueError("runs are on different targets; refusing to compare "
                         f"({a['target'].get('model')} vs {b['target'].get('model')})")

    def pick(s):
        if seed is None:
            return s["seeds"][0]
        for r in s["seeds"]:
            if r["seed"] == seed:
                return r
        raise ValueError(f"seed {seed} not present in run")

    ra, rb = pick(a), pick(b)
    rows = []
    for name in ra["series"]:
        if name not in rb["series"]:
            continue
        ea, eb = ra["series"][name], rb["series"][name]
        ca, cb = ea["ci"], eb["ci"]
        row = {"series": name, "first": ca, "second": cb, "first_mean": ea["mean"],
               "second_mean": eb["mean"]}
        if ca is None or cb is None:
            row.update(overlap=None, narrower=None, first_half=None, second_half=None)
        else:
            ha, hb = (ca[1] - ca[0]) / 2, (cb[1] - cb[0]) / 2
            row.update(first_half=ha, second_half=hb,
                       overlap=bool(ca[0] <= cb[1] and cb[0] <= ca[1]),
                       narrower="first" if ha < hb else ("second" if hb < ha else "tie"))
        rows.append(row)
    return rows


def format_compare(rows: list, labels=("first", "second")) -> str:
    """Plain-text table for :func:`compare_report` rows; ``*`` marks
    non-overlapping intervals."""

    def ci(c):
        return "negative estimate" if c is None else f"[{c[0]:.3f}, {c[1]:.3f}]"

    w = 20
    lines = [f"{'series':<10}{labels[0]:>{w}}{labels[1]:>{w}}  overlap"]
    narrower_second = 0
    for r in rows:
        flag = "" if r["overlap"] is None else ("yes" if r["overlap"] else "NO *")
        lines.append(f"{r['series']:<10}{ci(r['first']):>{w}}{ci(r['second']):>{w}}  {flag}")
        narrower_second += r["narrower"] == "second"
    lines.append(f"{labels[1]} interval narrower for {narrower_second} of {len(rows)} series")
    return "\n".join(lines)
