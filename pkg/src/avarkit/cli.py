"""Command-line driver.

    avarkit run --experiment garch --kernel bartlett --bandwidth nw:c0=1.5 --out runs/garch
    avarkit run --config garch.cfg --seeds 0-19
    avarkit compare runs/plain runs/adaptive

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .experiments import (
    EXPERIMENTS,
    ConfigError,
    ExperimentConfig,
    coerce_option,
    compare_report,
    format_compare,
    load_config_file,
    run_experiment,
)

log = logging.getLogger("avarkit")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# flag name -> ExperimentConfig field
_RUN_FLAGS = {
    "experiment": "experiment", "kernel": "kernel", "bandwidth": "bandwidth",
    "n_iter": "n_iter", "burn_in": "burn_in", "stride": "stride", "seeds": "seeds",
    "level": "level", "out": "out", "workers": "workers", "omega": "omega",
    "alpha": "alpha", "beta": "beta", "h0": "h0", "phi": "phi", "data": "data",
    "prior_sd": "prior_sd", "log_step": "log_step", "n_coef": "n_coef",
    "epsilon": "epsilon", "sigma0": "sigma0", "r1": "r1", "r2": "r2",
    "step_size": "step_size",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avarkit", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write results")
    run.add_argument("--config", help="flat key = value file; flags override it")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--kernel", help="bartlett | parzen | power:q")
    run.add_argument("--bandwidth",
                     help='"fixed:delta=0.333,coef=1" | "nw:c0=1.5" | "explicit:b=0.01"')
    run.add_argument("--n-iter", dest="n_iter")
    run.add_argument("--burn-in", dest="burn_in")
    run.add_argument("--stride", help="checkpoint spacing for running estimates")
    run.add_argument("--seeds", help='"0", "0,3,7" or "0-19"')
    run.add_argument("--level", help="confidence level")
    run.add_argument("--out", help="output directory")
    run.add_argument("--workers", help="parallel worker processes across seeds")
    g = run.add_argument_group("garch")
    for name in ("omega", "alpha", "beta", "h0"):
        g.add_argument(f"--{name}")
    s = run.add_argument_group("synthetic-oracle")
    s.add_argument("--phi", help="AR(1) coefficient; 0 gives iid N(0, 1)")
    lg = run.add_argument_group("logistic")
    lg.add_argument("--data", help="heart CSV (defaults to the bundled copy)")
    lg.add_argument("--prior-sd", dest="prior_sd")
    lg.add_argument("--log-step", dest="log_step", help="plain RWM proposal variance is exp(c)")
    lg.add_argument("--n-coef", dest="n_coef", help="number of leading coefficients to report")
    lg.add_argument("--epsilon")
    lg.add_argument("--sigma0")
    lg.add_argument("--r1")
    lg.add_argument("--r2")
    lg.add_argument("--step-size", dest="step_size", choices=("harmonic", "power"))

    cmp_ = sub.add_parser("compare", help="side-by-side intervals for two runs")
    cmp_.add_argument("first", help="summary.json (or its directory), e.g. the plain run")
    cmp_.add_argument("second", help="summary.json (or its directory), e.g. the adaptive run")
    cmp_.add_argument("--labels", default="plain,adaptive")
    cmp_.add_argument("--seed", type=int)
    cmp_.add_argument("--json", action="store_true", help="print rows as JSON")
    return parser


def config_from_args(args) -> ExperimentConfig:
    options = load_config_file(args.config) if args.config else {}
    for flag, field_name in _RUN_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            k, v = coerce_option(field_name, value)
            options[k] = v
    return ExperimentConfig(**options).resolved()


def _cmd_run(args) -> int:
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("running %s with seeds %s", cfg.experiment, list(cfg.seeds))
    try:
        summary = run_experiment(cfg)
    except Exception as exc:  # noqa: BLE001 - reported via exit code
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name, agg in summary["aggregate"].items():
        line = f"{name}: mean gamma2 = {agg['mean_gamma2']:.6g}"
        if "oracle" in agg:
            line += f" (oracle {agg['oracle']:.6g}, rel. error {agg['rel_error_of_mean']:+.3%})"
        print(line)
        first = summary["seeds"][0]["series"][name]
        if first["ci"] is not None:
            print(f"  seed {summary['seeds'][0]['seed']}: mean {first['mean']:.6g}, "
                  f"{cfg.level:.0%} CI [{first['ci'][0]:.6g}, {first['ci'][1]:.6g}]")
    print(f"results written to {cfg.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    labels = tuple(args.labels.split(",", 1)) if "," in args.labels else (args.labels, "second")
    try:
        rows = compare_report(args.first, args.second, seed=args.seed)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.json:
        print(json.dumps(rows, indent=2))
    else:
        print(format_compare(rows, labels))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_compare(args)


if __name__ == "__main__":
    sys.exit(main())
