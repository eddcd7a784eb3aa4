"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np

from . import __version__
from .bench import METHODS, read_grid, run_benchmark, write_raw_csv, write_summary_csv
from .csvio import CSVFormatError, read_numeric_csv, split_response, write_matrix_csv
from .diagnostics import diagnostics_table
from .fit import autotune_fit
from .model import Dataset, DegenerateResponseError, FitConfig, UnusableDesignError
from .sim import RegSimSpec, VarSimSpec, simulate_regression, simulate_var
from .var import SeriesData, var_autotune_fit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

RANKING_HEAD = 20

log = logging.getLogger("autotune")


class InputError(Exception):
    """Bad flags, files or data; maps to exit code 2."""


class NumericalError(Exception):
    """A fit could not be completed; maps to exit code 3."""


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: Optional[int]
    version: str
    wall_time_s: Optional[float]


def _manifest(args, start: Optional[float], seed=None) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    wall = None if start is None else time.perf_counter() - start
    return asdict(RunManifest(command=args.command, config=config, seed=seed,
                              version=__version__, wall_time_s=wall))


def _clean(x):
    """JSON-safe copy: numpy scalars become Python numbers and non-finite
    floats become null."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in (x.tolist() if isinstance(x, np.ndarray) else x)]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _emit_json(obj: dict, out: Optional[str]) -> None:
    text = json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_table(path):
    if not os.path.isfile(path):
        raise InputError(f"cannot read {path}: no such file")
    try:
        return read_numeric_csv(path)
    except CSVFormatError as exc:
        raise InputError(str(exc)) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _fit_config(args) -> FitConfig:
    try:
        return FitConfig(
            alpha=args.alpha,
            ranking_norm=f"dispersion-{args.norm}",
            tol=args.tol,
            max_sweeps=args.max_sweeps,
            standardize=not args.no_standardize,
            active_set=args.active,
            max_support=args.max_support,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _regression_data(args):
    table = _read_table(args.data)
    try:
        X, y, names = split_response(table, args.response)
        data = Dataset(X, y)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return data, names


def _run_fit(data: Dataset, cfg: FitConfig):
    try:
        fit = autotune_fit(data, cfg)
    except (UnusableDesignError, DegenerateResponseError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        raise NumericalError(f"fit failed: {exc}") from None
    if not (np.all(np.isfinite(fit.beta)) and math.isfinite(fit.sigma2)):
        raise NumericalError("fit produced non-finite estimates")
    return fit


def cmd_fit(args) -> int:
    start = None if args.no_timing else time.perf_counter()
    data, names = _regression_data(args)
    cfg = _fit_config(args)
    fit = _run_fit(data, cfg)
    if not fit.converged:
        log.warning("did not converge within %d sweeps", cfg.max_sweeps)
    if fit.saturated:
        log.warning("sigma update saturated; lambda frozen")
    result = {
        "predictors": list(names),
        "beta": fit.beta,
        "intercept": fit.intercept,
        "sigma2": fit.sigma2,
        "lambda": fit.lambda_,
        "lambda0": fit.lambda0,
        "support_set": list(fit.support_set),
        "ranking_head": fit.ranking[:RANKING_HEAD],
        "lambda_trace": list(fit.lambda_trace),
        "sweeps": fit.sweeps,
        "converged": fit.converged,
        "saturated": fit.saturated,
        "kkt_violation": fit.info.get("kkt_violation"),
    }
    result["manifest"] = _manifest(args, start)
    _emit_json(result, args.out)
    return EXIT_OK


def cmd_var_fit(args) -> int:
    start = None if args.no_timing else time.perf_counter()
    table = _read_table(args.data)
    cfg = _fit_config(args)
    if args.jobs < 1:
        raise InputError("--jobs must be >= 1")
    try:
        series = SeriesData(table.values, d=args.lags)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        fit = var_autotune_fit(series, cfg, jobs=args.jobs)
    except (UnusableDesignError, DegenerateResponseError, FloatingPointError,
            np.linalg.LinAlgError) as exc:
        raise NumericalError(f"VAR fit failed: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    os.makedirs(args.out_dir, exist_ok=True)
    phi_path = os.path.join(args.out_dir, "phi.csv")
    write_matrix_csv(phi_path, fit.Phi)
    columns = []
    for i, f in enumerate(fit.per_column):
        columns.append({
            "column": table.column_names()[i],
            "sigma2": f.sigma2,
            "lambda": f.lambda_,
            "intercept": f.intercept,
            "support_size": int(np.count_nonzero(f.beta)),
            "converged": f.converged,
            "saturated": f.saturated,
        })
    result = {"lags": fit.d, "p": fit.p, "phi_csv": phi_path, "columns": columns,
              "manifest": _manifest(args, start)}
    _emit_json(result, args.out)
    return EXIT_OK


def _sim_spec(args):
    try:
        if args.kind == "reg":
            if len(args.snr) != 1:
                raise ValueError("regression takes a single --snr value")
            return RegSimSpec(n=args.n, p=args.p, s=args.s, rho=args.rho, snr=args.snr[0],
                              beta_type=args.beta_type, seed=args.seed)
        return VarSimSpec(p=args.p, n=args.n, dgp=args.dgp, snr=tuple(args.snr),
                          burn_in=args.burn_in, seed=args.seed)
    except ValueError as exc:
        raise InputError(f"invalid spec: {exc}") from None


def cmd_simulate(args) -> int:
    start = None if args.no_timing else time.perf_counter()
    spec = _sim_spec(args)
    os.makedirs(args.out_dir, exist_ok=True)
    data_path = os.path.join(args.out_dir, "data.csv")
    truth_path = os.path.join(args.out_dir, "truth.json")
    if args.kind == "reg":
        sim = simulate_regression(spec)
        header = [f"x{j + 1}" for j in range(spec.p)] + ["y"]
        write_matrix_csv(data_path, np.column_stack([sim.data.X, sim.data.Y]), header)
        truth = {"kind": "reg", "spec": spec.to_dict(), "beta": sim.beta,
                 "sigma2": sim.sigma2, "rho": sim.rho}
    else:
        sim = simulate_var(spec)
        header = [f"z{j + 1}" for j in range(spec.p)]
        write_matrix_csv(data_path, sim.series.values, header)
        truth = {"kind": "var", "spec": spec.to_dict(), "A": sim.A,
                 "sigma_eps": sim.sigma_eps}
    # the truth file is a reproducible artifact, so its manifest carries no timing
    truth["manifest"] = _manifest(args, None, seed=args.seed)
    _emit_json(truth, truth_path)
    _emit_json({"data_csv": data_path, "truth_json": truth_path,
                "manifest": _manifest(args, start, seed=args.seed)}, None)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    start = None if args.no_timing else time.perf_counter()
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise InputError(f"unknown method(s): {', '.join(unknown) or '(none)'}; "
                         f"choose from {', '.join(METHODS)}")
    if args.reps < 1 or args.jobs < 1:
        raise InputError("--reps and --jobs must be >= 1")
    if not os.path.isfile(args.grid):
        raise InputError(f"cannot read {args.grid}: no such file")
    try:
        specs = read_grid(args.grid)
        if args.seed is not None:
            specs = [replace(s, seed=args.seed) for s in specs]
    except (ValueError, TypeError, configparser.Error) as exc:
        raise InputError(f"invalid grid: {exc}") from None
    res = run_benchmark(specs, methods, args.reps, jobs=args.jobs, timing=not args.no_timing)
    os.makedirs(args.out_dir, exist_ok=True)
    raw_path = os.path.join(args.out_dir, "raw.csv")
    sum_path = os.path.join(args.out_dir, "summary.csv")
    write_raw_csv(res.raw, raw_path)
    write_summary_csv(res.summary, sum_path)
    failed = sum(1 for r in res.raw if not r.ok)
    if failed:
        log.warning("%d of %d cells failed; see the error column", failed, len(res.raw))
    _emit_json({"raw_csv": raw_path, "summary_csv": sum_path, "cells": len(res.raw),
                "failed_cells": failed, "manifest": _manifest(args, start, seed=args.seed)},
               args.out)
    return EXIT_OK


def _opt(x) -> str:
    return "" if x is None else repr(float(x))


def cmd_diagnose(args) -> int:
    data, names = _regression_data(args)
    cfg = _fit_config(args)
    fit = _run_fit(data, cfg)
    rows = diagnostics_table(data, fit, cfg, max_rank=args.max_rank)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rank", "predictor", "name", "dispersion", "in_support", "cum_r2", "adj_r2"])
    for r in rows:
        w.writerow([r.rank, r.predictor, names[r.predictor], repr(r.dispersion),
                    int(r.in_support), _opt(r.cum_r2), _opt(r.adj_r2)])
    return EXIT_OK


def _add_fit_flags(p: argparse.ArgumentParser, regression: bool = True) -> None:
    p.add_argument("--data", required=True, help="CSV file")
    if regression:
        p.add_argument("--response", help="response column name (default: last column)")
    p.add_argument("--alpha", type=float, default=0.01, help="F-test level (default 0.01)")
    p.add_argument("--norm", choices=("l1", "l2"), default="l2",
                   help="partial-residual dispersion used for ranking")
    p.add_argument("--tol", type=float, default=1e-3, help="relative l1 change tolerance")
    p.add_argument("--max-sweeps", type=int, default=1000)
    p.add_argument("--max-support", type=int, default=None,
                   help="cap on the F-test support size")
    p.add_argument("--active", action="store_true", help="use active-set screening")
    p.add_argument("--no-standardize", action="store_true",
                   help="fit on the raw columns (they should already have ||x_j||^2 = n)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autotune", description="Self-tuning Lasso.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a regression from CSV")
    _add_fit_flags(p)
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--no-timing", action="store_true", help="omit wall time from the manifest")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("var-fit", help="fit a VAR(d) from a T x p series CSV")
    _add_fit_flags(p, regression=False)
    p.add_argument("--lags", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1, help="columns fitted concurrently")
    p.add_argument("--out-dir", default=".", help="directory for phi.csv")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_var_fit)

    p = sub.add_parser("simulate", help="write a simulated data set and its truth")
    p.add_argument("--kind", choices=("reg", "var"), default="reg")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--s", type=int, default=5)
    p.add_argument("--rho", type=float, default=0.35)
    p.add_argument("--snr", type=float, nargs="+", default=None)
    p.add_argument("--beta-type", type=int, default=1)
    p.add_argument("--dgp", choices=("diagonal", "block2x2"), default="diagonal")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="run a simulation grid")
    p.add_argument("--grid", required=True, help="config file of key = value lists")
    p.add_argument("--methods", default="autotune,cvmin,cv1se,aic,bic")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help="base seed for every spec")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--no-timing", action="store_true",
                   help="leave runtimes empty so outputs are reproducible")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("diagnose", help="ranking and R^2 table as CSV on stdout")
    _add_fit_flags(p)
    p.add_argument("--max-rank", type=int, default=None,
                   help="largest nested model in the R^2 curve")
    p.set_defaults(func=cmd_diagnose)
    return parser


def _fill_sim_defaults(args) -> None:
    if args.command != "simulate":
        return
    reg = args.kind == "reg"
    if args.n is None:
        args.n = 80 if reg else 200
    if args.p is None:
        args.p = 750 if reg else 10
    if args.snr is None:
        args.snr = [2.0] if reg else [2.5]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="autotune: %(message)s", stream=sys.stderr)
    _fill_sim_defaults(args)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"autotune: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"autotune: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
