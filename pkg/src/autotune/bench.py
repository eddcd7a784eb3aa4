"""Replication harness: simulate, fit every method, score, aggregate.

Each (spec, method, rep) cell is independent. Replication ``rep`` of a spec
uses seed ``spec.seed + rep`` for the simulator; methods that need their own
randomness (CV folds) derive it from the same seed through a child stream.
"""
from __future__ import annotations

import configparser
import csv
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Iterable, Sequence, Union

import numpy as np

from .fit import autotune_fit, autotune_fit_active
from .metrics import auroc, mcc, pve, rmse, rte
from .model import Dataset
from .sim import RegSimSpec, VarSimSpec, simulate_regression, simulate_var
from .tuners import cv_lasso, ic_lasso, tscv_lasso
from .var import build_var_design

METHODS = ("autotune", "autotune_active", "cvmin", "cv1se", "aic", "bic", "tscv", "truth")
METRICS = ("rmse", "rte", "pve", "auroc", "mcc", "sigma2_err", "runtime_ms", "lambda_visits")

Spec = Union[RegSimSpec, VarSimSpec]


@dataclass(frozen=True)
class MetricsReport:
    """Scores of one method on one simulated replication.

    ``rte`` and ``pve`` are NaN for VAR specs, where no test-design
    covariance is defined. A failed cell keeps NaN metrics and the error text.
    """

    spec: str
    method: str
    rep: int
    seed: int
    rmse: float = math.nan
    rte: float = math.nan
    pve: float = math.nan
    auroc: float = math.nan
    mcc: float = math.nan
    sigma2_err: float = math.nan
    runtime_ms: float = math.nan
    lambda_visits: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass(frozen=True)
class SummaryRow:
    spec: str
    method: str
    n_ok: int
    n_failed: int
    mean: dict
    se: dict


@dataclass(frozen=True)
class BenchmarkResult:
    raw: list
    summary: list


def spec_key(spec: Spec) -> str:
    """Stable text label for a spec, used to group and sort rows."""
    kind = "reg" if isinstance(spec, RegSimSpec) else "var"
    parts = []
    for f in fields(spec):
        v = getattr(spec, f.name)
        if isinstance(v, tuple):
            v = "/".join(f"{x:g}" for x in v)
        elif isinstance(v, float):
            v = f"{v:g}"
        parts.append(f"{f.name}={v}")
    return kind + ":" + ",".join(parts)


def _fit_method(method: str, X, y, seed: int):
    """(beta, sigma2 estimate, lambda visits) on the original scale."""
    data = Dataset(X, y)
    if method == "autotune":
        f = autotune_fit(data)
        return f.beta, f.sigma2, len(f.lambda_trace)
    if method == "autotune_active":
        f = autotune_fit_active(data)
        return f.beta, f.sigma2, len(f.lambda_trace)
    if method in ("cvmin", "cv1se"):
        t = cv_lasso(data, rule="min" if method == "cvmin" else "onese", seed=seed)
    elif method in ("aic", "bic"):
        t = ic_lasso(data, criterion=method)
    elif method == "tscv":
        t = tscv_lasso(y, X)
    else:
        raise ValueError(f"unknown method {method!r}")
    return t.beta, t.sigma2_estimate(), t.grid.count


def _support_scores(beta_hat, beta_true):
    truth = np.asarray(beta_true).ravel() != 0
    est = np.asarray(beta_hat).ravel()
    p = truth.size
    a = auroc(np.abs(est), truth) if 0 < truth.sum() < p else math.nan
    m = mcc(np.flatnonzero(est), np.flatnonzero(truth), p)
    return a, m


def _regression_cell(spec: RegSimSpec, method: str) -> dict:
    sim = simulate_regression(spec)
    X, y = sim.data.X, sim.data.Y
    sigma2_emp = float(np.var(y - X @ sim.beta, ddof=1))
    t0 = time.perf_counter()
    if method == "truth":
        beta, s2, visits = sim.beta.copy(), sim.sigma2, 0
    else:
        beta, s2, visits = _fit_method(method, X, y, spec.seed)
    elapsed = time.perf_counter() - t0
    a, m = _support_scores(beta, sim.beta)
    return dict(
        rmse=rmse(beta, sim.beta) if np.any(sim.beta) else math.nan,
        rte=rte(beta, sim.beta, sim.rho, sim.sigma2),
        pve=pve(beta, sim.beta, sim.rho, sim.sigma2),
        auroc=a, mcc=m,
        sigma2_err=float(s2) - sigma2_emp,
        runtime_ms=1e3 * elapsed,
        lambda_visits=float(visits),
    )


def _var_cell(spec: VarSimSpec, method: str) -> dict:
    sim = simulate_var(spec)
    design = build_var_design(sim.series)
    phi = sim.phi
    p = sim.series.p
    resid = design.Y - design.X @ phi
    sigma2_emp = np.var(resid, axis=0, ddof=1)
    t0 = time.perf_counter()
    cols, s2, visits = [], [], []
    for i in range(p):
        y = np.ascontiguousarray(design.Y[:, i])
        if method == "truth":
            b, s, v = phi[:, i].copy(), float(sim.sigma_eps[i]), 0
        else:
            b, s, v = _fit_method(method, design.X, y, spec.seed)
        cols.append(b)
        s2.append(s)
        visits.append(v)
    elapsed = time.perf_counter() - t0
    Phi = np.column_stack(cols)
    a, m = _support_scores(Phi, phi)
    return dict(
        rmse=rmse(Phi, phi),
        auroc=a, mcc=m,
        sigma2_err=float(np.mean(np.asarray(s2) - sigma2_emp)),
        runtime_ms=1e3 * elapsed,
        lambda_visits=float(np.mean(visits)),
    )


def run_cell(spec: Spec, method: str, rep: int, timing: bool = True) -> MetricsReport:
    """Simulate replication ``rep`` of ``spec`` and score ``method`` on it."""
    seed = spec.seed + rep
    cell_spec = replace(spec, seed=seed)
    key = spec_key(spec)
    try:
        if isinstance(spec, RegSimSpec):
            vals = _regression_cell(cell_spec, method)
        else:
            vals = _var_cell(cell_spec, method)
    except Exception as exc:  # per-cell failures are recorded, not raised
        return MetricsReport(spec=key, method=method, rep=rep, seed=seed,
                             error=f"{type(exc).__name__}: {exc}")
    if not timing:
        vals["runtime_ms"] = math.nan
    return MetricsReport(spec=key, method=method, rep=rep, seed=seed, **vals)


def _run_task(task):
    return run_cell(*task)


def _aggregate(raw: Sequence[MetricsReport]) -> list:
    groups: dict = {}
    for row in raw:
        groups.setdefault((row.spec, row.method), []).append(row)
    out = []
    for (key, method) in sorted(groups):
        rows = groups[(key, method)]
        good = [r for r in rows if r.ok]
        mean, se = {}, {}
        for name in METRICS:
            vals = np.array([getattr(r, name) for r in good], dtype=float)
            vals = vals[np.isfinite(vals)]
            mean[name] = float(vals.mean()) if vals.size else math.nan
            se[name] = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else math.nan
        out.append(SummaryRow(spec=key, method=method, n_ok=len(good),
                              n_failed=len(rows) - len(good), mean=mean, se=se))
    return out


def run_benchmark(specs: Iterable[Spec], methods: Sequence[str], reps: int,
                  jobs: int = 1, timing: bool = True) -> BenchmarkResult:
    """Run every (spec, method, rep) cell and aggregate mean and standard error.

    Rows are sorted by (spec, method, rep), so the output does not depend on
    ``jobs`` or scheduling. With ``timing=False`` runtimes are left as NaN and
    the tables are bit-identical across runs.
    """
    specs = list(specs)
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s): {', '.join(unknown)}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    tasks = [(s, m, r, timing) for s in specs for m in methods for r in range(reps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        raw = [_run_task(t) for t in tasks]
    raw.sort(key=lambda r: (r.spec, r.method, r.rep))
    return BenchmarkResult(raw=raw, summary=_aggregate(raw))


# ---- grid configuration -------------------------------------------------

_REG_KEYS = {"n": int, "p": int, "s": int, "rho": float, "snr": float,
             "beta_type": int, "seed": int}
_VAR_KEYS = {"n": int, "p": int, "dgp": str, "snr": float, "burn_in": int, "seed": int}


def _values(raw: str, cast):
    return [cast(v.strip()) for v in raw.split(",") if v.strip()]


def parse_grid(text: str) -> list:
    """Specs from a key=value config; comma lists expand to a cartesian product.

    Each section is one grid; ``kind = reg`` (default) or ``kind = var``
    selects the simulator. Text without a section header is read as a single
    section.
    """
    if not text.lstrip().startswith("["):
        text = "[grid]\n" + text
    parser = configparser.ConfigParser()
    parser.read_string(text)
    specs = []
    for name in parser.sections():
        sec = dict(parser[name])
        kind = sec.pop("kind", "reg").strip()
        if kind == "reg":
            keys, cls = _REG_KEYS, RegSimSpec
        elif kind == "var":
            keys, cls = _VAR_KEYS, VarSimSpec
        else:
            raise ValueError(f"[{name}]: unknown kind {kind!r}")
        extra = set(sec) - set(keys)
        if extra:
            raise ValueError(f"[{name}]: unknown keys {sorted(extra)}")
        names = sorted(sec)
        lists = [_values(sec[k], keys[k]) for k in names]
        for combo in itertools.product(*lists):
            specs.append(cls(**dict(zip(names, combo))))
    if not specs:
        raise ValueError("grid defines no specs")
    return specs


def read_grid(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read())


# ---- CSV output ---------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


RAW_COLUMNS = ("spec", "method", "rep", "seed") + METRICS + ("error",)


def write_raw_csv(rows: Sequence[MetricsReport], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RAW_COLUMNS)
        for r in rows:
            w.writerow([_fmt(getattr(r, c)) for c in RAW_COLUMNS])


def summary_columns() -> tuple:
    cols = ["spec", "method", "n_ok", "n_failed"]
    for m in METRICS:
        cols += [f"{m}_mean", f"{m}_se"]
    return tuple(cols)


def write_summary_csv(rows: Sequence[SummaryRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(summary_columns())
        for r in rows:
            line = [r.spec, r.method, r.n_ok, r.n_failed]
            for m in METRICS:
                line += [_fmt(r.mean[m]), _fmt(r.se[m])]
            w.writerow(line)
