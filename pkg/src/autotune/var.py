"""VAR(d) estimation by p independent autotune Lasso regressions."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import AutotuneFit, Dataset, FitConfig


@dataclass(frozen=True)
class SeriesData:
    """T x p multivariate series, rows in ascending time, and lag order d."""

    values: np.ndarray
    d: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise ValueError("series must be a 2-d array")
        if self.d < 1:
            raise ValueError("lag order must be >= 1")
        if v.shape[0] < self.d + 2:
            raise ValueError(f"series of length {v.shape[0]} too short for {self.d} lags")
        if not np.all(np.isfinite(v)):
            raise ValueError("series contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class VarDesign:
    Y: np.ndarray
    X: np.ndarray

    @property
    def n(self) -> int:
        return self.Y.shape[0]


@dataclass(frozen=True)
class VarFit:
    Phi: np.ndarray
    intercepts: np.ndarray
    sigma2: np.ndarray
    lambdas: np.ndarray
    per_column: tuple
    d: int

    @property
    def p(self) -> int:
        return self.Phi.shape[1]

    def transition_matrices(self) -> list[np.ndarray]:
        p = self.p
        return [self.Phi[k * p:(k + 1) * p].T for k in range(self.d)]


def build_var_design(series: SeriesData) -> VarDesign:
    """Lagged regression design.

    Row k of Y is Z^{d+k}; row k of X is (Z^{d+k-1}, ..., Z^{k}), newest lag
    first, so that Y ~ X Phi with Phi = [A_1'; ...; A_d'].
    """
    Z, d = series.values, series.d
    T = series.T
    Y = Z[d:]
    X = np.hstack([Z[d - lag:T - lag] for lag in range(1, d + 1)])
    return VarDesign(Y=Y.copy(), X=X)


def _check_columns(Z: np.ndarray):
    flat = np.ptp(Z, axis=0) == 0
    if flat.any():
        raise ValueError(f"series columns {np.flatnonzero(flat).tolist()} are constant")


def _fit_column(X: np.ndarray, y: np.ndarray, cfg: FitConfig) -> AutotuneFit:
    from .fit import autotune_fit

    return autotune_fit(Dataset(X, y), cfg)


def var_autotune_fit(series: SeriesData, cfg: Optional[FitConfig] = None, jobs: int = 1) -> VarFit:
    """Columnwise autotune Lasso; each column gets its own sigma2 and lambda."""
    cfg = cfg or FitConfig()
    _check_columns(series.values)
    design = build_var_design(series)
    p = series.p
    cols = [np.ascontiguousarray(design.Y[:, i]) for i in range(p)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            fits = list(pool.map(lambda y: _fit_column(design.X, y, cfg), cols))
    else:
        fits = [_fit_column(design.X, y, cfg) for y in cols]
    Phi = np.column_stack([f.beta for f in fits])
    return VarFit(
        Phi=Phi,
        intercepts=np.array([f.intercept for f in fits]),
        sigma2=np.array([f.sigma2 for f in fits]),
        lambdas=np.array([f.lambda_ for f in fits]),
        per_column=tuple(fits),
        d=series.d,
    )


def forecast_one_step(fit: VarFit, recent) -> np.ndarray:
    """One-step-ahead forecast from the last d observations (newest first)."""
    recent = np.asarray(recent, dtype=float)
    if recent.shape != (fit.d, fit.p):
        raise ValueError(f"expected a {fit.d} x {fit.p} block of recent observations")
    return recent.reshape(-1) @ fit.Phi + fit.intercepts
