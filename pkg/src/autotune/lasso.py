"""Coordinate-descent Lasso at a fixed penalty, warm-started paths and KKT checks.

The objective is (1/2n)||Y - X beta||^2 + lambda ||beta||_1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .model import Dataset, LassoFit


def soft_threshold(a: float, lam: float) -> float:
    if lam < 0:
        raise ValueError("threshold must be non-negative")
    if a > lam:
        return a - lam
    if a < -lam:
        return a + lam
    return 0.0


def lambda_max(data: Dataset) -> float:
    """Smallest penalty at which the Lasso solution is identically zero."""
    if data.p == 0:
        raise ValueError("empty design")
    return float(np.max(np.abs(data.X.T @ data.Y)) / data.n)


@dataclass(frozen=True)
class LambdaGrid:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("grid must be a non-empty 1-d sequence")
        if np.any(v <= 0) or np.any(np.diff(v) >= 0):
            raise ValueError("grid must be strictly decreasing and positive")
        object.__setattr__(self, "values", v)

    @property
    def ratio(self) -> float:
        return float(self.values[-1] / self.values[0])

    @property
    def count(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.count

    def __iter__(self):
        return iter(self.values)


def make_lambda_grid(data: Dataset, count: int = 100, ratio: Optional[float] = None) -> LambdaGrid:
    """Log-equispaced grid from lambda_max down to ratio * lambda_max."""
    if ratio is None:
        ratio = 0.01 if data.p >= data.n else 1e-4
    lmax = lambda_max(data)
    if lmax <= 0:
        raise ValueError("response is orthogonal to every column; no grid")
    if count == 1:
        return LambdaGrid(np.array([lmax]))
    return LambdaGrid(lmax * np.logspace(0, np.log10(ratio), count))


def column_sq_norms(X: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", X, X) / X.shape[0]


def objective(data: Dataset, beta: np.ndarray, lam: float) -> float:
    r = data.Y - data.X @ beta
    return float(r @ r) / (2 * data.n) + lam * float(np.abs(beta).sum())


def relative_change(beta: np.ndarray, beta_old: np.ndarray) -> float:
    """||beta - beta_old||_1 / ||beta_old||_1 with 0/0 = 0 and x/0 = inf."""
    num = float(np.abs(beta - beta_old).sum())
    den = float(np.abs(beta_old).sum())
    if den == 0.0:
        return 0.0 if num == 0.0 else np.inf
    return num / den


@dataclass(frozen=True)
class KKTReport:
    passed: bool
    max_violation: float


def kkt_violation(X: np.ndarray, r: np.ndarray, beta: np.ndarray, lam: float) -> float:
    n = X.shape[0]
    grad = X.T @ r / n
    active = beta != 0
    viol = 0.0
    if active.any():
        viol = float(np.max(np.abs(grad[active] - lam * np.sign(beta[active]))))
    if (~active).any():
        viol = max(viol, float(np.max(np.abs(grad[~active]) - lam)))
    return max(viol, 0.0)


def kkt_check(data: Dataset, beta: Sequence[float], lam: float, tol: float = 1e-6) -> KKTReport:
    """Check the Lasso optimality conditions for ``beta`` at penalty ``lam``.

    On the active set the gradient X_j'r/n must equal lam * sign(beta_j); off
    it, its magnitude must not exceed lam.
    """
    beta = np.asarray(beta, dtype=float)
    r = data.Y - data.X @ beta
    v = kkt_violation(data.X, r, beta, lam)
    return KKTReport(v <= tol, v)


def _small_step(beta, beta_old, colsq, tol, criterion, scale) -> bool:
    if criterion == "kkt":
        return relative_change(beta, beta_old) < tol
    # glmnet-style: largest weighted squared coefficient change vs response scale
    return float(np.max(colsq * (beta - beta_old) ** 2, initial=0.0)) < tol * scale


def cd_fixed_lambda(
    data: Dataset,
    lam: float,
    beta_init: Optional[Sequence[float]] = None,
    order: Optional[Sequence[int]] = None,
    tol: float = 1e-9,
    max_sweeps: int = 10000,
    lam_scale: Optional[float] = None,
    criterion: str = "kkt",
) -> LassoFit:
    """Cyclic coordinate descent at a fixed penalty.

    Full sweeps over ``order`` alternate with passes restricted to the
    current nonzero coordinates (same relative order). With the default
    ``criterion="kkt"`` a full sweep ends the fit once the relative l1 change
    of beta is below ``tol`` and the KKT violation is at most
    ``tol * max(lam, lam_scale)``; ``lam_scale`` defaults to 1e-3 * lambda_max
    so that lam = 0 (least squares) still has a usable threshold.
    ``criterion="objective"`` instead stops when max_j ||X_j||^2/n * dbeta_j^2
    falls below ``tol * ||Y||^2 / n`` (the usual glmnet rule), without the
    KKT confirmation.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    if criterion not in ("kkt", "objective"):
        raise ValueError(f"unknown criterion {criterion!r}")
    X, n, p = data.X, data.n, data.p
    beta = np.zeros(p) if beta_init is None else np.array(beta_init, dtype=float)
    if beta.shape != (p,):
        raise ValueError("beta_init has the wrong length")
    order = np.arange(p, dtype=np.intp) if order is None else np.ascontiguousarray(order, dtype=np.intp)
    lmax = lambda_max(data)
    if lam >= lmax:
        # zero is the unique minimizer; sweeping could leave round-off residue
        return LassoFit(beta=np.zeros(p), lambda_=float(lam), residuals=np.array(data.Y),
                        sweeps=0, converged=True)
    r = np.ascontiguousarray(data.Y - X @ beta)
    colsq = column_sq_norms(X)
    if lam_scale is None:
        lam_scale = 1e-3 * lmax
    kkt_tol = tol * max(lam, lam_scale)
    yscale = float(data.Y @ data.Y) / n

    sweeps = 0
    converged = False
    while sweeps < max_sweeps:
        beta_old = beta.copy()
        _kernels.cd_sweep(X, r, beta, order, lam, colsq)
        sweeps += 1
        if _small_step(beta, beta_old, colsq, tol, criterion, yscale):
            if criterion == "objective":
                converged = True
                break
            r = np.ascontiguousarray(data.Y - X @ beta)
            if kkt_violation(X, r, beta, lam) <= kkt_tol:
                converged = True
                break
        active = order[beta[order] != 0]
        while sweeps < max_sweeps and active.size:
            beta_old = beta.copy()
            _kernels.cd_sweep(X, r, beta, active, lam, colsq)
            sweeps += 1
            if _small_step(beta, beta_old, colsq, tol, criterion, yscale):
                break
    r = data.Y - X @ beta
    return LassoFit(beta=beta, lambda_=float(lam), residuals=r, sweeps=sweeps, converged=converged)


def lasso_path(data: Dataset, grid: LambdaGrid, tol: float = 1e-9, max_sweeps: int = 10000,
               criterion: str = "kkt") -> list[LassoFit]:
    """Solve along a decreasing grid, warm-starting each fit at the previous one."""
    fits = []
    beta = None
    lam_scale = 1e-3 * lambda_max(data)
    for lam in grid.values:
        fit = cd_fixed_lambda(data, float(lam), beta_init=beta, tol=tol,
                              max_sweeps=max_sweeps, lam_scale=lam_scale,
                              criterion=criterion)
        fits.append(fit)
        beta = fit.beta
    return fits
