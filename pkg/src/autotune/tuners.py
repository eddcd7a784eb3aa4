"""Grid-based baseline tuners: K-fold CV (min / 1se), AIC/BIC and
time-series CV. All fit warm-started paths with the coordinate-descent solver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .lasso import LambdaGrid, lasso_path, make_lambda_grid
from .model import Dataset, LassoFit, destandardize, standardize

PATH_TOL = 1e-7


@dataclass(frozen=True)
class TunedFit:
    """Chosen penalty plus the full-data fit at that penalty.

    ``fit`` lives on the standardized scale; ``beta``/``intercept`` are on the
    original scale.
    """

    fit: LassoFit
    lambda_: float
    beta: np.ndarray
    intercept: float
    grid: LambdaGrid
    scores: np.ndarray
    score_se: Optional[np.ndarray] = None
    index: int = 0

    @property
    def df(self) -> int:
        return int(np.count_nonzero(self.fit.beta))

    def sigma2_estimate(self) -> float:
        """Residual variance RSS / (n - df) of the full-data fit."""
        r = self.fit.residuals
        dof = r.size - self.df
        return float(r @ r) / dof if dof > 0 else float("nan")


def _full_path(data: Dataset, grid: Optional[LambdaGrid], tol: float):
    data_std, st = standardize(data)
    if grid is None:
        grid = make_lambda_grid(data_std)
    return data_std, st, grid, lasso_path(data_std, grid, tol=tol, criterion="objective")


def _path_predictions(X_tr, y_tr, X_te, grid: LambdaGrid, tol: float) -> np.ndarray:
    """Test-set predictions (n_test x len(grid)) from a path fit on the training rows."""
    train_std, st = standardize(Dataset(X_tr, y_tr))
    fits = lasso_path(train_std, grid, tol=tol, criterion="objective")
    preds = np.empty((X_te.shape[0], grid.count))
    for k, f in enumerate(fits):
        b, b0 = destandardize(f.beta, st)
        preds[:, k] = X_te @ b + b0
    return preds


def _tuned(fits, st, grid, k, scores, se=None) -> TunedFit:
    beta, b0 = destandardize(fits[k].beta, st)
    return TunedFit(fit=fits[k], lambda_=float(grid.values[k]), beta=beta,
                    intercept=b0, grid=grid, scores=scores, score_se=se, index=k)


def select_cv_index(cv_mean: np.ndarray, cv_se: np.ndarray, rule: str) -> int:
    """Grid index picked by CV(min) or CV(1se); the grid is decreasing in lambda."""
    best = int(np.argmin(cv_mean))
    if rule == "min":
        return best
    if rule == "onese":
        bound = cv_mean[best] + cv_se[best]
        return int(np.flatnonzero(cv_mean <= bound)[0])
    raise ValueError(f"unknown CV rule {rule!r}")


def cv_folds(n: int, K: int, seed: int) -> np.ndarray:
    """Fold label for each row: near-equal sizes, randomly permuted.

    The permutation draws from a child stream of ``seed`` so it stays
    independent of a simulator seeded with the same value.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    return rng.permutation(np.arange(n) % K)


def cv_lasso(data: Dataset, K: int = 10, rule: str = "min",
             grid: Optional[LambdaGrid] = None, seed: int = 0,
             tol: float = PATH_TOL) -> TunedFit:
    if K < 2 or data.n < K:
        raise ValueError("K-fold CV needs 2 <= K <= n")
    data_std, st, grid, fits = _full_path(data, grid, tol)
    folds = cv_folds(data.n, K, seed)
    errs = np.empty((K, grid.count))
    for k in range(K):
        te = folds == k
        if te.all() or not te.any():
            raise ValueError("degenerate fold")
        preds = _path_predictions(data.X[~te], data.Y[~te], data.X[te], grid, tol)
        errs[k] = np.mean((data.Y[te][:, None] - preds) ** 2, axis=0)
    cv_mean = errs.mean(axis=0)
    cv_se = errs.std(axis=0, ddof=1) / np.sqrt(K)
    k = select_cv_index(cv_mean, cv_se, rule)
    return _tuned(fits, st, grid, k, cv_mean, cv_se)


def information_criterion(rss: np.ndarray, df: np.ndarray, n: int, criterion: str) -> np.ndarray:
    """n log(RSS) + k df with k = 2 (AIC) or log n (BIC)."""
    if criterion == "aic":
        k = 2.0
    elif criterion == "bic":
        k = np.log(n)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    with np.errstate(divide="ignore"):
        return n * np.log(rss) + k * df


def ic_lasso(data: Dataset, criterion: str = "bic",
             grid: Optional[LambdaGrid] = None, tol: float = PATH_TOL) -> TunedFit:
    data_std, st, grid, fits = _full_path(data, grid, tol)
    rss = np.array([float(f.residuals @ f.residuals) for f in fits])
    df = np.array([np.count_nonzero(f.beta) for f in fits])
    ic = information_criterion(rss, df, data.n, criterion)
    k = int(np.argmin(ic))
    return _tuned(fits, st, grid, k, ic)


def tscv_splits(n: int, K: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Rolling splits over 2K contiguous folds: fold K+j is tested with folds
    1..K+j-1 as training, j = 1..K."""
    if K < 1 or n < 4 * K:
        raise ValueError("time-series CV needs n >= 4K rows")
    folds = np.array_split(np.arange(n), 2 * K)
    return [(np.concatenate(folds[:K + j]), folds[K + j]) for j in range(K)]


def tscv_lasso(y, X, K: int = 5, grid: Optional[LambdaGrid] = None,
               tol: float = PATH_TOL) -> TunedFit:
    data = Dataset(X, y)
    data_std, st, grid, fits = _full_path(data, grid, tol)
    errs = np.empty((K, grid.count))
    for j, (tr, te) in enumerate(tscv_splits(data.n, K)):
        preds = _path_predictions(data.X[tr], data.Y[tr], data.X[te], grid, tol)
        errs[j] = np.mean((data.Y[te][:, None] - preds) ** 2, axis=0)
    mean = errs.mean(axis=0)
    k = int(np.argmin(mean))
    return _tuned(fits, st, grid, k, mean)
