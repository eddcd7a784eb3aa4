"""Shared data model: datasets, standardization, configuration and fit records."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class UnusableDesignError(ValueError):
    """Raised when no column of the design carries any variance."""


class DegenerateResponseError(ValueError):
    """Raised when the response has zero variance."""


RANKING_NORMS = ("dispersion-l2", "dispersion-l1")


@dataclass(frozen=True)
class Dataset:
    """Response ``Y`` (length n) and design ``X`` (n x p)."""

    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.asfortranarray(np.asarray(self.X, dtype=np.float64))
        Y = np.ascontiguousarray(np.asarray(self.Y, dtype=np.float64)).reshape(-1)
        if X.ndim == 1:
            X = np.asfortranarray(X[:, None])
        if X.ndim != 2:
            raise ValueError("X must be a 2-d array")
        n, p = X.shape
        if Y.shape[0] != n:
            raise ValueError(f"Y has {Y.shape[0]} rows but X has {n}")
        if n < 2:
            raise ValueError("need at least two observations")
        if p < 1:
            raise ValueError("need at least one predictor")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise ValueError("data contains non-finite entries")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class Standardization:
    """Centering/scaling applied to a dataset.

    ``keep`` marks the retained (non-degenerate) columns; the standardized
    design only contains those, in their original order.
    """

    column_means: np.ndarray
    column_scales: np.ndarray
    response_mean: float
    keep: np.ndarray

    @property
    def degenerate(self) -> np.ndarray:
        return np.flatnonzero(~self.keep)

    @property
    def retained(self) -> np.ndarray:
        return np.flatnonzero(self.keep)


@dataclass(frozen=True)
class FitConfig:
    alpha: float = 0.01
    ranking_norm: str = "dispersion-l2"
    tol: float = 1e-3
    max_sweeps: int = 1000
    standardize: bool = True
    active_set: bool = False
    max_support: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.ranking_norm not in RANKING_NORMS:
            raise ValueError(f"ranking_norm must be one of {RANKING_NORMS}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be a positive integer")
        if self.max_support is not None and self.max_support < 0:
            raise ValueError("max_support must be non-negative")

    def support_cap(self, n: int, p: int) -> int:
        cap = min(p, n - 2)
        if self.max_support is not None:
            cap = min(cap, self.max_support)
        return max(cap, 0)


@dataclass(frozen=True)
class LassoFit:
    beta: np.ndarray
    lambda_: float
    residuals: np.ndarray
    sweeps: int
    converged: bool = True


@dataclass(frozen=True)
class AutotuneFit:
    """Result of an autotune fit.

    ``beta``/``intercept`` are on the original scale of the data; ``beta_std``
    and ``lambda_`` refer to the standardized problem actually solved.
    Index sets (``support_set``, ``ranking``) use original column indices.
    """

    beta: np.ndarray
    intercept: float
    sigma2: float
    lambda_: float
    lambda0: float
    support_set: tuple
    ranking: np.ndarray
    lambda_trace: tuple
    r2_curve: dict
    sweeps: int
    converged: bool
    saturated: bool = False
    beta_std: Optional[np.ndarray] = None
    standardization: Optional[Standardization] = None
    info: dict = field(default_factory=dict)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.beta + self.intercept


def standardize(data: Dataset) -> tuple[Dataset, Standardization]:
    """Center every column and the response; scale columns so that ||X_j||^2 = n.

    Zero-variance columns are flagged and dropped from the returned design.
    """
    X, Y = data.X, data.Y
    means = X.mean(axis=0)
    scales = np.sqrt(np.mean((X - means) ** 2, axis=0))
    magnitude = np.max(np.abs(X), axis=0)
    keep = scales > 1e-12 * np.maximum(magnitude, 1e-300)
    if not keep.any():
        raise UnusableDesignError("every column of the design is constant")
    ymean = float(Y.mean())
    Xs = (X[:, keep] - means[keep]) / scales[keep]
    st = Standardization(
        column_means=means,
        column_scales=np.where(keep, scales, 1.0),
        response_mean=ymean,
        keep=keep,
    )
    return Dataset(Xs, Y - ymean), st


def identity_standardization(p: int) -> Standardization:
    return Standardization(np.zeros(p), np.ones(p), 0.0, np.ones(p, dtype=bool))


def destandardize(beta_std: Sequence[float], st: Standardization) -> tuple[np.ndarray, float]:
    """Map coefficients of the standardized problem back to the raw scale.

    Returns the full-length coefficient vector (zeros at degenerate columns)
    and the intercept.
    """
    beta_std = np.asarray(beta_std, dtype=float)
    if beta_std.shape != (int(st.keep.sum()),):
        raise ValueError(
            f"expected {int(st.keep.sum())} coefficients, got {beta_std.shape}"
        )
    beta = np.zeros(st.keep.shape[0])
    beta[st.keep] = beta_std / st.column_scales[st.keep]
    intercept = st.response_mean - float(beta @ st.column_means)
    return beta, intercept
