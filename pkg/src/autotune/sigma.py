"""Noise-variance update: rank predictors by the dispersion of their partial
residuals, then grow nested least-squares models along that ranking with
incremental Gram-Schmidt and stop at the first non-significant F-test."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fdist import FParams, f_quantile
from .model import Dataset

SATURATION_RTOL = 1e-12
DEGENERATE_RTOL = 1e-10


@dataclass(frozen=True)
class PartialResidualSummary:
    dispersion: np.ndarray
    ranking: np.ndarray


@dataclass(frozen=True)
class SigmaEstimate:
    sigma2: float
    support_set: tuple
    k0: int
    rss_seq: np.ndarray
    r2_seq: dict = field(default_factory=dict)
    f_stats: np.ndarray = None
    saturated: bool = False
    skipped: tuple = ()


def partial_residual(r, x_j, beta_j):
    return np.asarray(r, dtype=float) + np.asarray(x_j, dtype=float) * beta_j


def _sorted_desc(dispersion: np.ndarray) -> np.ndarray:
    # descending dispersion, ties by ascending column index
    idx = np.arange(dispersion.size)
    return np.lexsort((idx, -dispersion)).astype(np.intp)


def rank_predictors(data: Dataset, r, beta, norm: str = "dispersion-l2") -> PartialResidualSummary:
    """Dispersion of r + X_j beta_j for every j, and the induced ranking.

    Predictors with beta_j = 0 share the dispersion of r itself, so only the
    nonzero coefficients need their partial residuals formed.
    """
    r = np.asarray(r, dtype=float)
    beta = np.asarray(beta, dtype=float)
    nz = np.flatnonzero(beta)
    if norm == "dispersion-l2":
        base = float(np.std(r, ddof=1))
        disp = np.full(data.p, base)
        if nz.size:
            pr = r[:, None] + data.X[:, nz] * beta[nz]
            disp[nz] = np.std(pr, axis=0, ddof=1)
    elif norm == "dispersion-l1":
        base = float(np.mean(np.abs(r)))
        disp = np.full(data.p, base)
        if nz.size:
            pr = r[:, None] + data.X[:, nz] * beta[nz]
            disp[nz] = np.mean(np.abs(pr), axis=0)
    else:
        raise ValueError(f"unknown ranking norm {norm!r}")
    return PartialResidualSummary(dispersion=disp, ranking=_sorted_desc(disp))


class _GramSchmidt:
    """Orthonormal basis grown one column at a time (classical GS, applied twice)."""

    def __init__(self, n: int, capacity: int):
        self.Q = np.empty((n, max(capacity, 1)))
        self.k = 0

    def residual(self, x: np.ndarray) -> np.ndarray:
        u = np.array(x, dtype=float)
        if self.k:
            Q = self.Q[:, : self.k]
            u -= Q @ (Q.T @ u)
            u -= Q @ (Q.T @ u)
        return u

    def append(self, u: np.ndarray, norm: float):
        self.Q[:, self.k] = u / norm
        self.k += 1


def _r2(rss: np.ndarray, tss: float, n: int):
    if tss <= 0:
        cum = np.ones_like(rss)
    else:
        cum = 1.0 - rss / tss
    k = np.arange(rss.size)
    ok = (n - k - 1) > 0
    adj = 1.0 - (1.0 - cum[ok]) * (n - 1) / (n - k[ok] - 1)
    return cum, adj


def sequential_gs_ftest(data: Dataset, ranking, alpha: float, max_support: int) -> SigmaEstimate:
    """Sequential F-tests along ``ranking``.

    Returns the noise-variance estimate ||Y_temp||^2 / (n - |support|), where
    Y_temp is the response deflated by every accepted predictor.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    X, n = data.X, data.n
    ytemp = np.array(data.Y, dtype=float)
    yy = float(ytemp @ ytemp)
    cap = max(0, min(int(max_support), data.p, n - 2))
    gs = _GramSchmidt(n, cap)
    support, skipped, rss_seq, fstats = [], [], [yy], []
    saturated = False
    rss_prev = yy
    if cap > 0 and yy > 0:
        for j in np.asarray(ranking, dtype=np.intp):
            u = gs.residual(X[:, j])
            uu = float(u @ u)
            if uu < DEGENERATE_RTOL * n:
                skipped.append(int(j))
                continue
            i = len(support) + 1
            unorm = np.sqrt(uu)
            coef = float(ytemp @ u) / unorm
            resid = ytemp - coef * (u / unorm)
            rss = float(resid @ resid)
            if rss < SATURATION_RTOL * yy:
                support.append(int(j))
                rss_seq.append(rss)
                fstats.append(np.inf)
                ytemp = resid
                saturated = True
                break
            fstat = (rss_prev - rss) / (rss / (n - i))
            fstats.append(fstat)
            if fstat <= f_quantile(alpha, FParams(1, n - i)):
                break
            support.append(int(j))
            rss_seq.append(rss)
            ytemp = resid
            rss_prev = rss
            gs.append(u, unorm)
            if len(support) >= cap:
                break
    rss_arr = np.array(rss_seq)
    sigma2 = float(ytemp @ ytemp) / (n - len(support))
    cum, adj = _r2(rss_arr, yy, n)
    return SigmaEstimate(
        sigma2=sigma2,
        support_set=tuple(support),
        k0=1 + len(support),
        rss_seq=rss_arr,
        r2_seq={"cumulative": cum, "adjusted": adj},
        f_stats=np.array(fstats),
        saturated=saturated,
        skipped=tuple(skipped),
    )


def r2_curves(est: SigmaEstimate, y_total_ss: float, n: int):
    """Cumulative and adjusted R^2 of the nested models behind ``est``.

    The adjusted curve stops where n - k - 1 would reach zero.
    """
    return _r2(np.asarray(est.rss_seq, dtype=float), float(y_total_ss), int(n))


def nested_rss(data: Dataset, ranking, max_rank: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """RSS of the nested least-squares fits along ``ranking`` with no stopping
    rule, ending when the fit saturates or ``max_rank`` columns are used.

    Returns (rss sequence starting at ||Y||^2, the predictor added at each step).
    Collinear predictors are skipped.
    """
    X, n = data.X, data.n
    cap = min(data.p, n - 1) if max_rank is None else min(int(max_rank), data.p, n - 1)
    ytemp = np.array(data.Y, dtype=float)
    yy = float(ytemp @ ytemp)
    gs = _GramSchmidt(n, cap)
    rss_seq, used = [yy], []
    for j in np.asarray(ranking, dtype=np.intp):
        if len(used) >= cap or rss_seq[-1] <= SATURATION_RTOL * yy:
            break
        u = gs.residual(X[:, j])
        uu = float(u @ u)
        if uu < DEGENERATE_RTOL * n:
            continue
        unorm = np.sqrt(uu)
        q = u / unorm
        ytemp = ytemp - float(ytemp @ q) * q
        rss_seq.append(float(ytemp @ ytemp))
        used.append(int(j))
        gs.append(u, unorm)
    return np.array(rss_seq), np.array(used, dtype=np.intp)
