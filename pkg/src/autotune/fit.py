"""Autotune Lasso driver.

The penalty is lambda = lambda0 * sigma2. Each outer iteration runs a single
coordinate sweep at the current lambda (visiting predictors in ranking order)
and, while the sigma flag is set, re-estimates sigma2 with sequential F-tests.
The flag clears as soon as the new F-test support is contained in the
previous one; from then on lambda is frozen and sweeps continue until the
relative l1 change of beta falls below ``cfg.tol``. A final polish at the
frozen lambda brings the solution to KKT accuracy.
"""
from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from . import _kernels
from .lasso import column_sq_norms, cd_fixed_lambda, kkt_violation, relative_change
from .model import (
    AutotuneFit,
    Dataset,
    DegenerateResponseError,
    FitConfig,
    Standardization,
    destandardize,
    identity_standardization,
    standardize,
)
from .sigma import r2_curves, rank_predictors, sequential_gs_ftest

log = logging.getLogger(__name__)

TRACE_RTOL = 1e-12
POLISH_TOL = 1e-9


def initial_penalty(data: Dataset) -> tuple[float, float]:
    """(lambda0, initial sigma2) with lambda0 * Var(Y) = ||X'Y / n||_inf / 2."""
    var_y = float(np.var(data.Y, ddof=1))
    if var_y <= 0:
        raise DegenerateResponseError("response has zero variance")
    lambda0 = float(np.max(np.abs(data.X.T @ data.Y)) / (2 * data.n)) / var_y
    return lambda0, var_y


def active_set_select(data: Dataset, r, beta, ranking, support, lam: float):
    """Screen predictors by the KKT inner product.

    Keeps j if it is in ``support`` or |<X_j, r>/n| >= lam; every other
    coefficient is zeroed and its contribution folded back into ``r``.
    Returns (r, beta, ranking) where ranking lists the support first and then
    the retained predictors in their previous rank order.
    """
    r = np.array(r, dtype=float)
    beta = np.array(beta, dtype=float)
    n = data.n
    support = [int(j) for j in support]
    in_support = set(support)
    kept = list(support)
    for j in np.asarray(ranking, dtype=np.intp):
        j = int(j)
        if j in in_support:
            continue
        xj = data.X[:, j]
        if abs(float(xj @ r)) / n >= lam:
            kept.append(j)
        else:
            if beta[j] != 0.0:
                r += xj * beta[j]
                beta[j] = 0.0
    return r, beta, np.array(kept, dtype=np.intp)


def _fit_standardized(data: Dataset, cfg: FitConfig, active: bool) -> dict:
    X, n, p = data.X, data.n, data.p
    lambda0, sigma2 = initial_penalty(data)
    colsq = column_sq_norms(X)
    cap = cfg.support_cap(n, p)

    beta = np.zeros(p)
    r = np.array(data.Y, dtype=float)
    ranking = np.arange(p, dtype=np.intp)
    support: tuple = ()
    est = None
    flag = True
    saturated = False
    screened = False
    trace = []
    sweeps = 0
    converged = False

    while sweeps < cfg.max_sweeps:
        lam = lambda0 * sigma2
        if not trace or abs(lam - trace[-1]) > TRACE_RTOL * abs(trace[-1]):
            trace.append(lam)
        old_support = support
        beta_old = beta.copy()
        _kernels.cd_sweep(X, r, beta, ranking, lam, colsq)
        sweeps += 1

        sigma_moved = False
        if flag:
            summary = rank_predictors(data, r, beta, cfg.ranking_norm)
            new_est = sequential_gs_ftest(data, summary.ranking, cfg.alpha, cap)
            if new_est.saturated:
                # keep the last positive sigma2 and freeze lambda
                saturated = True
                flag = False
                log.warning("sigma update saturated; freezing lambda at %g", lam)
            else:
                sigma_moved = abs(new_est.sigma2 - sigma2) > TRACE_RTOL * sigma2
                sigma2 = new_est.sigma2
                ranking = summary.ranking
                if set(new_est.support_set) <= set(old_support):
                    flag = False
                    if active and not screened:
                        r, beta, ranking = active_set_select(
                            data, r, beta, ranking, new_est.support_set, lambda0 * sigma2)
                        screened = True
            support = new_est.support_set
            est = new_est
        elif active and not screened:
            r, beta, ranking = active_set_select(data, r, beta, ranking, support, lam)
            screened = True

        err = relative_change(beta, beta_old)
        if err < cfg.tol and not (flag and sigma_moved):
            converged = True
            break
        r = np.ascontiguousarray(r)

    lam = lambda0 * sigma2
    if not trace or abs(lam - trace[-1]) > TRACE_RTOL * abs(trace[-1]):
        trace.append(lam)

    polish_order = ranking
    if active:
        # screened-out predictors were never revisited; the polish runs over
        # the full set so the final KKT conditions hold for every predictor
        rest = np.setdiff1d(np.arange(p), ranking, assume_unique=False)
        polish_order = np.concatenate([ranking, rest]).astype(np.intp)
    budget = max(cfg.max_sweeps - sweeps, 1) + 10000
    polished = cd_fixed_lambda(data, lam, beta_init=beta, order=polish_order,
                               tol=POLISH_TOL, max_sweeps=budget,
                               lam_scale=lam)
    sweeps += polished.sweeps
    beta = polished.beta
    converged = converged and polished.converged

    if est is None:
        est = sequential_gs_ftest(data, ranking, cfg.alpha, cap)
    return dict(
        beta=beta,
        residuals=polished.residuals,
        sigma2=sigma2,
        lambda0=lambda0,
        lam=lam,
        support=tuple(est.support_set),
        ranking=np.asarray(ranking if not active else polish_order, dtype=np.intp),
        est=est,
        trace=tuple(trace),
        sweeps=sweeps,
        converged=converged,
        saturated=saturated,
        kkt=kkt_violation(X, polished.residuals, beta, lam),
    )


def _to_original(res: dict, data_std: Dataset, st: Standardization) -> AutotuneFit:
    keep_idx = st.retained
    beta, intercept = destandardize(res["beta"], st)
    support = tuple(int(keep_idx[j]) for j in res["support"])
    ranking = np.concatenate([keep_idx[res["ranking"]], st.degenerate]).astype(np.intp)
    yy = float(data_std.Y @ data_std.Y)
    cum, adj = r2_curves(res["est"], yy, data_std.n)
    return AutotuneFit(
        beta=beta,
        intercept=intercept,
        sigma2=res["sigma2"],
        lambda_=res["lam"],
        lambda0=res["lambda0"],
        support_set=support,
        ranking=ranking,
        lambda_trace=res["trace"],
        r2_curve={"cumulative": cum, "adjusted": adj},
        sweeps=res["sweeps"],
        converged=res["converged"],
        saturated=res["saturated"],
        beta_std=res["beta"],
        standardization=st,
        info={"kkt_violation": res["kkt"], "rss_seq": res["est"].rss_seq},
    )


def _prepare(data: Dataset, cfg: FitConfig):
    if cfg.standardize:
        return standardize(data)
    return data, identity_standardization(data.p)


def autotune_fit(data: Dataset, cfg: Optional[FitConfig] = None) -> AutotuneFit:
    """Fit the Lasso with a data-driven penalty lambda = lambda0 * sigma2."""
    cfg = cfg or FitConfig()
    if cfg.active_set:
        return autotune_fit_active(data, cfg)
    data_std, st = _prepare(data, cfg)
    res = _fit_standardized(data_std, cfg, active=False)
    return _to_original(res, data_std, st)


def autotune_fit_active(data: Dataset, cfg: Optional[FitConfig] = None) -> AutotuneFit:
    """Autotune with one active-set screening pass once sigma has settled."""
    cfg = cfg or FitConfig(active_set=True)
    data_std, st = _prepare(data, cfg)
    res = _fit_standardized(data_std, cfg, active=True)
    return _to_original(res, data_std, st)
