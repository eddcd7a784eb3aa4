"""Estimation, prediction and support-recovery metrics."""
from __future__ import annotations

import math

import numpy as np

from .sim import ar1_quadratic_form


def rmse(beta_hat, beta) -> float:
    """Relative squared estimation error ||beta_hat - beta||^2 / ||beta||^2."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta = np.asarray(beta, dtype=float)
    denom = float(np.sum(beta ** 2))
    if denom == 0.0:
        raise ValueError("RMSE undefined for a zero true coefficient vector")
    return float(np.sum((beta_hat - beta) ** 2)) / denom


def rte(beta_hat, beta, rho: float, sigma2: float) -> float:
    """Relative test error ((b - beta)' Sigma (b - beta) + sigma2) / sigma2."""
    diff = np.asarray(beta_hat, dtype=float) - np.asarray(beta, dtype=float)
    return (ar1_quadratic_form(diff, rho) + sigma2) / sigma2


def pve(beta_hat, beta, rho: float, sigma2: float) -> float:
    """Proportion of variance explained on an independent test draw."""
    diff = np.asarray(beta_hat, dtype=float) - np.asarray(beta, dtype=float)
    signal = ar1_quadratic_form(np.asarray(beta, dtype=float), rho)
    return 1.0 - (ar1_quadratic_form(diff, rho) + sigma2) / (signal + sigma2)


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and xs[j + 1] == xs[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auroc(scores, truth) -> float:
    """Area under the ROC curve (Mann-Whitney form, ties count one half)."""
    scores = np.asarray(scores, dtype=float).ravel()
    truth = np.asarray(truth, dtype=bool).ravel()
    if scores.shape != truth.shape:
        raise ValueError("scores and truth differ in length")
    n_pos = int(truth.sum())
    n_neg = truth.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both classes present")
    ranks = _average_ranks(scores)
    return float((ranks[truth].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def confusion(est_support, true_support, p: int) -> tuple[int, int, int, int]:
    est = np.zeros(p, dtype=bool)
    tru = np.zeros(p, dtype=bool)
    est[list(est_support)] = True
    tru[list(true_support)] = True
    tp = int(np.sum(est & tru))
    fp = int(np.sum(est & ~tru))
    fn = int(np.sum(~est & tru))
    tn = int(np.sum(~est & ~tru))
    return tp, tn, fp, fn


def mcc(est_support, true_support, p: int) -> float:
    """Matthews correlation coefficient; 0 when any marginal count is zero."""
    tp, tn, fp, fn = confusion(est_support, true_support, p)
    denom = (tp + fp) * (tp + fn) * (tn + fn) * (tn + fp)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)
