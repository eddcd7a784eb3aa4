"""Sparsity diagnostics: predictors ranked by partial-residual dispersion at
the final fit, with the cumulative and adjusted R^2 of the nested
least-squares models built along that ranking."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fit import autotune_fit
from .model import AutotuneFit, Dataset, FitConfig, standardize
from .sigma import nested_rss, rank_predictors


@dataclass(frozen=True)
class DiagnosticRow:
    rank: int
    predictor: int
    dispersion: float
    in_support: bool
    cum_r2: Optional[float]
    adj_r2: Optional[float]


def diagnostics_table(data: Dataset, fit: Optional[AutotuneFit] = None,
                      cfg: Optional[FitConfig] = None, max_rank: Optional[int] = None):
    """One row per retained predictor, in rank order (1-based ranks).

    R^2 at rank k counts every predictor up to rank k; a collinear predictor
    adds nothing. Beyond the last nested model (n - 1 columns or
    ``max_rank``) both R^2 fields are None, as is the adjusted value once
    n - k - 1 <= 0.
    """
    cfg = cfg or FitConfig()
    if fit is None:
        fit = autotune_fit(data, cfg)
    if cfg.standardize:
        data_std, st = standardize(data)
    else:
        data_std, st = data, None
    keep = st.retained if st is not None else np.arange(data.p)
    beta = fit.beta_std
    r = data_std.Y - data_std.X @ beta
    summary = rank_predictors(data_std, r, beta, cfg.ranking_norm)
    rss, used = nested_rss(data_std, summary.ranking, max_rank)
    tss = rss[0]
    n = data_std.n
    step_of = {int(j): k + 1 for k, j in enumerate(used)}
    support = set(fit.support_set)
    rows = []
    k_used = 0
    stop = int(np.flatnonzero(summary.ranking == used[-1])[0]) if used.size else -1
    for pos, j in enumerate(summary.ranking):
        j = int(j)
        if j in step_of:
            k_used = step_of[j]
        cum = adj = None
        if pos <= stop:
            cum = 1.0 - rss[k_used] / tss if tss > 0 else 1.0
            if n - k_used - 1 > 0:
                adj = 1.0 - (1.0 - cum) * (n - 1) / (n - k_used - 1)
        orig = int(keep[j])
        rows.append(DiagnosticRow(rank=pos + 1, predictor=orig,
                                  dispersion=float(summary.dispersion[j]),
                                  in_support=orig in support, cum_r2=cum, adj_r2=adj))
    return rows
