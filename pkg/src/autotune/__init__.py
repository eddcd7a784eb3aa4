"""Autotune Lasso: a Lasso that sets its own penalty from a noise-variance
estimate, for regression and columnwise VAR models."""

__version__ = "0.1.0"

from .fit import autotune_fit, autotune_fit_active
from .model import (
    AutotuneFit,
    Dataset,
    DegenerateResponseError,
    FitConfig,
    LassoFit,
    UnusableDesignError,
)
from .lasso import cd_fixed_lambda, kkt_check, lasso_path, make_lambda_grid
from .var import SeriesData, VarFit, forecast_one_step, var_autotune_fit

__all__ = [
    "AutotuneFit",
    "Dataset",
    "DegenerateResponseError",
    "FitConfig",
    "LassoFit",
    "SeriesData",
    "UnusableDesignError",
    "VarFit",
    "autotune_fit",
    "autotune_fit_active",
    "cd_fixed_lambda",
    "forecast_one_step",
    "kkt_check",
    "lasso_path",
    "make_lambda_grid",
    "var_autotune_fit",
]
