"""Simulation designs for regression and VAR benchmarks.

All simulators are pure functions of their spec: randomness comes from a
``numpy.random.Generator`` (PCG64) seeded with ``spec.seed``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .model import Dataset
from .var import SeriesData


@dataclass(frozen=True)
class RegSimSpec:
    n: int = 80
    p: int = 750
    s: int = 5
    rho: float = 0.35
    snr: float = 2.0
    beta_type: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.s <= self.p:
            raise ValueError("need 0 <= s <= p")
        if not self.snr > 0:
            raise ValueError("snr must be positive")
        if not 0 <= self.rho < 1:
            raise ValueError("rho must lie in [0, 1)")
        if self.beta_type not in (1, 2, 3, 4, 5):
            raise ValueError("beta_type must be 1..5")
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class VarSimSpec:
    p: int = 10
    n: int = 200
    dgp: str = "diagonal"
    snr: Sequence[float] = field(default=(2.5,))
    burn_in: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.dgp not in ("diagonal", "block2x2"):
            raise ValueError("dgp must be 'diagonal' or 'block2x2'")
        if self.dgp == "block2x2" and self.p % 2:
            raise ValueError("block2x2 needs an even p")
        snr = np.atleast_1d(np.asarray(self.snr, dtype=float))
        if snr.size == 1:
            snr = np.full(self.p, snr[0])
        if snr.size != self.p:
            raise ValueError("snr must be a scalar or have length p")
        if np.any(~(snr > 0)):
            raise ValueError("snr must be positive (inf gives noiseless series)")
        object.__setattr__(self, "snr", tuple(float(v) for v in snr))
        if self.n < 3 or self.p < 1 or self.burn_in < 0:
            raise ValueError("invalid VAR dimensions")

    def to_dict(self):
        d = asdict(self)
        d["snr"] = list(self.snr)
        return d


def sparse_positions(p: int, s: int) -> np.ndarray:
    """0-based indices of s points evenly spread over 1..p (rounded)."""
    if s == 0:
        return np.zeros(0, dtype=int)
    return np.round(np.linspace(1, p, s)).astype(int) - 1


def make_beta(beta_type: int, p: int, s: int) -> np.ndarray:
    if not 0 <= s <= p:
        raise ValueError("need 0 <= s <= p")
    beta = np.zeros(p)
    if beta_type == 1:
        beta[sparse_positions(p, s)] = 1.0
    elif beta_type == 2:
        beta[:s] = 1.0
    elif beta_type == 3:
        beta[:s] = np.linspace(10, 0.5, s)
    elif beta_type == 4:
        beta[:s] = 1.0
        beta[s:] = 0.5 ** np.arange(1, p - s + 1)
    elif beta_type == 5:
        beta[sparse_positions(p, s)] = np.linspace(10, 0.5, s)
    else:
        raise ValueError(f"invalid beta type {beta_type!r}")
    return beta


def ar1_quadratic_form(v: np.ndarray, rho: float) -> float:
    """v' Sigma v for Sigma_kl = rho^|k-l|, in O(p).

    With s_k = sum_{l<=k} rho^(k-l) v_l, the form equals 2 v's - v'v.
    """
    v = np.asarray(v, dtype=float)
    if rho == 0:
        return float(v @ v)
    s = np.empty_like(v)
    acc = 0.0
    for k, vk in enumerate(v):
        acc = rho * acc + vk
        s[k] = acc
    return float(2.0 * (v @ s) - v @ v)


def ar1_design(rng: np.random.Generator, n: int, p: int, rho: float) -> np.ndarray:
    z = rng.standard_normal((n, p))
    if rho == 0:
        return z
    X = np.empty_like(z)
    X[:, 0] = z[:, 0]
    c = np.sqrt(1.0 - rho * rho)
    for k in range(1, p):
        X[:, k] = rho * X[:, k - 1] + c * z[:, k]
    return X


@dataclass(frozen=True)
class RegSimulation:
    data: Dataset
    beta: np.ndarray
    sigma2: float
    rho: float
    spec: RegSimSpec

    @property
    def signal_variance(self) -> float:
        return ar1_quadratic_form(self.beta, self.rho)


def simulate_regression(spec: RegSimSpec) -> RegSimulation:
    """Y = X beta + eps with AR(1)-correlated Gaussian rows and
    sigma^2 = beta' Sigma beta / snr."""
    rng = np.random.default_rng(spec.seed)
    X = ar1_design(rng, spec.n, spec.p, spec.rho)
    beta = make_beta(spec.beta_type, spec.p, spec.s)
    sigma2 = ar1_quadratic_form(beta, spec.rho) / spec.snr
    eps = rng.standard_normal(spec.n) * np.sqrt(sigma2)
    Y = X @ beta + eps
    return RegSimulation(Dataset(X, Y), beta, float(sigma2), float(spec.rho), spec)


def var_transition(p: int, dgp: str) -> tuple[np.ndarray, float]:
    """Transition matrix and its noise scale numerator (0.5 or 0.6)."""
    if dgp == "diagonal":
        return 0.5 * np.eye(p), 0.5
    if dgp == "block2x2":
        A = np.zeros((p, p))
        for b in range(0, p, 2):
            A[b:b + 2, b:b + 2] = 0.3
        return A, 0.6
    raise ValueError(f"unknown dgp {dgp!r}")


@dataclass(frozen=True)
class VarSimulation:
    series: SeriesData
    A: np.ndarray
    sigma_eps: np.ndarray
    spec: VarSimSpec

    @property
    def phi(self) -> np.ndarray:
        return self.A.T.copy()


def simulate_var(spec: VarSimSpec) -> VarSimulation:
    """VAR(1) path started at zero; the first ``burn_in`` steps are dropped."""
    rng = np.random.default_rng(spec.seed)
    A, scale = var_transition(spec.p, spec.dgp)
    sig2 = scale ** 2 / np.asarray(spec.snr)
    sd = np.sqrt(sig2)
    total = spec.burn_in + spec.n
    eps = rng.standard_normal((total, spec.p)) * sd
    z = np.zeros(spec.p)
    out = np.empty((total, spec.p))
    for t in range(total):
        z = A @ z + eps[t]
        out[t] = z
    return VarSimulation(SeriesData(out[spec.burn_in:], d=1), A, sig2, spec)


def companion_spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A))))
