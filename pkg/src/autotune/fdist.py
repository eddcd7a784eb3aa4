"""F-distribution CDF and upper quantiles via the regularized incomplete beta."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_EPS = 1e-16
_TINY = 1e-300
_MAXIT = 10000


@dataclass(frozen=True)
class FParams:
    d1: int
    d2: int

    def __post_init__(self):
        if self.d1 < 1 or self.d2 < 1:
            raise ValueError("degrees of freedom must be >= 1")


def _betacf(x: float, a: float, b: float) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"continued fraction failed to converge (x={x}, a={a}, b={b})")


def _log_front(x: float, a: float, b: float) -> float:
    return (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + a * math.log(x) + b * math.log1p(-x))


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(_log_front(x, a, b)) * _betacf(x, a, b) / a
    return 1.0 - math.exp(_log_front(x, a, b)) * _betacf(1.0 - x, b, a) / b


def f_cdf(x: float, params: FParams) -> float:
    if x < 0:
        raise ValueError("x must be non-negative")
    d1, d2 = params.d1, params.d2
    return reg_inc_beta(d1 * x / (d1 * x + d2), d1 / 2.0, d2 / 2.0)


def f_sf(x: float, params: FParams) -> float:
    """Upper tail P(F > x), evaluated directly for accuracy far in the tail."""
    if x < 0:
        raise ValueError("x must be non-negative")
    d1, d2 = params.d1, params.d2
    return reg_inc_beta(d2 / (d2 + d1 * x), d2 / 2.0, d1 / 2.0)


@lru_cache(maxsize=4096)
def _upper_quantile(alpha: float, d1: int, d2: int) -> float:
    # Bisection on w = d2 / (d2 + d1 x) in (0, 1): the upper tail I_w(d2/2, d1/2)
    # is increasing in w, and w keeps full relative precision as x grows.
    a, b = d2 / 2.0, d1 / 2.0
    lo, hi = 0.0, 1.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if reg_inc_beta(mid, a, b) < alpha:
            lo = mid
        else:
            hi = mid
    else:
        raise ArithmeticError("quantile bisection did not terminate")
    w = 0.5 * (lo + hi)
    return d2 * (1.0 - w) / (d1 * w)


def f_quantile(alpha: float, params: FParams) -> float:
    """Upper-alpha critical value: the x with f_cdf(x) = 1 - alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return _upper_quantile(float(alpha), int(params.d1), int(params.d2))
