"""Pure-Python coordinate-descent sweep (fallback for the compiled kernel)."""
import numpy as np


def cd_sweep(X, r, beta, order, lam, colsq):
    n = X.shape[0]
    total = 0.0
    for j in order:
        c = colsq[j]
        if c == 0.0:
            continue
        xj = X[:, j]
        old = beta[j]
        z = float(np.dot(xj, r)) / n + old * c
        if z > lam:
            new = (z - lam) / c
        elif z < -lam:
            new = (z + lam) / c
        else:
            new = 0.0
        delta = new - old
        if delta != 0.0:
            r -= delta * xj
            beta[j] = new
            total += abs(delta)
    return total
