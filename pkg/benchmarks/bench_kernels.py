"""Compare the compiled and pure-Python coordinate-descent kernels.

Times one full sweep on a dense design and one complete autotune fit per
backend, and checks that both backends return the same coefficients.

    python3 benchmarks/bench_kernels.py [--n 80] [--p 750] [--reps 5]
"""
import argparse
import timeit

import numpy as np

from autotune import _kernels
from autotune.fit import autotune_fit
from autotune.lasso import column_sq_norms
from autotune.model import standardize
from autotune.sim import RegSimSpec, simulate_regression


def time_sweep(backend, X, y, lam, reps):
    kernel = _kernels.get_backend(backend).cd_sweep
    colsq = column_sq_norms(X)
    order = np.arange(X.shape[1], dtype=np.intp)

    def run():
        r = y.copy()
        beta = np.zeros(X.shape[1])
        kernel(X, r, beta, order, lam, colsq)

    return min(timeit.repeat(run, number=1, repeat=reps))


def time_fit(backend, data, reps):
    _kernels.set_backend(backend)
    fit = autotune_fit(data)
    best = min(timeit.repeat(lambda: autotune_fit(data), number=1, repeat=reps))
    return best, fit


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=80)
    ap.add_argument("--p", type=int, default=750)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    sim = simulate_regression(RegSimSpec(n=args.n, p=args.p, seed=args.seed))
    data, _ = standardize(sim.data)
    lam = 0.5 * float(np.max(np.abs(data.X.T @ data.Y))) / data.n
    backends = _kernels.available_backends()
    original = _kernels.BACKEND
    print(f"n={args.n} p={args.p} backends={backends}")
    print(f"{'backend':<8} {'sweep_ms':>10} {'fit_ms':>10}")
    fits = {}
    try:
        for b in backends:
            sweep = time_sweep(b, data.X, np.array(data.Y), lam, args.reps)
            fit_t, fits[b] = time_fit(b, sim.data, args.reps)
            print(f"{b:<8} {1e3 * sweep:>10.3f} {1e3 * fit_t:>10.3f}")
    finally:
        _kernels.set_backend(original)
    if len(fits) == 2:
        diff = float(np.max(np.abs(fits["cython"].beta - fits["python"].beta)))
        print(f"max |beta_cython - beta_python| = {diff:.3e}")


if __name__ == "__main__":
    main()
