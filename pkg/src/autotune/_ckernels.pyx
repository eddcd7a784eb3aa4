# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled coordinate-descent sweep."""

from libc.math cimport fabs


cdef inline double _soft(double a, double lam) nogil:
    if a > lam:
        return a - lam
    if a < -lam:
        return a + lam
    return 0.0


def cd_sweep(const double[::1, :] X, double[::1] r, double[::1] beta,
             const Py_ssize_t[::1] order, double lam, const double[::1] colsq):
    """One pass of coordinate updates over ``order``; ``r`` and ``beta`` are
    updated in place. Returns the l1 norm of the coefficient change."""
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t m = order.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double c, old, new, z, delta, total = 0.0
    cdef double inv_n = 1.0 / n
    with nogil:
        for k in range(m):
            j = order[k]
            c = colsq[j]
            if c == 0.0:
                continue
            old = beta[j]
            z = 0.0
            for i in range(n):
                z = z + X[i, j] * r[i]
            z = z * inv_n + old * c
            new = _soft(z, lam) / c
            delta = new - old
            if delta != 0.0:
                for i in range(n):
                    r[i] = r[i] - delta * X[i, j]
                beta[j] = new
                total = total + fabs(delta)
    return total
