import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autotune import _kernels, _pykernels
from autotune.fit import autotune_fit
from autotune.lasso import column_sq_norms

from conftest import random_dataset

needs_cython = pytest.mark.skipif("cython" not in _kernels.available_backends(),
                                  reason="compiled kernel not built")


def test_fallback_always_available():
    assert "python" in _kernels.available_backends()
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


@needs_cython
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 30), st.integers(1, 40),
       st.floats(0.0, 2.0))
def test_backends_agree_on_one_sweep(seed, n, p, lam):
    rng = np.random.default_rng(seed)
    X = np.asfortranarray(rng.standard_normal((n, p)))
    X[:, rng.integers(p)] = 0.0  # zero-norm columns are skipped
    y = rng.standard_normal(n)
    beta0 = rng.standard_normal(p) * (rng.random(p) < 0.3)
    order = rng.permutation(p).astype(np.intp)
    colsq = column_sq_norms(X)
    out = []
    for name in ("cython", "python"):
        beta = beta0.copy()
        r = np.ascontiguousarray(y - X @ beta)
        total = _kernels.get_backend(name).cd_sweep(X, r, beta, order, lam, colsq)
        out.append((beta, r, total))
    np.testing.assert_allclose(out[0][0], out[1][0], atol=1e-12)
    np.testing.assert_allclose(out[0][1], out[1][1], atol=1e-12)
    assert out[0][2] == pytest.approx(out[1][2], abs=1e-12)


def test_sweep_keeps_residual_consistent():
    data, _ = random_dataset(3, n=40, p=15)
    X = np.asfortranarray(data.X)
    beta = np.zeros(15)
    r = np.array(data.Y)
    _pykernels.cd_sweep(X, r, beta, np.arange(15, dtype=np.intp), 0.1, column_sq_norms(X))
    np.testing.assert_allclose(r, data.Y - X @ beta, atol=1e-12)


@needs_cython
def test_full_fit_identical_across_backends():
    data, _ = random_dataset(11, n=60, p=120, s=4, rho=0.35)
    previous = _kernels.set_backend("python")
    try:
        slow = autotune_fit(data)
        _kernels.set_backend("cython")
        fast = autotune_fit(data)
    finally:
        _kernels.set_backend(previous)
    np.testing.assert_allclose(slow.beta, fast.beta, atol=1e-10)
    assert slow.support_set == fast.support_set
    assert slow.lambda_trace == pytest.approx(fast.lambda_trace, rel=1e-12)
