import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autotune.fdist import FParams, f_quantile
from autotune.model import Dataset, standardize
from autotune.sigma import (
    _GramSchmidt,
    nested_rss,
    partial_residual,
    r2_curves,
    rank_predictors,
    sequential_gs_ftest,
)
from autotune.sim import RegSimSpec, simulate_regression

from conftest import random_dataset


def ols_rss(X, y):
    if X.shape[1] == 0:
        return float(y @ y)
    coef = np.linalg.lstsq(X, y, rcond=None)[0]
    r = y - X @ coef
    return float(r @ r)


def test_partial_residual_examples():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((10, 4))
    beta = np.array([0.0, 2.0, 0.0, 0.0])
    y = rng.standard_normal(10)
    r = y - X @ beta
    np.testing.assert_array_equal(partial_residual(r, X[:, 0], 0.0), r)
    np.testing.assert_allclose(partial_residual(r, X[:, 1], 2.0), y, atol=1e-12)
    beta = rng.standard_normal(4)
    r = y - X @ beta
    direct = y - X[:, [0, 2, 3]] @ beta[[0, 2, 3]]
    np.testing.assert_allclose(partial_residual(r, X[:, 1], beta[1]), direct, atol=1e-12)


def test_zero_beta_gives_identity_ranking(small_data):
    s = rank_predictors(small_data, small_data.Y, np.zeros(small_data.p))
    assert np.all(s.dispersion == s.dispersion[0])
    np.testing.assert_array_equal(s.ranking, np.arange(small_data.p))


def test_large_orthogonal_coefficient_ranks_first():
    rng = np.random.default_rng(2)
    n = 50
    X = rng.standard_normal((n, 6))
    X -= X.mean(axis=0)
    r = rng.standard_normal(n)
    r -= r.mean()
    x1 = X[:, 3] - (X[:, 3] @ r) / (r @ r) * r
    X[:, 3] = x1 * np.sqrt(n / (x1 @ x1))
    beta = np.zeros(6)
    beta[3] = 5.0
    s = rank_predictors(Dataset(X, r + X @ beta), r, beta)
    assert s.ranking[0] == 3


def test_ties_break_by_column_index():
    n = 20
    rng = np.random.default_rng(1)
    X = rng.standard_normal((n, 5))
    r = rng.standard_normal(n)
    beta = np.array([0.0, 0.0, 3.0, 0.0, 0.0])
    s = rank_predictors(Dataset(X, r + X @ beta), r, beta)
    rest = [j for j in s.ranking if j != 2]
    assert rest == sorted(rest)


def test_dispersion_definitions():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 3))
    beta = np.array([1.0, 0.0, -0.5])
    r = rng.standard_normal(30)
    l2 = rank_predictors(Dataset(X, r + X @ beta), r, beta, "dispersion-l2")
    l1 = rank_predictors(Dataset(X, r + X @ beta), r, beta, "dispersion-l1")
    for j in range(3):
        pr = r + X[:, j] * beta[j]
        assert l2.dispersion[j] == pytest.approx(np.std(pr, ddof=1), rel=1e-12)
        assert l1.dispersion[j] == pytest.approx(np.mean(np.abs(pr)), rel=1e-12)
    with pytest.raises(ValueError):
        rank_predictors(Dataset(X, r), r, beta, "mad")


def _first_sweep_rankings(seed):
    from autotune import _kernels
    from autotune.fit import initial_penalty
    from autotune.lasso import column_sq_norms

    sim = simulate_regression(RegSimSpec(n=80, p=750, s=5, snr=1.0, rho=0.0, seed=seed))
    data, _ = standardize(sim.data)
    lambda0, var_y = initial_penalty(data)
    beta = np.zeros(data.p)
    r = np.array(data.Y)
    _kernels.cd_sweep(data.X, r, beta, np.arange(data.p, dtype=np.intp),
                      lambda0 * var_y, column_sq_norms(data.X))
    a = rank_predictors(data, r, beta, "dispersion-l2").ranking
    b = rank_predictors(data, r, beta, "dispersion-l1").ranking
    return a, b, set(np.flatnonzero(sim.beta).tolist())


@pytest.mark.xfail(strict=True, reason="near-tied noise predictors fill the top slots "
                   "at SNR 1 and the two norms order them differently")
def test_l1_and_l2_top_sets_identical():
    agree = 0
    for seed in range(100):
        a, b, _ = _first_sweep_rankings(seed)
        agree += set(a[:5]) == set(b[:5])
    assert agree >= 95


def test_l1_and_l2_both_rank_signal_predictors_high():
    ok = 0
    for seed in range(100):
        a, b, truth = _first_sweep_rankings(seed)
        ok += (set(a[:5]) & truth) <= set(b[:10]) and (set(b[:5]) & truth) <= set(a[:10])
    assert ok >= 95


def test_orthogonal_response_gives_empty_support():
    rng = np.random.default_rng(4)
    n = 30
    X = rng.standard_normal((n, 3))
    y = rng.standard_normal(n)
    y -= (y @ X[:, 0]) / (X[:, 0] @ X[:, 0]) * X[:, 0]
    est = sequential_gs_ftest(Dataset(X, y), [0, 1, 2], 0.01, 10)
    assert est.support_set == ()
    assert est.f_stats[0] == pytest.approx(0.0, abs=1e-20)
    assert est.sigma2 == pytest.approx(float(y @ y) / n)
    assert est.k0 == 1


def test_single_strong_predictor():
    rng = np.random.default_rng(5)
    n = 40
    x = rng.standard_normal(n)
    X = np.column_stack([x, rng.standard_normal((n, 3))])
    y = 5 * x + 1e-3 * rng.standard_normal(n)
    X[:, 1:] -= np.outer(x, x @ X[:, 1:]) / (x @ x)
    Y = y.copy()
    # every other column is exactly orthogonal to x, so the only admitted predictor is x
    est = sequential_gs_ftest(Dataset(X, Y), [0, 1, 2, 3], 1e-9, 10)
    b = (x @ Y) / (x @ x)
    rss = float(np.sum((Y - b * x) ** 2))
    assert est.support_set[0] == 0
    if est.support_set == (0,):
        assert est.sigma2 == pytest.approx(rss / (n - 1), rel=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_nested_rss_matches_normal_equations(seed):
    data, _ = random_dataset(seed, n=40, p=15, s=5, noise=0.3)
    rank = np.random.default_rng(seed).permutation(15)
    est = sequential_gs_ftest(data, rank, 0.2, 20)
    for k in range(len(est.support_set) + 1):
        cols = list(rank[:k])
        assert est.rss_seq[k] == pytest.approx(ols_rss(data.X[:, cols], data.Y), abs=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_f_statistics_match_two_regression_formula(seed):
    data, _ = random_dataset(seed, n=40, p=15, s=5, noise=0.3)
    rank = np.arange(15)
    est = sequential_gs_ftest(data, rank, 0.2, 20)
    n = data.n
    for i, f in enumerate(est.f_stats, start=1):
        small = ols_rss(data.X[:, rank[: i - 1]], data.Y)
        big = ols_rss(data.X[:, rank[:i]], data.Y)
        expect = (small - big) / (big / (n - i))
        assert f == pytest.approx(expect, rel=1e-8, abs=1e-8)
    last = len(est.f_stats)
    if len(est.support_set) < last:
        assert est.f_stats[-1] <= f_quantile(0.2, FParams(1, n - last))


def test_support_respects_cap():
    data, _ = random_dataset(7, n=30, p=20, s=10, noise=0.01)
    est = sequential_gs_ftest(data, np.arange(20), 0.5, 4)
    assert len(est.support_set) == 4


def test_saturation_guard():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((6, 10))
    y = 2.0 * X[:, 0]
    est = sequential_gs_ftest(Dataset(X, y), np.arange(10), 0.01, 4)
    assert est.saturated
    assert est.support_set == (0,)
    assert est.sigma2 == pytest.approx(est.rss_seq[-1] / (6 - 1))
    assert est.sigma2 < 1e-20


def test_collinear_predictor_is_skipped():
    rng = np.random.default_rng(9)
    x = rng.standard_normal(30)
    z = rng.standard_normal(30)
    X = np.column_stack([x, 2 * x, z])
    y = 3 * x + 2 * z + 0.1 * rng.standard_normal(30)
    est = sequential_gs_ftest(Dataset(X, y), [0, 1, 2], 0.01, 10)
    assert est.skipped == (1,)
    assert est.support_set == (0, 2)


def test_gram_schmidt_basis_is_orthonormal():
    rng = np.random.default_rng(10)
    n = 50
    gs = _GramSchmidt(n, 20)
    X = rng.standard_normal((n, 20)) + 3 * rng.standard_normal((n, 1))
    for j in range(20):
        u = gs.residual(X[:, j])
        gs.append(u, np.linalg.norm(u))
    G = gs.Q.T @ gs.Q
    np.testing.assert_allclose(G, np.eye(20), atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 100))
def test_scale_equivariance(seed, c):
    data, _ = random_dataset(seed, n=40, p=12, s=3)
    rank = np.arange(12)
    a = sequential_gs_ftest(data, rank, 0.05, 20)
    b = sequential_gs_ftest(Dataset(data.X, c * data.Y), rank, 0.05, 20)
    assert a.support_set == b.support_set
    assert b.sigma2 == pytest.approx(c * c * a.sigma2, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_rss_monotone_and_r2_nondecreasing(seed):
    data, _ = random_dataset(seed, n=30, p=25, s=4)
    est = sequential_gs_ftest(data, np.arange(25), 0.3, 28)
    assert np.all(np.diff(est.rss_seq) <= 1e-12)
    assert np.all(est.rss_seq > 0)
    cum, adj = r2_curves(est, float(data.Y @ data.Y), data.n)
    assert cum[0] == 0.0
    assert np.all(np.diff(cum) >= -1e-12)
    assert est.sigma2 >= 0


def test_r2_curve_edge_cases():
    from autotune.sigma import SigmaEstimate

    est = SigmaEstimate(sigma2=0.0, support_set=(0, 1), k0=3, rss_seq=np.array([4.0, 1.0, 0.0]))
    cum, adj = r2_curves(est, 4.0, 3)
    np.testing.assert_allclose(cum, [0.0, 0.75, 1.0])
    assert adj.size == 2  # n - k - 1 hits zero at k = 2


def test_nested_rss_runs_to_saturation():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((8, 20))
    y = rng.standard_normal(8)
    rss, used = nested_rss(Dataset(X, y), np.arange(20))
    assert used.size == 7
    assert rss[-1] == pytest.approx(ols_rss(X[:, :7], y), abs=1e-10)
