import numpy as np
import pytest

from autotune import FitConfig, SeriesData, forecast_one_step, var_autotune_fit
from autotune.metrics import auroc
from autotune.sim import VarSimSpec, simulate_var
from autotune.var import VarFit, build_var_design


def test_design_lag_one():
    Z = np.arange(8.0).reshape(4, 2)
    d = build_var_design(SeriesData(Z, d=1))
    np.testing.assert_array_equal(d.Y, Z[1:])
    np.testing.assert_array_equal(d.X, Z[:3])
    assert d.n == 3


def test_design_lag_two_scalar_series():
    d = build_var_design(SeriesData(np.arange(1.0, 6.0), d=2))
    np.testing.assert_array_equal(d.Y.ravel(), [3, 4, 5])
    np.testing.assert_array_equal(d.X, [[2, 1], [3, 2], [4, 3]])


def test_design_shift_and_lossless():
    Z = np.random.default_rng(0).standard_normal((12, 3))
    full = build_var_design(SeriesData(Z, d=2))
    shifted = build_var_design(SeriesData(Z[1:], d=2))
    np.testing.assert_array_equal(shifted.Y, full.Y[1:])
    np.testing.assert_array_equal(shifted.X, full.X[1:])
    rebuilt = np.vstack([full.X[0, 3:], full.X[0, :3], full.Y])
    np.testing.assert_array_equal(rebuilt, Z)


def test_series_validation():
    with pytest.raises(ValueError):
        SeriesData(np.zeros((3, 2)), d=2)
    with pytest.raises(ValueError):
        SeriesData(np.zeros((5, 2)), d=0)
    with pytest.raises(ValueError):
        SeriesData(np.array([[1.0, np.nan]] * 5))
    with pytest.raises(ValueError):
        var_autotune_fit(SeriesData(np.column_stack([np.arange(10.0), np.ones(10)])))


def _noise_fits():
    for seed in range(20):
        Z = np.random.default_rng(seed).standard_normal((200, 10))
        yield var_autotune_fit(SeriesData(Z), FitConfig(alpha=0.01))


@pytest.mark.xfail(strict=True, reason="with an empty F-test support the penalty sits near "
                   "half of lambda_max, so weakly correlated lags still enter the Lasso")
def test_pure_noise_gives_sparse_phi():
    assert np.mean([np.mean(f.Phi != 0) for f in _noise_fits()]) < 0.05


def test_pure_noise_f_test_admits_few_lags():
    frac = [np.mean([len(c.support_set) for c in f.per_column]) / f.p for f in _noise_fits()]
    assert np.mean(frac) < 0.05


def test_diagonal_dgp_support_recovery():
    scores = []
    for seed in range(30):
        sim = simulate_var(VarSimSpec(p=10, n=200, dgp="diagonal", snr=(2.5,), seed=seed))
        fit = var_autotune_fit(sim.series)
        scores.append(auroc(np.abs(fit.Phi), sim.phi != 0))
    assert np.mean(scores) >= 0.95


def test_column_scaling_rescales_phi():
    sim = simulate_var(VarSimSpec(p=6, n=150, seed=3))
    c, i = 4.0, 2
    Z = sim.series.values.copy()
    Z[:, i] *= c
    a = var_autotune_fit(sim.series)
    b = var_autotune_fit(SeriesData(Z))
    D = np.ones(6)
    D[i] = c
    np.testing.assert_allclose(b.Phi, a.Phi * D[None, :] / D[:, None], atol=1e-8, rtol=1e-8)
    for fa, fb in zip(a.per_column, b.per_column):
        assert fa.support_set == fb.support_set
    assert b.sigma2[i] == pytest.approx(c * c * a.sigma2[i], rel=1e-8)


def test_jobs_do_not_change_results():
    sim = simulate_var(VarSimSpec(p=8, n=120, dgp="block2x2", seed=1))
    a = var_autotune_fit(sim.series, jobs=1)
    b = var_autotune_fit(sim.series, jobs=4)
    np.testing.assert_array_equal(a.Phi, b.Phi)
    np.testing.assert_array_equal(a.sigma2, b.sigma2)


def test_column_fit_independent_of_other_columns():
    sim = simulate_var(VarSimSpec(p=5, n=120, seed=2))
    fit = var_autotune_fit(sim.series)
    from autotune import Dataset, autotune_fit

    design = build_var_design(sim.series)
    alone = autotune_fit(Dataset(design.X, design.Y[:, 3]))
    np.testing.assert_array_equal(fit.Phi[:, 3], alone.beta)
    np.testing.assert_array_equal(fit.per_column[3].beta, fit.Phi[:, 3])


def _var_fit(Phi, intercepts, d=1):
    p = Phi.shape[1]
    return VarFit(Phi=Phi, intercepts=np.asarray(intercepts, float), sigma2=np.ones(p),
                  lambdas=np.ones(p), per_column=(), d=d)


def test_forecast_examples():
    zero = _var_fit(np.zeros((3, 3)), [1.0, 2.0, 3.0])
    np.testing.assert_array_equal(forecast_one_step(zero, np.ones((1, 3))), [1, 2, 3])
    diag = _var_fit(0.5 * np.eye(3), np.zeros(3))
    np.testing.assert_allclose(forecast_one_step(diag, [[2.0, -4.0, 1.0]]), [1.0, -2.0, 0.5])
    with pytest.raises(ValueError):
        forecast_one_step(diag, np.ones((2, 3)))


def test_forecast_matches_columnwise_dot_products():
    sim = simulate_var(VarSimSpec(p=4, n=100, seed=4))
    Z = sim.series.values
    fit = var_autotune_fit(SeriesData(Z, d=2))
    recent = np.vstack([Z[-1], Z[-2]])
    expect = [fit.per_column[i].predict(np.concatenate([Z[-1], Z[-2]])[None, :])[0]
              for i in range(4)]
    np.testing.assert_allclose(forecast_one_step(fit, recent), expect, atol=1e-12)
    assert len(fit.transition_matrices()) == 2
