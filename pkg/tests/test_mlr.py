import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from airdemand.data import Dataset, fit_scaler, make_split, synthesize
from airdemand.errors import DimensionMismatch, RankDeficient, TooFewRows
from airdemand.models.mlr import MlrModel, fit_mlr, ols, predict_mlr


def test_exact_line():
    intercept, slopes, _ = ols(np.array([[1.0], [2.0], [3.0]]), np.array([3.0, 5.0, 7.0]))
    assert intercept == pytest.approx(1.0, abs=1e-12)
    assert slopes[0] == pytest.approx(2.0, abs=1e-12)
    m = MlrModel(intercept, slopes, 1.0)
    np.testing.assert_allclose(m.predict(np.array([[1.0], [2.0], [3.0]])), [3, 5, 7], atol=1e-12)


def test_noiseless_recovery(noiseless):
    ds, truth, plan = noiseless
    m = fit_mlr(ds, plan)
    rel = np.abs(m.coefficients - truth.coefficients) / np.abs(truth.coefficients)
    assert rel.max() < 1e-8
    assert abs(m.intercept - truth.intercept) / abs(truth.intercept) < 1e-8


def test_duplicate_column_rank_deficient(rng):
    X = rng.normal(size=(20, 3))
    X = np.column_stack([X, X[:, 1]])
    with pytest.raises(RankDeficient):
        ols(X, rng.normal(size=20))


def test_too_few_rows(noiseless):
    ds, _, _ = noiseless
    plan = make_split(42, (11 / 42, 31 / 42 - 1e-12, 1e-12))
    with pytest.raises(TooFewRows):
        fit_mlr(ds, plan)


def test_predict_zero_vector_gives_intercept():
    m = MlrModel(4.5, np.array([1.0, -1.0]), 1.0)
    assert predict_mlr(m, np.zeros(2)) == 4.5


def test_predict_hand_dot_product():
    m = MlrModel(2.0, np.array([1.0, -1.0]), 1.0)
    assert predict_mlr(m, np.array([4.0, 4.0])) == 2.0


def test_predict_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        predict_mlr(MlrModel(0.0, np.ones(3), 1.0), np.ones(2))


def test_residuals_orthogonal_on_scaled_data(noisy):
    ds, _, plan = noisy
    s = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    Xs, ys = s.transform(X), s.transform_target(y)
    a, b, _ = ols(Xs, ys)
    r = ys - a - Xs @ b
    A = np.column_stack([np.ones(len(ys)), Xs])
    assert np.max(np.abs(A.T @ r)) < 1e-8


@given(c=st.floats(-1e4, 1e4))
def test_target_shift_moves_intercept_only(c):
    ds, _ = synthesize(42, seed=5, noise_sd=20.0)
    plan = make_split(42, seed=5)
    shifted = Dataset(ds.quarters, ds.target + c, ds.predictors, ds.specs)
    m0, m1 = fit_mlr(ds, plan), fit_mlr(shifted, plan)
    assert m1.intercept - m0.intercept == pytest.approx(c, abs=1e-10 * max(1.0, abs(m0.intercept)))
    np.testing.assert_allclose(m1.coefficients, m0.coefficients, rtol=1e-10, atol=1e-10)


def test_ols_beats_random_perturbations(noisy, rng):
    ds, _, plan = noisy
    X, y = ds.rows(plan.train_idx)
    a, b, _ = ols(X, y)
    sse = np.sum((y - a - X @ b) ** 2)
    for _ in range(200):
        da = rng.normal() * 1e-3 * max(1, abs(a))
        db = rng.normal(size=b.size) * 1e-3 * np.maximum(np.abs(b), 1e-6)
        assert sse <= np.sum((y - (a + da) - X @ (b + db)) ** 2)


def test_record_round_trip(noisy):
    ds, _, plan = noisy
    m = fit_mlr(ds, plan)
    back = MlrModel.from_record(m.to_record())
    assert back.intercept == m.intercept
    np.testing.assert_array_equal(back.coefficients, m.coefficients)
    assert back.names == ds.names


def test_near_collinear_series_still_solved():
    t = np.arange(30.0)
    X = np.column_stack([t, t + 1e-4 * np.sin(t), np.cos(t)])
    y = 1.0 + 2.0 * X[:, 0] - 3.0 * X[:, 1] + 0.5 * X[:, 2]
    ds_X = np.column_stack([X, np.zeros((30, 7))])
    a, b, cond = ols(X, y)
    assert cond > 1e3
    np.testing.assert_allclose(b, [2.0, -3.0, 0.5], rtol=1e-5)
    with pytest.raises(RankDeficient):
        ols(ds_X, y)
