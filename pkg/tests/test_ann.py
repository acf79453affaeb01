import numpy as np
import pytest

from airdemand.data import Dataset, Scaler, make_split, quarter_labels
from airdemand.errors import BadConfig, DimensionMismatch, Diverged
from airdemand.models.ann import AnnConfig, AnnModel, AnnParams, ann_gradient, fit_ann, init_params, predict_ann, train_ann
from airdemand.models.mlr import ols
from oracles import central_difference, max_relative_error


def _random_model(rng, p=3, h=4, activation="tanh"):
    return AnnModel(init_params(p, h, rng), activation)


def _loss(model, Xs, ys):
    def f(theta):
        m = AnnModel(AnnParams.unflat(theta, model.hidden, model.p), model.activation)
        return float(np.mean((m.forward(Xs) - ys) ** 2))

    return f


@pytest.mark.parametrize("activation", ["tanh", "logistic"])
def test_gradient_matches_finite_differences(rng, activation):
    m = _random_model(rng, activation=activation)
    Xs, ys = rng.normal(size=(5, 3)), rng.normal(size=5)
    grad, _ = ann_gradient(m, Xs, ys)
    numeric = central_difference(_loss(m, Xs, ys), m.params.flat(), 1e-5)
    assert max_relative_error(grad.flat(), numeric) < 1e-6


def test_gradient_zero_at_exact_fit(rng):
    m = _random_model(rng)
    x = rng.normal(size=(1, 3))
    grad, mse = ann_gradient(m, x, m.forward(x))
    assert mse == 0.0
    assert np.linalg.norm(grad.flat()) < 1e-10


def test_duplicated_batch_same_gradient(rng):
    m = _random_model(rng)
    Xs, ys = rng.normal(size=(5, 3)), rng.normal(size=5)
    g1, _ = ann_gradient(m, Xs, ys)
    g2, _ = ann_gradient(m, np.vstack([Xs, Xs]), np.concatenate([ys, ys]))
    np.testing.assert_allclose(g1.flat(), g2.flat(), rtol=1e-12, atol=1e-15)


def test_xor_is_learnable():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0.0, 1.0, 1.0, 0.0])
    m = train_ann(X, y, AnnConfig(hidden=4, epochs=5000, learning_rate=0.1, patience=5000))
    assert np.sqrt(np.mean((m.forward(X) - y) ** 2)) < 0.05


def test_huge_learning_rate_diverges():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(10, 3)), rng.normal(size=10)
    with pytest.raises(Diverged):
        train_ann(X, y, AnnConfig(learning_rate=1e6, patience=10_000))


def _toy(n=30, p=2, seed=0, target=None):
    rng = np.random.default_rng(seed)
    X = np.column_stack([rng.normal(size=(n, p)), np.zeros((n, 10 - p))])
    X[:, p:] = 0.0
    y = target(X) if target else 3.0 + X[:, 0] - 2.0 * X[:, 1]
    return Dataset(quarter_labels(n), y, X)


def test_zero_target_gives_zero_predictions():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(30, 4))
    s = Scaler.fit(X, np.zeros(30), np.ones(4, dtype=bool))
    m = train_ann(s.transform(X), s.transform_target(np.zeros(30)), AnnConfig(), scaler=s)
    assert np.max(np.abs(m.predict(X))) < 1e-6


def test_all_zero_weights_predict_inverse_scaled_zero():
    s = Scaler(np.zeros(2), np.ones(2), np.ones(2, dtype=bool), 100.0, 300.0)
    m = AnnModel(AnnParams(np.zeros((3, 2)), np.zeros(3), np.zeros(3), 0.0), "tanh", s)
    assert predict_ann(m, np.array([5.0, -2.0])) == pytest.approx(100.0)


def test_exact_line_close_to_ols():
    rng = np.random.default_rng(2)
    X = rng.uniform(-1, 1, size=(20, 1))
    y = 1.0 + 0.5 * X[:, 0]
    # the net only approaches a line as its hidden units shrink into the
    # linear part of tanh, so this needs a long run
    m = train_ann(X, y, AnnConfig(hidden=3, epochs=60000, learning_rate=0.2, patience=60000))
    a, b, _ = ols(X, y)
    np.testing.assert_allclose(m.forward(X), a + X @ b, atol=1e-3)


def test_small_step_monotone_loss():
    rng = np.random.default_rng(3)
    X, y = rng.normal(size=(20, 3)), rng.uniform(0, 1, size=20)
    m = train_ann(X, y, AnnConfig(epochs=100, learning_rate=1e-4, momentum=0.0, patience=1000))
    assert all(b <= a for a, b in zip(m.trace, m.trace[1:]))


def test_trace_length_is_epochs_run(noisy):
    ds, _, plan = noisy
    m = fit_ann(ds, plan, AnnConfig(epochs=50))
    assert len(m.trace) == 50


def test_deterministic_trace(noisy):
    ds, _, plan = noisy
    a = fit_ann(ds, plan, AnnConfig(epochs=200))
    b = fit_ann(ds, plan, AnnConfig(epochs=200))
    assert a.trace == b.trace
    assert predict_ann(a, ds.predictors[0]) == predict_ann(b, ds.predictors[0])


def test_weights_finite_after_training(noisy):
    ds, _, plan = noisy
    m = fit_ann(ds, plan)
    assert np.all(np.isfinite(m.params.flat()))


def test_early_stop_falls_back_to_training_rows(noisy):
    ds, _, _ = noisy
    plan = make_split(42, (1.0, 0.0, 0.0))
    m = fit_ann(ds, plan, AnnConfig(epochs=100))
    assert len(m.trace) == 100


def test_dimension_check(rng):
    with pytest.raises(DimensionMismatch):
        predict_ann(_random_model(rng), np.zeros(4))


@pytest.mark.parametrize(
    "kw", [dict(hidden=0), dict(epochs=0), dict(learning_rate=0.0), dict(momentum=1.0), dict(activation="relu")]
)
def test_bad_config(kw):
    with pytest.raises(BadConfig):
        AnnConfig(**kw)
