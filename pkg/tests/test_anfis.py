import numpy as np
import pytest

from airdemand.data import fit_scaler
from airdemand.errors import AllRulesSilent, BadConfig, DimensionMismatch
from airdemand.models.anfis import (
    AnfisConfig,
    AnfisModel,
    anfis_forward,
    fit_anfis,
    init_rules,
    lse_consequents,
    premise_gradient,
    train_anfis,
    training_sse,
)
from airdemand.models.mlr import ols
from oracles import central_difference, max_relative_error


def _random_model(rng, k=3, p=2):
    return AnfisModel(rng.normal(size=(k, p)), rng.uniform(0.5, 1.5, size=(k, p)), rng.normal(size=(k, p + 1)))


def test_single_rule_centred_on_training_centroid(rng):
    Xs = rng.uniform(size=(12, 3))
    C, W, cons = init_rules(Xs, AnfisConfig(n_rules=1))
    np.testing.assert_allclose(C[0], Xs.mean(axis=0), atol=1e-15)
    np.testing.assert_allclose(W[0], np.maximum(Xs.std(axis=0), 0.1))
    assert not cons.any()


def test_two_planted_clusters(rng):
    a = rng.normal(scale=0.01, size=(8, 2))
    b = 10.0 + rng.normal(scale=0.01, size=(9, 2))
    C, _, _ = init_rules(np.vstack([a, b]), AnfisConfig(n_rules=2))
    C = C[np.argsort(C[:, 0])]
    np.testing.assert_allclose(C[0], a.mean(axis=0), atol=1e-6)
    np.testing.assert_allclose(C[1], b.mean(axis=0), atol=1e-6)


def test_more_rules_than_rows_rejected(rng):
    with pytest.raises(BadConfig):
        init_rules(rng.normal(size=(5, 2)), AnfisConfig(n_rules=6))


def test_auto_rule_count_leaves_each_rule_determined(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan)
    assert 1 <= m.n_rules <= 4
    assert m.n_rules * (ds.p + 1) < len(plan.train_idx)


def test_single_rule_output_is_its_affine_consequent():
    m = AnfisModel(np.zeros((1, 2)), np.ones((1, 2)), np.array([[2.0, -1.0, 0.5]]))
    r = anfis_forward(m, np.array([3.0, 4.0]))
    assert r.normalized[0] == 1.0
    assert r.output == pytest.approx(2.0 * 3 - 4 + 0.5)


def test_far_rules_do_not_interfere():
    centers = np.array([[0.0, 0.0], [50.0, 50.0]])
    m = AnfisModel(centers, np.ones((2, 2)), np.array([[1.0, 1.0, 7.0], [0.0, 0.0, -100.0]]))
    # by hand: w1 = 1, w2 = exp(-2500) which is 0 in double precision
    r = anfis_forward(m, np.zeros(2))
    assert r.strengths[0] == 1.0
    assert abs(r.output - 7.0) < 1e-6


def test_all_rules_silent():
    m = AnfisModel(np.zeros((1, 1)), np.full((1, 1), 1e-3), np.zeros((1, 2)))
    with pytest.raises(AllRulesSilent):
        anfis_forward(m, np.array([10.0]))


def test_dimension_check(rng):
    with pytest.raises(DimensionMismatch):
        anfis_forward(_random_model(rng), np.zeros(3))


def test_partition_of_unity(rng):
    m = _random_model(rng, k=4, p=3)
    wbar = m.normalized_strengths(rng.normal(scale=2.0, size=(1000, 3)))
    assert np.max(np.abs(wbar.sum(axis=1) - 1.0)) < 1e-12


def test_single_rule_lse_equals_ols(noisy):
    ds, _, plan = noisy
    s = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    X = s.transform(X)
    m = AnfisModel(X.mean(axis=0)[None, :], np.ones((1, ds.p)), np.zeros((1, ds.p + 1)))
    cons = lse_consequents(m, X, y)[0]
    a, b, _ = ols(X, y)
    np.testing.assert_allclose(cons[:-1], b, rtol=1e-8, atol=1e-8 * np.abs(b).max())
    assert cons[-1] == pytest.approx(a, rel=1e-8)


def test_constant_target_constant_consequents(rng):
    Xs = rng.uniform(size=(30, 2))
    m = _random_model(rng, k=2, p=2)
    cons = lse_consequents(m, Xs, np.full(30, 5.0))
    np.testing.assert_allclose(cons, [[0, 0, 5], [0, 0, 5]], atol=1e-8)


def test_lse_gradient_vanishes(rng):
    Xs, ys = rng.uniform(size=(30, 2)), rng.normal(size=30)
    m = _random_model(rng, k=2, p=2)
    m = m.with_params(consequents=lse_consequents(m, Xs, ys))
    wbar = m.normalized_strengths(Xs)
    ext = np.column_stack([Xs, np.ones(30)])
    Phi = (wbar[:, :, None] * ext[:, None, :]).reshape(30, -1)
    grad = 2.0 * Phi.T @ (m.forward(Xs) - ys)
    assert np.max(np.abs(grad)) < 1e-6


def test_lse_pass_never_increases_sse(rng):
    Xs, ys = rng.uniform(size=(30, 2)), rng.normal(size=30)
    m = _random_model(rng, k=2, p=2)
    before = training_sse(m, Xs, ys)
    assert training_sse(m.with_params(consequents=lse_consequents(m, Xs, ys)), Xs, ys) <= before


def test_lse_trace_monotone_every_epoch(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan, AnfisConfig(epochs=50, patience=50))
    assert len(m.lse_trace) == 51
    for before, after in m.lse_trace:
        assert after <= before * (1 + 1e-12) + 1e-15


def test_noiseless_linear_two_rules(noiseless):
    ds, _, plan = noiseless
    m = fit_anfis(ds, plan, AnfisConfig(n_rules=2))
    X, y = ds.rows(plan.train_idx)
    assert np.sqrt(np.mean((m.predict(X) - y) ** 2)) < 1e-3 * np.ptp(y)


def test_zero_epochs_is_one_lse_pass(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan, AnfisConfig(epochs=0))
    assert len(m.trace) == 1
    s = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    C, W, _ = init_rules(s.transform(X), AnfisConfig())
    np.testing.assert_array_equal(m.centers, C)
    np.testing.assert_array_equal(m.widths, W)
    ref = AnfisModel(C, W, np.zeros_like(m.consequents))
    np.testing.assert_array_equal(m.consequents, lse_consequents(ref, s.transform(X), s.transform_target(y)))


def test_zero_learning_rate_freezes_premises(rng):
    Xs, ys = rng.uniform(size=(30, 2)), rng.normal(size=30)
    cfg = AnfisConfig(n_rules=2, learning_rate=0.0, epochs=20, patience=100)
    m = train_anfis(Xs, ys, cfg)
    C, W, _ = init_rules(Xs, cfg)
    np.testing.assert_array_equal(m.centers, C)
    np.testing.assert_array_equal(m.widths, W)


def test_premise_gradient_matches_finite_differences(rng):
    Xs, ys = rng.uniform(size=(20, 2)), rng.normal(size=20)
    m = _random_model(rng, k=3, p=2)
    dc, ds = premise_gradient(m, Xs, ys)

    def loss(theta):
        c, s = theta[:6].reshape(3, 2), theta[6:].reshape(3, 2)
        r = m.with_params(centers=c, widths=s).forward(Xs) - ys
        return float(np.mean(r * r))

    theta = np.concatenate([m.centers.ravel(), m.widths.ravel()])
    numeric = central_difference(loss, theta, 1e-5)
    assert max_relative_error(np.concatenate([dc.ravel(), ds.ravel()]), numeric) < 1e-5


def test_widths_respect_floor(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan, AnfisConfig(learning_rate=5.0, epochs=30, patience=30))
    assert m.widths.min() >= 1e-3


def test_training_rows_always_fire(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan)
    X, _ = ds.rows(plan.train_idx)
    Xs = m.scaler.transform(X)
    logw = -0.5 * np.sum(((Xs[:, None, :] - m.centers[None]) / m.widths[None]) ** 2, axis=2)
    assert np.all(np.exp(logw).max(axis=1) > 1e-12)


def test_record_lists_every_rule(noisy):
    ds, _, plan = noisy
    m = fit_anfis(ds, plan)
    rec = m.to_record()
    for i in range(m.n_rules):
        assert f"rule{i}.consequent" in rec


@pytest.mark.parametrize("kw", [dict(n_rules=0), dict(restarts=0), dict(epochs=-1), dict(learning_rate=-1.0), dict(sigma_min=0.0)])
def test_bad_config(kw):
    with pytest.raises(BadConfig):
        AnfisConfig(**kw)
