"""One-hidden-layer feed-forward network trained by full-batch backpropagation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset, Scaler, SplitPlan, fit_scaler
from ..errors import BadConfig, DimensionMismatch, Diverged
from . import _record

ACTIVATIONS = ("tanh", "logistic")


@dataclass(frozen=True)
class AnnConfig:
    hidden: int = 10
    epochs: int = 3000
    learning_rate: float = 0.05
    momentum: float = 0.9
    seed: int = 0
    patience: int = 300
    activation: str = "tanh"

    def __post_init__(self):
        if self.hidden < 1 or self.epochs < 1:
            raise BadConfig("ann: hidden and epochs must be >= 1")
        if not self.learning_rate > 0:
            raise BadConfig("ann: learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise BadConfig("ann: momentum must lie in [0, 1)")
        if self.patience < 1:
            raise BadConfig("ann: patience must be >= 1")
        if self.activation not in ACTIVATIONS:
            raise BadConfig(f"ann: activation must be one of {ACTIVATIONS}")


def _act(z: np.ndarray, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Activation value and its derivative."""
    if kind == "tanh":
        h = np.tanh(z)
        return h, 1.0 - h * h
    h = 0.5 * (1.0 + np.tanh(0.5 * z))
    return h, h * (1.0 - h)


@dataclass(frozen=True)
class AnnParams:
    W1: np.ndarray  # (hidden, p)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float

    def flat(self) -> np.ndarray:
        return np.concatenate([self.W1.ravel(), self.b1, self.w2, [self.b2]])

    @classmethod
    def unflat(cls, theta: np.ndarray, hidden: int, p: int) -> "AnnParams":
        i = hidden * p
        return cls(
            theta[:i].reshape(hidden, p).copy(),
            theta[i : i + hidden].copy(),
            theta[i + hidden : i + 2 * hidden].copy(),
            float(theta[-1]),
        )


@dataclass(frozen=True, eq=False)
class AnnModel:
    params: AnnParams
    activation: str = "tanh"
    scaler: Scaler | None = None
    trace: tuple[float, ...] = ()

    name = "ANN"

    @property
    def p(self) -> int:
        return self.params.W1.shape[1]

    @property
    def hidden(self) -> int:
        return self.params.W1.shape[0]

    def forward(self, Xs: np.ndarray) -> np.ndarray:
        """Network output in scaled-target units for scaled inputs."""
        P = self.params
        H, _ = _act(Xs @ P.W1.T + P.b1, self.activation)
        return H @ P.w2 + P.b2

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} features, got {X.shape[1]}")
        if self.scaler is None:
            return self.forward(X)
        return self.scaler.inverse_target(self.forward(self.scaler.transform(X)))

    def to_record(self) -> str:
        P = self.params
        return _record.dump(
            {
                "model": "ann",
                "layers": f"{self.p}, {self.hidden}, 1",
                "activation": self.activation,
                "W1": P.W1,
                "b1": P.b1,
                "w2": P.w2,
                "b2": P.b2,
            }
        )


def ann_gradient(m: AnnModel, Xs: np.ndarray, ys: np.ndarray) -> tuple[AnnParams, float]:
    """Exact gradient of the batch mean squared error, plus the MSE itself.

    Works in the model's internal (scaled) units.
    """
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    ys = np.asarray(ys, dtype=float).reshape(-1)
    if Xs.shape[0] == 0:
        raise ValueError("empty batch")
    P = m.params
    H, dH = _act(Xs @ P.W1.T + P.b1, m.activation)
    err = H @ P.w2 + P.b2 - ys
    g = 2.0 * err / err.shape[0]
    dZ = np.outer(g, P.w2) * dH
    grad = AnnParams(dZ.T @ Xs, dZ.sum(axis=0), H.T @ g, float(g.sum()))
    return grad, float(np.mean(err * err))


def init_params(p: int, hidden: int, rng: np.random.Generator) -> AnnParams:
    r1, r2 = 1.0 / np.sqrt(p), 1.0 / np.sqrt(hidden)
    return AnnParams(
        rng.uniform(-r1, r1, size=(hidden, p)),
        rng.uniform(-r1, r1, size=hidden),
        rng.uniform(-r2, r2, size=hidden),
        float(rng.uniform(-r2, r2)),
    )


def train_ann(
    Xs: np.ndarray,
    ys: np.ndarray,
    cfg: AnnConfig,
    X_monitor: np.ndarray | None = None,
    y_monitor: np.ndarray | None = None,
    scaler: Scaler | None = None,
) -> AnnModel:
    """Gradient descent with momentum on already-scaled arrays.

    Early stopping watches ``(X_monitor, y_monitor)`` when given and non-empty,
    otherwise the training rows. The returned weights are those of the best
    monitored epoch; ``trace`` holds the training RMSE of every epoch run, in
    target units when a scaler is supplied.
    """
    Xs = np.asarray(Xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    monitor = X_monitor is not None and len(X_monitor) > 0
    unit = scaler.y_range if scaler is not None else 1.0
    rng = np.random.default_rng(cfg.seed)
    params = init_params(Xs.shape[1], cfg.hidden, rng)
    # output layer starts at zero: hidden units still differ, and a constant
    # zero target is fitted from the first epoch
    params = AnnParams(params.W1, params.b1, np.zeros(cfg.hidden), 0.0)
    theta = params.flat()
    velocity = np.zeros_like(theta)
    h, p = cfg.hidden, Xs.shape[1]

    trace: list[float] = []
    best_theta, best_score, wait = theta.copy(), np.inf, 0
    for _ in range(cfg.epochs):
        model = AnnModel(AnnParams.unflat(theta, h, p), cfg.activation)
        with np.errstate(over="ignore", invalid="ignore"):
            grad, mse = ann_gradient(model, Xs, ys)
        if not np.isfinite(mse) or not np.all(np.isfinite(theta)):
            raise Diverged(f"ann: training loss became non-finite after {len(trace)} epochs")
        trace.append(float(np.sqrt(mse)) * unit)
        if monitor:
            score = float(np.sqrt(np.mean((model.forward(X_monitor) - y_monitor) ** 2)))
        else:
            score = float(np.sqrt(mse))
        if score < best_score:
            best_theta, best_score, wait = theta.copy(), score, 0
        else:
            wait += 1
            if wait >= cfg.patience:
                break
        velocity = cfg.momentum * velocity - cfg.learning_rate * grad.flat()
        theta = theta + velocity

    return AnnModel(AnnParams.unflat(best_theta, h, p), cfg.activation, scaler, tuple(trace))


def fit_ann(ds: Dataset, plan: SplitPlan, cfg: AnnConfig = AnnConfig()) -> AnnModel:
    scaler = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    Xt, yt = ds.rows(plan.test_idx)
    return train_ann(
        scaler.transform(X),
        scaler.transform_target(y),
        cfg,
        scaler.transform(Xt),
        scaler.transform_target(yt),
        scaler,
    )


def predict_ann(m: AnnModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.p:
        raise DimensionMismatch(f"expected a vector of {m.p} features, got shape {x.shape}")
    return float(m.predict(x[None, :])[0])
