"""Epsilon-insensitive support vector regression solved in the dual by SMO.

The dual is written in ``beta = alpha - alpha*``::

    maximise  y.beta - eps * |beta|_1 - 1/2 beta' K beta
    s.t.      sum(beta) = 0,  -C <= beta_i <= C

Each SMO step moves ``beta_i += t, beta_j -= t`` for the maximal violating
pair and maximises the (piecewise quadratic, concave) objective in ``t``
exactly. Optimality is tracked through the interval of bias values each
sample admits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..data import Dataset, Scaler, SplitPlan, fit_scaler
from ..errors import BadConfig, DimensionMismatch, NotConverged
from . import _record

KERNELS = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise BadConfig(f"svr: kernel must be one of {KERNELS}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise BadConfig("svr: rbf gamma must be > 0")

    def matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        A, B = np.atleast_2d(A), np.atleast_2d(B)
        if A.shape[1] != B.shape[1]:
            raise DimensionMismatch(f"kernel arguments have {A.shape[1]} and {B.shape[1]} features")
        if self.kind == "linear":
            return A @ B.T
        d2 = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
        return np.exp(-self.gamma * np.maximum(d2, 0.0))


def kernel_eval(spec: KernelSpec, x1, x2) -> float:
    x1, x2 = np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
    if x1.shape != x2.shape:
        raise DimensionMismatch(f"kernel arguments have shapes {x1.shape} and {x2.shape}")
    if spec.kind == "linear":
        return float(x1 @ x2)
    d = x1 - x2
    return float(np.exp(-spec.gamma * (d @ d)))


@dataclass(frozen=True)
class SvrConfig:
    kernel: str = "rbf"
    gamma: float | None = None  # None -> 1/p
    C: float = 10.0
    epsilon: float = 0.1
    tol: float = 1e-3
    max_passes: int = 100_000

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise BadConfig(f"svr: kernel must be one of {KERNELS}")
        if not self.C > 0:
            raise BadConfig("svr: C must be > 0")
        if not self.epsilon >= 0:
            raise BadConfig("svr: epsilon must be >= 0")
        if self.gamma is not None and not self.gamma > 0:
            raise BadConfig("svr: gamma must be > 0")
        if not self.tol > 0 or self.max_passes < 1:
            raise BadConfig("svr: tol must be > 0 and max_passes >= 1")

    def kernel_spec(self, p: int) -> KernelSpec:
        return KernelSpec(self.kernel, self.gamma if self.gamma is not None else 1.0 / p)


@dataclass(frozen=True, eq=False)
class SvrModel:
    kernel: KernelSpec
    support_index: np.ndarray
    support_vectors: np.ndarray
    beta: np.ndarray
    b: float
    C: float
    epsilon: float
    scaler: Scaler | None = None
    iterations: int = 0

    name = "SVR"

    @property
    def p(self) -> int:
        return self.support_vectors.shape[1]

    def decision(self, Xs: np.ndarray) -> np.ndarray:
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        if self.beta.size == 0:
            return np.full(Xs.shape[0], self.b)
        return self.kernel.matrix(Xs, self.support_vectors) @ self.beta + self.b

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} features, got {X.shape[1]}")
        if self.scaler is None:
            return self.decision(X)
        return self.scaler.inverse_target(self.decision(self.scaler.transform(X)))

    def to_record(self) -> str:
        fields: dict = {
            "model": "svr",
            "kernel": self.kernel.kind,
            "gamma": self.kernel.gamma,
            "b": self.b,
            "n_support": int(self.beta.size),
        }
        for i, beta, sv in zip(self.support_index, self.beta, self.support_vectors):
            fields[f"sv{int(i)}"] = np.concatenate([[beta], sv])
        return _record.dump(fields)


def dual_objective(K: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    return float(y @ beta - epsilon * np.abs(beta).sum() - 0.5 * beta @ K @ beta)


def _bias_bounds(e: np.ndarray, beta: np.ndarray, C: float, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample interval [lo, up] of bias values compatible with KKT, where
    ``e = y - K beta``."""
    lo = np.full(e.shape, -np.inf)
    up = np.full(e.shape, np.inf)
    zero = beta == 0.0
    pos_free = (beta > 0) & (beta < C)
    neg_free = (beta < 0) & (beta > -C)
    at_c = beta >= C
    at_minus_c = beta <= -C
    lo[zero], up[zero] = e[zero] - eps, e[zero] + eps
    lo[pos_free] = up[pos_free] = e[pos_free] - eps
    lo[neg_free] = up[neg_free] = e[neg_free] + eps
    up[at_c] = e[at_c] - eps
    lo[at_minus_c] = e[at_minus_c] + eps
    return lo, up


def _line_max(ei: float, ej: float, bi: float, bj: float, eta: float, C: float, eps: float) -> float:
    """Exact maximiser over t of
    t (ei - ej) - eta t^2 / 2 - eps (|bi + t| + |bj - t|)  on the feasible box."""
    L, H = max(-C - bi, bj - C), min(C - bi, bj + C)
    if H <= L:
        return 0.0

    def f(t):
        return t * (ei - ej) - 0.5 * eta * t * t - eps * (abs(bi + t) + abs(bj - t))

    knots = sorted({L, H, *(k for k in (-bi, bj) if L < k < H)})
    cands = list(knots)
    if eta > 1e-12:
        for a, b in zip(knots, knots[1:]):
            mid = 0.5 * (a + b)
            s1, s2 = np.sign(bi + mid), np.sign(bj - mid)
            t = (ei - ej - eps * s1 + eps * s2) / eta
            if a < t < b:
                cands.append(t)
    cands.append(0.0)
    return max(cands, key=f)


def smo(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    epsilon: float,
    tol: float = 1e-3,
    max_passes: int = 100_000,
    callback: Callable[[np.ndarray], None] | None = None,
) -> tuple[np.ndarray, float, int]:
    """Solve the dual; returns ``(beta, b, iterations)``.

    Stops once the largest KKT gap ``max(lo) - min(up)`` is within ``tol``.
    ``callback(beta)`` runs after every pair update.
    """
    n = y.shape[0]
    beta = np.zeros(n)
    F = np.zeros(n)  # K @ beta
    diagK = np.diag(K).copy()
    it = 0
    while True:
        e = y - F
        lo, up = _bias_bounds(e, beta, C, epsilon)
        i, j = int(np.argmax(lo)), int(np.argmin(up))
        gap = lo[i] - up[j]
        if gap <= tol:
            break
        if it >= max_passes:
            raise NotConverged(_count_gap_violations(lo, up, tol), it)
        eta = diagK[i] + diagK[j] - 2.0 * K[i, j]
        t = _line_max(e[i], e[j], beta[i], beta[j], eta, C, epsilon)
        if t == 0.0:
            raise NotConverged(_count_gap_violations(lo, up, tol), it)
        old_i, old_j = beta[i], beta[j]
        beta[i], beta[j] = _snap(old_i + t, C), _snap(old_j - t, C)
        F += K[:, i] * (beta[i] - old_i) + K[:, j] * (beta[j] - old_j)
        it += 1
        if callback is not None:
            callback(beta)
    return beta, _bias(y - K @ beta, beta, C, epsilon, tol), it


def _snap(v: float, C: float) -> float:
    # land exactly on the box so bound tests are exact
    if abs(v - C) <= 1e-12 * C:
        return C
    if abs(v + C) <= 1e-12 * C:
        return -C
    return v


def _count_gap_violations(lo: np.ndarray, up: np.ndarray, tol: float) -> int:
    # samples whose interval sits more than tol beyond the other side's extreme
    return int(np.sum((lo > up.min() + tol) | (up < lo.max() - tol)))


def _bias(e: np.ndarray, beta: np.ndarray, C: float, eps: float, tol: float) -> float:
    free = (beta != 0.0) & (np.abs(beta) < C - tol)
    if free.any():
        return float(np.mean(e[free] - eps * np.sign(beta[free])))
    lo, up = _bias_bounds(e, beta, C, eps)
    lo_max, up_min = lo.max(), up.min()
    if np.isfinite(lo_max) and np.isfinite(up_min):
        return float(0.5 * (lo_max + up_min))
    return float(lo_max if np.isfinite(lo_max) else up_min)


def kkt_violations(K: np.ndarray, y: np.ndarray, beta: np.ndarray, b: float, C: float, eps: float, tol: float) -> np.ndarray:
    """Indices of samples whose KKT condition fails by more than ``tol``."""
    r = y - K @ beta - b
    bad = np.zeros(y.shape[0], dtype=bool)
    zero = beta == 0.0
    bad |= zero & (np.abs(r) > eps + tol)
    pos_free = (beta > 0) & (beta < C)
    bad |= pos_free & (np.abs(r - eps) > tol)
    neg_free = (beta < 0) & (beta > -C)
    bad |= neg_free & (np.abs(r + eps) > tol)
    bad |= (beta >= C) & (r < eps - tol)
    bad |= (beta <= -C) & (r > -eps + tol)
    return np.flatnonzero(bad)


def train_svr(
    Xs: np.ndarray,
    ys: np.ndarray,
    cfg: SvrConfig,
    scaler: Scaler | None = None,
    callback: Callable[[np.ndarray], None] | None = None,
) -> SvrModel:
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    ys = np.asarray(ys, dtype=float)
    spec = cfg.kernel_spec(Xs.shape[1])
    K = spec.matrix(Xs, Xs)
    beta, b, it = smo(K, ys, cfg.C, cfg.epsilon, cfg.tol, cfg.max_passes, callback)
    sv = np.flatnonzero(beta != 0.0)
    return SvrModel(spec, sv, Xs[sv].copy(), beta[sv].copy(), b, cfg.C, cfg.epsilon, scaler, it)


def fit_svr(ds: Dataset, plan: SplitPlan, cfg: SvrConfig = SvrConfig()) -> SvrModel:
    scaler = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    return train_svr(scaler.transform(X), scaler.transform_target(y), cfg, scaler)


def predict_svr(m: SvrModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.p:
        raise DimensionMismatch(f"expected a vector of {m.p} features, got shape {x.shape}")
    return float(m.predict(x[None, :])[0])
