"""First-order Takagi-Sugeno ANFIS with Gaussian memberships and hybrid learning.

Each epoch solves the consequent (affine) parameters exactly by global linear
least squares with the premises fixed, then takes one gradient step on the
premise centres and widths against training MSE. Rules are seeded by k-means
on the scaled training inputs rather than by grid partition, which would need
2**p rules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset, Scaler, SplitPlan, fit_scaler
from ..errors import AllRulesSilent, BadConfig, DimensionMismatch, Diverged, RankDeficient
from . import _record

SILENT_FLOOR = 1e-300
_LOG_SILENT = np.log(SILENT_FLOOR)


@dataclass(frozen=True)
class AnfisConfig:
    # None picks the largest k <= 4 for which clustering leaves every rule at
    # least p+1 training rows; smaller clusters leave their affine consequent
    # under-determined and it extrapolates wildly.
    n_rules: int | None = None
    restarts: int = 10
    epochs: int = 200
    learning_rate: float = 0.05
    seed: int = 0
    patience: int = 30
    width_floor: float = 0.1
    sigma_min: float = 1e-3

    def __post_init__(self):
        if self.n_rules is not None and self.n_rules < 1:
            raise BadConfig("anfis: n_rules must be >= 1")
        if self.restarts < 1:
            raise BadConfig("anfis: restarts must be >= 1")
        if self.epochs < 0 or self.patience < 1:
            raise BadConfig("anfis: epochs must be >= 0 and patience >= 1")
        if not self.learning_rate >= 0:
            raise BadConfig("anfis: learning_rate must be >= 0")
        if not (self.width_floor > 0 and self.sigma_min > 0):
            raise BadConfig("anfis: width floors must be positive")


@dataclass(frozen=True)
class MembershipFn:
    center: float
    width: float
    kind: str = "gaussian"

    def __call__(self, x: float) -> float:
        return float(np.exp(-((x - self.center) ** 2) / (2.0 * self.width**2)))


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: tuple[MembershipFn, ...]
    consequent: tuple[float, ...]  # p slopes then the constant


@dataclass(frozen=True)
class ForwardResult:
    output: float
    strengths: np.ndarray
    normalized: np.ndarray


def _log_strengths(Xs: np.ndarray, centers: np.ndarray, widths: np.ndarray) -> np.ndarray:
    """log w[n, i] = -sum_d (x_nd - c_id)^2 / (2 sigma_id^2)."""
    diff = Xs[:, None, :] - centers[None, :, :]
    return -0.5 * np.sum((diff / widths[None, :, :]) ** 2, axis=2)


def _normalize(logw: np.ndarray) -> np.ndarray:
    top = logw.max(axis=1, keepdims=True)
    log_total = top[:, 0] + np.log(np.exp(logw - top).sum(axis=1))
    silent = np.flatnonzero(log_total < _LOG_SILENT)
    if silent.size:
        raise AllRulesSilent(f"total firing strength below {SILENT_FLOOR:g} for row {int(silent[0])}")
    return np.exp(logw - log_total[:, None])


def _design(Xs: np.ndarray, wbar: np.ndarray) -> np.ndarray:
    """Stacked w̄_i * [x, 1] blocks, one block of p+1 columns per rule."""
    ext = np.column_stack([Xs, np.ones(Xs.shape[0])])
    return (wbar[:, :, None] * ext[:, None, :]).reshape(Xs.shape[0], -1)


@dataclass(frozen=True, eq=False)
class AnfisModel:
    centers: np.ndarray  # (k, p)
    widths: np.ndarray  # (k, p)
    consequents: np.ndarray  # (k, p + 1)
    scaler: Scaler | None = None
    trace: tuple[float, ...] = ()
    lse_trace: tuple[tuple[float, float], ...] = ()

    name = "ANFIS"

    @property
    def n_rules(self) -> int:
        return self.centers.shape[0]

    @property
    def p(self) -> int:
        return self.centers.shape[1]

    @property
    def rules(self) -> list[FuzzyRule]:
        return [
            FuzzyRule(
                tuple(MembershipFn(float(c), float(s)) for c, s in zip(self.centers[i], self.widths[i])),
                tuple(float(a) for a in self.consequents[i]),
            )
            for i in range(self.n_rules)
        ]

    def normalized_strengths(self, Xs: np.ndarray) -> np.ndarray:
        return _normalize(_log_strengths(Xs, self.centers, self.widths))

    def forward(self, Xs: np.ndarray) -> np.ndarray:
        Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
        return _design(Xs, self.normalized_strengths(Xs)) @ self.consequents.ravel()

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} features, got {X.shape[1]}")
        if self.scaler is None:
            return self.forward(X)
        return self.scaler.inverse_target(self.forward(self.scaler.transform(X)))

    def with_params(self, **kw) -> "AnfisModel":
        fields = dict(
            centers=self.centers,
            widths=self.widths,
            consequents=self.consequents,
            scaler=self.scaler,
            trace=self.trace,
            lse_trace=self.lse_trace,
        )
        fields.update(kw)
        return AnfisModel(**fields)

    def to_record(self) -> str:
        fields: dict = {"model": "anfis", "rules": self.n_rules, "inputs": self.p}
        for i in range(self.n_rules):
            fields[f"rule{i}.centers"] = self.centers[i]
            fields[f"rule{i}.widths"] = self.widths[i]
            fields[f"rule{i}.consequent"] = self.consequents[i]
        return _record.dump(fields)


def anfis_forward(m: AnfisModel, x) -> ForwardResult:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.p:
        raise DimensionMismatch(f"expected a vector of {m.p} features, got shape {x.shape}")
    logw = _log_strengths(x[None, :], m.centers, m.widths)
    wbar = _normalize(logw)[0]
    out = float((_design(x[None, :], wbar[None, :]) @ m.consequents.ravel())[0])
    return ForwardResult(out, np.exp(logw[0]), wbar)


def kmeans(Xs: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 300) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm seeded with k distinct rows. Returns (centroids, labels)."""
    n = Xs.shape[0]
    C = Xs[rng.choice(n, size=k, replace=False)].copy()
    labels = np.full(n, -1)
    for _ in range(max_iter):
        d2 = ((Xs[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
        new = d2.argmin(axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            members = labels == j
            if members.any():
                C[j] = Xs[members].mean(axis=0)
            else:
                far = int(d2[np.arange(n), labels].argmax())
                C[j] = Xs[far]
                labels[far] = j
    return C, labels


def auto_rule_count(n_train: int, p: int, cap: int = 4) -> int:
    """Upper bound on the automatic rule count: k*(p+1) consequents must stay
    below the number of training rows."""
    return max(1, min(cap, (n_train - 1) // (p + 1)))


def cluster(Xs: np.ndarray, k: int, rng: np.random.Generator, restarts: int, min_size: int = 0):
    """Best of ``restarts`` k-means runs: lowest inertia among the runs whose
    clusters all hold ``min_size`` rows, or None when no run qualifies."""
    best = None
    for _ in range(restarts):
        C, labels = kmeans(Xs, k, rng)
        if np.bincount(labels, minlength=k).min() < min_size:
            continue
        inertia = float(((Xs - C[labels]) ** 2).sum())
        if best is None or inertia < best[0]:
            best = (inertia, C, labels)
    return None if best is None else best[1:]


def init_rules(Xs: np.ndarray, cfg: AnfisConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Centres, widths and zero consequents from k-means on scaled training inputs."""
    Xs = np.asarray(Xs, dtype=float)
    n, p = Xs.shape
    rng = np.random.default_rng(cfg.seed)
    if cfg.n_rules is not None:
        k = cfg.n_rules
        if not 1 <= k <= n:
            raise BadConfig(f"anfis: n_rules={k} must lie in [1, {n}] (training rows)")
        C, labels = cluster(Xs, k, rng, cfg.restarts)
    else:
        for k in range(auto_rule_count(n, p), 0, -1):
            found = cluster(Xs, k, rng, cfg.restarts, min_size=p + 1 if k > 1 else 0)
            if found is not None:
                C, labels = found
                break
    widths = np.empty_like(C)
    for j in range(k):
        members = Xs[labels == j]
        widths[j] = members.std(axis=0) if len(members) else 0.0
    widths = np.maximum(widths, cfg.width_floor)
    return C, widths, np.zeros((k, p + 1))


def lse_consequents(m: AnfisModel, Xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Globally optimal consequents for fixed premises (minimum-norm when the
    stacked design is under-determined)."""
    Phi = _design(Xs, m.normalized_strengths(Xs))
    sol, _, rank, _ = np.linalg.lstsq(Phi, ys, rcond=None)
    if rank == 0:
        raise RankDeficient("anfis: consequent design matrix is numerically zero")
    return sol.reshape(m.n_rules, m.p + 1)


def training_sse(m: AnfisModel, Xs: np.ndarray, ys: np.ndarray) -> float:
    r = m.forward(Xs) - ys
    return float(r @ r)


def premise_gradient(m: AnfisModel, Xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of training MSE with respect to centres and widths."""
    Xs = np.atleast_2d(np.asarray(Xs, dtype=float))
    wbar = m.normalized_strengths(Xs)
    ext = np.column_stack([Xs, np.ones(Xs.shape[0])])
    f = ext @ m.consequents.T  # rule outputs (n, k)
    yhat = np.sum(wbar * f, axis=1)
    err = yhat - ys
    # d yhat / d log w_i = wbar_i * (f_i - yhat)
    coef = (2.0 / Xs.shape[0]) * err[:, None] * wbar * (f - yhat[:, None])  # (n, k)
    diff = Xs[:, None, :] - m.centers[None, :, :]  # (n, k, p)
    s2 = m.widths**2
    dc = np.einsum("nk,nkp->kp", coef, diff) / s2
    ds = np.einsum("nk,nkp->kp", coef, diff**2) / (s2 * m.widths)
    return dc, ds


def train_anfis(
    Xs: np.ndarray,
    ys: np.ndarray,
    cfg: AnfisConfig,
    X_monitor: np.ndarray | None = None,
    y_monitor: np.ndarray | None = None,
    scaler: Scaler | None = None,
) -> AnfisModel:
    """Hybrid learning on scaled arrays.

    ``trace[0]`` is the training RMSE after the initial least-squares pass;
    each further entry follows one premise step and one least-squares pass.
    ``lse_trace`` records training SSE immediately before and after every
    least-squares pass (scaled units).
    """
    Xs = np.asarray(Xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    monitor = X_monitor is not None and len(X_monitor) > 0
    unit = scaler.y_range if scaler is not None else 1.0
    n = Xs.shape[0]

    centers, widths, cons = init_rules(Xs, cfg)
    m = AnfisModel(centers, widths, cons, scaler)
    trace: list[float] = []
    lse_trace: list[tuple[float, float]] = []

    def lse_pass(model: AnfisModel) -> AnfisModel:
        before = training_sse(model, Xs, ys)
        model = model.with_params(consequents=lse_consequents(model, Xs, ys))
        after = training_sse(model, Xs, ys)
        if not np.isfinite(after):
            raise Diverged("anfis: non-finite training error")
        lse_trace.append((before, after))
        trace.append(float(np.sqrt(after / n)) * unit)
        return model

    def score(model: AnfisModel) -> float:
        if monitor:
            return float(np.sqrt(np.mean((model.forward(X_monitor) - y_monitor) ** 2)))
        return trace[-1]

    m = lse_pass(m)
    best, best_score, wait = m, score(m), 0
    for _ in range(cfg.epochs):
        if cfg.learning_rate > 0:
            dc, ds = premise_gradient(m, Xs, ys)
            if not (np.all(np.isfinite(dc)) and np.all(np.isfinite(ds))):
                raise Diverged("anfis: non-finite premise gradient")
            m = m.with_params(
                centers=m.centers - cfg.learning_rate * dc,
                widths=np.maximum(m.widths - cfg.learning_rate * ds, cfg.sigma_min),
            )
        m = lse_pass(m)
        s = score(m)
        if s < best_score:
            best, best_score, wait = m, s, 0
        else:
            wait += 1
            if wait >= cfg.patience:
                break
    return best.with_params(trace=tuple(trace), lse_trace=tuple(lse_trace))


def fit_anfis(ds: Dataset, plan: SplitPlan, cfg: AnfisConfig = AnfisConfig()) -> AnfisModel:
    scaler = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    Xt, yt = ds.rows(plan.test_idx)
    return train_anfis(
        scaler.transform(X),
        scaler.transform_target(y),
        cfg,
        scaler.transform(Xt),
        scaler.transform_target(yt),
        scaler,
    )
