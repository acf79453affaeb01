"""Real-coded genetic algorithm fitting fixed linear or quadratic forms.

Chromosomes are coefficient vectors in scaled units (z-scored predictors,
min-max target). Fitness is training RMSE; lower is better.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..data import Dataset, Scaler, SplitPlan, fit_scaler
from ..errors import BadConfig, DimensionMismatch
from . import _record

FORMS = ("linear", "quadratic")


@dataclass(frozen=True)
class GaConfig:
    form: str = "linear"
    population: int = 100
    generations: int = 500
    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.1
    mutation_sd: float = 0.1
    elite: int = 2
    seed: int = 0
    bounds: float = 100.0
    # initial genes ~ U(-init_scale, init_scale); scaled coefficients are O(1)
    init_scale: float = 1.0

    def __post_init__(self):
        if self.form not in FORMS:
            raise BadConfig(f"ga: form must be one of {FORMS}")
        if self.population < 2 or not 0 <= self.elite < self.population:
            raise BadConfig("ga: need population >= 2 and 0 <= elite < population")
        if self.generations < 1 or self.tournament < 1:
            raise BadConfig("ga: generations and tournament must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise BadConfig(f"ga: {name} must lie in [0, 1]")
        if not (self.mutation_sd >= 0 and self.bounds > 0):
            raise BadConfig("ga: mutation_sd must be >= 0 and bounds > 0")
        if not 0 < self.init_scale <= self.bounds:
            raise BadConfig("ga: init_scale must lie in (0, bounds]")


def n_coefficients(form: str, p: int) -> int:
    return p + 1 if form == "linear" else 2 * p + 1


def _basis(form: str, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    cols = [np.ones(X.shape[0]), *X.T]
    if form == "quadratic":
        cols += [*(X**2).T]
    return np.column_stack(cols)


def ga_phenotype(form: str, coefficients, x) -> float:
    """``a0 + sum a_i x_i`` (linear) plus ``sum b_i x_i**2`` (quadratic); no cross terms."""
    coefficients = np.asarray(coefficients, dtype=float)
    x = np.asarray(x, dtype=float).reshape(-1)
    if form not in FORMS:
        raise BadConfig(f"unknown form {form!r}")
    if coefficients.shape[0] != n_coefficients(form, x.shape[0]):
        raise DimensionMismatch(
            f"{form} form over {x.shape[0]} features needs {n_coefficients(form, x.shape[0])} coefficients"
        )
    return float(_basis(form, x[None, :])[0] @ coefficients)


@dataclass(frozen=True, eq=False)
class GaModel:
    form: str
    coefficients: np.ndarray
    history: tuple[float, ...]
    scaler: Scaler | None = None

    @property
    def name(self) -> str:
        return "GA"

    @property
    def p(self) -> int:
        return (self.coefficients.shape[0] - 1) // (1 if self.form == "linear" else 2)

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} features, got {X.shape[1]}")
        if self.scaler is None:
            return _basis(self.form, X) @ self.coefficients
        ys = _basis(self.form, self.scaler.transform(X)) @ self.coefficients
        return self.scaler.inverse_target(ys)

    def raw_linear_coefficients(self) -> tuple[float, np.ndarray]:
        """Intercept and slopes of a linear-form model in unscaled units."""
        if self.form != "linear":
            raise ValueError("raw coefficients are only defined for the linear form")
        a0, a = self.coefficients[0], self.coefficients[1:]
        if self.scaler is None:
            return float(a0), a.copy()
        s = self.scaler
        slopes = a * s.y_range / s.sd
        intercept = s.y_min + s.y_range * a0 - float(slopes @ s.mean)
        return float(intercept), slopes

    def to_record(self) -> str:
        return _record.dump({"model": "ga", "form": self.form, "coefficients": self.coefficients})


def _rmse_all(pop: np.ndarray, B: np.ndarray, y: np.ndarray) -> np.ndarray:
    r = pop @ B.T - y
    return np.sqrt(np.mean(r * r, axis=1))


def init_population(cfg: GaConfig, n_coef: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-cfg.init_scale, cfg.init_scale, size=(cfg.population, n_coef))


def evolve(Xs: np.ndarray, ys: np.ndarray, cfg: GaConfig, scaler: Scaler | None = None) -> GaModel:
    """Run the GA on scaled arrays.

    ``generations`` counts evaluated populations, the random initial one
    included, so ``generations=1`` returns the best initial individual.
    ``history[g]`` is the best training RMSE seen up to generation ``g``.
    """
    B = _basis(cfg.form, np.asarray(Xs, dtype=float))
    ys = np.asarray(ys, dtype=float)
    m = B.shape[1]
    P, E = cfg.population, cfg.elite
    unit = scaler.y_range if scaler is not None else 1.0
    rng = np.random.default_rng(cfg.seed)

    pop = init_population(cfg, m, rng)
    fit = _rmse_all(pop, B, ys)
    best_i = int(np.argmin(fit))
    best, best_fit = pop[best_i].copy(), float(fit[best_i])
    history = [best_fit * unit]
    n_children = P - E
    n_pairs = (n_children + 1) // 2

    for _ in range(1, cfg.generations):
        order = np.argsort(fit, kind="stable")
        elites = pop[order[:E]]

        entrants = rng.integers(0, P, size=(2 * n_pairs, cfg.tournament))
        winners = entrants[np.arange(2 * n_pairs), np.argmin(fit[entrants], axis=1)]
        p1, p2 = pop[winners[0::2]], pop[winners[1::2]]

        lam = rng.random((n_pairs, m))
        cross = rng.random(n_pairs) < cfg.crossover_rate
        lam[~cross] = 1.0
        c1 = lam * p1 + (1.0 - lam) * p2
        c2 = (1.0 - lam) * p1 + lam * p2
        children = np.concatenate([c1, c2])[:n_children]

        mutate = rng.random(children.shape) < cfg.mutation_rate
        children = children + mutate * rng.normal(0.0, cfg.mutation_sd, size=children.shape)
        np.clip(children, -cfg.bounds, cfg.bounds, out=children)

        pop = np.concatenate([elites, children])
        fit = _rmse_all(pop, B, ys)
        i = int(np.argmin(fit))
        if fit[i] < best_fit:
            best, best_fit = pop[i].copy(), float(fit[i])
        history.append(best_fit * unit)

    return GaModel(cfg.form, best, tuple(history), scaler)


def fit_ga(ds: Dataset, plan: SplitPlan, cfg: GaConfig = GaConfig()) -> GaModel:
    scaler = fit_scaler(ds, plan)
    X, y = ds.rows(plan.train_idx)
    return evolve(scaler.transform(X), scaler.transform_target(y), cfg, scaler)


def fit_ga_select(ds: Dataset, plan: SplitPlan, cfg: GaConfig = GaConfig()) -> GaModel:
    """Fit both forms and keep the one with lower test RMSE (training RMSE when
    the test subset is empty)."""
    scope = plan.test_idx or plan.train_idx
    X, y = ds.rows(scope)
    best, best_rmse = None, np.inf
    for form in FORMS:
        model = fit_ga(ds, plan, replace(cfg, form=form))
        err = float(np.sqrt(np.mean((model.predict(X) - y) ** 2)))
        if err < best_rmse:
            best, best_rmse = model, err
    return best
