"""The six regressor families behind one fit/predict interface."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Any, Callable, Mapping, Protocol

import numpy as np

from ..data import Dataset, SplitPlan
from ..errors import BadConfig
from .anfis import AnfisConfig, fit_anfis
from .ann import AnnConfig, fit_ann
from .ga import GaConfig, fit_ga, fit_ga_select
from .mlr import fit_mlr
from .rtree import TreeConfig, fit_tree
from .svr import SvrConfig, fit_svr


class Regressor(Protocol):
    name: str

    def predict(self, X: np.ndarray) -> np.ndarray: ...

    def to_record(self) -> str: ...


@dataclass(frozen=True)
class MlrConfig:
    """OLS has no hyperparameters; kept so every family has a config section."""


@dataclass(frozen=True)
class GaSelectConfig:
    """GA settings plus ``form = "auto"``, which fits both forms and keeps the
    one with lower test RMSE."""

    ga: GaConfig = GaConfig()
    auto: bool = True


@dataclass(frozen=True)
class ModelSpec:
    key: str
    label: str
    config_type: type
    fit: Callable[[Dataset, SplitPlan, Any], Regressor]

    def make_config(self, section: Mapping[str, Any] | None = None) -> Any:
        section = dict(section or {})
        if self.config_type is GaSelectConfig:
            form = section.pop("form", "auto")
            ga = _build(GaConfig, section, self.key)
            if form == "auto":
                return GaSelectConfig(ga, True)
            if form not in ("linear", "quadratic"):
                raise BadConfig(f"ga: form must be 'auto', 'linear' or 'quadratic', got {form!r}")
            return GaSelectConfig(replace(ga, form=form), False)
        return _build(self.config_type, section, self.key)


def _build(cls: type, section: Mapping[str, Any], key: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(section) - known)
    if unknown:
        raise BadConfig(f"unknown key(s) in [models.{key}]: {', '.join(unknown)}")
    try:
        return cls(**section)
    except TypeError as exc:
        raise BadConfig(f"[models.{key}]: {exc}") from exc


def _fit_ga(ds: Dataset, plan: SplitPlan, cfg: GaSelectConfig):
    return fit_ga_select(ds, plan, cfg.ga) if cfg.auto else fit_ga(ds, plan, cfg.ga)


REGISTRY: dict[str, ModelSpec] = {
    s.key: s
    for s in (
        ModelSpec("mlr", "MLR", MlrConfig, lambda ds, plan, cfg: fit_mlr(ds, plan)),
        ModelSpec("ga", "GA", GaSelectConfig, _fit_ga),
        ModelSpec("ann", "ANN", AnnConfig, fit_ann),
        ModelSpec("anfis", "ANFIS", AnfisConfig, fit_anfis),
        ModelSpec("svr", "SVR", SvrConfig, fit_svr),
        ModelSpec("rtree", "RT", TreeConfig, fit_tree),
    )
}

MODEL_KEYS = tuple(REGISTRY)


def get_spec(key: str) -> ModelSpec:
    try:
        return REGISTRY[key]
    except KeyError:
        raise BadConfig(f"unknown model {key!r}; choose from {', '.join(MODEL_KEYS)}") from None
