"""Ingest, split, fit every enabled model, evaluate on all rows, compare."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .config import RunConfig
from .data import Dataset, SplitPlan, load_csv, make_split, synthesize
from .errors import ModelError, ModelFitError, StatsError
from .models import Regressor, get_spec
from .stats import Comparison, FitLine, compare_models, fit_line, rmse

SCOPES = ("train", "test", "valid", "all")
NOTICE_TOO_FEW = "comparison omitted: at least 2 models are required"


@dataclass(frozen=True, eq=False)
class ModelEvaluation:
    key: str
    label: str
    model: Regressor
    predictions: np.ndarray
    squared_errors: np.ndarray
    rmse: Mapping[str, float | None]  # None for an empty subset
    fit: FitLine


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    dataset: Dataset
    plan: SplitPlan
    evaluations: tuple[ModelEvaluation, ...]
    reference_total: float
    metadata: Mapping[str, Any]

    def __getitem__(self, key: str) -> ModelEvaluation:
        for ev in self.evaluations:
            if ev.key == key or ev.label == key:
                return ev
        raise KeyError(key)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(ev.label for ev in self.evaluations)


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    comparison: Comparison | None
    notice: str = ""


def load_dataset(cfg: RunConfig) -> Dataset:
    s = cfg.data.synthetic
    if s is None:
        return load_csv(cfg.data.path)
    ds, _ = synthesize(s.n, cfg.data_seed, s.noise_sd, s.quadratic, s.quadratic_feature)
    return ds


def default_reference_total(ds: Dataset) -> float:
    """Sum of the target over the final four quarters (a calendar-year total)."""
    return float(np.sum(ds.target[-4:]))


def evaluate_model(key: str, model: Regressor, ds: Dataset, plan: SplitPlan) -> ModelEvaluation:
    pred = np.asarray(model.predict(ds.predictors), dtype=float)
    if pred.shape != (ds.n,):
        raise ModelFitError(key, ValueError(f"predicted {pred.shape} values for {ds.n} rows"))
    if not np.all(np.isfinite(pred)):
        raise ModelFitError(key, ValueError("non-finite predictions"))
    scores = {}
    for scope in SCOPES:
        idx = list(plan.subset(scope))
        scores[scope] = rmse(ds.target[idx], pred[idx]) if idx else None
    return ModelEvaluation(
        key,
        get_spec(key).label,
        model,
        pred,
        (ds.target - pred) ** 2,
        scores,
        fit_line(ds.target, pred),
    )


def fit_all(cfg: RunConfig, ds: Dataset, plan: SplitPlan) -> tuple[ModelEvaluation, ...]:
    out = []
    for key in cfg.enabled:
        spec = get_spec(key)
        try:
            model = spec.fit(ds, plan, cfg.models[key])
        except ModelError as exc:
            raise ModelFitError(spec.label, exc) from exc
        out.append(evaluate_model(key, model, ds, plan))
    return tuple(out)


def compare(report: EvaluationReport, alpha: float, variant: str) -> ComparisonReport:
    if len(report.evaluations) < 2:
        return ComparisonReport(None, NOTICE_TOO_FEW)
    errors = {ev.label: ev.squared_errors for ev in report.evaluations}
    try:
        return ComparisonReport(compare_models(errors, alpha, variant))
    except StatsError as exc:
        return ComparisonReport(None, f"comparison unavailable: {exc}")


def run_pipeline(cfg: RunConfig, write: bool = True) -> tuple[EvaluationReport, ComparisonReport]:
    """Run everything in ``cfg``; with ``write`` the artifacts go to
    ``cfg.report.out``."""
    ds = load_dataset(cfg)
    plan = make_split(ds.n, cfg.split.proportions, cfg.split_seed, cfg.split.mode)
    evaluations = fit_all(cfg, ds, plan)
    ref = cfg.report.reference_total or default_reference_total(ds)
    meta = {
        "source": cfg.data.path if cfg.data.path is not None else "synthetic",
        "seed": cfg.seed,
        "split_seed": cfg.split_seed,
        "split_mode": cfg.split.mode,
        "proportions": list(cfg.split.proportions),
        # every model is fit on this one plan; stored once and referenced by each model
        "train_idx": list(plan.train_idx),
        "test_idx": list(plan.test_idx),
        "valid_idx": list(plan.valid_idx),
    }
    report = EvaluationReport(ds, plan, evaluations, ref, meta)
    comparison = compare(report, cfg.report.alpha, cfg.report.ttest)
    if write:
        from .report import render_report

        render_report(report, comparison, cfg.report.out, cfg.report.formats)
    return report, comparison
