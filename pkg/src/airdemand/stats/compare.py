"""Error metrics, fit-line diagnostics, one-way ANOVA and one-sided t-tests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import (
    DegenerateSample,
    Empty,
    LengthMismatch,
    NonpositiveReference,
    TooFewGroups,
    TooFewValues,
    ZeroVariance,
)
from .special import f_sf, t_cdf


def _pair(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float).reshape(-1)
    p = np.asarray(predicted, dtype=float).reshape(-1)
    if a.shape != p.shape:
        raise LengthMismatch(f"lengths differ: {a.shape[0]} vs {p.shape[0]}")
    return a, p


def rmse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    if a.size == 0:
        raise Empty("rmse of empty vectors")
    d = a - p
    return math.sqrt(float(d @ d) / d.size)


def squared_errors(actual, predicted) -> np.ndarray:
    a, p = _pair(actual, predicted)
    return (a - p) ** 2


def pct_of_reference(rmse_value: float, reference_total: float) -> float:
    if not reference_total > 0:
        raise NonpositiveReference(f"reference total must be positive, got {reference_total}")
    return 100.0 * rmse_value / reference_total


def rank_models(scores: Mapping[str, float]) -> list[str]:
    """Names ordered best (smallest) to worst; ties keep insertion order."""
    return sorted(scores, key=lambda k: scores[k])


@dataclass(frozen=True)
class FitLine:
    """predicted ~ beta * actual + alpha."""

    beta: float
    alpha: float
    r2: float


def fit_line(actual, predicted) -> FitLine:
    a, p = _pair(actual, predicted)
    if a.size < 3:
        raise TooFewValues("fit_line needs at least 3 points")
    da, dp = a - a.mean(), p - p.mean()
    sxx, sxy, syy = float(da @ da), float(da @ dp), float(dp @ dp)
    if sxx == 0.0:
        raise ZeroVariance("actual values have zero variance")
    beta = sxy / sxx
    alpha = float(p.mean() - beta * a.mean())
    # a constant prediction has nothing to explain; report no association
    r2 = 0.0 if syy == 0.0 else min(1.0, max(0.0, sxy * sxy / (sxx * syy)))
    return FitLine(beta, alpha, r2)


@dataclass(frozen=True)
class AnovaTable:
    ss_between: float
    ss_within: float
    ss_total: float
    df_between: int
    df_within: int
    df_total: int
    ms_between: float
    ms_within: float
    f_stat: float
    p_value: float


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaTable:
    groups = [np.asarray(g, dtype=float).reshape(-1) for g in groups]
    if len(groups) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(groups)}")
    if any(g.size < 2 for g in groups):
        raise TooFewValues("every group needs at least 2 values")
    allv = np.concatenate(groups)
    grand = allv.mean()
    ss_between = float(sum(g.size * (g.mean() - grand) ** 2 for g in groups))
    ss_within = float(sum(((g - g.mean()) ** 2).sum() for g in groups))
    ss_total = float(((allv - grand) ** 2).sum())
    k, n = len(groups), allv.size
    df_b, df_w = k - 1, n - k
    ms_b, ms_w = ss_between / df_b, ss_within / df_w
    if ms_w == 0.0:
        if ss_between == 0.0:
            raise ZeroVariance("all values are identical; F is undefined")
        f, p = math.inf, 0.0
    else:
        f = ms_b / ms_w
        p = f_sf(f, df_b, df_w)
    return AnovaTable(ss_between, ss_within, ss_total, df_b, df_w, n - 1, ms_b, ms_w, f, p)


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p_value: float


def t_test_onesided(sample_a, sample_b, variant: str = "pooled") -> TTestResult:
    """Two-sample t-test of the alternative mean(a) < mean(b).

    ``p = t_cdf(t, df)`` with ``t = (mean(a) - mean(b)) / se``, so ``p < 0.5``
    exactly when mean(a) < mean(b).
    """
    a = np.asarray(sample_a, dtype=float).reshape(-1)
    b = np.asarray(sample_b, dtype=float).reshape(-1)
    if a.size < 2 or b.size < 2:
        raise DegenerateSample("each sample needs at least 2 values")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise DegenerateSample("samples must be finite")
    na, nb = a.size, b.size
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if variant == "pooled":
        df = na + nb - 2
        sp2 = ((na - 1) * va + (nb - 1) * vb) / df
        se = math.sqrt(sp2 * (1.0 / na + 1.0 / nb))
    elif variant == "welch":
        qa, qb = va / na, vb / nb
        se = math.sqrt(qa + qb)
        df = (qa + qb) ** 2 / (qa * qa / (na - 1) + qb * qb / (nb - 1)) if se > 0 else math.nan
    else:
        raise ValueError(f"variant must be 'pooled' or 'welch', got {variant!r}")
    if se == 0.0:
        raise DegenerateSample("both samples have zero variance")
    t = float((a.mean() - b.mean()) / se)
    return TTestResult(t, float(df), t_cdf(t, df))


@dataclass(frozen=True)
class PairwiseMatrix:
    """``p[i][j]``: one-sided p-value for 'model i has smaller squared errors
    than model j'. The diagonal is NaN."""

    names: tuple[str, ...]
    p: np.ndarray
    alpha: float = 0.05
    variant: str = "pooled"

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "names", tuple(self.names))

    def __getitem__(self, pair: tuple[str, str]) -> float:
        i, j = self.names.index(pair[0]), self.names.index(pair[1])
        return float(self.p[i, j])

    def directional(self, i: int, j: int) -> tuple[float, int]:
        """One-sided p-value in the direction of the observed difference, and
        the index of the model with the smaller mean squared error."""
        pij, pji = self.p[i, j], self.p[j, i]
        return (float(pij), i) if pij <= pji else (float(pji), j)

    def significant(self, p: float) -> bool:
        return p < self.alpha

    def upper_triangle(self) -> list[tuple[str, str, float, str]]:
        """Table-style cells ``(row, col, p, better)`` for i < j."""
        out = []
        k = len(self.names)
        for i in range(k - 1):
            for j in range(i + 1, k):
                p, better = self.directional(i, j)
                out.append((self.names[i], self.names[j], p, self.names[better]))
        return out

    def bonferroni(self, p: float) -> float:
        k = len(self.names)
        return min(1.0, p * k * (k - 1) / 2)


@dataclass(frozen=True)
class Comparison:
    anova: AnovaTable
    pairwise: PairwiseMatrix


def compare_models(
    squared_errors: Mapping[str, Sequence[float]], alpha: float = 0.05, variant: str = "pooled"
) -> Comparison:
    names = tuple(squared_errors)
    if len(names) < 2:
        raise TooFewGroups("comparison needs at least 2 models")
    vecs = [np.asarray(squared_errors[n], dtype=float).reshape(-1) for n in names]
    if len({v.size for v in vecs}) != 1:
        raise LengthMismatch("all squared-error vectors must have equal length")
    table = anova_oneway(vecs)
    k = len(names)
    p = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(k):
            if i != j:
                p[i, j] = t_test_onesided(vecs[i], vecs[j], variant).p_value
    return Comparison(table, PairwiseMatrix(names, p, alpha, variant))
