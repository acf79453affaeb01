"""Multiple linear regression by ordinary least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..data import Dataset, SplitPlan
from ..errors import DimensionMismatch, RankDeficient, TooFewRows
from . import _record

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MlrModel:
    intercept: float
    coefficients: np.ndarray
    condition_estimate: float
    names: tuple[str, ...] = ()

    name = "MLR"

    def __post_init__(self):
        coef = np.array(self.coefficients, dtype=float)
        if not (np.isfinite(self.intercept) and np.all(np.isfinite(coef))):
            raise RankDeficient("non-finite regression parameters")
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def p(self) -> int:
        return self.coefficients.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.p:
            raise DimensionMismatch(f"expected {self.p} features, got {X.shape[1]}")
        return self.intercept + X @ self.coefficients

    def to_record(self) -> str:
        return _record.dump(
            {
                "model": "mlr",
                "names": ", ".join(self.names),
                "intercept": self.intercept,
                "coefficients": self.coefficients,
                "condition_estimate": self.condition_estimate,
            }
        )

    @classmethod
    def from_record(cls, text: str) -> "MlrModel":
        rec = _record.load(text)
        return cls(
            float(rec["intercept"]),
            _record.floats(rec["coefficients"]),
            float(rec["condition_estimate"]),
            _record.strings(rec.get("names", "")),
        )


def ols(X: np.ndarray, y: np.ndarray, rank_tol: float = RANK_TOL) -> tuple[float, np.ndarray, float]:
    """Least squares with intercept via column-pivoted QR.

    Columns are equilibrated to unit norm before factorising so that economic
    series on very different scales do not dominate the rank test. Returns
    ``(intercept, slopes, condition_estimate)``.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    n, p = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"{n} rows in X but {y.shape[0]} targets")
    if n < p + 1:
        raise TooFewRows(f"{n} rows cannot determine {p + 1} parameters")
    A = np.column_stack([np.ones(n), X])
    norms = np.linalg.norm(A, axis=0)
    if np.any(norms == 0):
        raise RankDeficient(f"all-zero design column(s): {np.flatnonzero(norms == 0).tolist()}")
    As = A / norms
    Q, R, piv = scipy.linalg.qr(As, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = rank_tol * np.linalg.norm(As, 2)
    rank = int(np.sum(diag > tol))
    if rank < p + 1:
        raise RankDeficient(f"design matrix has column rank {rank} < {p + 1}")
    z = scipy.linalg.solve_triangular(R, Q.T @ y)
    beta = np.empty(p + 1)
    beta[piv] = z
    beta /= norms
    cond = float(diag[0] / diag[-1])
    return float(beta[0]), beta[1:], cond


def fit_mlr(ds: Dataset, plan: SplitPlan) -> MlrModel:
    X, y = ds.rows(plan.train_idx)
    if len(plan.train_idx) <= ds.p + 1:
        raise TooFewRows(f"need more than {ds.p + 1} training rows, have {len(plan.train_idx)}")
    intercept, coef, cond = ols(X, y)
    return MlrModel(intercept, coef, cond, ds.names)


def predict_mlr(m: MlrModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != m.p:
        raise DimensionMismatch(f"expected a vector of {m.p} features, got shape {x.shape}")
    return float(m.intercept + x @ m.coefficients)
