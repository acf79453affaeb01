"""Dataset schema, CSV ingestion, splitting, scaling and synthetic data.

RPK values are millions of revenue-passenger-kilometres per quarter
throughout the package.
"""

from __future__ import annotations

import csv
import enum
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    BadProportions,
    DichotomousOutOfRange,
    EmptyFile,
    InvalidDataset,
    MissingColumn,
    NonNumericCell,
    UnreadableFile,
    ZeroVarianceColumn,
)

RPK_UNIT = "million RPKs per quarter"
QUARTER_COLUMN = "quarter"
TARGET_COLUMN = "rpks"

_QUARTER_RE = re.compile(r"^(\d{4})Q([1-4])$")


class Kind(str, enum.Enum):
    CONTINUOUS = "continuous"
    DICHOTOMOUS = "dichotomous"


@dataclass(frozen=True)
class VariableSpec:
    name: str
    kind: Kind
    unit: str = ""

    @property
    def is_dummy(self) -> bool:
        return self.kind is Kind.DICHOTOMOUS


DEFAULT_SCHEMA: tuple[VariableSpec, ...] = (
    VariableSpec("airfare", Kind.CONTINUOUS, "real best discount economy fare, AUD"),
    VariableSpec("gdp_pc", Kind.CONTINUOUS, "GDP per capita, AUD"),
    VariableSpec("unemp", Kind.CONTINUOUS, "unemployed persons, thousands"),
    VariableSpec("interest", Kind.CONTINUOUS, "interest rate, percent"),
    VariableSpec("jetfuel", Kind.CONTINUOUS, "world jet fuel price, USD/barrel"),
    VariableSpec("accom", Kind.CONTINUOUS, "tourist accommodation capacity, thousand rooms"),
    VariableSpec("d911", Kind.DICHOTOMOUS, "September 11 event"),
    VariableSpec("dvirgin", Kind.DICHOTOMOUS, "Virgin business-model change"),
    VariableSpec("dolympics", Kind.DICHOTOMOUS, "Sydney 2000 Olympic Games"),
    VariableSpec("dcommgames", Kind.DICHOTOMOUS, "Melbourne 2006 Commonwealth Games"),
)


def parse_quarter(label: str) -> tuple[int, int]:
    m = _QUARTER_RE.match(label)
    if m is None:
        raise InvalidDataset(f"quarter label {label!r} is not of the form YYYYQn")
    return int(m.group(1)), int(m.group(2))


def quarter_labels(n: int, start: str = "2000Q1") -> tuple[str, ...]:
    year, q = parse_quarter(start)
    k0 = year * 4 + (q - 1)
    return tuple(f"{k // 4}Q{k % 4 + 1}" for k in range(k0, k0 + n))


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    """Quarterly target series plus a row-major predictor matrix.

    Construction validates every invariant; arrays are stored as read-only
    copies so instances can be shared freely.
    """

    quarters: tuple[str, ...]
    target: np.ndarray
    predictors: np.ndarray
    specs: tuple[VariableSpec, ...] = DEFAULT_SCHEMA

    def __post_init__(self):
        object.__setattr__(self, "quarters", tuple(self.quarters))
        object.__setattr__(self, "specs", tuple(self.specs))
        target = _readonly(self.target).reshape(-1)
        X = _readonly(self.predictors)
        if X.ndim != 2:
            raise InvalidDataset("predictors must be a 2-D matrix")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "predictors", X)

        n = len(self.quarters)
        if target.shape[0] != n or X.shape[0] != n:
            raise InvalidDataset(
                f"row counts disagree: quarters={n}, target={target.shape[0]}, predictors={X.shape[0]}"
            )
        if X.shape[1] != len(self.specs):
            raise InvalidDataset(f"{X.shape[1]} predictor columns but {len(self.specs)} specs")
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise InvalidDataset("variable names must be unique")
        if not np.all(np.isfinite(target)) or not np.all(np.isfinite(X)):
            raise InvalidDataset("dataset contains missing or non-finite values")
        for j, spec in enumerate(self.specs):
            if spec.is_dummy:
                bad = np.flatnonzero((X[:, j] != 0.0) & (X[:, j] != 1.0))
                if bad.size:
                    raise DichotomousOutOfRange(int(bad[0]), spec.name, float(X[bad[0], j]))
        keys = [parse_quarter(q) for q in self.quarters]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            raise InvalidDataset("quarters must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.quarters)

    @property
    def p(self) -> int:
        return len(self.specs)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.specs)

    @property
    def continuous_mask(self) -> np.ndarray:
        return np.array([not s.is_dummy for s in self.specs])

    def rows(self, idx: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(idx, dtype=int)
        return self.predictors[idx], self.target[idx]

    def to_csv(self, path: str | Path) -> None:
        header = [QUARTER_COLUMN, TARGET_COLUMN, *self.names]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for i, q in enumerate(self.quarters):
                cells = [repr(float(self.target[i]))]
                for j, spec in enumerate(self.specs):
                    v = float(self.predictors[i, j])
                    cells.append(str(int(v)) if spec.is_dummy else repr(v))
                w.writerow([q, *cells])


def load_csv(path: str | Path, schema: Sequence[VariableSpec] = DEFAULT_SCHEMA) -> Dataset:
    """Read a ``quarter,rpks,<predictors...>`` CSV into a validated Dataset."""
    schema = tuple(schema)
    expected = [QUARTER_COLUMN, TARGET_COLUMN, *(s.name for s in schema)]
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyFile(f"{path}: no header row")
    header = [h.strip() for h in rows[0]]
    for i, name in enumerate(expected):
        if i >= len(header) or header[i] != name:
            found = header[i] if i < len(header) else "<end of header>"
            raise MissingColumn(name, f"expected at position {i}, found {found!r}")
    if len(header) > len(expected):
        raise MissingColumn(header[len(expected)], "unexpected extra column")
    body = rows[1:]
    if not body:
        raise EmptyFile(f"{path}: header only, no data rows")

    quarters, target, X = [], [], []
    for r, row in enumerate(body, start=1):
        if len(row) != len(expected):
            raise MissingColumn(expected[min(len(row), len(expected) - 1)], f"row {r} has {len(row)} cells")
        quarters.append(row[0].strip())
        values = []
        for c, cell in enumerate(row[1:], start=1):
            try:
                v = float(cell)
            except ValueError:
                raise NonNumericCell(r, expected[c], cell) from None
            if not math.isfinite(v):
                raise NonNumericCell(r, expected[c], cell)
            values.append(v)
        target.append(values[0])
        for j, spec in enumerate(schema):
            if spec.is_dummy and values[j + 1] not in (0.0, 1.0):
                raise DichotomousOutOfRange(r, spec.name, values[j + 1])
        X.append(values[1:])
    return Dataset(tuple(quarters), np.array(target), np.array(X).reshape(len(body), len(schema)), schema)


# --- splitting -----------------------------------------------------------------


class SplitMode(str, enum.Enum):
    RANDOM = "random"
    CHRONOLOGICAL = "chronological"


@dataclass(frozen=True)
class SplitPlan:
    n: int
    train_idx: tuple[int, ...]
    test_idx: tuple[int, ...]
    valid_idx: tuple[int, ...]

    def __post_init__(self):
        parts = (self.train_idx, self.test_idx, self.valid_idx)
        for name, part in zip(("train_idx", "test_idx", "valid_idx"), parts):
            object.__setattr__(self, name, tuple(int(i) for i in part))
        allidx = [*self.train_idx, *self.test_idx, *self.valid_idx]
        if sorted(allidx) != list(range(self.n)):
            raise BadProportions("split subsets must partition 0..n-1")
        if not self.train_idx:
            raise BadProportions("training subset is empty")

    def subset(self, name: str) -> tuple[int, ...]:
        return {"train": self.train_idx, "test": self.test_idx, "valid": self.valid_idx, "all": tuple(range(self.n))}[name]


def split_sizes(n: int, proportions: Sequence[float]) -> tuple[int, int, int]:
    """Largest-remainder allocation: floor each share, then hand leftover rows to
    the largest fractional parts (ties go to the earlier subset)."""
    raw = [n * p for p in proportions]
    sizes = [math.floor(r + 1e-9) for r in raw]
    order = sorted(range(3), key=lambda i: (-(raw[i] - sizes[i]), i))
    for i in order[: n - sum(sizes)]:
        sizes[i] += 1
    return tuple(sizes)  # type: ignore[return-value]


def make_split(
    n: int,
    proportions: Sequence[float] = (0.70, 0.15, 0.15),
    seed: int = 0,
    mode: SplitMode | str = SplitMode.RANDOM,
) -> SplitPlan:
    proportions = tuple(float(p) for p in proportions)
    if len(proportions) != 3 or any(p < 0 or not math.isfinite(p) for p in proportions):
        raise BadProportions(f"need three non-negative fractions, got {proportions}")
    if abs(sum(proportions) - 1.0) > 1e-9:
        raise BadProportions(f"proportions sum to {sum(proportions)}, not 1")
    if n < 1:
        raise BadProportions("cannot split an empty dataset")
    mode = SplitMode(mode)
    n_train, n_test, _ = split_sizes(n, proportions)
    if n_train == 0:
        raise BadProportions("training share rounds to zero rows")
    if mode is SplitMode.RANDOM:
        order = np.random.default_rng(seed).permutation(n)
    else:
        order = np.arange(n)
    train = sorted(order[:n_train].tolist())
    test = sorted(order[n_train : n_train + n_test].tolist())
    valid = sorted(order[n_train + n_test :].tolist())
    return SplitPlan(n, tuple(train), tuple(test), tuple(valid))


# --- scaling -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Scaler:
    """Z-scores continuous predictors, passes dummies through, and min-max maps
    the target onto [0, 1]. A constant training target maps to 0 with unit scale."""

    mean: np.ndarray
    sd: np.ndarray
    continuous: np.ndarray
    y_min: float
    y_max: float

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, continuous: np.ndarray, names: Sequence[str] | None = None) -> "Scaler":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        continuous = np.asarray(continuous, dtype=bool)
        names = list(names) if names is not None else [f"x{j}" for j in range(X.shape[1])]
        mean = np.zeros(X.shape[1])
        sd = np.ones(X.shape[1])
        for j in np.flatnonzero(continuous):
            col = X[:, j]
            s = col.std(ddof=1) if col.size > 1 else 0.0
            if not s > 0.0:
                raise ZeroVarianceColumn(names[j])
            mean[j], sd[j] = col.mean(), s
        return cls(_readonly(mean), _readonly(sd), continuous.copy(), float(y.min()), float(y.max()))

    @property
    def y_range(self) -> float:
        r = self.y_max - self.y_min
        return r if r > 0 else 1.0

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.sd

    def inverse(self, Xs: np.ndarray) -> np.ndarray:
        return np.asarray(Xs, dtype=float) * self.sd + self.mean

    def transform_target(self, y):
        return (np.asarray(y, dtype=float) - self.y_min) / self.y_range

    def inverse_target(self, ys):
        return np.asarray(ys, dtype=float) * self.y_range + self.y_min


def fit_scaler(ds: Dataset, plan: SplitPlan) -> Scaler:
    X, y = ds.rows(plan.train_idx)
    return Scaler.fit(X, y, ds.continuous_mask, ds.names)


# --- synthetic data ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SyntheticTruth:
    """Generating form: ``intercept + X @ coefficients + quadratic * z(x_q)**2``
    where ``z`` standardises column ``quadratic_feature`` over the generated rows."""

    intercept: float
    coefficients: np.ndarray
    quadratic: float = 0.0
    quadratic_feature: int = 0
    quadratic_center: float = 0.0
    quadratic_scale: float = 1.0
    noise_sd: float = 0.0

    def mean_response(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = self.intercept + X @ self.coefficients
        if self.quadratic:
            z = (X[:, self.quadratic_feature] - self.quadratic_center) / self.quadratic_scale
            out = out + self.quadratic * z**2
        return out


# effect of a one-sd move in each continuous series, and dummy effects (RPK units)
_CONT_EFFECTS = np.array([-320.0, 610.0, -240.0, -170.0, -140.0, 380.0])
_DUMMY_EFFECTS = np.array([-260.0, 420.0, 310.0, 180.0])
_BASE_LEVEL = 4200.0


def _smooth_walk(rng: np.random.Generator, n: int, sd: float) -> np.ndarray:
    steps = rng.normal(0.0, sd, size=n)
    walk = np.cumsum(steps)
    kernel = np.array([0.25, 0.5, 0.25])
    padded = np.concatenate([[walk[0]], walk, [walk[-1]]])
    return np.convolve(padded, kernel, mode="valid")


def _dummy_columns(n: int) -> np.ndarray:
    # quarter offsets from 2000Q1
    t = np.arange(n)
    d911 = (t >= 7) & (t <= 10)  # 2001Q4..2002Q3
    dvirgin = t >= 32  # from 2008Q1
    dolympics = (t >= 2) & (t <= 5)  # 2000Q3..2001Q2
    dcommgames = (t >= 24) & (t <= 27)  # 2006
    return np.column_stack([d911, dvirgin, dolympics, dcommgames]).astype(float)


def synthesize(
    n: int = 42,
    seed: int = 0,
    noise_sd: float = 0.0,
    quadratic: float = 0.0,
    quadratic_feature: int = 0,
) -> tuple[Dataset, SyntheticTruth]:
    """Generate ``n`` quarters of plausible LCC-market series from 2000Q1.

    Six continuous predictors are smooth trends with seasonal or cyclical
    components and a seeded random walk; four event dummies sit at fixed
    calendar windows. The target is a known linear form (plus an optional
    squared term on one standardised predictor) and Gaussian noise.
    """
    if n < 4:
        raise InvalidDataset(f"synthesize needs n >= 4, got {n}")
    if not noise_sd >= 0:
        raise InvalidDataset(f"noise_sd must be non-negative, got {noise_sd}")
    rng = np.random.default_rng(seed)
    t = np.arange(n, dtype=float)
    ph = rng.uniform(0, 2 * np.pi, size=6)
    cont = np.column_stack(
        [
            190.0 - 0.35 * t + 14.0 * np.sin(2 * np.pi * t / 4 + ph[0]) + _smooth_walk(rng, n, 3.0),
            52000.0 + 90.0 * t + 1400.0 * np.sin(2 * np.pi * t / 23 + ph[1]) + _smooth_walk(rng, n, 150.0),
            640.0 - 0.8 * t + 55.0 * np.sin(2 * np.pi * t / 31 + ph[2]) + _smooth_walk(rng, n, 6.0),
            5.2 + 0.01 * t + 1.1 * np.sin(2 * np.pi * t / 19 + ph[3]) + _smooth_walk(rng, n, 0.08),
            28.0 + 0.6 * t + 18.0 * np.sin(2 * np.pi * t / 13 + ph[4]) + _smooth_walk(rng, n, 3.0),
            210.0 + 0.2 * t + 6.0 * np.sin(2 * np.pi * t / 4 + ph[5]) + _smooth_walk(rng, n, 0.8),
        ]
    )
    X = np.column_stack([cont, _dummy_columns(n)])
    sd = cont.std(axis=0, ddof=1)
    coef = np.concatenate([_CONT_EFFECTS / sd, _DUMMY_EFFECTS])
    intercept = _BASE_LEVEL - float(cont.mean(axis=0) @ coef[:6])

    qcol = X[:, quadratic_feature]
    qcenter, qscale = float(qcol.mean()), float(qcol.std(ddof=1)) or 1.0
    truth = SyntheticTruth(
        intercept=intercept,
        coefficients=_readonly(coef),
        quadratic=float(quadratic),
        quadratic_feature=int(quadratic_feature),
        quadratic_center=qcenter,
        quadratic_scale=qscale,
        noise_sd=float(noise_sd),
    )
    y = truth.mean_response(X)
    if noise_sd > 0:
        y = y + rng.normal(0.0, noise_sd, size=n)
    return Dataset(quarter_labels(n), y, X, DEFAULT_SCHEMA), truth
