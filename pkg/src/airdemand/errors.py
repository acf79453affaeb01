"""Exception hierarchy.

The CLI maps the three top-level families onto exit codes:
``ConfigError`` -> 2, ``DataError`` -> 3, ``ModelFitError`` -> 4.
"""

from __future__ import annotations


class AirDemandError(Exception):
    """Base class for every error raised by this package."""


# --- configuration -----------------------------------------------------------


class ConfigError(AirDemandError):
    pass


class BadConfig(ConfigError, ValueError):
    pass


# --- data --------------------------------------------------------------------


class DataError(AirDemandError):
    pass


class EmptyFile(DataError):
    pass


class UnreadableFile(DataError):
    pass


class MissingColumn(DataError):
    def __init__(self, name: str, detail: str = ""):
        self.name = name
        super().__init__(f"missing or misplaced column {name!r}" + (f": {detail}" if detail else ""))


class NonNumericCell(DataError):
    def __init__(self, row: int, col: str, value: str):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"non-numeric value {value!r} at row {row}, column {col!r}")


class DichotomousOutOfRange(DataError):
    def __init__(self, row: int, col: str, value: float):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"dichotomous column {col!r} has value {value!r} at row {row}")


class InvalidDataset(DataError, ValueError):
    pass


class BadProportions(DataError, ValueError):
    pass


class ZeroVarianceColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"continuous column {name!r} has zero variance on the training rows")


# --- models ------------------------------------------------------------------


class ModelError(AirDemandError):
    pass


class DimensionMismatch(ModelError, ValueError):
    pass


class RankDeficient(ModelError):
    pass


class TooFewRows(ModelError):
    pass


class Diverged(ModelError):
    pass


class NotConverged(ModelError):
    def __init__(self, violations: int, passes: int):
        self.violations = violations
        self.passes = passes
        super().__init__(f"SMO stopped after {passes} passes with {violations} KKT violations")


class AllRulesSilent(ModelError):
    pass


class ModelFitError(AirDemandError):
    """Wraps any failure raised while fitting one named model in the pipeline."""

    def __init__(self, model: str, cause: Exception):
        self.model = model
        self.cause = cause
        super().__init__(f"fitting {model} failed: {type(cause).__name__}: {cause}")


# --- statistics --------------------------------------------------------------


class StatsError(AirDemandError, ValueError):
    pass


class LengthMismatch(StatsError):
    pass


class Empty(StatsError):
    pass


class ZeroVariance(StatsError):
    pass


class DomainError(StatsError):
    pass


class NonpositiveReference(StatsError):
    pass


class TooFewGroups(StatsError):
    pass


class TooFewValues(StatsError):
    pass


class DegenerateSample(StatsError):
    pass
