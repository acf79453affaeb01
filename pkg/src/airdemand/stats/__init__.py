from .compare import (
    AnovaTable,
    Comparison,
    FitLine,
    PairwiseMatrix,
    TTestResult,
    anova_oneway,
    compare_models,
    fit_line,
    pct_of_reference,
    rank_models,
    rmse,
    squared_errors,
    t_test_onesided,
)
from .special import f_cdf, f_sf, reg_incomplete_beta, t_cdf, t_sf

__all__ = [
    "AnovaTable",
    "Comparison",
    "FitLine",
    "PairwiseMatrix",
    "TTestResult",
    "anova_oneway",
    "compare_models",
    "f_cdf",
    "f_sf",
    "fit_line",
    "pct_of_reference",
    "rank_models",
    "reg_incomplete_beta",
    "rmse",
    "squared_errors",
    "t_cdf",
    "t_sf",
    "t_test_onesided",
]
