"""Inflation and interest accumulation for arbitrary integrable rate functions."""

from .basis import CONSTANT, BasisFunctionSpec, design_matrix, trend_pool, trig_pool
from .errors import (
    AccuracyError,
    CsvParseError,
    DomainError,
    InfeasibleStartError,
    InfrateError,
    IntegrandDomainError,
    PositivityError,
    RateDomainError,
)
from .fitting import (
    BackwardElimination,
    BasisRegression,
    BestPairTrend,
    CpiModelReport,
    DirectRateFit,
    LinearFit,
    OptimizerConfig,
    RateFitReport,
    best_pair_trend,
    cpi_model_from_fit,
    fit_rate_direct,
    functional_residual,
    greedy_backward_elimination,
    linear_least_squares,
)
from .presets import reference_trig_rate
from .quadrature import QuadratureConfig, QuadratureResult, integrate, integrate_intervals
from .rates import (
    AccumulationResult,
    BasisCpiModel,
    BasisExpansionRate,
    CallableCpi,
    ConstantRate,
    CpiDerivedRate,
    CpiModel,
    ExponentialCpi,
    LogLinearCpi,
    PiecewiseAffineCpi,
    PiecewiseConstantRate,
    RateFunction,
    TangentExponential,
    accumulate,
    constant_accumulate,
    log_accumulation,
    log_linear_model,
    piecewise_affine_model,
    piecewise_product_accumulate,
    rate_from_cpi,
    real_value,
    tangent_exponential,
)
from .timebase import (
    CpiObservation,
    CpiSeries,
    MonthCode,
    format_cpi_csv,
    load_bundled_cpi,
    month_code_to_time,
    parse_cpi_csv,
    read_cpi_csv,
    series_log_ratios,
)

__version__ = "0.1.0"

__all__ = [
    "AccumulationResult",
    "AccuracyError",
    "BackwardElimination",
    "BasisCpiModel",
    "BasisExpansionRate",
    "BasisFunctionSpec",
    "BasisRegression",
    "BestPairTrend",
    "CONSTANT",
    "CallableCpi",
    "ConstantRate",
    "CpiDerivedRate",
    "CpiModel",
    "CpiModelReport",
    "CpiObservation",
    "CpiSeries",
    "CsvParseError",
    "DirectRateFit",
    "DomainError",
    "ExponentialCpi",
    "InfeasibleStartError",
    "InfrateError",
    "IntegrandDomainError",
    "LinearFit",
    "LogLinearCpi",
    "MonthCode",
    "OptimizerConfig",
    "PiecewiseAffineCpi",
    "PiecewiseConstantRate",
    "PositivityError",
    "QuadratureConfig",
    "QuadratureResult",
    "RateDomainError",
    "RateFitReport",
    "RateFunction",
    "TangentExponential",
    "accumulate",
    "best_pair_trend",
    "constant_accumulate",
    "cpi_model_from_fit",
    "design_matrix",
    "fit_rate_direct",
    "format_cpi_csv",
    "functional_residual",
    "greedy_backward_elimination",
    "integrate",
    "integrate_intervals",
    "linear_least_squares",
    "load_bundled_cpi",
    "log_accumulation",
    "log_linear_model",
    "month_code_to_time",
    "parse_cpi_csv",
    "piecewise_affine_model",
    "piecewise_product_accumulate",
    "rate_from_cpi",
    "read_cpi_csv",
    "real_value",
    "reference_trig_rate",
    "series_log_ratios",
    "tangent_exponential",
    "trend_pool",
    "trig_pool",
]

