"""Time-varying market-efficiency measurement for asset return series.

The pipeline: load prices, take log returns, pick an AR order by BIC,
fit a time-varying AR(q) by penalized GLS, turn the coefficient paths
into a per-period efficiency degree, and bound it with bootstrap bands
computed under the efficient-market null.
"""
from .efficiency import (
    CiBands,
    EfficiencyPath,
    EfficiencyVerdict,
    bootstrap_bands,
    classify,
    efficiency_degree,
)
from .exceptions import (
    ConfigError,
    DataError,
    NumericalError,
    TvareffError,
    ValidationError,
)
from .series import (
    PriceSeries,
    ReturnSeries,
    StatsSummary,
    descriptive_stats,
    load_prices,
    log_returns,
    write_prices,
)
from .synthetic import DgpSpec, kalman_smoother_oracle, simulate
from .tvar import (
    CoefficientBands,
    TvarConfig,
    TvarFit,
    coefficient_bands,
    fit_tvar,
    impulse_response,
)
from .unitroot import (
    AdfResult,
    adf_test,
    bic_lag_select,
    bic_table,
    default_max_lag,
)
from .validation import CheckResult, ValidationReport, run_validation

__version__ = "0.1.0"

__all__ = [
    "AdfResult",
    "CheckResult",
    "CiBands",
    "CoefficientBands",
    "ConfigError",
    "DataError",
    "DgpSpec",
    "EfficiencyPath",
    "EfficiencyVerdict",
    "NumericalError",
    "PriceSeries",
    "ReturnSeries",
    "StatsSummary",
    "TvarConfig",
    "TvarFit",
    "TvareffError",
    "ValidationError",
    "ValidationReport",
    "adf_test",
    "bic_lag_select",
    "bic_table",
    "bootstrap_bands",
    "classify",
    "coefficient_bands",
    "default_max_lag",
    "descriptive_stats",
    "efficiency_degree",
    "fit_tvar",
    "impulse_response",
    "kalman_smoother_oracle",
    "load_prices",
    "log_returns",
    "run_validation",
    "simulate",
    "write_prices",
    "__version__",
]
