"""Augmented Dickey-Fuller test and BIC lag selection.

Lag order is chosen by minimizing ``n ln(RSS/n) + k ln(n)`` where k
counts every estimated coefficient, deterministic terms included.
Candidates are always compared on a common estimation sample aligned at
the configured maximum lag so their RSS values are commensurable; the
final test regression then re-uses the full sample available for the
chosen lag.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DataError, NumericalError
from .series import ReturnSeries

__all__ = [
    "AdfResult",
    "adf_test",
    "bic_lag_select",
    "bic_table",
    "default_max_lag",
    "SPEC_CONSTANT",
    "SPEC_CONSTANT_TREND",
    "FAMILY_ADF",
    "FAMILY_AR_LEVEL",
]

SPEC_CONSTANT = "constant"
SPEC_CONSTANT_TREND = "constant+trend"
FAMILY_ADF = "adf_augmentation"
FAMILY_AR_LEVEL = "ar_level"

# Asymptotic 1% critical values for the t-ratio on the lagged level.
_CRITICAL_1PCT = {SPEC_CONSTANT: -3.43, SPEC_CONSTANT_TREND: -3.96}


@dataclass(frozen=True)
class AdfResult:
    """Outcome of one unit-root test.

    `reject_unit_root_1pct` is simply ``statistic < critical_value_1pct``;
    no interpolation across sample sizes or significance levels is done.
    """

    statistic: float
    lag: int
    n_obs: int
    deterministic_spec: str
    critical_value_1pct: float
    reject_unit_root_1pct: bool


def default_max_lag(n: int) -> int:
    """Common lag-window schedule: floor(12 * (n/100)^0.25)."""
    if n < 1:
        raise DataError("series is empty")
    return int(math.floor(12.0 * (n / 100.0) ** 0.25))


def _values(r) -> np.ndarray:
    if isinstance(r, ReturnSeries):
        return np.asarray(r.values, dtype=np.float64)
    vals = np.ascontiguousarray(r, dtype=np.float64)
    if vals.ndim != 1:
        raise DataError("series input must be one-dimensional")
    return vals


def _ols(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """Least squares with an explicit rank check.

    Returns (coefficients, rss, inverse Gram diagonal) so callers can form
    t-ratios. Rank-deficient designs (constant series, collinear trend)
    raise instead of silently returning a minimum-norm solution.
    """
    rows, cols = design.shape
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < cols:
        raise NumericalError(
            f"regression design is rank deficient ({rank} < {cols}); "
            "the series is degenerate for this specification"
        )
    resid = y - design @ beta
    rss = float(resid @ resid)
    gram_inv = np.linalg.inv(design.T @ design)
    return beta, rss, np.diag(gram_inv)


def _adf_design(
    x: np.ndarray, k: int, align: int, spec: str
) -> tuple[np.ndarray, np.ndarray, int]:
    """ADF regression at lag k using rows aligned at `align` >= k.

    Response is the first difference; regressors are the deterministic
    terms, the lagged level, then k lagged differences. Returns the level
    column index too, since it depends on the deterministic spec.
    """
    dx = np.diff(x)
    rows = dx.size - align
    resp = dx[align:]
    cols = [np.ones(rows), np.arange(1, rows + 1, dtype=np.float64)]
    if spec == SPEC_CONSTANT:
        cols = cols[:1]
    level_idx = len(cols)
    cols.append(x[align : align + rows])
    for i in range(1, k + 1):
        cols.append(dx[align - i : align - i + rows])
    return np.column_stack(cols), resp, level_idx


def _check_spec(spec: str) -> None:
    if spec not in (SPEC_CONSTANT, SPEC_CONSTANT_TREND):
        raise ConfigError(
            f"deterministic spec must be '{SPEC_CONSTANT}' or "
            f"'{SPEC_CONSTANT_TREND}', got {spec!r}"
        )


def bic_table(
    r,
    max_lag: int,
    model_family: str = FAMILY_AR_LEVEL,
    deterministic: str = SPEC_CONSTANT_TREND,
) -> tuple[np.ndarray, np.ndarray]:
    """BIC values for every candidate lag on the common aligned sample.

    For ``adf_augmentation`` the candidates are 0..max_lag augmentation
    lags of the difference regression; for ``ar_level`` they are AR
    orders 1..max_lag of the level regression with a constant.
    """
    x = _values(r)
    n = x.size
    if max_lag < 0:
        raise ConfigError("max_lag must be >= 0")
    if model_family == FAMILY_ADF:
        _check_spec(deterministic)
        rows = n - 1 - max_lag
        n_det = 1 if deterministic == SPEC_CONSTANT else 2
        if rows < n_det + max_lag + 6:
            raise DataError(
                f"insufficient observations: n={n} supports no ADF fit at "
                f"max_lag={max_lag}"
            )
        lags = np.arange(max_lag + 1)
        bics = np.empty(lags.size)
        for k in lags:
            design, resp, _ = _adf_design(x, int(k), max_lag, deterministic)
            _, rss, _ = _ols(design, resp)
            n_params = design.shape[1]
            bics[k] = rows * math.log(rss / rows) + n_params * math.log(rows)
        return lags, bics
    if model_family == FAMILY_AR_LEVEL:
        if max_lag < 1:
            raise ConfigError("ar_level family needs max_lag >= 1")
        rows = n - max_lag
        if rows < max_lag + 7:
            raise DataError(
                f"insufficient observations: n={n} supports no AR fit at "
                f"max_lag={max_lag}"
            )
        lags = np.arange(1, max_lag + 1)
        bics = np.empty(lags.size)
        resp = x[max_lag:]
        for i, p in enumerate(lags):
            cols = [np.ones(rows)]
            for lag in range(1, int(p) + 1):
                cols.append(x[max_lag - lag : n - lag])
            design = np.column_stack(cols)
            _, rss, _ = _ols(design, resp)
            bics[i] = rows * math.log(rss / rows) + design.shape[1] * math.log(rows)
        return lags, bics
    raise ConfigError(
        f"model_family must be '{FAMILY_ADF}' or '{FAMILY_AR_LEVEL}', "
        f"got {model_family!r}"
    )


def bic_lag_select(
    r,
    max_lag: int | None = None,
    model_family: str = FAMILY_AR_LEVEL,
    deterministic: str = SPEC_CONSTANT_TREND,
) -> int:
    """Lag minimizing the BIC over the candidate set; ties go to the smaller lag."""
    x = _values(r)
    if max_lag is None:
        max_lag = default_max_lag(x.size)
    lags, bics = bic_table(x, max_lag, model_family, deterministic)
    return int(lags[int(np.argmin(bics))])


def adf_test(r, max_lag: int | None = None, spec: str = SPEC_CONSTANT_TREND) -> AdfResult:
    """Augmented Dickey-Fuller t-test on the lagged level.

    Parameters
    ----------
    r : ReturnSeries or ndarray
        Series tested in levels.
    max_lag : int, optional
        Largest augmentation lag considered; defaults to the
        floor(12 * (n/100)^0.25) schedule.
    spec : str
        Deterministic terms: ``"constant"`` or ``"constant+trend"``.

    Returns
    -------
    AdfResult
        The statistic is the t-ratio on the lagged level, computed on the
        full sample available for the BIC-selected augmentation lag. The
        1% decision compares against a hard-coded asymptotic critical
        value for the chosen deterministic spec.
    """
    _check_spec(spec)
    x = _values(r)
    n = x.size
    if max_lag is None:
        max_lag = default_max_lag(n)
    k = bic_lag_select(x, max_lag, FAMILY_ADF, deterministic=spec)
    design, resp, level_idx = _adf_design(x, k, k, spec)
    beta, rss, gram_diag = _ols(design, resp)
    rows, n_params = design.shape
    dof = rows - n_params
    if dof < 1:
        raise DataError(f"insufficient observations for ADF at lag {k}")
    sigma2 = rss / dof
    se = math.sqrt(sigma2 * gram_diag[level_idx])
    stat = float(beta[level_idx] / se)
    crit = _CRITICAL_1PCT[spec]
    return AdfResult(
        statistic=stat,
        lag=int(k),
        n_obs=int(rows),
        deterministic_spec=spec,
        critical_value_1pct=crit,
        reject_unit_root_1pct=bool(stat < crit),
    )
