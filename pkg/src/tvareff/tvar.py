"""Time-varying AR(q) estimation by penalized generalized least squares.

The observation rows say each return is a linear function of its own q
lags with period-specific coefficients; the penalty rows say each
random-walk coefficient series moves little between adjacent periods.
Stacking both and solving weighted least squares gives the coefficient
paths in one shot. The normal equations are block-tridiagonal, so the
solve is banded and linear in the sample length.

Weights are either a fixed smoothing ratio (lambda) or estimated by an
iterated feasible-GLS pass that re-fits the observation and
state-innovation variances from the residual blocks of the current
solution.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date

import numpy as np
import scipy.sparse as sp
from scipy.stats import norm

from .banded import factor_banded, selected_inverse, solve_factored
from .exceptions import ConfigError, DataError, NumericalError
from .series import ReturnSeries

__all__ = [
    "TvarConfig",
    "TvarFit",
    "StackedSystem",
    "CoefficientBands",
    "build_stacked_system",
    "fit_tvar",
    "solve_dense",
    "coefficient_bands",
    "impulse_response",
    "lag_design",
]

INTERCEPT_RANDOM_WALK = "random_walk"
INTERCEPT_CONSTANT = "constant"
MODE_FIXED = "fixed"
MODE_FEASIBLE_GLS = "feasible_gls"


@dataclass(frozen=True)
class TvarConfig:
    """Estimation settings for a time-varying AR(q) fit.

    `q` is the autoregressive order. `intercept_dynamics` chooses between
    a random-walk intercept path (default) and a single shared intercept.
    `variance_ratio_mode` is either ``"feasible_gls"`` (iterated variance
    re-estimation, the default) or ``"fixed"`` with `fixed_lambda` giving
    the smoothing ratio applied to every coefficient series.
    """

    q: int = 1
    intercept_dynamics: str = INTERCEPT_RANDOM_WALK
    variance_ratio_mode: str = MODE_FEASIBLE_GLS
    fixed_lambda: float | None = None
    fgls_max_iter: int = 20
    fgls_tol: float = 1.0e-8

    def __post_init__(self) -> None:
        if not isinstance(self.q, (int, np.integer)) or self.q < 1:
            raise ConfigError(f"q must be an integer >= 1, got {self.q!r}")
        if self.intercept_dynamics not in (INTERCEPT_RANDOM_WALK, INTERCEPT_CONSTANT):
            raise ConfigError(
                f"intercept_dynamics must be '{INTERCEPT_RANDOM_WALK}' or "
                f"'{INTERCEPT_CONSTANT}', got {self.intercept_dynamics!r}"
            )
        if self.variance_ratio_mode not in (MODE_FIXED, MODE_FEASIBLE_GLS):
            raise ConfigError(
                f"variance_ratio_mode must be '{MODE_FIXED}' or "
                f"'{MODE_FEASIBLE_GLS}', got {self.variance_ratio_mode!r}"
            )
        if self.variance_ratio_mode == MODE_FIXED:
            if self.fixed_lambda is None or self.fixed_lambda < 0:
                raise ConfigError("fixed mode requires fixed_lambda >= 0")
        if self.fgls_max_iter < 1:
            raise ConfigError("fgls_max_iter must be >= 1")
        if not self.fgls_tol > 0:
            raise ConfigError("fgls_tol must be positive")


@dataclass(frozen=True)
class StackedSystem:
    """Sparse stacked regression: observation rows above penalty rows.

    Unknown ordering is period-major. With a random-walk intercept each
    period contributes the block ``(a_0, a_1, ..., a_q)``; with a shared
    intercept the per-period blocks are ``(a_1, ..., a_q)`` and the
    intercept is the final column. Penalty rows are grouped by period
    transition, one row per random-walk series.
    """

    design: sp.csr_matrix
    response: np.ndarray
    weights: np.ndarray
    t_eff: int
    q: int
    intercept_dynamics: str

    @property
    def n_unknowns(self) -> int:
        return self.design.shape[1]


@dataclass(frozen=True)
class TvarFit:
    """Result of a time-varying AR fit.

    `coef_paths` has one row per effective period and columns
    ``(a_0, a_1, ..., a_q)`` with the intercept first. `coef_cov` holds
    the matching per-period covariance blocks (None when the fit was run
    with ``compute_cov=False``). `sigma_v2` and `lambda_used` are aligned
    to the coefficient columns; the intercept entry is NaN under shared-
    intercept dynamics where no innovation variance exists.
    """

    asset_id: str
    dates: tuple[date, ...]
    coef_paths: np.ndarray
    coef_cov: np.ndarray | None
    residuals: np.ndarray
    sigma_u2: float
    sigma_v2: np.ndarray
    lambda_used: np.ndarray
    config: TvarConfig
    converged: bool
    n_iter: int

    def __post_init__(self) -> None:
        for name in ("coef_paths", "residuals", "sigma_v2", "lambda_used"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.coef_cov is not None:
            cov = np.ascontiguousarray(self.coef_cov, dtype=np.float64)
            cov.setflags(write=False)
            object.__setattr__(self, "coef_cov", cov)

    @property
    def t_eff(self) -> int:
        return self.coef_paths.shape[0]


@dataclass(frozen=True)
class CoefficientBands:
    """Pointwise normal-approximation intervals around coefficient paths."""

    level: float
    lower: np.ndarray
    upper: np.ndarray


def _values_and_meta(r) -> tuple[np.ndarray, tuple[date, ...], str]:
    if isinstance(r, ReturnSeries):
        return np.asarray(r.values, dtype=np.float64), r.dates, r.asset_id
    vals = np.ascontiguousarray(r, dtype=np.float64)
    if vals.ndim != 1:
        raise DataError("return input must be one-dimensional")
    return vals, (), "series"


def lag_design(x: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Regressor matrix and response for an AR(q) in level form.

    Row t of the design is ``(1, x[q+t-1], ..., x[t])`` and the response
    is ``x[q+t]``, so there are ``len(x) - q`` usable rows.
    """
    n = x.size
    t_eff = n - q
    z = np.empty((t_eff, q + 1))
    z[:, 0] = 1.0
    for lag in range(1, q + 1):
        z[:, lag] = x[q - lag : n - lag]
    return z, x[q:].copy()


def build_stacked_system(r, config: TvarConfig, weights=(1.0, 1.0)) -> StackedSystem:
    """Assemble the stacked observation-plus-penalty regression.

    Parameters
    ----------
    r : ReturnSeries or ndarray
        Return observations, length n > 2q + 1.
    config : TvarConfig
        Only `q` and `intercept_dynamics` matter for the structure.
    weights : pair (sigma_u2, sigma_v2)
        Variance estimates; row weights are their reciprocals. `sigma_v2`
        may be a scalar or one value per random-walk series.

    Returns
    -------
    StackedSystem
        T_eff observation rows followed by (T_eff - 1) * m penalty rows,
        where m counts the random-walk coefficient series.
    """
    x, _, _ = _values_and_meta(r)
    q = config.q
    if x.size <= 2 * q + 1:
        raise DataError(
            f"need more than {2 * q + 1} returns for q={q}, got {x.size}"
        )
    z, y = lag_design(x, q)
    t_eff = z.shape[0]
    sigma_u2, sigma_v2 = weights
    rw_all = config.intercept_dynamics == INTERCEPT_RANDOM_WALK
    m = q + 1 if rw_all else q
    sv = np.broadcast_to(np.asarray(sigma_v2, dtype=np.float64), (m,)).copy()
    if sigma_u2 <= 0 or np.any(sv <= 0):
        raise ConfigError("variances in weights must be positive")

    n_unknowns = t_eff * m + (0 if rw_all else 1)
    n_pen = (t_eff - 1) * m
    design = sp.lil_matrix((t_eff + n_pen, n_unknowns))
    # Observation rows: period block t occupies columns [t*m, (t+1)*m).
    for t in range(t_eff):
        if rw_all:
            design[t, t * m : (t + 1) * m] = z[t]
        else:
            design[t, t * m : (t + 1) * m] = z[t, 1:]
            design[t, -1] = 1.0
    # Penalty rows: one per (transition, series).
    row = t_eff
    for t in range(1, t_eff):
        for j in range(m):
            design[row, t * m + j] = 1.0
            design[row, (t - 1) * m + j] = -1.0
            row += 1
    w = np.empty(t_eff + n_pen)
    w[:t_eff] = 1.0 / sigma_u2
    w[t_eff:] = np.tile(1.0 / sv, t_eff - 1)
    response = np.concatenate([y, np.zeros(n_pen)])
    return StackedSystem(
        design=design.tocsr(),
        response=response,
        weights=w,
        t_eff=t_eff,
        q=q,
        intercept_dynamics=config.intercept_dynamics,
    )


def solve_dense(system: StackedSystem) -> np.ndarray:
    """Reference solve of the stacked system via dense normal equations.

    Brute-force path for small cross-checks only: cost grows with the
    square of the unknown count, so keep T_eff small.
    """
    a = system.design.toarray()
    w = system.weights
    m = (a.T * w) @ a
    rhs = (a.T * w) @ system.response
    try:
        return np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"dense normal equations singular: {exc}") from exc


def _assemble_rw_band(
    z: np.ndarray, y: np.ndarray, w_obs: float, w_pen: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Banded normal equations for the all-random-walk layout.

    Lower band with half-bandwidth q + 1: within-period fill from the
    observation outer products, cross-period coupling from the penalties.
    """
    t_eff, k = z.shape
    n = t_eff * k
    bw = k
    ab = np.zeros((bw + 1, n))
    g = w_obs * np.einsum("ti,tj->tij", z, z)
    for r in range(k):
        for j in range(k - r):
            ab[r, j::k] = g[:, j + r, j]
    for j in range(k):
        ab[0, j::k][1:] += w_pen[j]
        ab[0, j::k][:-1] += w_pen[j]
        ab[bw, j::k][: t_eff - 1] = -w_pen[j]
    rhs = (w_obs * z * y[:, None]).ravel()
    return ab, rhs


def _assemble_const_band(
    z: np.ndarray, y: np.ndarray, w_obs: float, w_pen: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    """Banded path block plus dense intercept border for shared-intercept fits."""
    zt = z[:, 1:]
    t_eff, q = zt.shape
    n = t_eff * q
    ab = np.zeros((q + 1, n))
    g = w_obs * np.einsum("ti,tj->tij", zt, zt)
    for r in range(q):
        for j in range(q - r):
            ab[r, j::q] = g[:, j + r, j]
    for j in range(q):
        ab[0, j::q][1:] += w_pen[j]
        ab[0, j::q][:-1] += w_pen[j]
        ab[q, j::q][: t_eff - 1] = -w_pen[j]
    rhs = (w_obs * zt * y[:, None]).ravel()
    border = (w_obs * zt).ravel()
    s_cc = w_obs * t_eff
    rhs_c = w_obs * float(np.sum(y))
    return ab, rhs, border, s_cc, rhs_c


class _ScaledFactor:
    """Jacobi-scaled banded factorization with solve and selected inverse.

    Symmetric scaling by the diagonal keeps the pivot-ratio condition
    estimate about collinearity rather than about the (possibly huge)
    spread between observation and penalty weights.
    """

    def __init__(self, ab: np.ndarray):
        diag = ab[0].copy()
        if np.any(diag <= 0) or not np.all(np.isfinite(diag)):
            raise NumericalError("normal equations have a non-positive diagonal")
        self.scale = 1.0 / np.sqrt(diag)
        bw = ab.shape[0] - 1
        n = ab.shape[1]
        scaled = np.empty_like(ab)
        for r in range(bw + 1):
            scaled[r, : n - r] = ab[r, : n - r] * self.scale[r:] * self.scale[: n - r]
            scaled[r, n - r :] = 0.0
        self.low, self.d = factor_banded(scaled)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return solve_factored(self.low, self.d, rhs * self.scale) * self.scale

    def inverse_band(self) -> np.ndarray:
        zb = selected_inverse(self.low, self.d)
        bw = zb.shape[0] - 1
        n = zb.shape[1]
        out = np.empty_like(zb)
        for r in range(bw + 1):
            out[r, : n - r] = zb[r, : n - r] * self.scale[r:] * self.scale[: n - r]
            out[r, n - r :] = 0.0
        return out


def _band_to_blocks(band: np.ndarray, t_eff: int, k: int) -> np.ndarray:
    """Gather per-period k x k diagonal blocks out of band storage."""
    blocks = np.empty((t_eff, k, k))
    for r in range(k):
        for j in range(k - r):
            col = band[r, j::k]
            blocks[:, j + r, j] = col
            blocks[:, j, j + r] = col
    return blocks


def _solve_rw(z, y, w_obs, w_pen, need_band: bool):
    ab, rhs = _assemble_rw_band(z, y, w_obs, w_pen)
    fac = _ScaledFactor(ab)
    beta = fac.solve(rhs)
    band = fac.inverse_band() if need_band else None
    return beta.reshape(z.shape), band


def _rw_moments(z, y, paths, band):
    """Residual sums of squares and the matching posterior traces.

    `obs_trace` is the summed variance of the fitted values under the
    current weights (so obs_trace / sigma_u2 is the fit's effective
    degrees of freedom) and `pen_trace[j]` the summed posterior variance
    of series j's increments. Both come from the selected inverse of the
    weighted normal equations, which is exact on the band.
    """
    t_eff, k = z.shape
    resid = y - np.einsum("ti,ti->t", z, paths)
    blocks = _band_to_blocks(band, t_eff, k)
    obs_trace = float(np.einsum("ti,tij,tj->", z, blocks, z))
    tv2 = np.empty(k)
    pen_trace = np.empty(k)
    for j in range(k):
        dpath = np.diff(paths[:, j])
        diag = band[0, j::k]
        cross = band[k, j::k][: t_eff - 1]
        tv2[j] = float(dpath @ dpath)
        pen_trace[j] = float(np.sum(diag[1:] + diag[:-1] - 2.0 * cross))
    return resid, float(resid @ resid), obs_trace, tv2, pen_trace, blocks


# Bounds on the realized smoothing ratio during feasible GLS. The lower
# bound keeps the system full rank; the upper bound keeps penalty weights
# finite while leaving the paths constant to beyond solver precision.
_LAMBDA_MIN = 1.0e-8
_LAMBDA_MAX = 1.0e10


def _update_variances(rss, obs_trace, tv2, pen_trace, su2, sv2, t_eff):
    """One variance re-estimation step, degrees-of-freedom scaled.

    Dividing each residual sum of squares by its residual degrees of
    freedom (observations minus the fit's effective dof; increments
    minus the dof absorbed by the penalty) gives an update with the same
    fixed point as the conditional-moment recursion but without its
    creep: raw moments understate both variances, and correcting them by
    added trace terms converges too slowly to reach a boundary (a flat
    coefficient path) within any reasonable iteration budget. The state
    variances take the squared multiplicative step; they approach their
    target monotonically, so doubling the log-step halves the iteration
    count without overshoot while leaving fixed points unchanged.
    """
    ed_fit = obs_trace / su2
    ed_pen = pen_trace / sv2
    su2_new = max(rss / max(t_eff - ed_fit, 1.0), 1.0e-30)
    sv2_dof = tv2 / np.maximum((t_eff - 1.0) - ed_pen, 1.0e-12)
    sv2_new = np.where(sv2_dof > 0, sv2_dof**2 / sv2, 0.0)
    sv2_new = np.clip(sv2_new, su2_new / _LAMBDA_MAX, su2_new / _LAMBDA_MIN)
    return su2_new, sv2_new


def _fit_rw(x: np.ndarray, config: TvarConfig, compute_cov: bool):
    q = config.q
    z, y = lag_design(x, q)
    t_eff, k = z.shape

    if config.variance_ratio_mode == MODE_FIXED:
        lam = float(config.fixed_lambda)
        w_pen = np.full(k, lam)
        paths, band = _solve_rw(z, y, 1.0, w_pen, need_band=compute_cov)
        resid = y - np.einsum("ti,ti->t", z, paths)
        su2 = float(resid @ resid) / t_eff
        cov = su2 * _band_to_blocks(band, t_eff, k) if compute_cov else None
        sv2 = np.full(k, su2 / lam if lam > 0 else np.inf)
        lam_used = np.full(k, lam)
        return paths, cov, resid, su2, sv2, lam_used, True, 1

    # Feasible GLS. Fit in sd-normalized units so the unit-weight start
    # means the same thing at any data scale; lag coefficients are scale
    # free, so only the intercept column and variances map back.
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    sd = sd if sd > 0 else 1.0
    zn, yn = lag_design(x / sd, q)
    su2 = 1.0
    sv2 = np.ones(k)
    paths = np.zeros((t_eff, k))
    converged = False
    n_iter = 0
    resid = yn.copy()
    blocks = None
    for n_iter in range(1, config.fgls_max_iter + 1):
        prev = paths
        paths, band = _solve_rw(zn, yn, 1.0 / su2, 1.0 / sv2, need_band=True)
        resid, rss, obs_trace, tv2, pen_trace, blocks = _rw_moments(
            zn, yn, paths, band
        )
        su2, sv2 = _update_variances(
            rss, obs_trace, tv2, pen_trace, su2, sv2, t_eff
        )
        if np.max(np.abs(paths - prev)) < config.fgls_tol:
            converged = True
            break

    # Map back to the original scale.
    scale_vec = np.ones(k)
    scale_vec[0] = sd
    out_paths = paths * scale_vec
    resid = resid * sd
    out_su2 = su2 * sd * sd
    out_sv2 = sv2 * scale_vec**2
    cov = None
    if compute_cov:
        cov = blocks * scale_vec[None, :, None] * scale_vec[None, None, :]
    lam_used = out_su2 / out_sv2
    return out_paths, cov, resid, out_su2, out_sv2, lam_used, converged, n_iter


class _BorderedFactor:
    """Banded path block with one dense border column (shared intercept)."""

    def __init__(self, ab, border, s_cc):
        self.fac = _ScaledFactor(ab)
        self.border = border
        self.u = self.fac.solve(border)
        self.s_schur = s_cc - float(border @ self.u)
        if not (self.s_schur > 0) or s_cc / self.s_schur > 1e12:
            raise NumericalError(
                "shared intercept is collinear with the lag regressors "
                f"(Schur complement {self.s_schur:.3e})"
            )

    def solve(self, rhs_p, rhs_c):
        t = self.fac.solve(rhs_p)
        c = (rhs_c - float(self.border @ t)) / self.s_schur
        return t - self.u * c, c


def _fit_const(x: np.ndarray, config: TvarConfig, compute_cov: bool):
    q = config.q
    z, y = lag_design(x, q)
    t_eff = z.shape[0]

    def solve_once(w_obs, w_pen, need_band):
        ab, rhs, border, s_cc, rhs_c = _assemble_const_band(z, y, w_obs, w_pen)
        bf = _BorderedFactor(ab, border, s_cc)
        beta, c = bf.solve(rhs, rhs_c)
        band = bf.fac.inverse_band() if need_band else None
        return beta.reshape((t_eff, q)), c, band, bf

    def moments(paths_ar, c, band, bf):
        resid = y - c - np.einsum("ti,ti->t", z[:, 1:], paths_ar)
        # Full covariance of (paths, c) = banded inverse plus the rank-one
        # Schur correction u u^T / s plus the intercept row.
        u = bf.u.reshape((t_eff, q))
        s = bf.s_schur
        blocks = _band_to_blocks(band, t_eff, q) + np.einsum("ti,tj->tij", u, u) / s
        var_c = 1.0 / s
        cov_c_path = -u / s
        fitted_var = (
            var_c
            + 2.0 * np.einsum("ti,ti->t", z[:, 1:], cov_c_path)
            + np.einsum("ti,tij,tj->t", z[:, 1:], blocks, z[:, 1:])
        )
        obs_trace = float(np.sum(fitted_var))
        tv2 = np.empty(q)
        pen_trace = np.empty(q)
        for j in range(q):
            dpath = np.diff(paths_ar[:, j])
            diag = band[0, j::q]
            cross = band[q, j::q][: t_eff - 1]
            du = np.diff(u[:, j])
            tv2[j] = float(dpath @ dpath)
            pen_trace[j] = float(
                np.sum(diag[1:] + diag[:-1] - 2.0 * cross)
            ) + float(du @ du) / s
        return (
            resid,
            float(resid @ resid),
            obs_trace,
            tv2,
            pen_trace,
            blocks,
            var_c,
            cov_c_path,
        )

    if config.variance_ratio_mode == MODE_FIXED:
        lam = float(config.fixed_lambda)
        w_pen = np.full(q, lam)
        paths_ar, c, band, bf = solve_once(1.0, w_pen, need_band=compute_cov)
        resid = y - c - np.einsum("ti,ti->t", z[:, 1:], paths_ar)
        su2 = float(resid @ resid) / t_eff
        cov = None
        if compute_cov:
            u = bf.u.reshape((t_eff, q))
            blocks = _band_to_blocks(band, t_eff, q) + np.einsum(
                "ti,tj->tij", u, u
            ) / bf.s_schur
            cov = _expand_const_cov(
                su2 * blocks,
                su2 / bf.s_schur,
                -su2 * u / bf.s_schur,
            )
        sv2 = np.full(q, su2 / lam if lam > 0 else np.inf)
        paths = np.column_stack([np.full(t_eff, c), paths_ar])
        sv2_out = np.concatenate([[np.nan], sv2])
        lam_out = np.concatenate([[np.nan], np.full(q, lam)])
        return paths, cov, resid, su2, sv2_out, lam_out, True, 1

    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    sd = sd if sd > 0 else 1.0
    xn = x / sd
    zn, yn = lag_design(xn, q)
    z = zn
    y = yn
    su2 = 1.0
    sv2 = np.ones(q)
    paths_ar = np.zeros((t_eff, q))
    converged = False
    n_iter = 0
    c = 0.0
    out = None
    for n_iter in range(1, config.fgls_max_iter + 1):
        prev = paths_ar
        prev_c = c
        paths_ar, c, band, bf = solve_once(1.0 / su2, 1.0 / sv2, need_band=True)
        resid, rss, obs_trace, tv2, pen_trace, blocks, var_c, cov_c_path = moments(
            paths_ar, c, band, bf
        )
        su2, sv2 = _update_variances(
            rss, obs_trace, tv2, pen_trace, su2, sv2, t_eff
        )
        out = (blocks, var_c, cov_c_path)
        delta = max(np.max(np.abs(paths_ar - prev)), abs(c - prev_c))
        if delta < config.fgls_tol:
            converged = True
            break
    blocks, var_c, cov_c_path = out
    paths = np.column_stack([np.full(t_eff, c * sd), paths_ar])
    cov = None
    if compute_cov:
        cov = _expand_const_cov(blocks, var_c, cov_c_path)
        scale_vec = np.ones(q + 1)
        scale_vec[0] = sd
        cov = cov * scale_vec[None, :, None] * scale_vec[None, None, :]
    resid = resid * sd
    out_su2 = su2 * sd * sd
    # Lag-coefficient increments are dimensionless, so their variances do
    # not rescale; only sigma_u^2 picks up the sd^2 factor.
    sv2_out = np.concatenate([[np.nan], sv2])
    lam_out = np.concatenate([[np.nan], out_su2 / sv2])
    return paths, cov, resid, out_su2, sv2_out, lam_out, converged, n_iter


def _expand_const_cov(blocks, var_c, cov_c_path):
    """Per-period (q+1) x (q+1) blocks with the shared intercept in slot 0."""
    t_eff, q, _ = blocks.shape
    cov = np.empty((t_eff, q + 1, q + 1))
    cov[:, 0, 0] = var_c
    cov[:, 0, 1:] = cov_c_path
    cov[:, 1:, 0] = cov_c_path
    cov[:, 1:, 1:] = blocks
    return cov


def fit_tvar(r, config: TvarConfig, compute_cov: bool = True) -> TvarFit:
    """Fit the time-varying AR(q) coefficient paths of a return series.

    Parameters
    ----------
    r : ReturnSeries or ndarray
        Returns, length n > 2q + 1; the first q observations only feed
        lags, leaving T_eff = n - q estimated periods.
    config : TvarConfig
        Order, intercept dynamics and weighting mode.
    compute_cov : bool
        Skip the per-period covariance blocks when False. Bootstrap
        replications only need the paths, and the selected-inverse pass
        is the most expensive part of a fixed-lambda solve.

    Returns
    -------
    TvarFit
        Deterministic for identical inputs. Under feasible GLS the solver
        starts from equal unit weights (scaled to the series sd), then
        alternates solving the stacked system with re-estimating
        (sigma_u^2, sigma_v^2 per series) from the observation and
        penalty residual moments until the largest coefficient change
        drops below ``fgls_tol`` or ``fgls_max_iter`` passes are spent.
        Hitting the iteration cap is not an error; the last iterate is
        returned with ``converged=False``.

    Raises
    ------
    NumericalError
        If the normal equations are singular or near-singular (condition
        estimate beyond 1e12), e.g. for constant regressors or lambda=0.
    DataError
        If the series is too short for the requested order.
    """
    x, dates, asset_id = _values_and_meta(r)
    if x.size <= 2 * config.q + 1:
        raise DataError(
            f"need more than {2 * config.q + 1} returns for q={config.q}, got {x.size}"
        )
    if config.intercept_dynamics == INTERCEPT_RANDOM_WALK:
        paths, cov, resid, su2, sv2, lam, converged, n_iter = _fit_rw(
            x, config, compute_cov
        )
    else:
        paths, cov, resid, su2, sv2, lam, converged, n_iter = _fit_const(
            x, config, compute_cov
        )
    fit_dates = dates[config.q :] if dates else ()
    return TvarFit(
        asset_id=asset_id,
        dates=fit_dates,
        coef_paths=paths,
        coef_cov=cov,
        residuals=resid,
        sigma_u2=float(su2),
        sigma_v2=sv2,
        lambda_used=lam,
        config=config,
        converged=converged,
        n_iter=n_iter,
    )


def coefficient_bands(fit: TvarFit, level: float = 0.95) -> CoefficientBands:
    """Pointwise +/- z * se intervals around each coefficient path."""
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must be inside (0, 1), got {level!r}")
    if fit.coef_cov is None:
        raise ConfigError("fit was computed without covariance blocks")
    zval = float(norm.ppf(0.5 * (1.0 + level)))
    se = np.sqrt(np.maximum(np.diagonal(fit.coef_cov, axis1=1, axis2=2), 0.0))
    return CoefficientBands(
        level=level,
        lower=fit.coef_paths - zval * se,
        upper=fit.coef_paths + zval * se,
    )


def impulse_response(fit: TvarFit, t: int, horizon: int) -> np.ndarray:
    """Response of the period-t AR recursion to a unit shock.

    Treats the coefficients frozen at period t: psi_0 = 1 and
    ``psi_h = sum_j a_{j,t} psi_{h-j}``. Returns horizon + 1 values.
    """
    if not 0 <= t < fit.t_eff:
        raise ConfigError(f"period index {t} outside [0, {fit.t_eff})")
    if horizon < 0:
        raise ConfigError("horizon must be >= 0")
    phi = fit.coef_paths[t, 1:]
    q = phi.size
    psi = np.zeros(horizon + 1)
    psi[0] = 1.0
    for h in range(1, horizon + 1):
        upto = min(h, q)
        acc = 0.0
        for j in range(1, upto + 1):
            acc += phi[j - 1] * psi[h - j]
        psi[h] = acc
    return psi
