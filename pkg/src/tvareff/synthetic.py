"""Synthetic AR data generators and an independent smoothing oracle.

Everything here exists to check the GLS fitting path from the outside:
the generators produce series with known coefficient paths, and the
fixed-interval smoother recovers those paths through a completely
different algorithm (forward filter, backward pass) so agreement is
meaningful evidence rather than a tautology.
"""
from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .exceptions import ConfigError, NumericalError
from .series import ReturnSeries
from .tvar import lag_design

__all__ = [
    "DgpSpec",
    "simulate",
    "kalman_smoother_oracle",
    "companion_spectral_radius",
    "KIND_CONSTANT_AR",
    "KIND_RANDOM_WALK",
    "KIND_DETERMINISTIC",
]

KIND_CONSTANT_AR = "constant_ar"
KIND_RANDOM_WALK = "random_walk_coeffs"
KIND_DETERMINISTIC = "deterministic_path"

# Stationary generators discard this many leading draws.
BURN_IN = 200
# Realized random-walk paths whose companion radius passes this are rejected.
EXPLOSIVE_RADIUS = 1.2


def companion_spectral_radius(phi: np.ndarray) -> float:
    """Largest eigenvalue modulus of the AR companion matrix."""
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    q = phi.size
    if q == 1:
        return float(abs(phi[0]))
    comp = np.zeros((q, q))
    comp[0, :] = phi
    comp[1:, :-1] = np.eye(q - 1)
    return float(np.max(np.abs(np.linalg.eigvals(comp))))


@dataclass(frozen=True)
class DgpSpec:
    """Recipe for one synthetic series.

    `kind` selects the coefficient dynamics:

    - ``constant_ar``: fixed `coefficients` (length q) and `intercept`;
      must be stationary. A burn-in of 200 draws is discarded.
    - ``random_walk_coeffs``: coefficient vector (intercept plus q lags)
      starts at `initial_coefficients` and each series takes independent
      Gaussian steps with sd `state_sd` (scalar or per-series).
    - ``deterministic_path``: `coef_path` supplies the full (t, q+1)
      coefficient matrix, intercept in column 0.
    """

    kind: str
    q: int
    t: int
    seed: int = 0
    innovation_sd: float = 1.0
    coefficients: tuple[float, ...] | None = None
    intercept: float = 0.0
    initial_coefficients: tuple[float, ...] | None = None
    state_sd: float | tuple[float, ...] | None = None
    coef_path: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind not in (KIND_CONSTANT_AR, KIND_RANDOM_WALK, KIND_DETERMINISTIC):
            raise ConfigError(f"unknown DGP kind {self.kind!r}")
        if self.q < 1:
            raise ConfigError("q must be >= 1")
        if self.t <= 2 * self.q + 1:
            raise ConfigError(f"t must exceed {2 * self.q + 1} for q={self.q}")
        if self.innovation_sd <= 0:
            raise ConfigError("innovation_sd must be positive")
        if self.kind == KIND_CONSTANT_AR:
            if self.coefficients is None or len(self.coefficients) != self.q:
                raise ConfigError("constant_ar needs q coefficients")
            rad = companion_spectral_radius(np.asarray(self.coefficients))
            if rad >= 1.0:
                raise ConfigError(
                    f"constant_ar spec is nonstationary (companion radius {rad:.4f})"
                )
        elif self.kind == KIND_RANDOM_WALK:
            if (
                self.initial_coefficients is None
                or len(self.initial_coefficients) != self.q + 1
            ):
                raise ConfigError(
                    "random_walk_coeffs needs q + 1 initial coefficients "
                    "(intercept first)"
                )
            if self.state_sd is None:
                raise ConfigError("random_walk_coeffs needs state_sd")
        else:
            if self.coef_path is None:
                raise ConfigError("deterministic_path needs coef_path")
            path = np.asarray(self.coef_path)
            if path.shape != (self.t, self.q + 1):
                raise ConfigError(
                    f"coef_path must have shape ({self.t}, {self.q + 1}), "
                    f"got {path.shape}"
                )


def _coef_paths(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    t, q = spec.t, spec.q
    if spec.kind == KIND_CONSTANT_AR:
        row = np.concatenate([[spec.intercept], np.asarray(spec.coefficients)])
        return np.tile(row, (t, 1))
    if spec.kind == KIND_DETERMINISTIC:
        return np.asarray(spec.coef_path, dtype=np.float64).copy()
    sd = np.broadcast_to(np.asarray(spec.state_sd, dtype=np.float64), (q + 1,))
    steps = rng.normal(0.0, 1.0, size=(t - 1, q + 1)) * sd
    path = np.empty((t, q + 1))
    path[0] = spec.initial_coefficients
    path[1:] = path[0] + np.cumsum(steps, axis=0)
    for i in range(t):
        rad = companion_spectral_radius(path[i, 1:])
        if rad > EXPLOSIVE_RADIUS:
            raise NumericalError(
                f"realized coefficient path explosive at period {i} "
                f"(companion radius {rad:.4f} > {EXPLOSIVE_RADIUS}); "
                "reseed or shrink state_sd"
            )
    return path


def simulate(spec: DgpSpec) -> tuple[ReturnSeries, np.ndarray]:
    """Draw one series from the DGP along with its true coefficient paths.

    Returns
    -------
    (series, paths)
        `series` has length `spec.t`; `paths` is the (t, q+1) coefficient
        matrix that generated it, aligned so ``paths[i]`` produced
        ``series.values[i]``. Deterministic given `spec.seed`; different
        seeds give different draws.
    """
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    q, t = spec.q, spec.t
    paths = _coef_paths(spec, rng)

    burn = BURN_IN if spec.kind == KIND_CONSTANT_AR else 0
    total = t + burn
    eps = rng.normal(0.0, spec.innovation_sd, size=total)
    lags = np.zeros(q)  # most recent first
    x = np.empty(total)
    for i in range(total):
        coef = paths[max(i - burn, 0)] if burn else paths[i]
        x[i] = coef[0] + float(coef[1:] @ lags) + eps[i]
        lags[1:] = lags[:-1]
        lags[0] = x[i]
    x = x[burn:]

    start = date(2000, 1, 1)
    dates = tuple(start + timedelta(days=i) for i in range(t))
    series = ReturnSeries(
        asset_id=f"sim-{spec.kind}-{spec.seed}", dates=dates, values=x
    )
    return series, paths


def kalman_smoother_oracle(
    r,
    q: int,
    sigma_u2: float,
    sigma_v2,
    init_var: float = 1.0e7,
) -> np.ndarray:
    """Fixed-interval smoothed coefficient paths for the state-space form.

    The AR coefficients are the state vector with identity transition and
    per-series innovation variances `sigma_v2`; the observation loads the
    state with the lagged returns. Initialization is diffuse in the
    approximate sense of a large initial variance (`init_var`), so the
    first few smoothed periods carry a visible remnant of the prior and
    comparisons against the penalized-GLS path should skip them.

    Parameters
    ----------
    r : ReturnSeries or ndarray
        Returns, length n > 2q + 1.
    q : int
        AR order; the state has q + 1 entries (intercept first).
    sigma_u2 : float
        Observation noise variance.
    sigma_v2 : float or array-like
        State innovation variance, scalar or one per coefficient series.

    Returns
    -------
    ndarray, shape (n - q, q + 1)
        Smoothed state means per effective period.
    """
    x = np.asarray(getattr(r, "values", r), dtype=np.float64)
    z, y = lag_design(x, q)
    t_eff, k = z.shape
    qdiag = np.broadcast_to(np.asarray(sigma_v2, dtype=np.float64), (k,))
    qmat = np.diag(qdiag.copy())

    a_filt = np.empty((t_eff, k))
    p_filt = np.empty((t_eff, k, k))

    a = np.zeros(k)
    p = np.eye(k) * init_var
    eye = np.eye(k)
    for i in range(t_eff):
        zi = z[i]
        pz = p @ zi
        f = float(zi @ pz) + sigma_u2
        gain = pz / f
        a = a + gain * (y[i] - float(zi @ a))
        # Joseph form keeps the updated covariance symmetric PSD even
        # with the huge diffuse prior in the first steps.
        imkz = eye - np.outer(gain, zi)
        p = imkz @ p @ imkz.T + sigma_u2 * np.outer(gain, gain)
        a_filt[i] = a
        p_filt[i] = p
        p = p + qmat

    smoothed = np.empty((t_eff, k))
    smoothed[-1] = a_filt[-1]
    s_mean = a_filt[-1]
    for i in range(t_eff - 2, -1, -1):
        pp_next = p_filt[i] + qmat
        c = np.linalg.solve(pp_next.T, p_filt[i].T).T
        s_mean = a_filt[i] + c @ (s_mean - a_filt[i])
        smoothed[i] = s_mean
    return smoothed
