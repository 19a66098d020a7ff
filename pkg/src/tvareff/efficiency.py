"""Market-efficiency degree and bootstrap confidence bands.

The degree at period t is ``|S_t / (1 - S_t)|`` with S_t the sum of the
fitted lag coefficients: zero when returns are unpredictable from their
own lags, growing as predictability accumulates, and exploding as the
coefficient sum approaches one. Bands come from resampling the returns
under a no-autocorrelation null and re-fitting, so a period is flagged
inefficient when its measured degree exceeds what sampling noise alone
produces.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import date

import numpy as np

from .exceptions import ConfigError, NumericalError
from .tvar import TvarConfig, TvarFit, fit_tvar

__all__ = [
    "EfficiencyPath",
    "CiBands",
    "EfficiencyVerdict",
    "efficiency_degree",
    "bootstrap_bands",
    "classify",
    "ZETA_CAP",
]

ZETA_CAP = 1.0e8
_CAP_TOL = 1.0e-8
_MAX_REDRAWS = 100


@dataclass(frozen=True)
class EfficiencyPath:
    """Per-period efficiency degree derived from one fit."""

    asset_id: str
    dates: tuple[date, ...]
    zeta: np.ndarray
    capped_flags: np.ndarray


@dataclass(frozen=True)
class CiBands:
    """Pointwise null-distribution quantile bands for the degree path."""

    level: float
    lower: np.ndarray
    upper: np.ndarray
    n_boot: int
    seed: int
    n_redrawn: int = 0


@dataclass(frozen=True)
class EfficiencyVerdict:
    """Flags and summary statistics from comparing a path to its bands."""

    asset_id: str
    dates: tuple[date, ...]
    zeta: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    inefficient_flags: np.ndarray
    mean_zeta: float
    sd_zeta: float
    flagged_fraction: float


def _zeta_from_paths(
    coef_paths: np.ndarray, cap: float, cap_tol: float
) -> tuple[np.ndarray, np.ndarray]:
    s = coef_paths[:, 1:].sum(axis=1)
    denom = 1.0 - s
    capped = np.abs(denom) < cap_tol
    safe = np.where(capped, 1.0, denom)
    zeta = np.abs(s / safe)
    zeta[capped] = cap
    # A finite denominator can still push the ratio past the ceiling.
    over = zeta > cap
    zeta[over] = cap
    return zeta, capped | over


def efficiency_degree(
    fit: TvarFit, cap: float = ZETA_CAP, cap_tol: float = _CAP_TOL
) -> EfficiencyPath:
    """Efficiency degree per period from fitted coefficient paths.

    Periods where the lag-coefficient sum is within `cap_tol` of one are
    numerically singular: the degree is set to `cap` and flagged rather
    than letting a near-zero denominator produce garbage.
    """
    zeta, capped = _zeta_from_paths(fit.coef_paths, cap, cap_tol)
    return EfficiencyPath(
        asset_id=fit.asset_id, dates=fit.dates, zeta=zeta, capped_flags=capped
    )


def _replication_zeta(
    values: np.ndarray,
    mean: float,
    centered: np.ndarray,
    config: TvarConfig,
    seed: int,
    rep: int,
) -> tuple[np.ndarray, int]:
    """One bootstrap replication; failed fits are redrawn on a fresh substream."""
    n = values.size
    failures = 0
    for attempt in range(_MAX_REDRAWS):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(rep, attempt))
        )
        idx = rng.integers(0, n, size=n)
        resampled = mean + centered[idx]
        try:
            fit = fit_tvar(resampled, config, compute_cov=False)
        except NumericalError:
            failures += 1
            continue
        zeta, _ = _zeta_from_paths(fit.coef_paths, ZETA_CAP, _CAP_TOL)
        return zeta, failures
    raise NumericalError(
        f"bootstrap replication {rep} failed {_MAX_REDRAWS} consecutive fits"
    )


def _chunk_worker(args) -> tuple[list[int], np.ndarray, int]:
    values, config, seed, reps = args
    mean = float(values.mean())
    centered = values - mean
    t_eff = values.size - config.q
    out = np.empty((len(reps), t_eff))
    failures = 0
    for row, rep in enumerate(reps):
        out[row], f = _replication_zeta(values, mean, centered, config, seed, rep)
        failures += f
    return reps, out, failures


def bootstrap_bands(
    r,
    config: TvarConfig,
    n_boot: int = 10000,
    level: float = 0.99,
    seed: int = 0,
    n_jobs: int = 1,
) -> CiBands:
    """Null-hypothesis quantile bands for the efficiency degree.

    The null is zero autocorrelation at unchanged mean: residuals are the
    demeaned observed returns, resampled iid with replacement and
    recentered on the sample mean. Each replication re-fits the model
    with `config` and records its degree path; bands are the pointwise
    empirical quantiles at ``(1 -/+ level) / 2``.

    Every replication draws from its own RNG substream keyed by
    ``(seed, replication, attempt)``, so results are identical for any
    `n_jobs` and any worker scheduling, and a redrawn failure cannot
    shift the draws of other replications.

    Parameters
    ----------
    r : ReturnSeries or ndarray
        Observed returns.
    config : TvarConfig
        Fit settings reused for every replication.
    n_boot : int
        Number of replications, at least 100.
    level : float
        Band coverage, in (0, 1).
    seed : int
        Root seed; fixing it fixes the output exactly.
    n_jobs : int
        Worker processes; 1 runs inline.

    Raises
    ------
    NumericalError
        If more than 1% of replications fail even after redraws.
    """
    if n_boot < 100:
        raise ConfigError(f"n_boot must be >= 100, got {n_boot}")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"level must be inside (0, 1), got {level!r}")
    if n_jobs < 1:
        raise ConfigError("n_jobs must be >= 1")
    values = np.asarray(getattr(r, "values", r), dtype=np.float64)
    t_eff = values.size - config.q
    if t_eff < config.q + 2:
        raise ConfigError("series too short for bootstrap under this config")

    zmat = np.empty((n_boot, t_eff))
    failures = 0
    if n_jobs == 1:
        reps, rows, failures = _chunk_worker((values, config, seed, list(range(n_boot))))
        zmat[reps] = rows
    else:
        chunks = [list(range(i, n_boot, n_jobs * 4)) for i in range(n_jobs * 4)]
        chunks = [c for c in chunks if c]
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for reps, rows, f in pool.map(
                _chunk_worker, [(values, config, seed, c) for c in chunks]
            ):
                zmat[reps] = rows
                failures += f
    if failures > 0.01 * n_boot:
        raise NumericalError(
            f"bootstrap aborted: {failures} failed fits out of {n_boot} "
            "replications (more than 1%)"
        )
    lo = 0.5 * (1.0 - level)
    lower = np.quantile(zmat, lo, axis=0)
    upper = np.quantile(zmat, 1.0 - lo, axis=0)
    return CiBands(
        level=level,
        lower=lower,
        upper=upper,
        n_boot=n_boot,
        seed=seed,
        n_redrawn=failures,
    )


def classify(path: EfficiencyPath, bands: CiBands) -> EfficiencyVerdict:
    """Flag periods whose degree exceeds the upper band and summarize.

    Inputs must come from the same series and config: lengths are checked
    and a mismatch raises instead of silently recycling values.
    """
    if path.zeta.shape != bands.upper.shape:
        raise ConfigError(
            f"path has {path.zeta.shape[0]} periods but bands have "
            f"{bands.upper.shape[0]}; inputs are misaligned"
        )
    flags = path.zeta > bands.upper
    return EfficiencyVerdict(
        asset_id=path.asset_id,
        dates=path.dates,
        zeta=path.zeta,
        lower=bands.lower,
        upper=bands.upper,
        inefficient_flags=flags,
        mean_zeta=float(np.mean(path.zeta)),
        sd_zeta=float(np.std(path.zeta, ddof=1)),
        flagged_fraction=float(np.mean(flags)),
    )
