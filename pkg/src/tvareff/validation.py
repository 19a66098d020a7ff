"""Self-check battery wiring the estimator against independent references.

Each check exercises one correctness property end to end: agreement with
a state-space smoother, recovery of known simulated truths, limiting
behavior of the penalty weight, the banded solver against dense algebra,
and false-positive control of the flagging rule on null data. The
default sizes keep the whole battery inside a few seconds so it can run
as a routine preflight.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .efficiency import bootstrap_bands, classify, efficiency_degree
from .synthetic import DgpSpec, kalman_smoother_oracle, simulate
from .tvar import TvarConfig, build_stacked_system, fit_tvar, solve_dense

__all__ = ["CheckResult", "ValidationReport", "run_validation"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...] = field(default_factory=tuple)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check_smoother_equivalence() -> CheckResult:
    gaps = []
    for q, seed in ((1, 11), (2, 12)):
        spec = DgpSpec(
            kind="random_walk_coeffs",
            q=q,
            t=200,
            seed=seed,
            innovation_sd=1.0,
            initial_coefficients=(0.0, 0.2) + (0.0,) * (q - 1),
            state_sd=(0.02,) * (q + 1),
        )
        r, _ = simulate(spec)
        lam = 25.0
        fit = fit_tvar(
            r, TvarConfig(q=q, variance_ratio_mode="fixed", fixed_lambda=lam)
        )
        oracle = kalman_smoother_oracle(
            r.values, q=q, sigma_u2=1.0, sigma_v2=1.0 / lam
        )
        gaps.append(float(np.max(np.abs(fit.coef_paths[5:] - oracle[5:]))))
    gap = max(gaps)
    return CheckResult(
        name="state_space_smoother_equivalence",
        passed=gap < 1.0e-6,
        detail=f"max |penalized - smoothed| after warmup = {gap:.3e} (limit 1e-6)",
    )


def _check_constant_recovery() -> CheckResult:
    spec = DgpSpec(
        kind="constant_ar",
        q=1,
        t=1500,
        seed=7,
        coefficients=(0.4,),
        intercept=0.05,
        innovation_sd=0.5,
    )
    r, _ = simulate(spec)
    fit = fit_tvar(r, TvarConfig(q=1))
    err = float(np.max(np.abs(fit.coef_paths[:, 1] - 0.4)))
    return CheckResult(
        name="constant_coefficient_recovery",
        passed=err < 0.15,
        detail=f"max |path - 0.4| = {err:.3f} on a fixed-coefficient draw (limit 0.15)",
    )


def _check_large_penalty_flattens() -> CheckResult:
    spec = DgpSpec(
        kind="constant_ar",
        q=2,
        t=400,
        seed=3,
        coefficients=(0.3, -0.2),
        innovation_sd=1.0,
    )
    r, _ = simulate(spec)
    fit = fit_tvar(
        r, TvarConfig(q=2, variance_ratio_mode="fixed", fixed_lambda=1.0e8)
    )
    tv = float(np.max(np.abs(np.diff(fit.coef_paths, axis=0))))
    # An effectively rigid path must reproduce the single-model least
    # squares fit it collapses to.
    y = r.values[2:]
    z = np.column_stack(
        [np.ones(y.size), r.values[1:-1], r.values[:-2]]
    )
    beta = np.linalg.lstsq(z, y, rcond=None)[0]
    gap = float(np.max(np.abs(fit.coef_paths.mean(axis=0) - beta)))
    ok = tv < 1.0e-4 and gap < 1.0e-4
    return CheckResult(
        name="large_penalty_constant_limit",
        passed=ok,
        detail=(
            f"max per-step coefficient move = {tv:.2e}, "
            f"gap to pooled least squares = {gap:.2e} (limits 1e-4)"
        ),
    )


def _check_banded_vs_dense() -> CheckResult:
    spec = DgpSpec(
        kind="random_walk_coeffs",
        q=2,
        t=80,
        seed=19,
        initial_coefficients=(0.0, 0.2, -0.1),
        state_sd=(0.03, 0.03, 0.03),
    )
    r, _ = simulate(spec)
    config = TvarConfig(q=2, variance_ratio_mode="fixed", fixed_lambda=10.0)
    fit = fit_tvar(r, config, compute_cov=False)
    system = build_stacked_system(r.values, config, weights=(1.0, np.full(3, 0.1)))
    dense = solve_dense(system).reshape(-1, 3)
    gap = float(np.max(np.abs(fit.coef_paths - dense)))
    return CheckResult(
        name="banded_solver_matches_dense",
        passed=gap < 1.0e-8,
        detail=f"max |banded - dense normal equations| = {gap:.3e} (limit 1e-8)",
    )


def _check_null_false_positive_rate() -> CheckResult:
    rng = np.random.default_rng(np.random.SeedSequence(104))
    values = rng.standard_normal(260) * 0.02
    config = TvarConfig(q=1)
    fit = fit_tvar(values, config, compute_cov=False)
    bands = bootstrap_bands(values, config, n_boot=100, level=0.99, seed=104)
    verdict = classify(efficiency_degree(fit), bands)
    frac = verdict.flagged_fraction
    return CheckResult(
        name="null_data_flagging_rate",
        passed=frac < 0.2,
        detail=f"flagged fraction on white noise = {frac:.3f} (limit 0.20)",
    )


def run_validation(include_bootstrap: bool = True) -> ValidationReport:
    """Run the battery and collect a report; nothing raises on failure.

    `include_bootstrap=False` drops the resampling check, the only part
    whose runtime is material, for a sub-second smoke run.
    """
    checks = [
        _check_smoother_equivalence(),
        _check_constant_recovery(),
        _check_large_penalty_flattens(),
        _check_banded_vs_dense(),
    ]
    if include_bootstrap:
        checks.append(_check_null_false_positive_rate())
    return ValidationReport(checks=tuple(checks))
