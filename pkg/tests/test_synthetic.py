"""Simulated data generators, the smoother oracle, and the self-check battery."""
from datetime import date

import numpy as np
import pytest

from tvareff import (
    ConfigError,
    DgpSpec,
    NumericalError,
    TvarConfig,
    fit_tvar,
    kalman_smoother_oracle,
    run_validation,
    simulate,
)
from tvareff.synthetic import companion_spectral_radius


def test_spec_validation():
    with pytest.raises(ConfigError, match="kind"):
        DgpSpec(kind="garch", q=1, t=100)
    with pytest.raises(ConfigError, match="q must be"):
        DgpSpec(kind="constant_ar", q=0, t=100, coefficients=())
    with pytest.raises(ConfigError, match="t must exceed"):
        DgpSpec(kind="constant_ar", q=2, t=5, coefficients=(0.1, 0.1))
    with pytest.raises(ConfigError, match="innovation_sd"):
        DgpSpec(kind="constant_ar", q=1, t=100, coefficients=(0.1,),
                innovation_sd=0.0)
    with pytest.raises(ConfigError, match="nonstationary"):
        DgpSpec(kind="constant_ar", q=1, t=100, coefficients=(1.01,))
    with pytest.raises(ConfigError, match="q coefficients"):
        DgpSpec(kind="constant_ar", q=2, t=100, coefficients=(0.1,))
    with pytest.raises(ConfigError, match="initial coefficients"):
        DgpSpec(kind="random_walk_coeffs", q=1, t=100,
                initial_coefficients=(0.0,), state_sd=0.01)
    with pytest.raises(ConfigError, match="state_sd"):
        DgpSpec(kind="random_walk_coeffs", q=1, t=100,
                initial_coefficients=(0.0, 0.1))
    with pytest.raises(ConfigError, match="coef_path"):
        DgpSpec(kind="deterministic_path", q=1, t=100)
    with pytest.raises(ConfigError, match="shape"):
        DgpSpec(kind="deterministic_path", q=1, t=100,
                coef_path=np.zeros((100, 3)))


def test_companion_radius():
    assert companion_spectral_radius(np.array([0.5])) == 0.5
    assert abs(companion_spectral_radius(np.array([0.5, -0.3])) - np.sqrt(0.3)) < 1e-12


def test_simulate_deterministic_and_seed_sensitive():
    spec = DgpSpec(kind="constant_ar", q=1, t=200, seed=5, coefficients=(0.4,))
    a, pa = simulate(spec)
    b, pb = simulate(spec)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(pa, pb)
    c, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=200, seed=6,
                            coefficients=(0.4,)))
    assert not np.array_equal(a.values, c.values)


def test_simulate_shapes_and_alignment():
    spec = DgpSpec(kind="constant_ar", q=2, t=150, seed=1,
                   coefficients=(0.3, 0.1), intercept=0.05)
    r, paths = simulate(spec)
    assert len(r) == 150
    assert paths.shape == (150, 3)
    assert np.allclose(paths[0], [0.05, 0.3, 0.1])
    assert r.dates[0] == date(2000, 1, 1)
    assert (r.dates[-1] - r.dates[0]).days == 149
    assert r.asset_id.startswith("sim-")


def test_white_noise_autocorrelation_near_zero():
    r, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=10000, seed=13,
                            coefficients=(0.0,)))
    x = np.asarray(r.values)
    x = x - x.mean()
    acf1 = float(x[1:] @ x[:-1] / (x @ x))
    assert abs(acf1) < 3.0 / np.sqrt(x.size)


def test_ar1_autocorrelation_near_phi():
    r, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=10000, seed=29,
                            coefficients=(0.5,)))
    x = np.asarray(r.values)
    x = x - x.mean()
    acf1 = float(x[1:] @ x[:-1] / (x @ x))
    assert abs(acf1 - 0.5) < 0.03


def test_step_path_is_recovered_by_the_fit():
    t = 600
    path = np.zeros((t, 2))
    path[t // 2 :, 1] = 0.6
    r, _ = simulate(DgpSpec(kind="deterministic_path", q=1, t=t, seed=17,
                            coef_path=path))
    fit = fit_tvar(r, TvarConfig(q=1), compute_cov=False)
    estimated = fit.coef_paths[:, 1]
    half = t // 2 - 1
    assert estimated[half:].mean() - estimated[:half].mean() > 0.4


def test_random_walk_paths_returned_and_explosions_rejected():
    r, paths = simulate(
        DgpSpec(kind="random_walk_coeffs", q=1, t=200, seed=3,
                initial_coefficients=(0.0, 0.2), state_sd=(0.01, 0.01))
    )
    assert paths.shape == (200, 2)
    assert np.allclose(paths[0], [0.0, 0.2])
    assert np.ptp(paths[:, 1]) > 0.0
    assert len(r) == 200
    with pytest.raises(NumericalError, match="explosive"):
        simulate(DgpSpec(kind="random_walk_coeffs", q=1, t=300, seed=1,
                         initial_coefficients=(0.0, 0.5), state_sd=(0.0, 0.3)))


def test_oracle_shape_and_vanishing_state_variance():
    r, _ = simulate(DgpSpec(kind="constant_ar", q=2, t=200, seed=12,
                            coefficients=(0.3, -0.1)))
    smoothed = kalman_smoother_oracle(r.values, q=2, sigma_u2=1.0, sigma_v2=0.01)
    assert smoothed.shape == (198, 3)
    rigid = kalman_smoother_oracle(r.values, q=2, sigma_u2=1.0, sigma_v2=1e-12)
    assert np.max(np.abs(rigid - rigid[0])) < 1e-6


def test_fit_error_decreases_with_sample_size():
    rmses = []
    for t in (200, 500, 2000):
        r, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=t, seed=40,
                                coefficients=(0.5,)))
        fit = fit_tvar(r, TvarConfig(q=1), compute_cov=False)
        rmses.append(float(np.sqrt(np.mean((fit.coef_paths[:, 1] - 0.5) ** 2))))
    assert rmses[0] > rmses[1] > rmses[2]


def test_validation_battery_passes():
    fast = run_validation(include_bootstrap=False)
    assert fast.all_passed
    assert len(fast.checks) == 4
    full = run_validation(include_bootstrap=True)
    assert full.all_passed
    names = [c.name for c in full.checks]
    assert len(names) == len(set(names)) == 5
    for check in full.checks:
        assert check.detail
