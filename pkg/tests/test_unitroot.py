"""Unit-root testing and BIC order selection."""
import math

import numpy as np
import pytest

from tvareff import (
    ConfigError,
    DataError,
    DgpSpec,
    adf_test,
    bic_lag_select,
    bic_table,
    default_max_lag,
    simulate,
)


def _ar1(seed: int, phi: float, n: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    e = rng.standard_normal(n)
    x = np.empty(n)
    x[0] = e[0]
    for i in range(1, n):
        x[i] = phi * x[i - 1] + e[i]
    return x


def test_default_max_lag_schedule():
    assert default_max_lag(100) == 12
    assert default_max_lag(2346) == 26
    assert default_max_lag(1515) == 23
    assert default_max_lag(50) == 10
    with pytest.raises(DataError):
        default_max_lag(0)


def test_bic_table_matches_direct_least_squares():
    rng = np.random.default_rng(np.random.SeedSequence(421))
    x = rng.standard_normal(40)
    lags, bics = bic_table(x, max_lag=3, model_family="ar_level")
    assert lags.tolist() == [1, 2, 3]
    # Frozen from an independent normal-equations solve of the same
    # candidates on the common 37-row sample.
    expected = [-0.36683926986098747, 2.524135790334043, 5.591206490100598]
    assert np.allclose(bics, expected, atol=1e-9)


def test_bic_selection_prefers_true_ar2_order():
    hits = 0
    for s in range(10):
        r, _ = simulate(
            DgpSpec(kind="constant_ar", q=2, t=5000, seed=100 + s,
                    coefficients=(0.5, -0.3))
        )
        if bic_lag_select(r.values, model_family="ar_level") == 2:
            hits += 1
    assert hits >= 8


def test_white_noise_selects_minimum_order():
    r, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=5000, seed=55,
                            coefficients=(0.0,)))
    assert bic_lag_select(r.values, model_family="ar_level") == 1
    x = np.asarray(r.values)
    design = np.column_stack([np.ones(x.size - 1), x[:-1]])
    beta = np.linalg.lstsq(design, x[1:], rcond=None)[0]
    assert abs(beta[1]) < 0.03


def test_difference_family_selects_zero_on_random_walk_levels():
    rng = np.random.default_rng(np.random.SeedSequence(entropy=7000))
    levels = np.cumsum(rng.standard_normal(1000))
    assert bic_lag_select(levels, max_lag=6, model_family="adf_augmentation") == 0


def test_adf_frozen_case():
    x = _ar1(98, 0.3, 120)
    res = adf_test(x)
    assert res.lag == 0
    # Frozen from an independent regression with BIC selection over the
    # same aligned candidate set.
    assert abs(res.statistic - (-8.489990322492666)) < 1e-8
    assert res.n_obs == 119
    assert res.deterministic_spec == "constant+trend"
    assert res.critical_value_1pct == -3.96
    assert res.reject_unit_root_1pct is True


def test_adf_affine_invariance():
    x = _ar1(98, 0.3, 120)
    base = adf_test(x)
    shifted = adf_test(x + 3.0 + 0.01 * np.arange(x.size))
    assert shifted.lag == base.lag
    assert abs(shifted.statistic - base.statistic) < 1e-8

    base_c = adf_test(x, spec="constant")
    shifted_c = adf_test(x + 5.0, spec="constant")
    assert shifted_c.lag == base_c.lag
    assert abs(shifted_c.statistic - base_c.statistic) < 1e-8


def test_adf_critical_values_pinned():
    x = _ar1(4, 0.5, 500)
    trend = adf_test(x, spec="constant+trend")
    const = adf_test(x, spec="constant")
    assert trend.critical_value_1pct == -3.96
    assert const.critical_value_1pct == -3.43
    for res in (trend, const):
        assert res.reject_unit_root_1pct == (res.statistic < res.critical_value_1pct)


def test_stationary_ar1_rejection_rate():
    rejections = 0
    for s in range(100):
        r, _ = simulate(DgpSpec(kind="constant_ar", q=1, t=2000, seed=s,
                                coefficients=(0.5,)))
        if adf_test(r.values).reject_unit_root_1pct:
            rejections += 1
    assert rejections >= 99


def test_random_walk_levels_rarely_rejected():
    non_rejections = 0
    for s in range(20):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=7000 + s))
        levels = np.cumsum(rng.standard_normal(1000))
        if not adf_test(levels).reject_unit_root_1pct:
            non_rejections += 1
    assert non_rejections >= 19


def test_selected_lag_respects_bound(btc_returns):
    res = adf_test(btc_returns, max_lag=5)
    assert 0 <= res.lag <= 5


def test_input_and_config_errors():
    x = _ar1(1, 0.2, 20)
    with pytest.raises(DataError, match="insufficient"):
        adf_test(x, max_lag=12)
    with pytest.raises(DataError, match="insufficient"):
        bic_table(x, max_lag=12, model_family="ar_level")
    with pytest.raises(ConfigError, match="model_family"):
        bic_table(x, max_lag=3, model_family="arma")
    with pytest.raises(ConfigError, match="spec"):
        adf_test(x, spec="none")
    with pytest.raises(ConfigError, match="max_lag"):
        bic_table(x, max_lag=-1, model_family="adf_augmentation")
    with pytest.raises(ConfigError, match="max_lag"):
        bic_table(x, max_lag=0, model_family="ar_level")
    with pytest.raises(DataError, match="one-dimensional"):
        adf_test(np.zeros((5, 5)))
