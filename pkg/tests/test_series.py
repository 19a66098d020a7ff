"""Price ingestion, log returns, and descriptive statistics."""
import math
from datetime import date

import numpy as np
import pytest

from tvareff import (
    DataError,
    PriceSeries,
    ReturnSeries,
    descriptive_stats,
    load_prices,
    log_returns,
    write_prices,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_prices_minimal(tmp_path):
    p = _write(tmp_path / "a.csv", "date,close\n2013-04-28,134.21\n2013-04-29,144.54\n")
    series = load_prices(p)
    assert series.asset_id == "a"
    assert len(series) == 2
    assert series.dates == (date(2013, 4, 28), date(2013, 4, 29))
    assert series.values.tolist() == [134.21, 144.54]


def test_load_prices_sorts_and_ignores_extra_columns(tmp_path):
    p = _write(
        tmp_path / "b.csv",
        "volume,close,date\n9,3.0,2020-01-03\n7,1.0,2020-01-01\n8,2.0,2020-01-02\n",
    )
    series = load_prices(p, asset_id="btc")
    assert series.asset_id == "btc"
    assert series.values.tolist() == [1.0, 2.0, 3.0]
    assert series.dates[0] == date(2020, 1, 1)


def test_load_prices_missing_file(tmp_path):
    with pytest.raises(DataError, match="cannot open"):
        load_prices(tmp_path / "nope.csv")


def test_load_prices_missing_column(tmp_path):
    p = _write(tmp_path / "c.csv", "day,price\n2020-01-01,1.0\n")
    with pytest.raises(DataError, match="missing column"):
        load_prices(p)


def test_load_prices_bad_date_names_row(tmp_path):
    p = _write(tmp_path / "d.csv", "date,close\n2020-01-01,1.0\nnot-a-date,2.0\n")
    with pytest.raises(DataError, match="row 2.*unparseable date"):
        load_prices(p)


def test_load_prices_bad_price_names_row(tmp_path):
    p = _write(tmp_path / "e.csv", "date,close\n2020-01-01,oops\n")
    with pytest.raises(DataError, match="row 1.*unparseable price"):
        load_prices(p)


def test_load_prices_nonpositive_price(tmp_path):
    p = _write(tmp_path / "f.csv", "date,close\n2020-01-01,1.0\n2020-01-02,-5\n")
    with pytest.raises(DataError, match="row 2.*non-positive"):
        load_prices(p)


def test_load_prices_duplicate_date(tmp_path):
    p = _write(tmp_path / "g.csv", "date,close\n2020-01-01,1.0\n2020-01-01,2.0\n")
    with pytest.raises(DataError, match="duplicate date 2020-01-01"):
        load_prices(p)


def test_load_prices_empty_variants(tmp_path):
    with pytest.raises(DataError, match="empty file"):
        load_prices(_write(tmp_path / "h.csv", ""))
    with pytest.raises(DataError, match="no data rows"):
        load_prices(_write(tmp_path / "i.csv", "date,close\n"))


def test_load_prices_warns_on_calendar_gap(tmp_path):
    p = _write(tmp_path / "j.csv", "date,close\n2020-01-01,1.0\n2020-01-05,2.0\n")
    with pytest.warns(UserWarning, match="gap"):
        load_prices(p)


def test_price_series_validation():
    with pytest.raises(DataError, match="strictly increasing"):
        PriceSeries("x", (date(2020, 1, 2), date(2020, 1, 1)), np.array([1.0, 2.0]))
    with pytest.raises(DataError, match="positive"):
        PriceSeries("x", (date(2020, 1, 1),), np.array([0.0]))
    with pytest.raises(DataError, match="dates vs"):
        PriceSeries("x", (date(2020, 1, 1),), np.array([1.0, 2.0]))


def test_return_series_rejects_nonfinite():
    with pytest.raises(DataError, match="finite"):
        ReturnSeries("x", (date(2020, 1, 1),), np.array([np.inf]))


def test_roundtrip_write_then_load_is_bit_exact(tmp_path):
    rng = np.random.default_rng(np.random.SeedSequence(12))
    values = 100.0 * np.exp(np.cumsum(rng.standard_normal(64) * 0.03))
    dates = tuple(date.fromordinal(date(2021, 1, 1).toordinal() + i) for i in range(64))
    series = PriceSeries("rt", dates, values)
    out = tmp_path / "rt.csv"
    write_prices(series, out)
    back = load_prices(out, asset_id="rt")
    assert back.dates == series.dates
    assert np.array_equal(back.values, series.values)


def test_log_returns_values():
    dates = tuple(date(2020, 1, d) for d in (1, 2, 3))
    p = PriceSeries("x", dates, np.array([100.0, 110.0, 121.0]))
    r = log_returns(p)
    assert r.dates == dates[1:]
    assert np.allclose(r.values, math.log(1.1), atol=1e-15)

    p2 = PriceSeries("x", dates[:2], np.array([100.0, 200.0]))
    assert np.allclose(log_returns(p2).values, math.log(2.0), atol=1e-15)

    p3 = PriceSeries("x", dates[:2], np.array([100.0, 100.0]))
    assert log_returns(p3).values.tolist() == [0.0]


def test_log_returns_too_short():
    with pytest.raises(DataError, match="at least 2"):
        log_returns(PriceSeries("x", (date(2020, 1, 1),), np.array([1.0])))


def test_log_returns_scale_invariance():
    rng = np.random.default_rng(np.random.SeedSequence(3))
    values = 50.0 * np.exp(np.cumsum(rng.standard_normal(40) * 0.02))
    dates = tuple(date.fromordinal(date(2020, 1, 1).toordinal() + i) for i in range(40))
    base = log_returns(PriceSeries("x", dates, values)).values
    for scale in (1000.0, 0.001, 7.3):
        scaled = log_returns(PriceSeries("x", dates, values * scale)).values
        # log() rounding leaves ulp-level noise under an arbitrary scale.
        assert np.allclose(scaled, base, atol=1e-12)


def test_reversed_prices_negate_returns():
    rng = np.random.default_rng(np.random.SeedSequence(2))
    values = 100.0 * np.exp(np.cumsum(rng.standard_normal(50) * 0.03))
    dates = tuple(date.fromordinal(date(2020, 1, 1).toordinal() + i) for i in range(50))
    fwd = log_returns(PriceSeries("x", dates, values)).values
    rev = log_returns(PriceSeries("x", dates, values[::-1].copy())).values
    assert np.allclose(rev, -fwd[::-1], atol=1e-12)


def test_descriptive_stats_frozen_values():
    dates = tuple(date(2020, 1, d) for d in range(1, 7))
    r = ReturnSeries("x", dates, np.array([0.012, -0.008, 0.031, -0.052, 0.0, 0.023]))
    s = descriptive_stats(r)
    assert abs(s.mean - 0.001) < 1e-15
    assert abs(s.sd - 0.029651306885194788) < 1e-15
    assert s.min == -0.052
    assert s.max == 0.031
    assert s.n_obs == 6


def test_descriptive_stats_constant_series():
    dates = tuple(date.fromordinal(date(2020, 1, 1).toordinal() + i) for i in range(10))
    s = descriptive_stats(ReturnSeries("x", dates, np.full(10, 0.01)))
    # pairwise summation leaves ulp-level noise on both moments
    assert abs(s.mean - 0.01) < 1e-15
    assert abs(s.sd) < 1e-15
    assert s.min == s.max == 0.01


def test_descriptive_stats_permutation_invariant():
    rng = np.random.default_rng(np.random.SeedSequence(9))
    values = rng.standard_normal(31) * 0.04
    dates = tuple(date.fromordinal(date(2020, 1, 1).toordinal() + i) for i in range(31))
    a = descriptive_stats(ReturnSeries("x", dates, values))
    b = descriptive_stats(ReturnSeries("x", dates, rng.permutation(values)))
    assert abs(a.mean - b.mean) < 1e-15
    assert abs(a.sd - b.sd) < 1e-15
    assert (a.min, a.max, a.n_obs) == (b.min, b.max, b.n_obs)
    assert a.min <= a.mean <= a.max and a.sd >= 0.0


def test_descriptive_stats_too_short():
    with pytest.raises(DataError, match="at least 2"):
        descriptive_stats(ReturnSeries("x", (date(2020, 1, 1),), np.array([0.01])))


def test_fixture_lengths(btc_returns, eth_returns):
    assert len(btc_returns) == 2346
    assert len(eth_returns) == 1515
    assert btc_returns.dates[0] == date(2013, 4, 29)
    assert eth_returns.dates[-1] == date(2019, 9, 30)
