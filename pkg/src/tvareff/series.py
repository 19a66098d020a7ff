"""Price and return series containers plus CSV ingestion.

Daily close prices come in as CSV with one header row; returns are log
first differences. Containers are frozen dataclasses holding read-only
arrays so downstream fits can share them without defensive copies.
"""
from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from .exceptions import DataError

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "StatsSummary",
    "load_prices",
    "write_prices",
    "log_returns",
    "descriptive_stats",
]


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(values, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PriceSeries:
    """Daily close prices for one asset, sorted ascending by date.

    Invariants are enforced at construction: dates strictly increasing
    (hence unique), prices strictly positive and finite, equal lengths.
    """

    asset_id: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _freeze(self.values))
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(self.values):
            raise DataError(
                f"{self.asset_id}: {len(self.dates)} dates vs {len(self.values)} prices"
            )
        if not np.all(np.isfinite(self.values)) or np.any(self.values <= 0.0):
            raise DataError(f"{self.asset_id}: prices must be positive and finite")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise DataError(f"{self.asset_id}: dates not strictly increasing at {b}")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReturnSeries:
    """Log first differences of a price series.

    ``values[t] = ln(p[t+1] / p[t])`` and ``dates[t]`` is the date of the
    later observation, so a return is stamped with the day it realized.
    """

    asset_id: str
    dates: tuple[date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _freeze(self.values))
        object.__setattr__(self, "dates", tuple(self.dates))
        if len(self.dates) != len(self.values):
            raise DataError(
                f"{self.asset_id}: {len(self.dates)} dates vs {len(self.values)} returns"
            )
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"{self.asset_id}: returns must be finite")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class StatsSummary:
    """Descriptive statistics of a return series (sd uses the n-1 denominator)."""

    mean: float
    sd: float
    min: float
    max: float
    n_obs: int


def load_prices(
    path: str | os.PathLike,
    date_column: str = "date",
    price_column: str = "close",
    asset_id: str | None = None,
) -> PriceSeries:
    """Read a daily close CSV into a :class:`PriceSeries`.

    Parameters
    ----------
    path : str or path-like
        CSV file with a header row containing `date_column` and
        `price_column`. Dates must be ISO-8601 calendar dates.
    date_column, price_column : str
        Column names to read; extra columns are ignored.
    asset_id : str, optional
        Label for the series. Defaults to the file stem.

    Returns
    -------
    PriceSeries
        Sorted ascending by date. Duplicate dates and non-positive
        prices are rejected with the offending data row named. Calendar
        gaps are reported through ``warnings.warn`` but never imputed:
        a missing day is a data defect the caller should know about,
        while inventing a price would silently bias the returns.
    """
    name = asset_id if asset_id is not None else os.path.splitext(os.path.basename(path))[0]
    try:
        fh = open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open price file {path}: {exc}") from exc
    rows: list[tuple[date, float]] = []
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        header = [h.strip() for h in header]
        try:
            d_idx = header.index(date_column)
            p_idx = header.index(price_column)
        except ValueError:
            raise DataError(
                f"{path}: header {header!r} is missing column "
                f"{date_column!r} or {price_column!r}"
            ) from None
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) <= max(d_idx, p_idx):
                raise DataError(f"{path}: data row {row_no} has too few fields")
            try:
                d = date.fromisoformat(row[d_idx].strip())
            except ValueError:
                raise DataError(
                    f"{path}: data row {row_no}: unparseable date {row[d_idx]!r}"
                ) from None
            try:
                p = float(row[p_idx])
            except ValueError:
                raise DataError(
                    f"{path}: data row {row_no}: unparseable price {row[p_idx]!r}"
                ) from None
            if not math.isfinite(p) or p <= 0.0:
                raise DataError(f"{path}: data row {row_no}: non-positive price {p!r}")
            rows.append((d, p))
    if not rows:
        raise DataError(f"{path}: no data rows")
    rows.sort(key=lambda r: r[0])
    for i in range(1, len(rows)):
        if rows[i][0] == rows[i - 1][0]:
            raise DataError(f"{path}: duplicate date {rows[i][0].isoformat()}")
    gaps = sum(1 for a, b in zip(rows, rows[1:]) if (b[0] - a[0]) > timedelta(days=1))
    if gaps:
        warnings.warn(
            f"{name}: {gaps} calendar gap(s) in {path}; missing days are not imputed",
            stacklevel=2,
        )
    dates = tuple(r[0] for r in rows)
    values = np.array([r[1] for r in rows], dtype=np.float64)
    return PriceSeries(asset_id=name, dates=dates, values=values)


def write_prices(series: PriceSeries, path: str | os.PathLike) -> None:
    """Emit a price series as `date,close` CSV.

    Prices are written with shortest round-trip precision (17 significant
    digits when needed), so reloading reproduces the array bit-exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "close"])
        for d, p in zip(series.dates, series.values):
            writer.writerow([d.isoformat(), repr(float(p))])


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Log first differences of the price path, dated by the later observation."""
    if len(prices) < 2:
        raise DataError(f"{prices.asset_id}: need at least 2 prices to form returns")
    vals = np.diff(np.log(prices.values))
    return ReturnSeries(asset_id=prices.asset_id, dates=prices.dates[1:], values=vals)


def descriptive_stats(r: ReturnSeries) -> StatsSummary:
    """Mean, sample sd, min, max and count of a return series."""
    if len(r) < 2:
        raise DataError(f"{r.asset_id}: need at least 2 returns for descriptive stats")
    v = r.values
    return StatsSummary(
        mean=float(np.mean(v)),
        sd=float(np.std(v, ddof=1)),
        min=float(np.min(v)),
        max=float(np.max(v)),
        n_obs=int(v.size),
    )
