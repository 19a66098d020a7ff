"""Shared fixtures: the bundled price files, loaded once per session."""
from pathlib import Path

import pytest

from tvareff import load_prices, log_returns

_DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return _DATA


@pytest.fixture(scope="session")
def btc_returns():
    return log_returns(load_prices(_DATA / "btc_daily.csv"))


@pytest.fixture(scope="session")
def eth_returns():
    return log_returns(load_prices(_DATA / "eth_daily.csv"))
