from pathlib import Path

import numpy as np
import pytest

from cci_toolkit.series import MonthStamp, TimeSeries

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def ts(values, year=2004, month=1, name="x") -> TimeSeries:
    return TimeSeries(MonthStamp(year, month), np.asarray(values, dtype=float), name)
