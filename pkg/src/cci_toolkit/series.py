"""Calendar-aligned monthly time series and the deterministic transforms
consumed by every other module.

All transforms are pure: they return new :class:`TimeSeries` objects and never
mutate their inputs, so values can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyOverlap, NonPositiveLevel, TooShort, ZeroVariance

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=False)
class MonthStamp:
    """A calendar month, totally ordered by (year, month)."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise ValueError(f"month must be in 1..12, got {self.month}")

    @property
    def index(self) -> int:
        """Months elapsed since 0000-01; the ordering key."""
        return self.year * 12 + (self.month - 1)

    def shift(self, months: int) -> "MonthStamp":
        idx = self.index + months
        return MonthStamp(idx // 12, idx % 12 + 1)

    def __lt__(self, other: "MonthStamp") -> bool:
        return self.index < other.index

    def __le__(self, other: "MonthStamp") -> bool:
        return self.index <= other.index

    def __gt__(self, other: "MonthStamp") -> bool:
        return self.index > other.index

    def __ge__(self, other: "MonthStamp") -> bool:
        return self.index >= other.index

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"

    @classmethod
    def parse(cls, text: str) -> "MonthStamp":
        m = _MONTH_RE.match(text.strip())
        if m is None:
            raise ValueError(f"expected YYYY-MM, got {text!r}")
        stamp = cls(int(m.group(1)), int(m.group(2)))
        return stamp


def month_range(start: MonthStamp, end: MonthStamp) -> list[MonthStamp]:
    """All months from `start` to `end` inclusive."""
    if end < start:
        return []
    return [start.shift(k) for k in range(end.index - start.index + 1)]


@dataclass(frozen=True)
class TimeSeries:
    """Monthly observations starting at `start` with no calendar gaps."""

    start: MonthStamp
    values: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if arr.size == 0:
            raise ValueError("values must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"series {self.name!r} contains non-finite values")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> MonthStamp:
        return self.start.shift(len(self) - 1)

    def months(self) -> list[MonthStamp]:
        return month_range(self.start, self.end)

    def slice_window(self, start: MonthStamp, end: MonthStamp) -> "TimeSeries":
        """Restrict to [start, end]; the window must lie inside the span."""
        if start < self.start or end > self.end or end < start:
            raise EmptyOverlap(
                f"window {start}..{end} not covered by series "
                f"{self.name!r} ({self.start}..{self.end})"
            )
        i0 = start.index - self.start.index
        i1 = end.index - self.start.index + 1
        return TimeSeries(start, self.values[i0:i1], self.name)

    def with_values(self, values: np.ndarray, start: MonthStamp | None = None) -> "TimeSeries":
        return TimeSeries(start if start is not None else self.start, values, self.name)

    def rename(self, name: str) -> "TimeSeries":
        return TimeSeries(self.start, self.values, name)


@dataclass(frozen=True)
class SeriesPanel:
    """Several series trimmed to one common window, in fixed order."""

    series: tuple[TimeSeries, ...]
    window: tuple[MonthStamp, MonthStamp] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        series = tuple(self.series)
        if not series:
            raise ValueError("panel requires at least one series")
        window = self.window
        if window is None:
            window = (series[0].start, series[0].end)
        for s in series:
            if s.start != window[0] or s.end != window[1]:
                raise ValueError(
                    f"series {s.name!r} does not cover the panel window "
                    f"{window[0]}..{window[1]}"
                )
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "window", window)

    def __len__(self) -> int:
        return len(self.series[0])

    @property
    def n_series(self) -> int:
        return len(self.series)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.series)

    @property
    def start(self) -> MonthStamp:
        return self.window[0]

    def to_matrix(self) -> np.ndarray:
        """Observations as a (T, n) array, one column per series."""
        return np.column_stack([s.values for s in self.series])

    @classmethod
    def from_matrix(
        cls, start: MonthStamp, matrix: np.ndarray, names: Sequence[str]
    ) -> "SeriesPanel":
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != len(names):
            raise ValueError("matrix must be (T, n) with one name per column")
        cols = tuple(
            TimeSeries(start, matrix[:, j], names[j]) for j in range(matrix.shape[1])
        )
        return cls(cols)


def align(series: Iterable[TimeSeries]) -> SeriesPanel:
    """Trim series to their common calendar window, preserving input order.

    Raises
    ------
    EmptyOverlap
        If the intersection is empty or a single month.
    """
    series = tuple(series)
    if not series:
        raise ValueError("align requires at least one series")
    start = max(s.start for s in series)
    end = min(s.end for s in series)
    if end.index - start.index + 1 < 2:
        raise EmptyOverlap(
            f"series overlap {start}..{end} has fewer than two months"
        )
    return SeriesPanel(tuple(s.slice_window(start, end) for s in series), (start, end))


def pct_change(s: TimeSeries) -> TimeSeries:
    """Month-on-month percentage change, 100*(x_t - x_{t-1})/x_{t-1}."""
    if len(s) < 2:
        raise TooShort(f"pct_change needs at least 2 observations, got {len(s)}")
    if np.any(s.values <= 0):
        raise NonPositiveLevel(f"series {s.name!r} has non-positive levels")
    out = 100.0 * (s.values[1:] - s.values[:-1]) / s.values[:-1]
    return TimeSeries(s.start.shift(1), out, s.name)


def yoy_growth(s: TimeSeries) -> TimeSeries:
    """Year-on-year percentage change, 100*(x_t - x_{t-12})/x_{t-12}."""
    if len(s) < 13:
        raise TooShort(f"yoy_growth needs at least 13 observations, got {len(s)}")
    if np.any(s.values <= 0):
        raise NonPositiveLevel(f"series {s.name!r} has non-positive levels")
    out = 100.0 * (s.values[12:] - s.values[:-12]) / s.values[:-12]
    return TimeSeries(s.start.shift(12), out, s.name)


def standardize(s: TimeSeries) -> TimeSeries:
    """Center to mean zero and scale to unit sample standard deviation (n-1)."""
    if len(s) < 2:
        raise TooShort(f"standardize needs at least 2 observations, got {len(s)}")
    sd = float(np.std(s.values, ddof=1))
    if sd == 0.0:
        raise ZeroVariance(f"series {s.name!r} has zero sample variance")
    out = (s.values - np.mean(s.values)) / sd
    return s.with_values(out)


def seasonal_adjust(s: TimeSeries) -> TimeSeries:
    """Remove month-of-year means, preserving the grand mean.

    Each observation has its calendar-month sample mean subtracted and the
    grand mean added back, so the output carries the same level and any
    non-seasonal structure while month-dummy effects vanish.
    """
    if len(s) < 24:
        raise TooShort(f"seasonal_adjust needs at least 24 observations, got {len(s)}")
    months = np.array([m.month for m in s.months()])
    grand = np.mean(s.values)
    out = np.empty_like(s.values)
    for m in range(1, 13):
        mask = months == m
        if not np.any(mask):
            continue
        out[mask] = s.values[mask] - np.mean(s.values[mask]) + grand
    return s.with_values(out)
