"""Extreme-temperature instrument built from gridded monthly temperatures.

Three steps per grid point: standardize temperatures against per-calendar-
month reference statistics, flag months whose standardized anomaly exceeds
the reference-period 90th percentile, then average the exceedance indicator
across grids and subtract the 10-point reference baseline. The result is the
percentage-point change in exceedance frequency relative to the reference
period, directly usable as an external instrument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFewReferenceObs, ZeroVariance
from .series import MonthStamp, TimeSeries, align

REFERENCE_WINDOW: tuple[MonthStamp, MonthStamp] = (
    MonthStamp(1961, 1),
    MonthStamp(1990, 12),
)
REFERENCE_EXCEEDANCE = 10.0  # percentage points implied by the 90th percentile


@dataclass(frozen=True)
class GridSeries:
    """Monthly temperatures (deg C) for one grid point plus its reference window."""

    grid_id: str
    monthly_temps: TimeSeries
    reference_window: tuple[MonthStamp, MonthStamp] = REFERENCE_WINDOW

    def __post_init__(self) -> None:
        ref_start, ref_end = self.reference_window
        s = self.monthly_temps
        if ref_start < s.start or ref_end > s.end:
            raise TooFewReferenceObs(
                f"grid {self.grid_id}: reference window {ref_start}..{ref_end} "
                f"not inside series span {s.start}..{s.end}"
            )
        months = np.array([m.month for m in s.months()])
        in_ref = (np.arange(len(s)) >= ref_start.index - s.start.index) & (
            np.arange(len(s)) <= ref_end.index - s.start.index
        )
        for m in range(1, 13):
            count = int(np.sum(in_ref & (months == m)))
            if count < 20:
                raise TooFewReferenceObs(
                    f"grid {self.grid_id}: only {count} reference observations "
                    f"for calendar month {m}, need >= 20"
                )


@dataclass(frozen=True)
class T90Series:
    """Change in exceedance frequency (pp) plus the raw frequency itself."""

    t90: TimeSeries
    frequency: TimeSeries


def standardized_anomaly(grid: GridSeries) -> TimeSeries:
    """Temperature anomalies scaled by reference-month mean and standard
    deviation, so the reference window has per-calendar-month mean 0 and
    sample standard deviation 1."""
    s = grid.monthly_temps
    ref = s.slice_window(*grid.reference_window)
    ref_months = np.array([m.month for m in ref.months()])
    months = np.array([m.month for m in s.months()])
    out = np.empty(len(s))
    for m in range(1, 13):
        ref_vals = ref.values[ref_months == m]
        mu = float(np.mean(ref_vals))
        sd = float(np.std(ref_vals, ddof=1))
        if sd == 0.0:
            raise ZeroVariance(
                f"grid {grid.grid_id}: reference month {m} has zero variance"
            )
        sel = months == m
        out[sel] = (s.values[sel] - mu) / sd
    return TimeSeries(s.start, out, f"{grid.grid_id}_anomaly")


def grid_exceedance(
    anomalies: TimeSeries, ref_window: tuple[MonthStamp, MonthStamp]
) -> TimeSeries:
    """0/100 indicator of anomalies above the reference 90th percentile.

    The threshold is the linear-interpolation empirical quantile of the
    reference-window anomalies, so the reference-window mean exceedance sits
    at 10 up to quantile granularity.
    """
    ref = anomalies.slice_window(*ref_window)
    if len(ref) < 100:
        raise TooFewReferenceObs(
            f"need >= 100 reference observations, have {len(ref)}"
        )
    threshold = float(np.quantile(ref.values, 0.9))
    out = 100.0 * (anomalies.values > threshold)
    return TimeSeries(anomalies.start, out, anomalies.name.replace("anomaly", "exceedance"))


def aggregate_t90(per_grid: list[TimeSeries]) -> T90Series:
    """Unweighted cross-grid average of exceedance indicators, minus the
    10-point reference baseline."""
    panel = align(per_grid)
    freq = panel.to_matrix().mean(axis=1)
    frequency = TimeSeries(panel.start, freq, "exceedance_frequency")
    t90 = TimeSeries(panel.start, freq - REFERENCE_EXCEEDANCE, "t90")
    return T90Series(t90=t90, frequency=frequency)


def build_t90(grids: list[GridSeries]) -> T90Series:
    """Full pipeline: anomalies, exceedance per grid, national aggregate."""
    exceedances = [
        grid_exceedance(standardized_anomaly(g), g.reference_window) for g in grids
    ]
    return aggregate_t90(exceedances)
