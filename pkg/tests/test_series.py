import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cci_toolkit.errors import EmptyOverlap, NonPositiveLevel, TooShort, ZeroVariance
from cci_toolkit.series import (
    MonthStamp,
    TimeSeries,
    align,
    pct_change,
    seasonal_adjust,
    standardize,
    yoy_growth,
)

from conftest import ts


class TestMonthStamp:
    def test_ordering(self):
        assert MonthStamp(2004, 1) < MonthStamp(2004, 2) < MonthStamp(2005, 1)
        assert MonthStamp(2004, 12).shift(1) == MonthStamp(2005, 1)
        assert MonthStamp(2004, 1).shift(-1) == MonthStamp(2003, 12)
        assert MonthStamp(2004, 3).shift(25) == MonthStamp(2006, 4)

    def test_parse_and_str(self):
        assert MonthStamp.parse("2010-07") == MonthStamp(2010, 7)
        assert str(MonthStamp(2010, 7)) == "2010-07"
        with pytest.raises(ValueError):
            MonthStamp.parse("2010-13")
        with pytest.raises(ValueError):
            MonthStamp(2010, 0)


class TestTimeSeries:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            ts([])
        with pytest.raises(ValueError):
            ts([1.0, np.nan])
        with pytest.raises(ValueError):
            ts([1.0, np.inf])

    def test_immutable(self):
        s = ts([1.0, 2.0])
        with pytest.raises(ValueError):
            s.values[0] = 9.0

    def test_end_and_months(self):
        s = ts([1.0] * 14)
        assert s.end == MonthStamp(2005, 2)
        assert len(s.months()) == 14


class TestAlign:
    def test_identical_spans(self):
        a = ts(np.arange(36.0), 2004, 1, "a")
        b = ts(np.arange(36.0), 2004, 1, "b")
        panel = align([a, b])
        assert panel.window == (MonthStamp(2004, 1), MonthStamp(2006, 12))
        assert len(panel) == 36

    def test_interval_intersection(self):
        a = ts(np.arange(84.0), 2004, 1, "a")  # 2004-01 .. 2010-12
        b = ts(np.arange(90.0), 2008, 1, "b")  # 2008-01 .. 2015-06
        panel = align([a, b])
        assert panel.window == (MonthStamp(2008, 1), MonthStamp(2010, 12))
        assert len(panel) == 36
        assert panel.names == ("a", "b")

    def test_disjoint(self):
        a = ts(np.arange(24.0), 2004, 1)
        b = ts(np.arange(24.0), 2006, 1)
        with pytest.raises(EmptyOverlap):
            align([a, b])

    def test_single_month_overlap(self):
        a = ts(np.arange(13.0), 2004, 1)  # ends 2005-01
        b = ts(np.arange(12.0), 2005, 1)
        with pytest.raises(EmptyOverlap):
            align([a, b])

    def test_idempotent(self):
        a = ts(np.arange(40.0), 2004, 1, "a")
        b = ts(np.arange(50.0), 2003, 6, "b")
        once = align([a, b])
        twice = align(once.series)
        assert twice.window == once.window
        for s1, s2 in zip(once.series, twice.series):
            np.testing.assert_array_equal(s1.values, s2.values)


class TestPctChange:
    def test_hand_arithmetic(self):
        out = pct_change(ts([100.0, 101.0, 99.99]))
        np.testing.assert_allclose(out.values, [1.0, -1.0], atol=1e-9)
        assert out.start == MonthStamp(2004, 2)

    def test_constant(self):
        out = pct_change(ts([5.0, 5.0, 5.0, 5.0]))
        np.testing.assert_array_equal(out.values, [0.0, 0.0, 0.0])

    def test_zero_level(self):
        with pytest.raises(NonPositiveLevel):
            pct_change(ts([1.0, 0.0, 2.0]))

    def test_too_short(self):
        with pytest.raises(TooShort):
            pct_change(ts([1.0]))

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_invariance(self, c):
        base = ts([100.0, 103.0, 101.5, 108.0])
        scaled = ts(np.asarray(base.values) * c)
        np.testing.assert_allclose(
            pct_change(base).values, pct_change(scaled).values, rtol=1e-9, atol=1e-9
        )


class TestYoyGrowth:
    def test_doubling(self):
        values = [2.0 ** (t / 12.0) for t in range(24)]
        out = yoy_growth(ts(values))
        np.testing.assert_allclose(out.values, 100.0, rtol=1e-9)
        assert out.start == MonthStamp(2005, 1)
        assert len(out) == 12

    def test_constant(self):
        out = yoy_growth(ts([3.0] * 24))
        np.testing.assert_array_equal(out.values, np.zeros(12))

    def test_too_short(self):
        with pytest.raises(TooShort):
            yoy_growth(ts([1.0] * 10))

    def test_non_positive(self):
        with pytest.raises(NonPositiveLevel):
            yoy_growth(ts([1.0] * 12 + [-1.0]))


class TestStandardize:
    def test_symmetric_three_points(self):
        out = standardize(ts([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(out.values, [-1.0, 0.0, 1.0], atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(3)
        s = ts(rng.normal(5.0, 2.5, 60))
        once = standardize(s)
        twice = standardize(once)
        np.testing.assert_allclose(once.values, twice.values, atol=1e-10)
        assert abs(np.mean(once.values)) < 1e-12
        assert abs(np.std(once.values, ddof=1) - 1.0) < 1e-10

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            standardize(ts([7.0, 7.0, 7.0]))


def month_dummy_r2(series: TimeSeries) -> float:
    """Independent check: R^2 of the series on month-of-year dummies."""
    months = np.array([m.month for m in series.months()])
    dummies = np.zeros((len(series), 12))
    dummies[np.arange(len(series)), months - 1] = 1.0
    beta, *_ = np.linalg.lstsq(dummies, series.values, rcond=None)
    fitted = dummies @ beta
    sst = np.sum((series.values - series.values.mean()) ** 2)
    ssr = np.sum((series.values - fitted) ** 2)
    return 1.0 - ssr / sst if sst > 0 else 0.0


class TestSeasonalAdjust:
    def test_periodic_becomes_constant(self):
        pattern = np.array([3.0, -1.0, 4.0, 1.0, -5.0, 9.0, 2.0, -6.0, 5.0, 3.0, -5.0, 0.0])
        s = ts(np.tile(pattern, 4))
        out = seasonal_adjust(s)
        np.testing.assert_allclose(out.values, np.mean(pattern), atol=1e-9)

    def test_matches_brute_force_month_means(self):
        rng = np.random.default_rng(11)
        s = ts(rng.normal(size=50))
        out = seasonal_adjust(s)
        months = np.array([m.month for m in s.months()])
        expected = np.empty(50)
        for i in range(50):
            expected[i] = (
                s.values[i]
                - np.mean(s.values[months == months[i]])
                + np.mean(s.values)
            )
        np.testing.assert_allclose(out.values, expected, atol=1e-12)

    def test_trend_preserved_seasonality_removed(self):
        t = np.arange(96, dtype=float)
        seasonal = 5.0 * np.sin(2 * np.pi * t / 12.0)
        s = ts(0.3 * t + seasonal + 2.0)
        out = seasonal_adjust(s)
        assert month_dummy_r2(out) < 1e-12
        assert np.corrcoef(out.values, t)[0, 1] > 0.9

    def test_month_means_equal_grand_mean(self):
        rng = np.random.default_rng(4)
        s = ts(rng.normal(size=50))
        out = seasonal_adjust(s)
        months = np.array([m.month for m in s.months()])
        grand = np.mean(s.values)
        for m in range(1, 13):
            sel = months == m
            if sel.any():
                assert abs(np.mean(out.values[sel]) - grand) < 1e-9

    def test_grand_mean_preserved_and_idempotent(self):
        rng = np.random.default_rng(5)
        s = ts(rng.normal(3.0, 1.0, 75))
        out = seasonal_adjust(s)
        assert abs(np.mean(out.values) - np.mean(s.values)) < 1e-9
        again = seasonal_adjust(out)
        np.testing.assert_allclose(again.values, out.values, atol=1e-8)

    def test_too_short(self):
        with pytest.raises(TooShort):
            seasonal_adjust(ts(np.arange(23.0)))

    @settings(max_examples=25)
    @given(st.integers(min_value=0, max_value=2**32 - 1))
    def test_idempotence_property(self, seed):
        rng = np.random.default_rng(seed)
        s = ts(rng.normal(size=int(rng.integers(24, 80))))
        out = seasonal_adjust(s)
        again = seasonal_adjust(out)
        np.testing.assert_allclose(again.values, out.values, atol=1e-8)
