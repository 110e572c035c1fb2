"""Regenerate the committed synthetic fixtures.

Everything here is deterministic; re-running reproduces the committed files
byte for byte. Fixtures are synthetic stand-ins shaped like the real inputs
(exported volume groups, index panels, macro panels with an instrument,
gridded temperatures) so the whole pipeline runs offline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from cci_toolkit import (
    Dgp,
    MonthStamp,
    QueryVocabulary,
    SeriesPanel,
    TimeSeries,
    partition_vocabulary,
    simulate,
    standardize,
)
from cci_toolkit.ingest import write_panel_csv, write_series_csv

ROOT = Path(__file__).parent
START = MonthStamp(2004, 1)
MONTHS = 240


def make_groups() -> None:
    vocab = QueryVocabulary.bundled()
    out_dir = ROOT / "groups"
    out_dir.mkdir(parents=True, exist_ok=True)
    for old in out_dir.glob("*.csv"):
        old.unlink()
    t = np.arange(MONTHS)
    for gi, members in enumerate(partition_vocabulary(vocab, 5), start=1):
        rng = np.random.default_rng(1000 + gi)
        series = {}
        for term in members:
            phase = rng.uniform(0, 2 * np.pi)
            if term.is_benchmark:
                level = 55 + 6 * np.sin(2 * np.pi * t / 12 + phase)
                level = level + rng.normal(0, 3, MONTHS)
            else:
                base = rng.uniform(8, 40)
                season = rng.uniform(2, 10) * np.sin(2 * np.pi * t / 12 + phase)
                trend = rng.uniform(-0.02, 0.06) * t
                level = base + season + trend + rng.normal(0, base * 0.2, MONTHS)
                for _ in range(rng.integers(1, 4)):
                    spike_at = rng.integers(0, MONTHS)
                    level[spike_at] += rng.uniform(30, 90)
            series[term.text] = np.clip(level, 0.0, None)
        peak = max(float(s.max()) for s in series.values())
        scale = 100.0 / peak
        names = [term.text for term in members]
        with (out_dir / f"group_{gi:02d}.csv").open("w", encoding="utf-8", newline="") as fh:
            import csv

            writer = csv.writer(fh)
            writer.writerow(["date"] + names)
            for i in range(MONTHS):
                row = [str(START.shift(i))]
                row += [str(int(round(series[n][i] * scale))) for n in names]
                writer.writerow(row)


def make_index_panel() -> None:
    """Three standardized index-like series with a built-in lead: the search
    index leads the news index by one month."""
    rng = np.random.default_rng(7)
    t_total = MONTHS + 50
    x = np.zeros((t_total, 3))
    e = rng.normal(size=(t_total, 3))
    for t in range(1, t_total):
        x[t, 0] = 0.5 * x[t - 1, 0] + e[t, 0]
        x[t, 1] = 0.3 * x[t - 1, 1] + 0.45 * x[t - 1, 0] + e[t, 1]
        x[t, 2] = 0.4 * x[t - 1, 2] + e[t, 2]
    x = x[50:]
    names = ("search_idx", "news_idx", "wire_idx")
    cols = tuple(
        standardize(TimeSeries(START, x[:, j], names[j])) for j in range(3)
    )
    write_panel_csv(SeriesPanel(cols), ROOT / "panel_indices.csv")


def make_macro_panel() -> None:
    """A five-variable panel plus a strong instrument, drawn from a stable
    process whose target-shock column is known."""
    dgp = Dgp.stable(n=5, p=6, seed=42, radius=0.6,
                     instrument_strength=1.0, noise_scale=1.0)
    panel, instrument = simulate(dgp, MONTHS, start=START)
    names = ("cci", "consumption", "core_inflation", "interest_rate", "unemployment")
    renamed = SeriesPanel(
        tuple(s.rename(n) for s, n in zip(panel.series, names))
    )
    write_panel_csv(renamed, ROOT / "panel_macro.csv")
    write_series_csv(
        TimeSeries(instrument.start, instrument.values, "t90"),
        ROOT / "instrument.csv",
    )


def make_grids() -> None:
    out_dir = ROOT / "grids"
    out_dir.mkdir(parents=True, exist_ok=True)
    start = MonthStamp(1961, 1)
    months = 540  # 1961-01 .. 2005-12
    t = np.arange(months)
    month_of_year = (t % 12) + 1
    lines = []
    for gi, grid_id in enumerate(("grid_plains", "grid_coast", "grid_south")):
        rng = np.random.default_rng(300 + gi)
        base = rng.uniform(5, 18)
        amp = rng.uniform(8, 14)
        seasonal = amp * np.sin(2 * np.pi * (month_of_year - 4) / 12)
        warming = np.where(t > 360, 0.004 * (t - 360), 0.0)
        temps = base + seasonal + warming + rng.normal(0, 1.6, months)
        path = out_dir / f"{grid_id}.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            fh.write("date,temp_c\n")
            for i in range(months):
                fh.write(f"{start.shift(i)},{temps[i]:.3f}\n")
        lines.append(f"grids/{grid_id}.csv")
    (ROOT / "grid_manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def make_dgp_spec() -> None:
    (ROOT / "dgp_small.yaml").write_text(
        "\n".join(
            [
                "# bivariate test process with a strong instrument",
                "n: 2",
                "p: 1",
                "seed: 7",
                "phi:",
                "  - [0.5, 0.1]",
                "  - [0.0, 0.4]",
                "b:",
                "  - [1.0, 0.0]",
                "  - [0.5, 1.0]",
                "instrument_strength: 1.0",
                "noise_scale: 1.0",
                "",
            ]
        ),
        encoding="utf-8",
    )


def make_fred_cache() -> None:
    cache = ROOT / "fred_cache" / "TESTGAS"
    cache.mkdir(parents=True, exist_ok=True)
    observations = [
        {"date": f"2004-{m:02d}-01", "value": f"{13.0 + 0.1 * m:.1f}"}
        for m in range(1, 7)
    ]
    (cache / "2004-01_2004-06.json").write_text(
        json.dumps({"observations": observations}, indent=2), encoding="utf-8"
    )


def make_activity_series() -> None:
    """A positive level series so growth-rate transforms have something to
    chew on in config-driven runs."""
    rng = np.random.default_rng(11)
    growth = 0.002 + 0.01 * rng.normal(size=MONTHS)
    level = 100.0 * np.cumprod(1.0 + np.clip(growth, -0.05, 0.05))
    write_series_csv(TimeSeries(START, level, "activity"), ROOT / "activity.csv")


def make_run_config() -> None:
    (ROOT / "run_config.yaml").write_text(
        "\n".join(
            [
                "window: {start: '2004-01', end: '2023-06'}",
                "var_lags: 6",
                "horizon: 12",
                "level: 0.68",
                "reps: 500",
                "seed: 0",
                "sources:",
                "  - {kind: local_csv, locator: activity.csv, transform: pct_change, seasonal_adjust: true}",
                "  - {kind: local_csv, locator: instrument.csv, transform: none}",
                "",
            ]
        ),
        encoding="utf-8",
    )


if __name__ == "__main__":
    make_groups()
    make_index_panel()
    make_macro_panel()
    make_grids()
    make_dgp_spec()
    make_fred_cache()
    make_activity_series()
    make_run_config()
    print("fixtures written to", ROOT)
