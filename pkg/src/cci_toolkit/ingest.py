"""File formats and run configuration.

Every series travels as CSV with a ``date,value[,name]`` header, dates as
``YYYY-MM`` in ascending month order, UTF-8, decimal points. Panels and
term groups use a ``date,<name1>,<name2>,...`` wide layout. Loaders reject
gaps instead of interpolating: silent imputation would corrupt VAR lags.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TextIO

import yaml

from .errors import ConfigError, GapError, ParseError
from .index import QueryGroup, QueryTerm, QueryVocabulary, validate_trends_group
from .series import (
    MonthStamp,
    SeriesPanel,
    TimeSeries,
    align,
    pct_change,
    seasonal_adjust,
    standardize,
    yoy_growth,
)
from .t90 import REFERENCE_WINDOW, GridSeries

TRANSFORMS: dict[str, Callable[[TimeSeries], TimeSeries] | None] = {
    "none": None,
    "pct_change": pct_change,
    "yoy": yoy_growth,
    "standardize": standardize,
}

ADJUST_ORDERS = ("adjust-then-transform", "transform-then-adjust")


def _parse_month(text: str, path: str, line: int) -> MonthStamp:
    try:
        return MonthStamp.parse(text)
    except ValueError as exc:
        raise ParseError(f"{path}:{line}: {exc}") from None


def _parse_value(text: str, path: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"{path}:{line}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"{path}:{line}: non-finite value {text!r}")
    return value


def _check_consecutive(months: Sequence[MonthStamp], path: str) -> None:
    missing: list[str] = []
    for prev, cur in zip(months, months[1:]):
        if cur.index <= prev.index:
            raise ParseError(f"{path}: dates not strictly ascending near {cur}")
        for k in range(prev.index + 1, cur.index):
            missing.append(str(prev.shift(k - prev.index)))
    if missing:
        raise GapError(f"{path}: missing months: {', '.join(missing)}")


def load_series_csv(path: str | Path) -> TimeSeries:
    """Read one series from a ``date,value[,name]`` CSV.

    Raises ParseError with the offending line number, or GapError naming
    any missing months.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip().lower() for h in header]
        if header[:2] != ["date", "value"]:
            raise ParseError(f"{path}:1: expected header date,value[,name]")
        months: list[MonthStamp] = []
        values: list[float] = []
        name = path.stem
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{line_no}: expected at least 2 columns")
            months.append(_parse_month(row[0], str(path), line_no))
            values.append(_parse_value(row[1], str(path), line_no))
            if len(row) > 2 and row[2].strip() and line_no == 2:
                name = row[2].strip()
    if not months:
        raise ParseError(f"{path}: no data rows")
    _check_consecutive(months, str(path))
    return TimeSeries(months[0], values, name)


def write_series_csv(series: TimeSeries, path: str | Path) -> None:
    """Write a series in the standard format; floats use their shortest
    round-trip representation so load(write(s)) is exact."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        if series.name:
            writer.writerow(["date", "value", "name"])
            for month, value in zip(series.months(), series.values):
                writer.writerow([str(month), repr(float(value)), series.name])
        else:
            writer.writerow(["date", "value"])
            for month, value in zip(series.months(), series.values):
                writer.writerow([str(month), repr(float(value))])


def _load_wide_csv(path: str | Path) -> tuple[list[MonthStamp], list[str], list[list[float]]]:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise ParseError(f"{path}:1: expected header date,<name>,...")
        names = [h.strip() for h in header[1:]]
        if len(set(names)) != len(names):
            raise ParseError(f"{path}:1: duplicate column names")
        months: list[MonthStamp] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(names) + 1:
                raise ParseError(
                    f"{path}:{line_no}: expected {len(names) + 1} columns, got {len(row)}"
                )
            months.append(_parse_month(row[0], str(path), line_no))
            rows.append(
                [_parse_value(cell, str(path), line_no) for cell in row[1:]]
            )
    if not months:
        raise ParseError(f"{path}: no data rows")
    _check_consecutive(months, str(path))
    return months, names, rows


def load_panel_csv(path: str | Path) -> SeriesPanel:
    """Read a wide CSV (``date,<name1>,...``) into an aligned panel."""
    months, names, rows = _load_wide_csv(path)
    series = [
        TimeSeries(months[0], [row[j] for row in rows], names[j])
        for j in range(len(names))
    ]
    return SeriesPanel(tuple(series))


def write_panel_csv(panel: SeriesPanel, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + list(panel.names))
        matrix = panel.to_matrix()
        for i, month in enumerate(panel.series[0].months()):
            writer.writerow([str(month)] + [repr(float(v)) for v in matrix[i]])


def parse_vocabulary_csv(fh: TextIO) -> QueryVocabulary:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header] != [
        "term",
        "category",
        "is_benchmark",
    ]:
        raise ParseError("vocabulary: expected header term,category,is_benchmark")
    terms: list[QueryTerm] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"vocabulary:{line_no}: expected 3 columns")
        text = row[0].strip()
        try:
            category = int(row[1])
        except ValueError:
            raise ParseError(
                f"vocabulary:{line_no}: bad category {row[1]!r}"
            ) from None
        flag = row[2].strip().lower()
        if flag not in {"0", "1", "true", "false", "yes", "no", ""}:
            raise ParseError(f"vocabulary:{line_no}: bad is_benchmark {row[2]!r}")
        try:
            terms.append(
                QueryTerm(
                    text=text,
                    category=category,
                    is_benchmark=flag in {"1", "true", "yes"},
                )
            )
        except ValueError as exc:
            raise ParseError(f"vocabulary:{line_no}: {exc}") from None
    try:
        return QueryVocabulary(tuple(terms))
    except ValueError as exc:
        raise ParseError(f"vocabulary: {exc}") from None


def load_vocabulary(path: str | Path) -> QueryVocabulary:
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        return parse_vocabulary_csv(fh)


def load_group_csv(
    path: str | Path,
    vocab: QueryVocabulary,
    group_id: int,
    strict: bool = True,
) -> QueryGroup:
    """Read one term group from a wide CSV whose columns are vocabulary
    term texts. With `strict` the exported-data expectations (member count,
    0-100 range, max of 100) are enforced."""
    months, names, rows = _load_wide_csv(path)
    members = tuple(vocab.lookup(name) for name in names)
    series = {
        names[j]: TimeSeries(months[0], [row[j] for row in rows], names[j])
        for j in range(len(names))
    }
    group = QueryGroup(group_id=group_id, members=members, series=series)
    if strict:
        validate_trends_group(group)
    return group


def load_grid_csv(
    path: str | Path,
    reference_window: tuple[MonthStamp, MonthStamp] = REFERENCE_WINDOW,
) -> GridSeries:
    """Read one temperature grid from a ``date,temp_c`` CSV."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header][:2] != [
            "date",
            "temp_c",
        ]:
            raise ParseError(f"{path}:1: expected header date,temp_c")
        months: list[MonthStamp] = []
        values: list[float] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{line_no}: expected 2 columns")
            months.append(_parse_month(row[0], str(path), line_no))
            values.append(_parse_value(row[1], str(path), line_no))
    if not months:
        raise ParseError(f"{path}: no data rows")
    _check_consecutive(months, str(path))
    temps = TimeSeries(months[0], values, path.stem)
    return GridSeries(
        grid_id=path.stem, monthly_temps=temps, reference_window=reference_window
    )


def load_grid_manifest(
    path: str | Path,
    reference_window: tuple[MonthStamp, MonthStamp] = REFERENCE_WINDOW,
) -> list[GridSeries]:
    """Read the manifest (one grid CSV path per line, relative to the
    manifest, ``#`` comments allowed) and load every grid."""
    path = Path(path)
    grids: list[GridSeries] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        entry = raw.strip()
        if not entry or entry.startswith("#"):
            continue
        grid_path = Path(entry)
        if not grid_path.is_absolute():
            grid_path = path.parent / grid_path
        grids.append(load_grid_csv(grid_path, reference_window))
    return grids


# -- run configuration ---------------------------------------------------------

@dataclass(frozen=True)
class SeriesSource:
    """One input series: where it comes from and how to prepare it."""

    kind: str
    locator: str
    transform: str = "none"
    seasonal_adjust: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("local_csv", "remote_api"):
            raise ConfigError(f"source kind must be local_csv or remote_api, got {self.kind!r}")
        if not self.locator:
            raise ConfigError("source locator must be non-empty")
        if self.transform not in TRANSFORMS:
            raise ConfigError(
                f"transform must be one of {sorted(TRANSFORMS)}, got {self.transform!r}"
            )


@dataclass(frozen=True)
class RunConfig:
    """Declarative description of a full estimation run."""

    sources: tuple[SeriesSource, ...]
    window: tuple[MonthStamp, MonthStamp] | None = None
    var_lags: int = 6
    horizon: int = 12
    level: float = 0.68
    reps: int = 500
    block_len: int | None = None
    seed: int = 0
    adjust_order: str = "adjust-then-transform"


_CONFIG_KEYS = {
    "sources",
    "window",
    "var_lags",
    "horizon",
    "level",
    "reps",
    "block_len",
    "seed",
    "adjust_order",
}


def _config_int(raw: object, key: str, minimum: int) -> int:
    if not isinstance(raw, int) or isinstance(raw, bool) or raw < minimum:
        raise ConfigError(f"config key {key!r}: expected integer >= {minimum}, got {raw!r}")
    return raw


def load_config(path: str | Path) -> RunConfig:
    """Parse the YAML run configuration, filling documented defaults.

    Raises ConfigError naming the offending key on any invalid entry.
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    raw_sources = data.get("sources")
    if not isinstance(raw_sources, list) or not raw_sources:
        raise ConfigError("config key 'sources': expected a non-empty list")
    sources: list[SeriesSource] = []
    for i, entry in enumerate(raw_sources):
        if not isinstance(entry, dict):
            raise ConfigError(f"config key 'sources[{i}]': expected a mapping")
        extra = set(entry) - {"kind", "locator", "transform", "seasonal_adjust"}
        if extra:
            raise ConfigError(f"config key 'sources[{i}]': unknown keys {sorted(extra)}")
        sources.append(
            SeriesSource(
                kind=str(entry.get("kind", "local_csv")),
                locator=str(entry.get("locator", "")),
                transform=str(entry.get("transform", "none")),
                seasonal_adjust=bool(entry.get("seasonal_adjust", False)),
            )
        )

    window = None
    if data.get("window") is not None:
        raw_window = data["window"]
        if (
            not isinstance(raw_window, dict)
            or set(raw_window) != {"start", "end"}
        ):
            raise ConfigError("config key 'window': expected {start, end}")
        try:
            window = (
                MonthStamp.parse(str(raw_window["start"])),
                MonthStamp.parse(str(raw_window["end"])),
            )
        except ValueError as exc:
            raise ConfigError(f"config key 'window': {exc}") from None
        if window[1] < window[0]:
            raise ConfigError("config key 'window': end before start")

    level = data.get("level", 0.68)
    if not isinstance(level, (int, float)) or not 0.0 < float(level) < 1.0:
        raise ConfigError(f"config key 'level': expected a number in (0, 1), got {level!r}")

    block_len = data.get("block_len")
    if block_len is not None:
        block_len = _config_int(block_len, "block_len", 1)

    adjust_order = str(data.get("adjust_order", "adjust-then-transform"))
    if adjust_order not in ADJUST_ORDERS:
        raise ConfigError(
            f"config key 'adjust_order': expected one of {ADJUST_ORDERS}"
        )

    return RunConfig(
        sources=tuple(sources),
        window=window,
        var_lags=_config_int(data.get("var_lags", 6), "var_lags", 1),
        horizon=_config_int(data.get("horizon", 12), "horizon", 0),
        level=float(level),
        reps=_config_int(data.get("reps", 500), "reps", 100),
        block_len=block_len,
        seed=_config_int(data.get("seed", 0), "seed", 0),
        adjust_order=adjust_order,
    )


def prepare_source(
    series: TimeSeries, source: SeriesSource, adjust_order: str = "adjust-then-transform"
) -> TimeSeries:
    """Apply a source's seasonal adjustment and transform in the configured
    order (default: adjust first, then transform)."""
    if adjust_order not in ADJUST_ORDERS:
        raise ConfigError(f"adjust_order must be one of {ADJUST_ORDERS}")
    transform = TRANSFORMS[source.transform]
    steps: list[Callable[[TimeSeries], TimeSeries]] = []
    if adjust_order == "adjust-then-transform":
        if source.seasonal_adjust:
            steps.append(seasonal_adjust)
        if transform is not None:
            steps.append(transform)
    else:
        if transform is not None:
            steps.append(transform)
        if source.seasonal_adjust:
            steps.append(seasonal_adjust)
    for step in steps:
        series = step(series)
    return series


def assemble_panel(
    config: RunConfig,
    base_dir: str | Path = ".",
    fetch: Callable[[str, tuple[MonthStamp, MonthStamp] | None], TimeSeries] | None = None,
) -> SeriesPanel:
    """Load, prepare and align every configured source into one panel.

    Remote sources require a `fetch` callable (series_id, window) ->
    TimeSeries, keeping network access an explicit opt-in.
    """
    base = Path(base_dir)
    loaded: list[TimeSeries] = []
    for source in config.sources:
        if source.kind == "local_csv":
            series = load_series_csv(base / source.locator)
        else:
            if fetch is None:
                raise ConfigError(
                    f"source {source.locator!r} is remote but no fetcher was provided"
                )
            series = fetch(source.locator, config.window)
        loaded.append(prepare_source(series, source, config.adjust_order))
    panel = align(loaded)
    if config.window is not None:
        start, end = config.window
        lo = max(start, panel.window[0])
        hi = min(end, panel.window[1])
        panel = align([s.slice_window(lo, hi) for s in panel.series])
    return panel
