"""Client for a FRED-style monthly-observations HTTP API.

Only the observations endpoint subset is used: GET
``<api_base>/series/observations`` with ``series_id``, ``observation_start``,
``observation_end`` and ``file_type=json``, returning
``{"observations": [{"date": "YYYY-MM-DD", "value": "..."}, ...]}``.

Responses are cached as JSON under ``cache/<series_id>/<start>_<end>.json``;
a cached response is always preferred when present, and offline mode reads
the cache exclusively. Missing observations (value ".") are errors, never
zeros: a gapped series would corrupt VAR lags downstream.
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from pathlib import Path
from typing import Any

import requests

from .errors import AuthError, GapError, HttpError, ParseError
from .series import MonthStamp, TimeSeries

DEFAULT_API_BASE = "https://api.stlouisfed.org/fred"
API_KEY_ENV = "FRED_API_KEY"
_TRANSIENT_STATUSES = {429, 500, 502, 503, 504}


def _cache_path(cache_dir: str | Path, series_id: str, window: tuple[MonthStamp, MonthStamp]) -> Path:
    return Path(cache_dir) / series_id / f"{window[0]}_{window[1]}.json"


def _write_cache(path: Path, payload: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _observations_to_series(payload: dict[str, Any], series_id: str) -> TimeSeries:
    observations = payload.get("observations")
    if not isinstance(observations, list) or not observations:
        raise ParseError(f"{series_id}: response has no observations")
    months: list[MonthStamp] = []
    values: list[float] = []
    for obs in observations:
        date = str(obs.get("date", ""))
        raw = str(obs.get("value", ""))
        try:
            month = MonthStamp.parse(date[:7])
        except ValueError:
            raise ParseError(f"{series_id}: bad observation date {date!r}") from None
        if raw.strip() == ".":
            raise GapError(f"{series_id}: missing observation at {month}")
        try:
            value = float(raw)
        except ValueError:
            raise ParseError(f"{series_id}: bad value {raw!r} at {month}") from None
        months.append(month)
        values.append(value)
    missing = [
        str(prev.shift(k))
        for prev, cur in zip(months, months[1:])
        for k in range(1, cur.index - prev.index)
    ]
    if missing:
        raise GapError(f"{series_id}: missing months: {', '.join(missing)}")
    for prev, cur in zip(months, months[1:]):
        if cur.index <= prev.index:
            raise ParseError(f"{series_id}: observations not ascending near {cur}")
    return TimeSeries(months[0], values, series_id)


def fetch_remote(
    series_id: str,
    window: tuple[MonthStamp, MonthStamp],
    api_base: str = DEFAULT_API_BASE,
    api_key: str | None = None,
    *,
    cache_dir: str | Path | None = None,
    offline: bool = False,
    session: requests.Session | None = None,
    max_attempts: int = 3,
    backoff_base: float = 0.5,
    timeout: float = 30.0,
) -> TimeSeries:
    """Fetch one monthly series over `window` (inclusive month stamps).

    Transient failures (429, 5xx, connection errors) are retried with
    exponential backoff up to `max_attempts`; 401/403 raise AuthError. With
    `cache_dir` set, a cached response is used when present and fresh
    responses are written atomically so repeated runs are deterministic.
    """
    cache_file = (
        _cache_path(cache_dir, series_id, window) if cache_dir is not None else None
    )
    if cache_file is not None and cache_file.exists():
        payload = json.loads(cache_file.read_text(encoding="utf-8"))
        return _observations_to_series(payload, series_id)
    if offline:
        raise HttpError(
            f"{series_id}: offline mode and no cached response"
            + (f" at {cache_file}" if cache_file is not None else "")
        )

    key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
    if not key:
        raise AuthError(
            f"{series_id}: no API key (pass api_key or set {API_KEY_ENV})"
        )
    params = {
        "series_id": series_id,
        "observation_start": f"{window[0]}-01",
        "observation_end": f"{window[1]}-01",
        "file_type": "json",
        "api_key": key,
    }
    owns_session = session is None
    sess = session or requests.Session()
    try:
        last_error = ""
        for attempt in range(max_attempts):
            if attempt > 0:
                time.sleep(backoff_base * 2 ** (attempt - 1))
            try:
                response = sess.get(
                    f"{api_base}/series/observations", params=params, timeout=timeout
                )
            except requests.RequestException as exc:
                last_error = f"connection error: {exc}"
                continue
            if response.status_code in (401, 403):
                raise AuthError(
                    f"{series_id}: API rejected credentials (HTTP {response.status_code})"
                )
            if response.status_code in _TRANSIENT_STATUSES:
                last_error = f"HTTP {response.status_code}: {response.text[:200]}"
                continue
            if response.status_code != 200:
                raise HttpError(
                    f"{series_id}: HTTP {response.status_code}: {response.text[:200]}"
                )
            try:
                payload = response.json()
            except ValueError:
                raise ParseError(f"{series_id}: response is not JSON") from None
            if cache_file is not None:
                _write_cache(cache_file, payload)
            return _observations_to_series(payload, series_id)
        raise HttpError(
            f"{series_id}: failed after {max_attempts} attempts ({last_error})"
        )
    finally:
        if owns_session:
            sess.close()
