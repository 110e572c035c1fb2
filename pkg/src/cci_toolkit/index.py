"""Concern-index construction from grouped relative-search-volume series.

Search terms are organized into small category-homogeneous groups that all
contain one benchmark term. Within a group every non-benchmark term is
rescaled by the maximum of the benchmark's series, producing comparable
relative-frequency series across groups; summing those and normalizing the
peak to 100 yields the index. The benchmark itself never enters the sum, it
is purely the cross-group scaling device.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

from .errors import AllZero, DataError, DegenerateBenchmark, MissingTerm
from .series import TimeSeries, align, seasonal_adjust

CATEGORY_LABELS: dict[int, str] = {
    1: "natural disasters",
    2: "global warming threats",
    3: "climate change concerns",
    4: "reduction and mitigation",
    5: "new technology",
    6: "international summits",
    7: "environmental policy",
}


@dataclass(frozen=True)
class QueryTerm:
    """A search query with its thematic category (1..7)."""

    text: str
    category: int
    is_benchmark: bool = False

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("term text must be non-empty")
        if not 1 <= self.category <= 7:
            raise ValueError(f"category must be in 1..7, got {self.category}")


@dataclass(frozen=True)
class QueryVocabulary:
    """The full term dictionary with exactly one benchmark term.

    Exclusion/union operators in term texts (``-word``, ``+phrase``) are
    stored verbatim and never parsed; term identity is the full string.
    """

    terms: tuple[QueryTerm, ...]

    def __post_init__(self) -> None:
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("vocabulary must be non-empty")
        texts = [t.text for t in terms]
        if len(set(texts)) != len(texts):
            raise ValueError("term texts must be unique")
        benchmarks = [t for t in terms if t.is_benchmark]
        if len(benchmarks) != 1:
            raise ValueError(
                f"exactly one benchmark term required, found {len(benchmarks)}"
            )
        object.__setattr__(self, "terms", terms)

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def benchmark(self) -> QueryTerm:
        return next(t for t in self.terms if t.is_benchmark)

    @property
    def non_benchmark(self) -> tuple[QueryTerm, ...]:
        return tuple(t for t in self.terms if not t.is_benchmark)

    def lookup(self, text: str) -> QueryTerm:
        for t in self.terms:
            if t.text == text:
                return t
        raise MissingTerm(f"term {text!r} not in vocabulary")

    @classmethod
    def bundled(cls) -> "QueryVocabulary":
        """The vocabulary fixture shipped with the package."""
        from .ingest import parse_vocabulary_csv

        path = resources.files("cci_toolkit").joinpath("data/vocabulary.csv")
        with path.open("r", encoding="utf-8") as fh:
            return parse_vocabulary_csv(fh)


@dataclass(frozen=True)
class QueryGroup:
    """A benchmark-anchored group of terms with their volume series.

    Construction checks structure (benchmark present, one series per member,
    shared calendar window, finite non-negative values); the stricter
    source-data expectations - group sizes of 2..5 and 0-100 scaling with a
    group maximum of exactly 100 - are enforced by
    :func:`validate_trends_group` on the ingest path, keeping the pure math
    usable on arbitrarily scaled inputs.
    """

    group_id: int
    members: tuple[QueryTerm, ...]
    series: Mapping[str, TimeSeries]

    def __post_init__(self) -> None:
        members = tuple(self.members)
        if not members:
            raise ValueError("group must have at least one member")
        benchmarks = [t for t in members if t.is_benchmark]
        if len(benchmarks) != 1:
            raise ValueError(
                f"group {self.group_id} needs exactly one benchmark member"
            )
        series = dict(self.series)
        windows = set()
        for t in members:
            if t.text not in series:
                raise MissingTerm(
                    f"group {self.group_id} lacks a series for {t.text!r}"
                )
            s = series[t.text]
            if np.any(s.values < 0):
                raise DataError(
                    f"group {self.group_id} series {t.text!r} has negative values"
                )
            windows.add((s.start, s.end))
        if len(windows) != 1:
            raise DataError(
                f"group {self.group_id} member series do not share one window"
            )
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "series", series)

    @property
    def benchmark(self) -> QueryTerm:
        return next(t for t in self.members if t.is_benchmark)


def validate_trends_group(group: QueryGroup) -> None:
    """Check the source-data expectations for exported volume groups:
    2..5 members, values within [0, 100], and a group maximum of 100."""
    if not 2 <= len(group.members) <= 5:
        raise DataError(
            f"group {group.group_id} has {len(group.members)} members, expected 2..5"
        )
    group_max = 0.0
    for text, s in group.series.items():
        if np.any(s.values > 100.0 + 1e-9):
            raise DataError(
                f"group {group.group_id} series {text!r} exceeds 100"
            )
        group_max = max(group_max, float(np.max(s.values)))
    if abs(group_max - 100.0) > 1e-9:
        raise DataError(
            f"group {group.group_id} maximum is {group_max}, expected 100"
        )


@dataclass(frozen=True)
class ConcernIndex:
    """The aggregated index, its per-term components and category mix."""

    index: TimeSeries
    per_term_fi: Mapping[QueryTerm, TimeSeries]
    category_shares: Mapping[int, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_term_fi", dict(self.per_term_fi))
        object.__setattr__(self, "category_shares", dict(self.category_shares))


def partition_vocabulary(
    vocab: QueryVocabulary, max_group_size: int = 5
) -> list[list[QueryTerm]]:
    """Split the vocabulary into benchmark-anchored member lists.

    Groups are filled greedily in category order; each holds at most
    max_group_size - 1 non-benchmark terms of a single category plus the
    benchmark (appended last). Every non-benchmark term lands in exactly
    one group.
    """
    if max_group_size < 2:
        raise ValueError(f"max_group_size must be >= 2, got {max_group_size}")
    benchmark = vocab.benchmark
    per_group = max_group_size - 1
    out: list[list[QueryTerm]] = []
    for category in range(1, 8):
        cat_terms = [t for t in vocab.non_benchmark if t.category == category]
        for i in range(0, len(cat_terms), per_group):
            out.append(cat_terms[i : i + per_group] + [benchmark])
    return out


def rescale_group(group: QueryGroup) -> dict[QueryTerm, TimeSeries]:
    """Relative-frequency series for each non-benchmark member:
    100 * series / max over time of the group's benchmark series.

    Values can exceed 100 when the benchmark is not the group maximum (a
    salient term can sit at 100 with the benchmark at 50, rescaling to 200).
    The benchmark itself is excluded from the output.
    """
    bench = group.series[group.benchmark.text]
    bench_max = float(np.max(bench.values))
    if bench_max <= 0.0:
        raise DegenerateBenchmark(
            f"group {group.group_id} benchmark series is identically zero"
        )
    out: dict[QueryTerm, TimeSeries] = {}
    for term in group.members:
        if term.is_benchmark:
            continue
        s = group.series[term.text]
        out[term] = TimeSeries(s.start, 100.0 * s.values / bench_max, term.text)
    return out


def aggregate_index(fi_by_term: Mapping[QueryTerm, TimeSeries]) -> ConcernIndex:
    """Sum the relative-frequency series and normalize the peak to 100.

    Category shares are each category's share of the total summed relative
    frequency across all terms and months.
    """
    if not fi_by_term:
        raise ValueError("need at least one term to aggregate")
    terms = list(fi_by_term)
    panel = align([fi_by_term[t] for t in terms])
    matrix = panel.to_matrix()
    raw = matrix.sum(axis=1)
    raw_max = float(np.max(raw))
    if raw_max <= 0.0:
        raise AllZero("aggregated index is identically zero")
    # divide first so the peak lands on 100.0 exactly
    index = TimeSeries(panel.start, 100.0 * (raw / raw_max), "cci")
    term_totals = matrix.sum(axis=0)
    grand_total = float(term_totals.sum())
    shares: dict[int, float] = {}
    for term, total in zip(terms, term_totals):
        shares[term.category] = shares.get(term.category, 0.0) + float(total)
    shares = {c: v / grand_total for c, v in sorted(shares.items())}
    aligned_fi = {t: s for t, s in zip(terms, panel.series)}
    return ConcernIndex(index=index, per_term_fi=aligned_fi, category_shares=shares)


def build_cci(
    vocab: QueryVocabulary,
    group_data: Iterable[QueryGroup],
    adjust: bool = False,
) -> ConcernIndex:
    """End-to-end index construction: rescale every group, aggregate, and
    optionally seasonally adjust the final index (re-normalized to 100).

    Raises MissingTerm when a vocabulary term has no group data, and
    DataError when a term appears in more than one group.
    """
    groups = list(group_data)
    fi: dict[QueryTerm, TimeSeries] = {}
    for group in groups:
        for term, series in rescale_group(group).items():
            if term in fi:
                raise DataError(f"term {term.text!r} appears in multiple groups")
            fi[term] = series
    for term in vocab.non_benchmark:
        if term not in fi:
            raise MissingTerm(f"no group data for term {term.text!r}")
    result = aggregate_index(fi)
    if adjust:
        adjusted = seasonal_adjust(result.index)
        peak = float(np.max(adjusted.values))
        if peak <= 0.0:
            raise AllZero("seasonally adjusted index has no positive peak")
        index = adjusted.with_values(100.0 * (adjusted.values / peak))
        result = ConcernIndex(
            index=index,
            per_term_fi=result.per_term_fi,
            category_shares=result.category_shares,
        )
    return result
