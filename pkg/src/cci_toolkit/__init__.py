"""Toolkit for search-volume concern indices and instrument-identified
shock estimation on monthly macroeconomic panels."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .index import (
    ConcernIndex,
    QueryGroup,
    QueryTerm,
    QueryVocabulary,
    aggregate_index,
    build_cci,
    partition_vocabulary,
    rescale_group,
)
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
from .simlab import Dgp, McReport, run_mc, simulate
from .svar import (
    InstrumentSeries,
    IrfBundle,
    MomentSet,
    ProxyIdentification,
    RelevanceReport,
    compute_moments,
    identify,
    irf,
    mbb_bands,
    relevance_test,
)
from .t90 import GridSeries, T90Series, aggregate_t90, build_t90, grid_exceedance, standardized_anomaly
from .var import (
    CompanionForm,
    GrangerResult,
    PcaResult,
    VarModel,
    VarSpec,
    companion,
    estimate_var,
    granger_table,
    granger_test,
    pca,
    residual_autocorr_test,
    shock_correlation,
    stability,
)

__all__ = [
    "KERNEL_BACKEND",
    "MonthStamp",
    "TimeSeries",
    "SeriesPanel",
    "align",
    "pct_change",
    "yoy_growth",
    "standardize",
    "seasonal_adjust",
    "QueryTerm",
    "QueryVocabulary",
    "QueryGroup",
    "ConcernIndex",
    "partition_vocabulary",
    "rescale_group",
    "aggregate_index",
    "build_cci",
    "VarSpec",
    "VarModel",
    "CompanionForm",
    "GrangerResult",
    "PcaResult",
    "estimate_var",
    "companion",
    "stability",
    "residual_autocorr_test",
    "granger_test",
    "granger_table",
    "shock_correlation",
    "pca",
    "InstrumentSeries",
    "MomentSet",
    "ProxyIdentification",
    "IrfBundle",
    "RelevanceReport",
    "compute_moments",
    "identify",
    "irf",
    "mbb_bands",
    "relevance_test",
    "GridSeries",
    "T90Series",
    "standardized_anomaly",
    "grid_exceedance",
    "aggregate_t90",
    "build_t90",
    "Dgp",
    "McReport",
    "simulate",
    "run_mc",
]
