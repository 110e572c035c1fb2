"""Reduced-form VAR estimation and the comparison machinery built on it:
stability diagnostics, portmanteau residual checks, Granger causality and
principal components.

Estimation is equation-by-equation least squares on stacked lags. The model
object keeps its regressor matrix so that Wald tests can reuse the exact
design that produced the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from . import _kernels
from .errors import RankDeficient, TooShort, UnknownVariable, ZeroVariance
from .series import MonthStamp, SeriesPanel


@dataclass(frozen=True)
class VarSpec:
    """Lag order and deterministic-term choice for a VAR."""

    lags: int
    include_intercept: bool = True

    def __post_init__(self) -> None:
        if self.lags < 1:
            raise ValueError(f"lags must be >= 1, got {self.lags}")


@dataclass(frozen=True)
class VarModel:
    """An estimated VAR: coefficients, residuals and residual covariance.

    `coeffs` has one row per equation; column 0 is the constant when the
    spec includes one, followed by the lag blocks [Phi_1 | ... | Phi_p].
    """

    spec: VarSpec
    names: tuple[str, ...]
    start: MonthStamp
    coeffs: np.ndarray
    residuals: np.ndarray
    sigma_eta: np.ndarray
    r2: np.ndarray
    regressors: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def p(self) -> int:
        return self.spec.lags

    @property
    def n_obs(self) -> int:
        """Effective sample size T - p."""
        return self.residuals.shape[0]

    @property
    def intercept(self) -> np.ndarray:
        if self.spec.include_intercept:
            return self.coeffs[:, 0]
        return np.zeros(self.n)

    @property
    def phi(self) -> np.ndarray:
        """Lag blocks only, shape (n, n*p)."""
        if self.spec.include_intercept:
            return self.coeffs[:, 1:]
        return self.coeffs

    @property
    def residual_start(self) -> MonthStamp:
        """Calendar month of the first residual row."""
        return self.start.shift(self.p)

    def variable_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(f"unknown variable {name!r}; have {self.names}") from None


@dataclass(frozen=True)
class CompanionForm:
    """First-order stacked form: np x np matrix plus the n x np selector."""

    matrix: np.ndarray
    selector: np.ndarray


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    spectral_radius: float


@dataclass(frozen=True)
class GrangerResult:
    dependent: str
    excluded: tuple[str, ...]
    wald_stat: float
    df: int
    p_value: float

    @property
    def excluded_label(self) -> str:
        return ", ".join(self.excluded)


@dataclass(frozen=True)
class PortmanteauResult:
    """Multivariate Ljung-Box statistics for residual autocorrelation.

    `p_values` is NaN for orders h <= p, where the lag-adjusted degrees of
    freedom n^2 (h - p) are not positive.
    """

    orders: np.ndarray
    stats: np.ndarray
    dfs: np.ndarray
    p_values: np.ndarray


@dataclass(frozen=True)
class PcaResult:
    loadings: np.ndarray
    scores: SeriesPanel
    explained: np.ndarray


def lag_design(y: np.ndarray, p: int, intercept: bool) -> np.ndarray:
    """Stacked-lag regressor matrix: rows t = p..T-1, columns
    [1, y_{t-1}, ..., y_{t-p}]."""
    tt, n = y.shape
    m = tt - p
    k = n * p + (1 if intercept else 0)
    x = np.empty((m, k))
    col = 0
    if intercept:
        x[:, 0] = 1.0
        col = 1
    for i in range(1, p + 1):
        x[:, col : col + n] = y[p - i : tt - i]
        col += n
    return x


def estimate_var(panel: SeriesPanel, spec: VarSpec) -> VarModel:
    """Fit a VAR(p) to the panel by least squares.

    Raises
    ------
    TooShort
        When the effective sample leaves no degrees of freedom.
    RankDeficient
        When the regressor matrix is singular.
    """
    y = panel.to_matrix()
    tt, n = y.shape
    p = spec.lags
    if tt - p <= n * p + 1:
        raise TooShort(
            f"need T - p > n*p + 1; have T={tt}, n={n}, p={p}"
        )
    coeffs, resid, rank = _kernels.fit_var_ls(y, p, spec.include_intercept)
    k = n * p + (1 if spec.include_intercept else 0)
    if rank < k:
        raise RankDeficient(f"regressor matrix has rank {rank} < {k}")
    m = resid.shape[0]
    sigma = resid.T @ resid / m
    sigma = (sigma + sigma.T) / 2.0
    target = y[p:]
    if spec.include_intercept:
        sst = np.sum((target - target.mean(axis=0)) ** 2, axis=0)
    else:
        sst = np.sum(target**2, axis=0)
    ssr = np.sum(resid**2, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(sst > 0, 1.0 - ssr / sst, np.nan)
    return VarModel(
        spec=spec,
        names=panel.names,
        start=panel.start,
        coeffs=coeffs,
        residuals=resid,
        sigma_eta=sigma,
        r2=r2,
        regressors=lag_design(y, p, spec.include_intercept),
    )


def companion(model: VarModel) -> CompanionForm:
    """Block-companion matrix C and selector S with S C^0 S' = I_n."""
    n, p = model.n, model.p
    c = np.zeros((n * p, n * p))
    c[:n, :] = model.phi
    if p > 1:
        c[n:, : n * (p - 1)] = np.eye(n * (p - 1))
    s = np.zeros((n, n * p))
    s[:, :n] = np.eye(n)
    return CompanionForm(matrix=c, selector=s)


def stability(model: VarModel) -> StabilityResult:
    """Spectral-radius check of the companion matrix (stable iff < 1)."""
    radius = float(np.max(np.abs(np.linalg.eigvals(companion(model).matrix))))
    return StabilityResult(stable=radius < 1.0, spectral_radius=radius)


def residual_autocorr_test(
    model: VarModel, max_order: int, lag_adjustment: int | None = None
) -> PortmanteauResult:
    """Small-sample-corrected multivariate portmanteau test per order.

    Q(h) = m^2 sum_{j<=h} tr(C_j' C_0^{-1} C_j C_0^{-1}) / (m - j), referred
    to a chi-square with n^2 (h - a) degrees of freedom, where the
    adjustment a defaults to the model's lag count (orders with
    non-positive df get NaN p-values). Pass ``lag_adjustment=0`` when the
    rows under test are raw series rather than fitted residuals.
    """
    if max_order < 1:
        raise ValueError(f"max_order must be >= 1, got {max_order}")
    adjust = model.p if lag_adjustment is None else lag_adjustment
    if adjust < 0:
        raise ValueError(f"lag_adjustment must be >= 0, got {adjust}")
    resid = model.residuals
    m, n = resid.shape
    if m <= max_order:
        raise TooShort(f"need more than {max_order} residual rows, have {m}")
    r = resid - resid.mean(axis=0)
    c0 = r.T @ r / m
    try:
        c0_inv = np.linalg.inv(c0)
    except np.linalg.LinAlgError:
        raise RankDeficient("residual covariance is singular") from None
    orders = np.arange(1, max_order + 1)
    stats_out = np.empty(max_order)
    acc = 0.0
    for j in range(1, max_order + 1):
        cj = r[j:].T @ r[:-j] / m
        acc += np.trace(cj.T @ c0_inv @ cj @ c0_inv) / (m - j)
        stats_out[j - 1] = m * m * acc
    dfs = n * n * (orders - adjust)
    p_values = np.full(max_order, np.nan)
    valid = dfs > 0
    p_values[valid] = stats.chi2.sf(stats_out[valid], dfs[valid])
    return PortmanteauResult(orders=orders, stats=stats_out, dfs=dfs, p_values=p_values)


def _equation_cov(model: VarModel, eq: int, robust: bool) -> np.ndarray:
    x = model.regressors
    m, k = x.shape
    xtx_inv = np.linalg.inv(x.T @ x)
    e = model.residuals[:, eq]
    if robust:
        meat = (x * e[:, None] ** 2).T @ x
        return xtx_inv @ meat @ xtx_inv
    s2 = float(e @ e) / (m - k)
    return s2 * xtx_inv


def granger_test(
    model: VarModel,
    dependent: str,
    excluded: str | Sequence[str],
    robust: bool = False,
) -> GrangerResult:
    """Wald test that all lags of the excluded variables are jointly zero in
    the dependent variable's equation.

    Degrees of freedom are (number of excluded variables) * p; the p-value
    comes from the chi-square upper tail. The default covariance is the
    classical homoskedastic per-equation OLS covariance; `robust` switches
    to the heteroskedasticity-consistent sandwich.
    """
    if isinstance(excluded, str):
        excluded = (excluded,)
    excluded = tuple(excluded)
    if not excluded:
        raise UnknownVariable("excluded set must be non-empty")
    d = model.variable_index(dependent)
    idx = [model.variable_index(name) for name in excluded]
    if len(set(idx)) != len(idx):
        raise UnknownVariable(f"duplicate excluded variables in {excluded}")
    if d in idx:
        raise UnknownVariable(
            f"dependent {dependent!r} cannot be in the excluded set"
        )
    n, p = model.n, model.p
    offset = 1 if model.spec.include_intercept else 0
    positions = [offset + lag * n + e for lag in range(p) for e in idx]
    beta = model.coeffs[d, positions]
    cov = _equation_cov(model, d, robust)[np.ix_(positions, positions)]
    try:
        wald = float(beta @ np.linalg.solve(cov, beta))
    except np.linalg.LinAlgError:
        raise RankDeficient("restricted coefficient covariance is singular") from None
    df = len(excluded) * p
    return GrangerResult(
        dependent=dependent,
        excluded=excluded,
        wald_stat=wald,
        df=df,
        p_value=float(stats.chi2.sf(wald, df)),
    )


def granger_table(model: VarModel, robust: bool = False) -> list[GrangerResult]:
    """Every pairwise exclusion test plus the joint all-others row, for each
    dependent variable in turn."""
    rows: list[GrangerResult] = []
    for dep in model.names:
        others = [v for v in model.names if v != dep]
        for other in others:
            rows.append(granger_test(model, dep, other, robust=robust))
        if len(others) > 1:
            rows.append(granger_test(model, dep, others, robust=robust))
    return rows


def shock_correlation(model: VarModel) -> np.ndarray:
    """Contemporaneous correlation matrix of the reduced-form residuals."""
    return np.corrcoef(model.residuals, rowvar=False)


def pca(panel: SeriesPanel, standardize_first: bool = True) -> PcaResult:
    """Principal components of the panel.

    Works on the correlation matrix when `standardize_first` (the default,
    appropriate for indices on different scales) and the covariance matrix
    otherwise. Loadings are orthonormal columns with the largest-magnitude
    entry of each component made positive.
    """
    if panel.n_series < 2:
        raise ValueError("pca requires at least two series")
    x = panel.to_matrix()
    tt = x.shape[0]
    z = x - x.mean(axis=0)
    if standardize_first:
        sd = np.std(x, axis=0, ddof=1)
        if np.any(sd == 0):
            flat = panel.names[int(np.argmin(sd))]
            raise ZeroVariance(f"series {flat!r} has zero variance")
        z = z / sd
    cov = z.T @ z / (tt - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    loadings = eigvecs[:, order]
    for j in range(loadings.shape[1]):
        lead = int(np.argmax(np.abs(loadings[:, j])))
        if loadings[lead, j] < 0:
            loadings[:, j] = -loadings[:, j]
    shares = eigvals / np.sum(eigvals)
    names = tuple(f"pc{j + 1}" for j in range(loadings.shape[1]))
    scores = SeriesPanel.from_matrix(panel.start, z @ loadings, names)
    return PcaResult(loadings=loadings, scores=scores, explained=shares)
