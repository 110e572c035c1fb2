"""External-instrument identification of a single target shock.

The instrument z relates to the target structural shock through
z_t = phi * eps_1t + noise. Two reduced-form moments pin down the structural
parameters: the quadratic form of the instrument/residual covariance equals
phi^2, and that covariance itself equals phi * B_col1'. With one instrument
and one target shock the system is just identified, so the minimum-distance
estimator has a closed form and a zero objective, which is still evaluated
as a numerical self-check.

Confidence bands come from a moving-block bootstrap that resamples residual
rows and instrument values jointly, rebuilds pseudo-data by recursion, and
re-estimates everything per replicate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from . import _kernels
from .errors import (
    IrrelevantInstrument,
    LengthMismatch,
    NumericalError,
    SingularSigma,
)
from .series import MonthStamp, SeriesPanel, TimeSeries
from .var import VarModel, VarSpec, companion, estimate_var


@dataclass(frozen=True)
class InstrumentSeries:
    """Monthly instrument observations; NaN entries mark missing months.

    Unlike :class:`TimeSeries` this container tolerates missing values,
    which are dropped pairwise from moment computation (the VAR itself
    always uses the full sample).
    """

    start: MonthStamp
    values: np.ndarray
    name: str = "instrument"

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("instrument values must be a non-empty vector")
        if np.all(np.isnan(arr)):
            raise ValueError("instrument is entirely missing")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.size

    @property
    def end(self) -> MonthStamp:
        return self.start.shift(len(self) - 1)

    @classmethod
    def from_series(cls, s: TimeSeries) -> "InstrumentSeries":
        return cls(start=s.start, values=s.values, name=s.name or "instrument")

    def aligned_to(self, start: MonthStamp, length: int) -> np.ndarray:
        """Values for the `length` months beginning at `start`.

        Raises LengthMismatch when the instrument does not cover that window.
        """
        offset = start.index - self.start.index
        if offset < 0 or offset + length > len(self):
            raise LengthMismatch(
                f"instrument {self.name!r} spans {self.start}..{self.end}, "
                f"needed {start}..{start.shift(length - 1)}"
            )
        return self.values[offset : offset + length]


@dataclass(frozen=True)
class MomentSet:
    """Reduced-form moments linking the instrument to the residuals."""

    sigma_z_eta: np.ndarray
    sigma_eta: np.ndarray
    scalar_moment: float
    n_used: int
    n_missing: int


@dataclass(frozen=True)
class ProxyIdentification:
    """Closed-form structural estimates for the target shock column."""

    phi: float
    b_col: np.ndarray
    cmd_objective: float
    sign_convention: str = "positive_phi"


@dataclass(frozen=True)
class RelevanceReport:
    f_stat: float
    first_stage_coef: float
    strong: bool
    threshold: float


@dataclass(frozen=True)
class IrfBundle:
    """Point impulse responses with pointwise bootstrap quantile bands."""

    horizons: np.ndarray
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    names: tuple[str, ...]
    block_length: int
    n_replicates: int
    n_dropped: int
    band_crossings: int


def compute_moments(model: VarModel, z: InstrumentSeries) -> MomentSet:
    """Instrument/residual covariance and its Sigma-weighted quadratic form.

    The instrument is demeaned over the rows that enter; months with missing
    instrument values are dropped pairwise. The quadratic form is computed
    with a Cholesky solve rather than an explicit inverse.
    """
    vals = z.aligned_to(model.residual_start, model.n_obs)
    mask = np.isfinite(vals)
    n_used = int(mask.sum())
    n_missing = int(mask.size - n_used)
    if n_used < 2:
        raise LengthMismatch(
            f"instrument {z.name!r} has {n_used} usable rows on the residual window"
        )
    zc = vals[mask] - vals[mask].mean()
    eta = model.residuals[mask]
    sigma_z_eta = zc @ eta / n_used
    sigma_eta = model.sigma_eta
    try:
        factor = cho_factor(sigma_eta)
    except np.linalg.LinAlgError:
        raise SingularSigma("residual covariance is not positive definite") from None
    scalar = float(sigma_z_eta @ cho_solve(factor, sigma_z_eta))
    return MomentSet(
        sigma_z_eta=sigma_z_eta,
        sigma_eta=sigma_eta,
        scalar_moment=max(scalar, 0.0),
        n_used=n_used,
        n_missing=n_missing,
    )


def cmd_objective(moments: MomentSet, phi: float, b_col: np.ndarray) -> float:
    """Identity-weighted minimum-distance criterion between the reduced-form
    moment vector and its structural parameterization."""
    sigma_vec = np.concatenate(([moments.scalar_moment], moments.sigma_z_eta))
    fitted = np.concatenate(([phi * phi], phi * np.asarray(b_col)))
    diff = sigma_vec - fitted
    return float(diff @ diff)


def identify(moments: MomentSet, relevance_floor: float = 1e-12) -> ProxyIdentification:
    """Closed-form just-identified solution: phi = +sqrt of the quadratic
    moment, B column = Sigma_eta,z / phi.

    The sign convention keeps phi positive (instrument positively correlated
    with the target shock); flipping the instrument's sign flips the column.

    Raises
    ------
    IrrelevantInstrument
        When the quadratic moment falls below `relevance_floor`.
    """
    if moments.scalar_moment < relevance_floor:
        raise IrrelevantInstrument(
            f"scalar moment {moments.scalar_moment:.3e} below floor {relevance_floor:.1e}"
        )
    phi = math.sqrt(moments.scalar_moment)
    b_col = moments.sigma_z_eta / phi
    objective = cmd_objective(moments, phi, b_col)
    if not objective < 1e-10:
        raise NumericalError(
            f"minimum-distance objective {objective:.3e} not at its zero"
        )
    return ProxyIdentification(phi=phi, b_col=b_col, cmd_objective=objective)


def irf(model: VarModel, ident: ProxyIdentification, horizon: int) -> np.ndarray:
    """Impulse responses to the identified shock over horizons 0..H.

    Row h equals S C^h S' b where C is the companion matrix; row 0 is the
    impact column itself, and for stable models rows decay geometrically.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    return _irf_from_phi(model.phi, ident.b_col, horizon)


def _irf_from_phi(phi: np.ndarray, b_col: np.ndarray, horizon: int) -> np.ndarray:
    n = phi.shape[0]
    p = phi.shape[1] // n
    out = np.empty((horizon + 1, n))
    state = np.zeros(n * p)
    state[:n] = b_col
    out[0] = b_col
    if horizon == 0:
        return out
    comp = np.zeros((n * p, n * p))
    comp[:n, :] = phi
    if p > 1:
        comp[n:, : n * (p - 1)] = np.eye(n * (p - 1))
    for h in range(1, horizon + 1):
        state = comp @ state
        out[h] = state[:n]
    return out


def relevance_test(
    model: VarModel, z: InstrumentSeries, threshold: float = 10.0
) -> RelevanceReport:
    """First-stage strength check: heteroskedasticity-robust F statistic of
    the demeaned instrument in a regression of the target residual on it.

    This is a standard robust first-stage F used as a stand-in strength
    diagnostic; the verdict is "strong" above `threshold` (default 10).
    """
    vals = z.aligned_to(model.residual_start, model.n_obs)
    mask = np.isfinite(vals)
    if mask.sum() < 3:
        raise LengthMismatch("too few usable instrument rows for a first stage")
    zc = vals[mask] - vals[mask].mean()
    e1 = model.residuals[mask, 0]
    x = np.column_stack([np.ones(zc.size), zc])
    beta, *_ = np.linalg.lstsq(x, e1, rcond=None)
    u = e1 - x @ beta
    m, k = x.shape
    xtx_inv = np.linalg.inv(x.T @ x)
    meat = (x * u[:, None] ** 2).T @ x
    cov = xtx_inv @ meat @ xtx_inv * (m / (m - k))
    f_stat = float(beta[1] ** 2 / cov[1, 1])
    return RelevanceReport(
        f_stat=f_stat,
        first_stage_coef=float(beta[1]),
        strong=f_stat > threshold,
        threshold=threshold,
    )


def default_block_length(sample_size: int) -> int:
    """Rule-of-thumb block length, ceil(5.03 * m^(1/4)) on the residual
    sample size."""
    return max(1, math.ceil(5.03 * sample_size**0.25))


def _position_means(arr: np.ndarray, block_len: int) -> np.ndarray:
    """Mean of arr[r + s] over admissible block starts r, per position s."""
    m = arr.shape[0]
    n_starts = m - block_len + 1
    out = np.empty((block_len,) + arr.shape[1:])
    for s in range(block_len):
        window = arr[s : s + n_starts]
        if window.ndim == 1:
            out[s] = np.nanmean(window)
        else:
            out[s] = np.nanmean(window, axis=0)
    return out


def mbb_bands(
    panel: SeriesPanel,
    spec: VarSpec,
    z: InstrumentSeries,
    horizon: int = 12,
    level: float = 0.68,
    reps: int = 500,
    block_len: int | None = None,
    seed: int = 0,
    relevance_floor: float = 1e-12,
    max_dropped_frac: float = 0.10,
) -> IrfBundle:
    """Moving-block-bootstrap confidence bands for the identified IRFs.

    Residual rows and instrument values are resampled jointly in blocks of
    `block_len` and recentered by within-block position so resampled
    innovations are mean zero; pseudo-data are rebuilt with the estimated
    coefficients, and the VAR, moments and IRFs are re-estimated per
    replicate. Bands are pointwise empirical quantiles at (1-level)/2 and
    1-(1-level)/2, deterministic given `seed`.

    Replicates whose identification fails are dropped and counted; more
    than `max_dropped_frac` dropped is an error.
    """
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")

    model = estimate_var(panel, spec)
    moments = compute_moments(model, z)
    ident = identify(moments, relevance_floor)
    point = irf(model, ident, horizon)

    m = model.n_obs
    n = model.n
    p = model.p
    if block_len is None:
        block_len = default_block_length(m)
    n_starts = m - block_len + 1
    if block_len < 1 or n_starts < 2:
        raise ValueError(
            f"block length {block_len} leaves fewer than two distinct blocks "
            f"for {m} residual rows"
        )
    n_blocks = -(-m // block_len)

    resid = model.residuals
    z_vals = z.aligned_to(model.residual_start, m)
    center_u = _position_means(resid, block_len)
    center_z = _position_means(z_vals, block_len)

    y = panel.to_matrix()
    y_init = y[:p]
    phi_hat = model.phi
    const_hat = model.intercept
    intercept_flag = spec.include_intercept
    k = n * p + (1 if intercept_flag else 0)

    offsets = np.arange(block_len)
    positions = np.tile(offsets, n_blocks)[:m]
    children = np.random.SeedSequence(seed).spawn(reps)

    draws = np.empty((reps, horizon + 1, n))
    kept = 0
    dropped = 0
    for r in range(reps):
        rng = np.random.default_rng(children[r])
        starts = rng.integers(0, n_starts, size=n_blocks)
        idx = (starts[:, None] + offsets[None, :]).reshape(-1)[:m]
        u_star = resid[idx] - center_u[positions]
        z_star = z_vals[idx] - center_z[positions]

        y_star = _kernels.var_recursion(phi_hat, const_hat, u_star, y_init)
        y_full = np.vstack([y_init, y_star])
        try:
            coeffs_s, resid_s, rank_s = _kernels.fit_var_ls(y_full, p, intercept_flag)
            if rank_s < k:
                raise SingularSigma("bootstrap regressor matrix rank deficient")
            sigma_s = resid_s.T @ resid_s / m
            mask = np.isfinite(z_star)
            if mask.sum() < 2:
                raise IrrelevantInstrument("no usable instrument rows in replicate")
            zc = z_star[mask] - z_star[mask].mean()
            s_z_eta = zc @ resid_s[mask] / mask.sum()
            factor = cho_factor((sigma_s + sigma_s.T) / 2.0)
            scalar = float(s_z_eta @ cho_solve(factor, s_z_eta))
            if scalar < relevance_floor:
                raise IrrelevantInstrument("bootstrap scalar moment below floor")
            phi_s = math.sqrt(scalar)
            b_s = s_z_eta / phi_s
            phi_lags = coeffs_s[:, 1:] if intercept_flag else coeffs_s
            draws[kept] = _irf_from_phi(phi_lags, b_s, horizon)
            kept += 1
        except (np.linalg.LinAlgError, SingularSigma, IrrelevantInstrument):
            dropped += 1

    if dropped > max_dropped_frac * reps:
        raise NumericalError(
            f"{dropped}/{reps} bootstrap replicates failed identification"
        )
    alpha = (1.0 - level) / 2.0
    lower = np.quantile(draws[:kept], alpha, axis=0)
    upper = np.quantile(draws[:kept], 1.0 - alpha, axis=0)
    crossings = int(np.sum((point < lower) | (point > upper)))
    return IrfBundle(
        horizons=np.arange(horizon + 1),
        point=point,
        lower=lower,
        upper=upper,
        level=level,
        names=panel.names,
        block_length=block_len,
        n_replicates=kept,
        n_dropped=dropped,
        band_crossings=crossings,
    )
