"""Command-line entry point: one command per pipeline stage.

Exit codes: 0 success, 2 validation error, 3 data error, 4 numerical
failure. Human-readable summaries go to stdout; machine outputs are files.
"""

from __future__ import annotations

import functools
import json
import re
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import ToolkitError, ValidationError
from .index import CATEGORY_LABELS, QueryVocabulary, build_cci
from .ingest import (
    load_grid_manifest,
    load_group_csv,
    load_panel_csv,
    load_series_csv,
    load_vocabulary,
    write_series_csv,
)
from .series import MonthStamp
from .simlab import load_dgp, run_mc
from .svar import InstrumentSeries, compute_moments, identify, mbb_bands, relevance_test
from .svgplot import irf_svg
from .t90 import build_t90
from .var import VarSpec, estimate_var, granger_table, pca, residual_autocorr_test, stability


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ToolkitError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(exc.exit_code)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(2)

    return wrapper


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "series"


@click.group()
@click.version_option(version=__version__, prog_name="cci")
def main() -> None:
    """Concern-index construction, comparison and shock estimation."""


@main.command("build-index")
@click.option("--vocab", "vocab_path", type=click.Path(path_type=Path, exists=True), default=None,
              help="Vocabulary CSV (term,category,is_benchmark); defaults to the bundled fixture.")
@click.option("--group-dir", required=True, type=click.Path(path_type=Path, file_okay=False, exists=True),
              help="Directory of per-group CSVs (date,<term>,... columns).")
@click.option("--out", required=True, type=click.Path(path_type=Path),
              help="Output index CSV; a JSON sidecar with shares is written next to it.")
@click.option("--adjust/--no-adjust", default=False,
              help="Seasonally adjust the final index (re-normalized to 100).")
@_guard
def build_index_cmd(vocab_path: Path | None, group_dir: Path, out: Path, adjust: bool) -> None:
    """Build the concern index from exported volume groups."""
    vocab = load_vocabulary(vocab_path) if vocab_path else QueryVocabulary.bundled()
    group_files = sorted(Path(group_dir).glob("*.csv"))
    if not group_files:
        raise ValidationError(f"no group CSVs found in {group_dir}")
    groups = [
        load_group_csv(path, vocab, group_id=i + 1)
        for i, path in enumerate(group_files)
    ]
    result = build_cci(vocab, groups, adjust=adjust)
    write_series_csv(result.index, out)
    sidecar = {
        "category_shares": {str(c): v for c, v in result.category_shares.items()},
        "term_totals": {
            t.text: float(np.sum(s.values)) for t, s in sorted(
                result.per_term_fi.items(), key=lambda kv: kv[0].text
            )
        },
    }
    sidecar_path = out.with_suffix(".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True), encoding="utf-8")
    click.echo(f"index: {len(result.index)} months, peak {float(np.max(result.index.values)):.1f}")
    click.echo("category shares: " + ", ".join(
        f"{CATEGORY_LABELS.get(c, c)}: {v:.1%}" for c, v in result.category_shares.items()
    ))
    click.echo(f"wrote {out} and {sidecar_path}")


@main.command("compare")
@click.option("--panel", "panel_path", required=True, type=click.Path(path_type=Path, exists=True),
              help="Wide CSV (date,<name>,...) of indices to compare.")
@click.option("--lags", default=13, show_default=True, help="VAR lag order.")
@click.option("--out-dir", required=True, type=click.Path(path_type=Path, file_okay=False))
@click.option("--robust", is_flag=True, default=False,
              help="Heteroskedasticity-robust Wald covariance.")
@_guard
def compare_cmd(panel_path: Path, lags: int, out_dir: Path, robust: bool) -> None:
    """VAR diagnostics, pairwise causality table and principal components."""
    panel = load_panel_csv(panel_path)
    model = estimate_var(panel, VarSpec(lags=lags))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    coef_path = out_dir / "coefficients.csv"
    with coef_path.open("w", encoding="utf-8") as fh:
        cols = ["equation", "const"] if model.spec.include_intercept else ["equation"]
        for lag in range(1, lags + 1):
            cols += [f"{name}_lag{lag}" for name in model.names]
        fh.write(",".join(cols) + "\n")
        for i, name in enumerate(model.names):
            row = [name] + [repr(float(c)) for c in model.coeffs[i]]
            fh.write(",".join(row) + "\n")

    table = granger_table(model, robust=robust)
    granger_path = out_dir / "granger.csv"
    with granger_path.open("w", encoding="utf-8") as fh:
        fh.write("dependent,excluded,chi_sq,df,prob\n")
        for row in table:
            label = row.excluded_label if len(row.excluded) == 1 else "All"
            fh.write(
                f"\"{row.dependent}\",\"{label}\",{row.wald_stat:.6f},{row.df},{row.p_value:.6f}\n"
            )

    pca_result = pca(panel)
    pca_path = out_dir / "pca.json"
    pca_payload = {
        "explained": [float(v) for v in pca_result.explained],
        "loadings": {
            name: [float(v) for v in pca_result.loadings[i]]
            for i, name in enumerate(panel.names)
        },
    }
    pca_path.write_text(json.dumps(pca_payload, indent=2, sort_keys=True), encoding="utf-8")

    stab = stability(model)
    click.echo(f"radius < 1: {str(stab.stable).lower()} (spectral radius {stab.spectral_radius:.4f})")
    click.echo("r2 per equation: " + ", ".join(
        f"{name}: {r:.3f}" for name, r in zip(model.names, model.r2)
    ))
    port = residual_autocorr_test(model, max_order=max(lags, model.p + 1))
    worst = np.nanmin(port.p_values)
    click.echo(f"residual autocorrelation: min p-value {worst:.3f} up to order {port.orders[-1]}")
    click.echo(f"first component explains {pca_result.explained[0]:.3%}")
    click.echo(f"wrote {coef_path}, {granger_path}, {pca_path}")


@main.command("estimate")
@click.option("--panel", "panel_path", required=True, type=click.Path(path_type=Path, exists=True))
@click.option("--instrument", "instrument_path", required=True, type=click.Path(path_type=Path, exists=True))
@click.option("--lags", default=6, show_default=True)
@click.option("--horizon", default=12, show_default=True)
@click.option("--level", default=0.68, show_default=True)
@click.option("--reps", default=500, show_default=True)
@click.option("--block-len", default=None, type=int, help="Block length (default: rule of thumb).")
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path(path_type=Path, file_okay=False))
@click.option("--force", is_flag=True, default=False,
              help="Proceed even when the instrument is weak.")
@_guard
def estimate_cmd(
    panel_path: Path,
    instrument_path: Path,
    lags: int,
    horizon: int,
    level: float,
    reps: int,
    block_len: int | None,
    seed: int,
    out_dir: Path,
    force: bool,
) -> None:
    """Identify the target shock with the instrument and report IRFs."""
    panel = load_panel_csv(panel_path)
    instrument = InstrumentSeries.from_series(load_series_csv(instrument_path))
    spec = VarSpec(lags=lags)
    model = estimate_var(panel, spec)
    relevance = relevance_test(model, instrument)
    if not relevance.strong:
        message = (
            f"instrument is weak: first-stage F = {relevance.f_stat:.2f} "
            f"<= {relevance.threshold:g}"
        )
        if not force:
            from .errors import IrrelevantInstrument

            raise IrrelevantInstrument(message + " (use --force to proceed)")
        click.echo(f"warning: {message}", err=True)
    ident = identify(compute_moments(model, instrument))
    bundle = mbb_bands(
        panel, spec, instrument,
        horizon=horizon, level=level, reps=reps, block_len=block_len, seed=seed,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for j, name in enumerate(bundle.names):
        path = out_dir / f"irf_{_slug(name)}.csv"
        with path.open("w", encoding="utf-8") as fh:
            fh.write("horizon,point,lower,upper\n")
            for h in bundle.horizons:
                fh.write(
                    f"{int(h)},{float(bundle.point[h, j])!r},"
                    f"{float(bundle.lower[h, j])!r},{float(bundle.upper[h, j])!r}\n"
                )
    svg_path = out_dir / "irfs.svg"
    svg_path.write_text(irf_svg(bundle), encoding="utf-8")
    click.echo(
        f"relevance F = {relevance.f_stat:.2f} ({'strong' if relevance.strong else 'weak'}), "
        f"phi = {ident.phi:.4f}"
    )
    click.echo(
        f"bootstrap: {bundle.n_replicates} replicates kept, {bundle.n_dropped} dropped, "
        f"block length {bundle.block_length}"
    )
    if bundle.band_crossings:
        click.echo(f"note: point response outside bands at {bundle.band_crossings} cells")
    click.echo(f"wrote IRF CSVs and {svg_path}")


@main.command("t90")
@click.option("--manifest", required=True, type=click.Path(path_type=Path, exists=True),
              help="Text file listing grid CSVs, one per line.")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@click.option("--raw-out", default=None, type=click.Path(path_type=Path),
              help="Also write the raw exceedance frequency.")
@click.option("--ref-start", default="1961-01", show_default=True)
@click.option("--ref-end", default="1990-12", show_default=True)
@_guard
def t90_cmd(manifest: Path, out: Path, raw_out: Path | None, ref_start: str, ref_end: str) -> None:
    """Build the extreme-temperature instrument from gridded temperatures."""
    window = (MonthStamp.parse(ref_start), MonthStamp.parse(ref_end))
    grids = load_grid_manifest(manifest, reference_window=window)
    if not grids:
        raise ValidationError(f"manifest {manifest} lists no grids")
    result = build_t90(grids)
    write_series_csv(result.t90, out)
    if raw_out is not None:
        write_series_csv(result.frequency, raw_out)
    click.echo(
        f"t90 over {len(result.t90)} months from {len(grids)} grids; "
        f"mean {float(np.mean(result.t90.values)):.3f} pp"
    )
    click.echo(f"wrote {out}")


@main.command("simulate")
@click.option("--dgp", "dgp_path", required=True, type=click.Path(path_type=Path, exists=True),
              help="YAML DGP description.")
@click.option("--length", "-T", "length", default=250, show_default=True)
@click.option("--reps", default=200, show_default=True)
@click.option("--horizon", default=12, show_default=True)
@click.option("--seed", default=None, type=int, help="Override the DGP's seed.")
@click.option("--coverage-reps", default=0, show_default=True,
              help="Bootstrap replicates per draw for band-coverage tracking (0 = off).")
@click.option("--out", required=True, type=click.Path(path_type=Path))
@_guard
def simulate_cmd(
    dgp_path: Path, length: int, reps: int, horizon: int, seed: int | None,
    coverage_reps: int, out: Path
) -> None:
    """Monte Carlo check of the estimation stack on a known process."""
    dgp = load_dgp(dgp_path)
    report = run_mc(
        dgp, length, reps, horizon=horizon, seed=seed, bootstrap_reps=coverage_reps
    )
    Path(out).write_text(report.to_json() + "\n", encoding="utf-8")
    rows = [
        ("replicates", f"{report.reps} ({report.n_failed} failed)"),
        ("phi bias", f"{report.phi_bias:+.4f}"),
        ("phi median rel err", f"{report.phi_median_rel_err:.3%}"),
        ("impact column median rel err", f"{report.b_median_rel_err:.3%}"),
        ("median first-stage F", f"{report.relevance_median_f:.1f}"),
        ("strong-instrument share", f"{report.relevance_strong_share:.1%}"),
    ]
    if report.coverage_by_horizon is not None:
        rates = np.array(report.coverage_by_horizon)
        rows.append(
            ("band coverage range", f"[{rates.min():.3f}, {rates.max():.3f}]")
        )
    width = max(len(r[0]) for r in rows)
    for label, value in rows:
        click.echo(f"{label:<{width}}  {value}")
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
