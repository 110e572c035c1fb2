import csv
import json
import shutil

import numpy as np
import pytest
from click.testing import CliRunner

from cci_toolkit.cli import main
from cci_toolkit.ingest import load_series_csv, write_series_csv
from cci_toolkit.series import MonthStamp, TimeSeries


@pytest.fixture
def runner():
    return CliRunner()


def test_version_and_help(runner):
    assert runner.invoke(main, ["--version"]).exit_code == 0
    assert runner.invoke(main, ["--help"]).exit_code == 0
    for cmd in ("build-index", "compare", "estimate", "t90", "simulate"):
        assert runner.invoke(main, [cmd, "--help"]).exit_code == 0


class TestBuildIndex:
    def test_fixture_pipeline(self, runner, fixtures_dir, tmp_path):
        out = tmp_path / "index.csv"
        result = runner.invoke(
            main,
            ["build-index", "--group-dir", str(fixtures_dir / "groups"), "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        series = load_series_csv(out)
        assert float(np.max(series.values)) == 100.0
        sidecar = json.loads(out.with_suffix(".json").read_text())
        assert abs(sum(sidecar["category_shares"].values()) - 1.0) < 1e-9
        assert len(sidecar["term_totals"]) == 107

    def test_missing_group_file_names_term(self, runner, fixtures_dir, tmp_path):
        groups = tmp_path / "groups"
        shutil.copytree(fixtures_dir / "groups", groups)
        removed = sorted(groups.glob("*.csv"))[4]
        removed.unlink()
        result = runner.invoke(
            main,
            ["build-index", "--group-dir", str(groups), "--out", str(tmp_path / "i.csv")],
        )
        assert result.exit_code == 3
        assert "no group data for term" in result.output

    def test_adjust_flag_deseasonalizes(self, runner, fixtures_dir, tmp_path):
        from test_series import month_dummy_r2

        out = tmp_path / "index.csv"
        result = runner.invoke(
            main,
            [
                "build-index", "--group-dir", str(fixtures_dir / "groups"),
                "--out", str(out), "--adjust",
            ],
        )
        assert result.exit_code == 0, result.output
        assert month_dummy_r2(load_series_csv(out)) < 1e-12

    def test_empty_group_dir(self, runner, tmp_path):
        (tmp_path / "empty").mkdir()
        result = runner.invoke(
            main,
            ["build-index", "--group-dir", str(tmp_path / "empty"),
             "--out", str(tmp_path / "i.csv")],
        )
        assert result.exit_code == 2


class TestCompare:
    def test_lead_lag_flagged(self, runner, fixtures_dir, tmp_path):
        result = runner.invoke(
            main,
            ["compare", "--panel", str(fixtures_dir / "panel_indices.csv"),
             "--out-dir", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output
        assert "radius < 1: true" in result.output
        rows = list(csv.DictReader((tmp_path / "granger.csv").open()))
        lead = next(
            r for r in rows
            if r["dependent"] == "news_idx" and r["excluded"] == "search_idx"
        )
        assert float(lead["prob"]) < 0.05
        assert int(lead["df"]) == 13
        joint = [r for r in rows if r["excluded"] == "All"]
        assert all(int(r["df"]) == 26 for r in joint)
        payload = json.loads((tmp_path / "pca.json").read_text())
        assert len(payload["explained"]) == 3

    def test_pca_share_printed_for_correlated_pair(self, runner, tmp_path):
        from test_var import exact_correlation_pair

        u, y = exact_correlation_pair(0.71, t_obs=240)
        path = tmp_path / "pair.csv"
        with path.open("w") as fh:
            fh.write("date,a,b\n")
            month = MonthStamp(2004, 1)
            for i in range(240):
                fh.write(f"{month.shift(i)},{float(u[i])!r},{float(y[i])!r}\n")
        result = runner.invoke(
            main,
            ["compare", "--panel", str(path), "--lags", "2", "--out-dir", str(tmp_path / "o")],
        )
        assert result.exit_code == 0, result.output
        assert "85.5" in result.output
        payload = json.loads((tmp_path / "o" / "pca.json").read_text())
        assert payload["explained"][0] == pytest.approx(0.855, abs=1e-9)


class TestEstimate:
    def test_outputs_and_determinism(self, runner, fixtures_dir, tmp_path):
        args = [
            "estimate",
            "--panel", str(fixtures_dir / "panel_macro.csv"),
            "--instrument", str(fixtures_dir / "instrument.csv"),
            "--reps", "120", "--seed", "11",
        ]
        r1 = runner.invoke(main, args + ["--out-dir", str(tmp_path / "a")])
        assert r1.exit_code == 0, r1.output
        r2 = runner.invoke(main, args + ["--out-dir", str(tmp_path / "b")])
        assert r2.exit_code == 0
        files = sorted(p.name for p in (tmp_path / "a").iterdir())
        assert "irfs.svg" in files
        assert sum(f.startswith("irf_") for f in files) == 5
        for name in files:
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes(), name
        header = (tmp_path / "a" / "irf_cci.csv").read_text().splitlines()[0]
        assert header == "horizon,point,lower,upper"

    def test_weak_instrument_exits_unless_forced(self, runner, fixtures_dir, tmp_path):
        rng = np.random.default_rng(0)
        noise = TimeSeries(MonthStamp(2004, 1), rng.standard_normal(240), "noise")
        noise_path = tmp_path / "noise.csv"
        write_series_csv(noise, noise_path)
        args = [
            "estimate",
            "--panel", str(fixtures_dir / "panel_macro.csv"),
            "--instrument", str(noise_path),
            "--reps", "120", "--seed", "1",
        ]
        result = runner.invoke(main, args + ["--out-dir", str(tmp_path / "o")])
        assert result.exit_code == 4
        assert "weak" in result.output
        forced = runner.invoke(
            main, args + ["--out-dir", str(tmp_path / "o"), "--force"]
        )
        assert forced.exit_code == 0, forced.output
        assert "warning" in forced.output


class TestT90:
    def test_two_grid_hand_average(self, runner, tmp_path):
        # spreadsheet-style oracle: tiny grids whose exceedance average is
        # recomputed here with plain numpy
        rng = np.random.default_rng(3)
        start = MonthStamp(1961, 1)
        manifest_lines = []
        expected_exceedance = []
        for gid in ("g1", "g2"):
            temps = rng.normal(12.0, 3.0, 420)
            path = tmp_path / f"{gid}.csv"
            with path.open("w") as fh:
                fh.write("date,temp_c\n")
                for i, v in enumerate(temps):
                    fh.write(f"{start.shift(i)},{float(v)!r}\n")
            manifest_lines.append(f"{gid}.csv")
            months = np.array([start.shift(i).month for i in range(420)])
            anom = np.empty(420)
            for m in range(1, 13):
                ref = temps[:360][months[:360] == m]
                anom[months == m] = (temps[months == m] - ref.mean()) / ref.std(ddof=1)
            thr = np.quantile(anom[:360], 0.9)
            expected_exceedance.append(100.0 * (anom > thr))
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("\n".join(manifest_lines) + "\n")
        out = tmp_path / "t90.csv"
        result = runner.invoke(
            main, ["t90", "--manifest", str(manifest), "--out", str(out)]
        )
        assert result.exit_code == 0, result.output
        series = load_series_csv(out)
        expected = np.mean(expected_exceedance, axis=0) - 10.0
        np.testing.assert_allclose(series.values, expected, atol=1e-10)

    def test_empty_manifest(self, runner, tmp_path):
        manifest = tmp_path / "manifest.txt"
        manifest.write_text("# nothing here\n")
        result = runner.invoke(
            main, ["t90", "--manifest", str(manifest), "--out", str(tmp_path / "o.csv")]
        )
        assert result.exit_code == 2

    def test_fixture_manifest_runs(self, runner, fixtures_dir, tmp_path):
        out = tmp_path / "t90.csv"
        raw = tmp_path / "freq.csv"
        result = runner.invoke(
            main,
            ["t90", "--manifest", str(fixtures_dir / "grid_manifest.txt"),
             "--out", str(out), "--raw-out", str(raw)],
        )
        assert result.exit_code == 0, result.output
        t90 = load_series_csv(out)
        freq = load_series_csv(raw)
        np.testing.assert_allclose(t90.values, freq.values - 10.0, atol=1e-12)


class TestSimulate:
    def test_runs_and_reports(self, runner, fixtures_dir, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["simulate", "--dgp", str(fixtures_dir / "dgp_small.yaml"),
             "--reps", "100", "-T", "200", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert payload["reps"] == 100
        assert payload["b_median_rel_err"] < 0.5
        assert "strong-instrument share" in result.output

    def test_coverage_tracking_flag(self, runner, fixtures_dir, tmp_path):
        out = tmp_path / "report.json"
        result = runner.invoke(
            main,
            ["simulate", "--dgp", str(fixtures_dir / "dgp_small.yaml"),
             "--reps", "100", "-T", "200", "--horizon", "4",
             "--coverage-reps", "100", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(out.read_text())
        assert len(payload["coverage_by_horizon"]) == 5
        assert "band coverage range" in result.output

    def test_bad_dgp_spec(self, runner, tmp_path):
        bad = tmp_path / "dgp.yaml"
        bad.write_text("n: 2\np: 1\nbogus: 1\n")
        result = runner.invoke(
            main,
            ["simulate", "--dgp", str(bad), "--out", str(tmp_path / "r.json")],
        )
        assert result.exit_code == 2
