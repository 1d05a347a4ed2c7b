import json
import subprocess
import sys

import pytest

from fgdkit import metrics, models
from fgdkit.cli import main

FIX = None  # set by fixture


@pytest.fixture()
def fix(fixture_dir):
    return {
        "audience": str(fixture_dir / "audience.csv"),
        "census": str(fixture_dir / "census.csv"),
        "indicators": str(fixture_dir / "indicators.csv"),
        "survey": str(fixture_dir / "survey.csv"),
        "crawl": str(fixture_dir / "crawl_fixture"),
    }


def run_ok(argv):
    assert main(argv) == 0


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, fix):
        with pytest.raises(SystemExit) as exc:
            main(["metrics", "--bogus", "x"])
        assert exc.value.code == 2

    def test_missing_file_exit_3(self, tmp_path, fix, capsys):
        code = main(
            [
                "metrics",
                "--audience", str(tmp_path / "nope.csv"),
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(tmp_path),
            ]
        )
        assert code == 3
        assert "error" in capsys.readouterr().err

    def test_missing_month_exit_3_names_month(self, tmp_path, fix, capsys):
        code = main(
            [
                "metrics",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2019-01",
                "--out", str(tmp_path),
            ]
        )
        assert code == 3
        assert "2019-01" in capsys.readouterr().err

    def test_invariant_failure_exit_4(self, tmp_path, fix, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text(
            "country,gender,age_bin,date,total_accounts,dau\n"
            "US,male,20,2015-07-01,10,5\nUS,male,20,2015-07-01,10,5\n"
        )
        code = main(
            [
                "metrics",
                "--audience", str(bad),
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(tmp_path),
            ]
        )
        assert code == 4
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "IntegrityError"

    def test_missing_seed_for_fit_exit_4(self, tmp_path, fix):
        code = main(
            [
                "fit",
                "--model", "network",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(tmp_path),
            ]
        )
        assert code == 4


class TestPipeline:
    def test_ingest_then_metrics_from_panel(self, tmp_path, fix):
        out = tmp_path / "o"
        run_ok(
            [
                "ingest",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(out),
            ]
        )
        panel_payload = json.loads((out / "panel.json").read_text())
        assert panel_payload["kind"] == "panel"
        assert panel_payload["provenance"]["inputs"]["audience"]["sha256"]
        run_ok(["metrics", "--panel", str(out / "panel.json"), "--out", str(out)])
        header = (out / "fgd.csv").read_text().splitlines()[0]
        assert header == "country,fgd,penetration,mean_active_age,A_male,A_female,P_male,P_female"

    def test_fit_matches_direct_library_call(
        self, tmp_path, fix, snapshots, census, indicators
    ):
        out = tmp_path / "o"
        run_ok(
            [
                "fit",
                "--model", "fgd",
                "--estimator", "ols",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--indicators", fix["indicators"],
                "--month", "2015-07",
                "--seed", "7",
                "--out", str(out),
            ]
        )
        payload = json.loads((out / "report_fgd.json").read_text())
        panel = metrics.build_panel(snapshots, census, "2015-07")
        direct = models.fit_fgd_model(panel, indicators, "internet", ("ols",), seed=7)
        cli_terms = payload["fits"]["ols"]["terms"]
        for term_payload, term in zip(cli_terms, direct.primary_fit.terms):
            assert term_payload["estimate"] == term.estimate
        assert payload["fits"]["ols"]["r2"] == direct.primary_fit.r2

    def test_stratified_fit(self, tmp_path, fix):
        out = tmp_path / "o"
        run_ok(
            [
                "fit",
                "--model", "network",
                "--estimator", "ols",
                "--by", "month",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2015-07",
                "--seed", "7",
                "--out", str(out),
            ]
        )
        payload = json.loads((out / "report_network.json").read_text())
        assert [s["stratum"] for s in payload["strata"]] == ["2015-07", "2016-07"]

    def test_validate(self, tmp_path, fix):
        out = tmp_path / "o"
        run_ok(
            [
                "metrics",
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(out),
            ]
        )
        run_ok(
            [
                "validate",
                "--survey", fix["survey"],
                "--metrics-csv", str(out / "fgd.csv"),
                "--measure", "fgd",
                "--seed", "11",
                "--out", str(out),
            ]
        )
        payload = json.loads((out / "validate_fgd.json").read_text())
        assert payload["n"] >= 10
        assert -1.0 <= payload["pearson"]["r"] <= 1.0
        assert payload["spearman"]["ci"][0] <= payload["spearman"]["r"] <= payload["spearman"]["ci"][1]

    def test_crawl(self, tmp_path, fix):
        out = tmp_path / "o"
        run_ok(
            [
                "crawl",
                "--fixtures", fix["crawl"],
                "--countries", "US,GB,SY",
                "--date", "2015-07-01",
                "--age-window", "20,22",
                "--out", str(out),
            ]
        )
        lines = (out / "snapshot.csv").read_text().splitlines()
        assert len(lines) == 13  # header + 2 countries x 2 genders x 3 bins
        manifest = json.loads((out / "crawl_manifest.json").read_text())
        assert manifest["notes"]["unavailable_countries"] == ["SY"]
        assert manifest["notes"]["retries"] == 2

    def test_config_file_supplies_defaults(self, tmp_path, fix):
        out = tmp_path / "o"
        config = tmp_path / "run.json"
        config.write_text(
            json.dumps(
                {
                    "audience": fix["audience"],
                    "census": fix["census"],
                    "month": "2015-07",
                }
            )
        )
        run_ok(["metrics", "--config", str(config), "--out", str(out)])
        assert (out / "fgd.csv").exists()

    def test_flags_override_config(self, tmp_path, fix, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"month": "2019-01"}))
        out = tmp_path / "o"
        code = main(
            [
                "metrics",
                "--config", str(config),
                "--audience", fix["audience"],
                "--census", fix["census"],
                "--month", "2015-07",
                "--out", str(out),
            ]
        )
        assert code == 0

    def test_unknown_config_key_rejected(self, tmp_path, fix):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"bogus_key": 1}))
        code = main(["metrics", "--config", str(config)])
        assert code == 4


class TestEntryPoint:
    def test_module_and_script_runnable(self):
        result = subprocess.run(
            [sys.executable, "-m", "fgdkit.cli", "--version"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "fgdkit" in result.stdout
