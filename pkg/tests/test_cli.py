import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from carriersim.cli import main


def run_cli(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def dir_bytes(directory):
    return {p.name: p.read_bytes() for p in sorted(Path(directory).iterdir())
            if p.is_file()}


SPEC = {"n_capacity": 3, "n_coverage": 2, "n_days": 3,
        "reports_per_cell_hour": 6}


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """One generated scenario with trained models, shared across tests."""
    root = tmp_path_factory.mktemp("pipeline")
    spec_path = root / "spec.json"
    spec_path.write_text(json.dumps(SPEC))
    data = root / "data"
    models = root / "models"
    r = run_cli("--seed", 5, "--runs", 6, "--max-steps", 100,
                "generate", "--spec", spec_path, "--out", data)
    assert r.exit_code == 0, r.output
    r = run_cli("--seed", 5, "train", "--data", data, "--out", models)
    assert r.exit_code == 0, r.output
    return root


class TestGenerate:
    def test_missing_spec_file_fails(self, tmp_path):
        r = run_cli("generate", "--spec", tmp_path / "absent.json",
                    "--out", tmp_path / "o")
        assert r.exit_code != 0

    def test_invalid_spec_fails_nonzero(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"n_coverage": 0}))
        r = run_cli("generate", "--spec", spec, "--out", tmp_path / "o")
        assert r.exit_code == 1
        assert "error" in r.output

    def test_unknown_spec_field_fails(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"bogus": 1}))
        r = run_cli("generate", "--spec", spec, "--out", tmp_path / "o")
        assert r.exit_code == 1

    def test_same_seed_identical_output_dirs(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"n_capacity": 2, "n_coverage": 1,
                                    "n_days": 1, "reports_per_cell_hour": 4}))
        for name in ("a", "b"):
            r = run_cli("--seed", 11, "--runs", 3, "--max-steps", 60,
                        "generate", "--spec", spec, "--out", tmp_path / name)
            assert r.exit_code == 0, r.output
        assert dir_bytes(tmp_path / "a") == dir_bytes(tmp_path / "b")


class TestTrain:
    def test_models_written(self, pipeline):
        models = pipeline / "models"
        assert (models / "energy_model.json").exists()
        assert (models / "rate_model.json").exists()
        metrics = json.loads((models / "train_metrics.json").read_text())
        assert metrics["energy_test_mae_wh"] is not None

    def test_corrupt_kpi_file_fails(self, pipeline, tmp_path):
        broken = tmp_path / "broken"
        broken.mkdir()
        for p in (pipeline / "data").iterdir():
            (broken / p.name).write_bytes(p.read_bytes())
        kpi = broken / "kpi.csv"
        lines = kpi.read_text().splitlines()
        lines[1] = lines[1].replace(",", ";bad;", 1)
        kpi.write_text("\n".join(lines))
        r = run_cli("train", "--data", broken, "--out", tmp_path / "m")
        assert r.exit_code == 1

    def test_seeded_training_identical_checkpoints(self, pipeline, tmp_path):
        out1, out2 = tmp_path / "m1", tmp_path / "m2"
        for out in (out1, out2):
            r = run_cli("--seed", 5, "train", "--data", pipeline / "data",
                        "--out", out)
            assert r.exit_code == 0, r.output
        assert dir_bytes(out1) == dir_bytes(out2)


class TestSimulate:
    def test_default_run_succeeds(self, pipeline, tmp_path):
        r = run_cli("--seed", 5, "--runs", 4, "--max-steps", 80, "simulate",
                    "--data", pipeline / "data",
                    "--models", pipeline / "models", "--out", tmp_path / "o")
        assert r.exit_code == 0, r.output
        for name in ("abm_outputs.csv", "abm_runs.csv", "predictions.csv"):
            assert (tmp_path / "o" / name).exists()

    def test_threshold_override_changes_eligibility(self, pipeline, tmp_path):
        from carriersim.abm import read_mean_report

        base = tmp_path / "base"
        r = run_cli("--seed", 5, "--runs", 4, "--max-steps", 80, "simulate",
                    "--data", pipeline / "data",
                    "--models", pipeline / "models", "--out", base)
        assert r.exit_code == 0, r.output
        overrides = tmp_path / "ov.json"
        overrides.write_text(json.dumps({"thresholds": {
            cap: {"entry_ue": 0.0, "entry_dl_prb": 0.0, "entry_ul_prb": 0.0}
            for cap in ("cap001", "cap002", "cap003")}}))
        frozen = tmp_path / "frozen"
        r = run_cli("--seed", 5, "--runs", 4, "--max-steps", 80, "simulate",
                    "--data", pipeline / "data",
                    "--models", pipeline / "models", "--out", frozen,
                    "--overrides", overrides)
        assert r.exit_code == 0, r.output
        base_cs = read_mean_report(base / "abm_outputs.csv")["cs_minutes"]
        frozen_cs = read_mean_report(frozen / "abm_outputs.csv")["cs_minutes"]
        assert sum(base_cs.values()) > 0.0
        assert sum(frozen_cs.values()) == 0.0

    def test_unknown_cell_override_fails(self, pipeline, tmp_path):
        overrides = tmp_path / "ov.json"
        overrides.write_text(json.dumps({"thresholds": {
            "nope": {"entry_ue": 1.0}}}))
        r = run_cli("--seed", 5, "simulate", "--data", pipeline / "data",
                    "--models", pipeline / "models", "--out", tmp_path / "o",
                    "--overrides", overrides)
        assert r.exit_code == 1

    def test_same_seed_byte_identical_outputs(self, pipeline, tmp_path):
        outs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            r = run_cli("--seed", 9, "--runs", 3, "--max-steps", 60,
                        "simulate", "--data", pipeline / "data",
                        "--models", pipeline / "models", "--out", out)
            assert r.exit_code == 0, r.output
            outs.append(dir_bytes(out))
        assert outs[0] == outs[1]


class TestBenchmarkCommand:
    def test_outputs_written_and_deterministic(self, pipeline, tmp_path):
        outs = []
        for name in ("b1", "b2"):
            out = tmp_path / name
            r = run_cli("--seed", 5, "benchmark", "--data", pipeline / "data",
                        "--models", pipeline / "models", "--out", out)
            assert r.exit_code == 0, r.output
            outs.append(dir_bytes(out))
        assert outs[0] == outs[1]
        assert "benchmark_outputs.csv" in outs[0]


@pytest.fixture(scope="module")
def estimates(pipeline, tmp_path_factory):
    root = tmp_path_factory.mktemp("estimates")
    abm, bench = root / "abm", root / "bench"
    r = run_cli("--seed", 5, "--runs", 4, "--max-steps", 80, "simulate",
                "--data", pipeline / "data",
                "--models", pipeline / "models", "--out", abm)
    assert r.exit_code == 0, r.output
    r = run_cli("--seed", 5, "benchmark", "--data", pipeline / "data",
                "--models", pipeline / "models", "--out", bench)
    assert r.exit_code == 0, r.output
    return abm, bench


class TestCompareCommand:
    def test_report_written(self, pipeline, estimates, tmp_path):
        abm, bench = estimates
        r = run_cli("compare", "--abm", abm, "--benchmark", bench,
                    "--truth", pipeline / "data" / "truth.csv",
                    "--out", tmp_path / "report")
        assert r.exit_code == 0, r.output
        report = json.loads((tmp_path / "report" / "report.json").read_text())
        assert set(report) >= {"cs_minutes", "dl_load", "energy_wh",
                               "rate_mbps"}

    def test_identical_estimators_zero_gain(self, pipeline, estimates,
                                            tmp_path):
        abm, _ = estimates
        fake_bench = tmp_path / "fake_bench"
        fake_bench.mkdir()
        for p in Path(abm).iterdir():
            name = ("benchmark_outputs.csv" if p.name == "abm_outputs.csv"
                    else p.name)
            (fake_bench / name).write_bytes(p.read_bytes())
        r = run_cli("compare", "--abm", abm, "--benchmark", fake_bench,
                    "--truth", pipeline / "data" / "truth.csv",
                    "--out", tmp_path / "report")
        assert r.exit_code == 0, r.output
        report = json.loads((tmp_path / "report" / "report.json").read_text())
        for kpi, ev in report.items():
            if ev["accuracy_gain_mae"] is not None:
                assert ev["accuracy_gain_mae"] == pytest.approx(0.0)

    def test_mismatched_cells_fail(self, pipeline, estimates, tmp_path):
        abm, bench = estimates
        truth = tmp_path / "truth.csv"
        truth.write_text("kpi,entity,hour,value\ncs_minutes,zz,1,0.0\n")
        r = run_cli("compare", "--abm", abm, "--benchmark", bench,
                    "--truth", truth, "--out", tmp_path / "report")
        assert r.exit_code == 1


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"n_capacity": 2, "n_coverage": 1,
                                    "n_days": 1, "reports_per_cell_hour": 4}))
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 11, "runs": 3,
                                      "max_steps": 60}))
        r = run_cli("--config", config, "generate", "--spec", spec,
                    "--out", tmp_path / "via_config")
        assert r.exit_code == 0, r.output
        r = run_cli("--seed", 11, "--runs", 3, "--max-steps", 60, "generate",
                    "--spec", spec, "--out", tmp_path / "via_flags")
        assert r.exit_code == 0, r.output
        assert dir_bytes(tmp_path / "via_config") == \
            dir_bytes(tmp_path / "via_flags")

    def test_env_var_points_at_config(self, tmp_path, monkeypatch):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({"n_capacity": 2, "n_coverage": 1,
                                    "n_days": 1, "reports_per_cell_hour": 4}))
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 11, "runs": 3,
                                      "max_steps": 60}))
        monkeypatch.setenv("CARRIERSIM_CONFIG", str(config))
        r = run_cli("generate", "--spec", spec, "--out", tmp_path / "env_out")
        assert r.exit_code == 0, r.output
