import json

import yaml
from typer.testing import CliRunner

from dualchart.cli import app

runner = CliRunner()


def test_suites_lists_registry_order():
    result = runner.invoke(app, ["suites"])
    assert result.exit_code == 0
    names = [line.split()[0] for line in result.output.splitlines() if line.strip()]
    assert names == ["brackets", "gauge", "dynamics", "quantum"]


def test_list_suites_flag():
    result = runner.invoke(app, ["run", "--list-suites"])
    assert result.exit_code == 0
    assert "quantum" in result.output


def test_invalid_config_exits_2(tmp_path, small_scenario_dict):
    del small_scenario_dict["constants"]["m"]
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(small_scenario_dict), encoding="utf-8")
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 2
    assert "constants.m" in result.output


def test_unknown_suite_exits_2(scenario_file, tmp_path):
    result = runner.invoke(app, ["run", "-c", str(scenario_file), "-s", "tachyons", "-o", str(tmp_path / "out")])
    assert result.exit_code == 2
    assert "tachyons" in result.output


def test_run_writes_reports(scenario_file, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(app, ["run", "-c", str(scenario_file), "-o", str(out), "--seed", "5"])
    assert result.exit_code == 0, result.output
    assert "PASS brackets" in result.output
    summary = json.loads((out / "summary.json").read_text())
    assert summary["seed"] == 5
    assert summary["passed"] is True


def test_run_with_ledger_then_inspect(scenario_file, tmp_path):
    db = tmp_path / "ledger.db"
    result = runner.invoke(app, ["run", "-c", str(scenario_file), "-o", str(tmp_path / "out"), "--ledger", str(db)])
    assert result.exit_code == 0, result.output
    assert "Recorded run 1" in result.output

    listed = runner.invoke(app, ["ledger", "list", "--ledger", str(db)])
    assert listed.exit_code == 0
    assert "PASS  seed=7  suites=brackets" in listed.output

    shown = runner.invoke(app, ["ledger", "show", "1", "--ledger", str(db)])
    assert shown.exit_code == 0
    assert "bracket {q,p} max deviation" in shown.output

    missing = runner.invoke(app, ["ledger", "show", "42", "--ledger", str(db)])
    assert missing.exit_code == 1


def test_unknown_particle_model_exits_2(tmp_path, small_scenario_dict):
    small_scenario_dict["dynamics"]["particle_model"] = "tachyonic"
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(small_scenario_dict), encoding="utf-8")
    result = runner.invoke(app, ["run", "--config", str(path)])
    assert result.exit_code == 2
    assert "dynamics.particle_model" in result.output
