import math

import pytest

from dualchart.storage.ledger import RunLedger
from dualchart.suites.base import Check, SuiteResult, check_below
from dualchart.suites.runner import RunSummary


@pytest.fixture
def summary(tmp_path):
    results = [
        SuiteResult("brackets", checks=[check_below("bracket {q,p} max deviation", 1e-12, 1e-8)]),
        SuiteResult("gauge", checks=[Check("plaquette", math.nan, 1e-3, "<", False)]),
    ]
    return RunSummary(seed=11, output_dir=tmp_path / "reports", results=results)


def test_record_and_read_back(tmp_path, summary, small_scenario):
    ledger = RunLedger(tmp_path / "db" / "ledger.db")
    try:
        run_id = ledger.record(summary, small_scenario, tmp_path / "scenario.yaml")
        runs = ledger.list_runs()
        assert [r["id"] for r in runs] == [run_id]
        assert runs[0]["seed"] == 11
        assert runs[0]["passed"] is False
        assert [s["name"] for s in runs[0]["suites"]] == ["brackets", "gauge"]

        run = ledger.get_run(run_id)
        assert run["constants"]["chi"] == 0.7
        assert run["config_path"].endswith("scenario.yaml")
        gauge = run["suites"][1]
        assert gauge["checks"][0]["value"] is None
        assert gauge["checks"][0]["threshold"] == 1e-3
        assert run["suites"][0]["checks"][0]["passed"] is True
        assert ledger.get_run(999) is None
    finally:
        ledger.close()


def test_reopen_keeps_runs(tmp_path, summary, small_scenario):
    path = tmp_path / "ledger.db"
    first = RunLedger(path)
    first.record(summary, small_scenario)
    first.close()

    second = RunLedger(path)
    try:
        second.record(summary, small_scenario)
        runs = second.list_runs()
        assert [r["id"] for r in runs] == [2, 1]
        assert len(second.list_runs(limit=1)) == 1
    finally:
        second.close()
