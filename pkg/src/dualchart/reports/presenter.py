"""
Report presentation module.

Writes the machine-readable results of a run (per-suite checks and tables,
the run summary) and renders the plain-text digest shown on the console.
Presentation is kept apart from running the suites. Every file is a pure
function of the scenario and its seed: no timestamps, floats written with
repr so values survive a round trip.
"""
import csv
import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List

import typer

from dualchart.config.manager import ScenarioConfig
from dualchart.suites.base import SuiteResult

if TYPE_CHECKING:
    from dualchart.suites.runner import RunSummary

logger = logging.getLogger(__name__)

CHECK_HEADER = ["check", "value", "comparison", "limit", "status", "detail"]


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "item"):
        return _cell(value.item())
    return str(value)


def _write_rows(path: Path, header: List[str], rows: List[List[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_suite_report(result: SuiteResult, workdir: Path) -> None:
    """checks.csv, one CSV per table and notes.txt inside the suite directory."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    with open(workdir / "checks.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CHECK_HEADER)
        for check in result.checks:
            writer.writerow(check.as_row())
    for name, table in result.tables.items():
        _write_rows(workdir / f"{name}.csv", table.header, table.rows)
    lines = list(result.notes)
    if result.error:
        lines.append(f"error: {result.error}")
    if lines:
        (workdir / "notes.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def summary_dict(summary: "RunSummary", config: ScenarioConfig) -> Dict[str, Any]:
    k = config.constants
    return {
        "seed": summary.seed,
        "schema_version": config.schema_version,
        "constants": {"m": k.m, "c": k.c, "chi": k.chi, "hbar": k.hbar, "omega0": k.omega0, "decoupled": k.decoupled},
        "dimensions": {"n": config.dimensions.n, "signature": list(config.metric.signature)},
        "passed": summary.passed,
        "checks": summary.n_checks,
        "failed": summary.n_failed,
        "suites": [
            {
                "name": r.name,
                "passed": r.passed,
                "checks": len(r.checks),
                "failed": [c.name for c in r.failed_checks],
                "error": r.error,
            }
            for r in summary.results
        ],
    }


def render_digest(summary: "RunSummary") -> str:
    """Plain-text digest: one block per suite, failed checks listed with their values."""
    lines = []
    for result in summary.results:
        status = "PASS" if result.passed else "FAIL"
        lines.append(f"{status} {result.name}: {len(result.checks) - len(result.failed_checks)}/{len(result.checks)} checks")
        if result.error:
            lines.append(f"  error: {result.error}")
        for check in result.failed_checks:
            lines.append(f"  {check.name}: {check.value!r} (want {check.comparison} {check.limit!r})")
        for note in result.notes:
            lines.append(f"  note: {note}")
    lines.append("-" * 40)
    verdict = "all checks passed" if summary.passed else f"{summary.n_failed} of {summary.n_checks} checks failed"
    lines.append(f"seed {summary.seed}: {verdict}")
    return "\n".join(lines) + "\n"


def write_summary(summary: "RunSummary", config: ScenarioConfig, output_dir: Path) -> None:
    """summary.json, summary.csv (all checks of all suites) and digest.txt."""
    output_dir = Path(output_dir)
    with open(output_dir / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary_dict(summary, config), f, indent=2, sort_keys=True)
        f.write("\n")
    rows = [[result.name] + check.as_row() for result in summary.results for check in result.checks]
    _write_rows(output_dir / "summary.csv", ["suite"] + CHECK_HEADER, rows)
    (output_dir / "digest.txt").write_text(render_digest(summary), encoding="utf-8")
    logger.debug(f"Wrote run summary to {output_dir}")


class ReportPresenter:
    """
    Handles the console presentation of a finished run.

    Attributes:
        summary (RunSummary): The run being presented.
    """

    def __init__(self, summary: "RunSummary"):
        self.summary = summary

    def print_digest(self) -> None:
        typer.echo(render_digest(self.summary), nl=False)

    def print_failures(self) -> None:
        if self.summary.passed:
            typer.echo(f"[INFO] All {self.summary.n_checks} checks passed. Reports in {self.summary.output_dir}")
            return
        for result in self.summary.results:
            for check in result.failed_checks:
                typer.echo(f"[ERROR] {result.name}: {check.name} = {check.value!r}", err=True)
            if result.error:
                typer.echo(f"[ERROR] {result.name}: {result.error}", err=True)
