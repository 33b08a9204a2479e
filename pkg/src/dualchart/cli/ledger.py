"""
CLI subcommands that read the run ledger.
"""
from pathlib import Path

import typer

from dualchart.storage.base import StorageError
from dualchart.storage.ledger import RunLedger

app = typer.Typer(
    name="ledger",
    help="Inspect recorded runs.",
    no_args_is_help=True,
)

LEDGER_OPTION = typer.Option(
    Path("reports/ledger.db"),
    "--ledger",
    "-l",
    help="Path to the SQLite run ledger.",
    exists=True,
    file_okay=True,
    dir_okay=False,
)


@app.command("list")
def list_runs(
    ledger: Path = LEDGER_OPTION,
    limit: int = typer.Option(20, "--limit", "-n", min=1, help="Number of runs to show."),
) -> None:
    """
    List recorded runs, most recent first.
    """
    try:
        run_ledger = RunLedger(ledger)
        runs = run_ledger.list_runs(limit)
        run_ledger.close()
    except StorageError as e:
        typer.echo(f"[ERROR] {e}", err=True)
        raise typer.Exit(code=1)
    if not runs:
        typer.echo("[WARNING] No runs recorded.")
        return
    for run in runs:
        status = "PASS" if run["passed"] else "FAIL"
        names = ",".join(s["name"] for s in run["suites"])
        typer.echo(f"{run['id']:>4}  {status}  seed={run['seed']}  suites={names}  {run['created_at']}")


@app.command("show")
def show_run(
    run_id: int = typer.Argument(..., help="Run ID to show."),
    ledger: Path = LEDGER_OPTION,
) -> None:
    """
    Show one run with every recorded check.
    """
    try:
        run_ledger = RunLedger(ledger)
        run = run_ledger.get_run(run_id)
        run_ledger.close()
    except StorageError as e:
        typer.echo(f"[ERROR] {e}", err=True)
        raise typer.Exit(code=1)
    if run is None:
        typer.echo(f"[ERROR] Run {run_id} not found.", err=True)
        raise typer.Exit(code=1)
    typer.echo(f"Run {run['id']}: seed={run['seed']} output={run['output_dir']} constants={run['constants']}")
    for suite in run["suites"]:
        status = "PASS" if suite["passed"] else "FAIL"
        typer.echo(f"{status} {suite['name']}")
        if suite["error"]:
            typer.echo(f"  error: {suite['error']}")
        for check in suite["checks"]:
            mark = " " if check["passed"] else "!"
            typer.echo(f" {mark} {check['name']}: {check['value']!r} {check['comparison']} {check['threshold']!r}")
