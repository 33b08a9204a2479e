"""
CLI commands that execute experiment suites.
"""
import dataclasses
import logging
from pathlib import Path
from typing import List, Optional

import typer

from dualchart.config.manager import ConfigError, ConfigManager, default_config, resolve_output_dir
from dualchart.reports.presenter import ReportPresenter
from dualchart.storage.base import StorageError
from dualchart.storage.ledger import RunLedger
from dualchart.suites.registry import list_suites
from dualchart.suites.runner import EXIT_CONFIG, EXIT_FAILED, run_suites

LOG_FORMAT = "[%(levelname)s] %(message)s"


def configure_logging(debug: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if debug else logging.INFO, format=LOG_FORMAT, force=True)


def _print_suites() -> None:
    for suite in list_suites():
        typer.echo(f"{suite.name:<10} {suite.description}")


def run(
    config_path: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="Path to a scenario YAML file. If omitted, the built-in scenario is used.",
        file_okay=True,
        dir_okay=False,
    ),
    suite: Optional[List[str]] = typer.Option(
        None,
        "--suite",
        "-s",
        help="Suite to run (repeatable), or 'all'. Overrides the config selection.",
    ),
    out: Optional[Path] = typer.Option(
        None,
        "--out",
        "-o",
        help="Report directory. Overrides DUALCHART_OUT and the config value.",
    ),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Override the scenario seed."),
    list_only: bool = typer.Option(False, "--list-suites", help="List the available suites and exit."),
    ledger: Optional[Path] = typer.Option(None, "--ledger", help="Record the run in this SQLite ledger."),
    jobs: int = typer.Option(1, "--jobs", "-j", min=1, help="Run up to this many suites concurrently."),
    debug: bool = typer.Option(False, "--debug", "-d", help="Show debug logging."),
) -> None:
    """
    Run experiment suites and write their reports.

    Exit status is 0 when every check passes, 1 when any check or suite fails
    and 2 for an invalid configuration.
    """
    configure_logging(debug)
    if list_only:
        _print_suites()
        return

    try:
        if config_path is not None:
            config = ConfigManager(config_path).get_scenario()
        else:
            config = default_config()
        if seed is not None:
            config = dataclasses.replace(config, seed=seed)
        output_dir = resolve_output_dir(config, out)
        typer.echo(f"[INFO] Running with seed {config.seed}, reports in {output_dir}")
        summary = run_suites(config, suite, output_dir, jobs=jobs)
    except ConfigError as e:
        typer.echo(f"[ERROR] {e}", err=True)
        raise typer.Exit(code=EXIT_CONFIG)

    presenter = ReportPresenter(summary)
    presenter.print_digest()
    presenter.print_failures()

    ledger_path = ledger or config.ledger
    if ledger_path is not None:
        try:
            run_ledger = RunLedger(ledger_path)
            run_id = run_ledger.record(summary, config, config_path)
            run_ledger.close()
            typer.echo(f"[INFO] Recorded run {run_id} in {ledger_path}")
        except StorageError as e:
            typer.echo(f"[ERROR] {e}", err=True)
            raise typer.Exit(code=EXIT_FAILED)

    raise typer.Exit(code=summary.exit_code)


def suites() -> None:
    """
    List the available suites in registry order.
    """
    _print_suites()
