"""
Root Typer app for the dualchart CLI.

Each submodule registers its own commands: `run` and `suites` live in run.py,
the `ledger` group in ledger.py.
"""

import typer
from dualchart.cli import ledger as ledger_commands
from dualchart.cli import run as run_commands

# Root CLI app
app = typer.Typer(
    name="dualchart",
    help="dualchart-lab CLI: numerical checks of the coordinate and momentum charts of a charged particle.",
    add_completion=False,
    no_args_is_help=True,
)

app.command("run")(run_commands.run)
app.command("suites")(run_commands.suites)

app.add_typer(
    ledger_commands.app,
    name="ledger",
    help="Inspect the SQLite run ledger.",
)
