"""
SQLite run ledger: one row per run, with its suites and checks.

The ledger is opt-in (`--ledger PATH` or `ledger:` in the scenario) and
never feeds back into the report files.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from alembic import command
from alembic.config import Config
from sqlalchemy import select
from sqlalchemy.exc import SQLAlchemyError

from dualchart.config.manager import ScenarioConfig
from dualchart.storage.base import StorageError
from dualchart.storage.database import database_url, make_engine, make_session_factory
from dualchart.storage.models import CheckRecord, Run, SuiteRecord

logger = logging.getLogger(__name__)


class RunLedger:
    """
    Records run outcomes in a SQLite database kept current with Alembic.
    """

    def __init__(self, db_path: Path):
        """
        Open (creating if needed) the ledger and upgrade its schema.

        Args:
            db_path: path to the SQLite .db file.
        """
        self.db_path = Path(db_path)
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        self._run_migrations()
        self._engine = make_engine(self.db_path)
        self._sessions = make_session_factory(self._engine)

    def _run_migrations(self) -> None:
        """Run database migrations using Alembic."""
        try:
            migrations_dir = Path(__file__).parent / "migrations"
            if not migrations_dir.exists():
                raise StorageError("Migrations directory not found")

            alembic_cfg = Config()
            alembic_cfg.set_main_option("script_location", str(migrations_dir))
            alembic_cfg.set_main_option("sqlalchemy.url", database_url(self.db_path))

            command.upgrade(alembic_cfg, "head")
        except StorageError:
            raise
        except Exception as e:
            raise StorageError(f"Failed to run database migrations: {e}")

    def close(self) -> None:
        self._engine.dispose()

    def record(self, summary: Any, config: ScenarioConfig, config_path: Optional[Path] = None) -> int:
        """
        Store a finished run.

        Args:
            summary: RunSummary from the runner.
            config: The scenario the run used.
            config_path: Scenario file, if the run was loaded from one.

        Returns:
            ID of the new run row.

        Raises:
            StorageError: If the write fails.
        """
        k = config.constants
        constants = json.dumps({"m": k.m, "c": k.c, "chi": k.chi, "hbar": k.hbar,
                                "omega0": k.omega0, "decoupled": k.decoupled}, sort_keys=True)
        run = Run(
            seed=summary.seed,
            config_path=str(config_path) if config_path else None,
            output_dir=str(summary.output_dir),
            constants=constants,
            passed=summary.passed,
        )
        for result in summary.results:
            suite = SuiteRecord(name=result.name, passed=result.passed, error=result.error)
            for check in result.checks:
                value = None if math.isnan(check.value) else check.value
                suite.checks.append(CheckRecord(name=check.name, value=value, comparison=check.comparison,
                                                threshold=check.limit, passed=check.passed))
            run.suites.append(suite)
        try:
            with self._sessions() as session:
                session.add(run)
                session.commit()
                run_id = run.id
        except SQLAlchemyError as e:
            raise StorageError(f"Failed to record run: {e}")
        logger.info(f"Recorded run {run_id} in ledger {self.db_path}")
        return run_id

    def list_runs(self, limit: int = 20) -> List[Dict[str, Any]]:
        """Most recent runs first."""
        try:
            with self._sessions() as session:
                rows = session.scalars(select(Run).order_by(Run.id.desc()).limit(limit)).all()
                return [self._run_to_dict(run, with_checks=False) for run in rows]
        except SQLAlchemyError as e:
            raise StorageError(f"Failed to list runs: {e}")

    def get_run(self, run_id: int) -> Optional[Dict[str, Any]]:
        """A run with its suites and checks, or None if not found."""
        try:
            with self._sessions() as session:
                run = session.get(Run, run_id)
                return self._run_to_dict(run, with_checks=True) if run else None
        except SQLAlchemyError as e:
            raise StorageError(f"Failed to get run {run_id}: {e}")

    @staticmethod
    def _run_to_dict(run: Run, with_checks: bool) -> Dict[str, Any]:
        data = {
            "id": run.id,
            "seed": run.seed,
            "config_path": run.config_path,
            "output_dir": run.output_dir,
            "constants": json.loads(run.constants),
            "passed": run.passed,
            "created_at": run.created_at.isoformat() if run.created_at else None,
            "suites": [],
        }
        for suite in run.suites:
            entry = {"name": suite.name, "passed": suite.passed, "error": suite.error}
            if with_checks:
                entry["checks"] = [
                    {"name": c.name, "value": c.value, "comparison": c.comparison,
                     "threshold": c.threshold, "passed": c.passed}
                    for c in suite.checks
                ]
            data["suites"].append(entry)
        return data
