"""
Run the selected suites, isolate their failures, and hand results to the
report writers and the optional run ledger.
"""
import logging
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from dualchart.config.manager import ScenarioConfig
from dualchart.reports.presenter import write_suite_report, write_summary
from dualchart.suites.base import SuiteResult
from dualchart.suites.registry import get_suite, resolve_suites, suite_index

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


@dataclass
class RunSummary:
    """Outcome of one run: per-suite results in registry order."""
    seed: int
    output_dir: Path
    results: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_FAILED

    @property
    def n_checks(self) -> int:
        return sum(len(r.checks) for r in self.results)

    @property
    def n_failed(self) -> int:
        return sum(len(r.failed_checks) for r in self.results)


def suite_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, suite_index(name)])


def run_one(config: ScenarioConfig, name: str, output_dir: Path) -> SuiteResult:
    """Run a single suite; an exception marks the suite failed instead of propagating."""
    suite = get_suite(name)
    workdir = Path(output_dir) / name
    workdir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Running suite '{name}'")
    try:
        result = suite.run(config, suite_rng(config.seed, name), workdir)
    except Exception as e:
        logger.error(f"Suite '{name}' failed: {e}")
        logger.debug(traceback.format_exc())
        result = SuiteResult(name, error=f"{type(e).__name__}: {e}")
    write_suite_report(result, workdir)
    status = "passed" if result.passed else "FAILED"
    logger.info(f"Suite '{name}' {status}: {len(result.checks) - len(result.failed_checks)}/{len(result.checks)} checks")
    return result


def run_suites(
    config: ScenarioConfig,
    names: Optional[Sequence[str]] = None,
    output_dir: Optional[Path] = None,
    jobs: int = 1,
) -> RunSummary:
    """
    Execute suites and write every report file.

    Args:
        config: Validated scenario.
        names: Suite names or "all"; defaults to the config's selection.
        output_dir: Report directory; defaults to the config's.
        jobs: Suites run concurrently when greater than 1; each writes only
              to its own subdirectory.

    Returns:
        RunSummary in registry order.
    """
    selected = resolve_suites(list(names) if names else config.suites)
    output_dir = Path(output_dir or config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    if jobs > 1 and len(selected) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda name: run_one(config, name, output_dir), selected))
    else:
        results = [run_one(config, name, output_dir) for name in selected]
    summary = RunSummary(seed=config.seed, output_dir=output_dir, results=results)
    write_summary(summary, config, output_dir)
    return summary


def run_suite(config: ScenarioConfig) -> int:
    """Run the scenario's own selection into its output directory; returns the exit status."""
    return run_suites(config).exit_code
