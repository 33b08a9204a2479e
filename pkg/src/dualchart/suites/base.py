"""
Define the experiment suite interface (Suite) and its result records.

A suite runs one family of numerical checks against a ScenarioConfig and
returns pass/fail checks plus named tables for the report writers.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from dualchart.config.manager import ScenarioConfig


@dataclass(frozen=True)
class Check:
    """One assertion: `value` compared with `limit` using `comparison`."""
    name: str
    value: float
    limit: float
    comparison: str
    passed: bool
    detail: str = ""

    def as_row(self) -> List[str]:
        return [self.name, repr(float(self.value)), self.comparison, repr(float(self.limit)),
                "pass" if self.passed else "fail", self.detail]


def check_below(name: str, value: float, limit: float, detail: str = "") -> Check:
    value = float(value)
    return Check(name, value, float(limit), "<", bool(np.isfinite(value) and value < limit), detail)


def check_at_least(name: str, value: float, limit: float, detail: str = "") -> Check:
    value = float(value)
    return Check(name, value, float(limit), ">=", bool(not np.isnan(value) and value >= limit), detail)


@dataclass
class Table:
    header: List[str]
    rows: List[List[Any]] = field(default_factory=list)

    def add(self, *values: Any) -> None:
        if len(values) != len(self.header):
            raise ValueError(f"Row of {len(values)} values for {len(self.header)} columns")
        self.rows.append(list(values))


@dataclass
class SuiteResult:
    """Checks and tables produced by one suite; `error` is set when the suite raised."""
    name: str
    checks: List[Check] = field(default_factory=list)
    tables: Dict[str, Table] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def table(self, name: str, header: Sequence[str]) -> Table:
        self.tables[name] = Table(list(header))
        return self.tables[name]


class Suite(ABC):
    """Abstract base class for all experiment suites."""

    name: str = ""
    description: str = ""

    @abstractmethod
    def run(self, config: ScenarioConfig, rng: np.random.Generator, workdir: Path) -> SuiteResult:
        """
        Execute the suite.

        Args:
            config: Validated scenario.
            rng: Generator seeded from the scenario seed and the suite.
            workdir: The suite's own output directory for data artifacts.

        Returns:
            SuiteResult with checks and tables.
        """
        pass
