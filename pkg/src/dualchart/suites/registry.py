"""
Named suite registry. Registration order fixes each suite's seed stream, so
results do not depend on which suites a run selects.
"""
from typing import Dict, List, Sequence, Type

from dualchart.config.manager import ConfigValidationError
from dualchart.suites.base import Suite
from dualchart.suites.brackets import BracketSuite
from dualchart.suites.dynamics import DynamicsSuite
from dualchart.suites.gauge import GaugeSuite
from dualchart.suites.quantum import QuantumSuite

SUITES: Dict[str, Type[Suite]] = {
    cls.name: cls for cls in (BracketSuite, GaugeSuite, DynamicsSuite, QuantumSuite)
}


def list_suites() -> List[Suite]:
    return [cls() for cls in SUITES.values()]


def suite_index(name: str) -> int:
    return list(SUITES).index(name)


def resolve_suites(names: Sequence[str]) -> List[str]:
    """
    Expand "all" and check names, keeping registry order.

    Raises:
        ConfigValidationError: For an unknown suite name.
    """
    if not names:
        raise ConfigValidationError("suites", "no suite selected")
    selected = set()
    for name in names:
        if name == "all":
            selected.update(SUITES)
        elif name in SUITES:
            selected.add(name)
        else:
            raise ConfigValidationError("suites", f"unknown suite '{name}', expected one of {list(SUITES)} or 'all'")
    return [name for name in SUITES if name in selected]


def get_suite(name: str) -> Suite:
    if name not in SUITES:
        raise ConfigValidationError("suites", f"unknown suite '{name}'")
    return SUITES[name]()
