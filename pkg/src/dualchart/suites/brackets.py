"""
Bracket algebra suite: the six fundamental bracket families on random states,
finite-difference convergence, and ω = −dθ.
"""
import logging
from pathlib import Path

import numpy as np

from dualchart.classical.brackets import (
    BRACKET_FAMILIES,
    bracket_convergence,
    build_symplectic,
    canonical_algebra_report,
    two_form_from_one_form,
    write_algebra_report,
)
from dualchart.classical.phase_space import random_states
from dualchart.config.manager import ScenarioConfig
from dualchart.suites.base import Suite, SuiteResult, check_at_least, check_below

logger = logging.getLogger(__name__)

BRACKET_TOLERANCE = 1e-8
MIN_ORDER = 1.8


class BracketSuite(Suite):
    name = "brackets"
    description = "Canonical bracket families {q,p}, {q,pi}, {B,piB}, {Q,Q}, {Q,pi}, {Q,p} and their convergence"

    def run(self, config: ScenarioConfig, rng: np.random.Generator, workdir: Path) -> SuiteResult:
        k = config.physical
        metric = config.metric
        settings = config.brackets
        result = SuiteResult(self.name)

        states = random_states(rng, settings.n_states, metric.dim)
        worst = {family: 0.0 for family, *_ in BRACKET_FAMILIES}
        table = result.table("families", ["bracket_family", "mu", "nu", "expected", "max_abs_error"])
        per_entry = {}
        for index, state in enumerate(states):
            rows = canonical_algebra_report(state, k, metric, h=settings.h)
            if index == 0:
                write_algebra_report(rows, workdir / "algebra_state0.csv")
            for row in rows:
                worst[row.family] = max(worst[row.family], row.abs_error)
                key = (row.family, row.mu, row.nu)
                per_entry[key] = (row.expected, max(per_entry.get(key, (0.0, 0.0))[1], row.abs_error))
        for (family, mu, nu), (expected, error) in per_entry.items():
            table.add(family, mu, nu, expected, error)
        for family, error in worst.items():
            result.checks.append(check_below(f"bracket {{{family}}} max deviation", error, BRACKET_TOLERANCE,
                                             f"{len(states)} states, h={settings.h}"))

        points, order = bracket_convergence(states[0], k, settings.h_sweep, metric)
        sweep = result.table("convergence", ["h", "deviation"])
        for point in points:
            sweep.add(point.h, point.deviation)
        result.checks.append(check_at_least("bracket finite-difference order", order, MIN_ORDER,
                                            "F = sin(2Q0), G = exp(p0)"))

        omega = build_symplectic(2 * metric.dim)
        form_error = 0.0
        for state in states[:10]:
            v = rng.standard_normal(4 * metric.dim)
            w = rng.standard_normal(4 * metric.dim)
            form_error = max(form_error, abs(two_form_from_one_form(state, v, w) - omega.form(v, w)))
        result.checks.append(check_below("omega = -d(theta)", form_error, BRACKET_TOLERANCE))
        logger.info(f"Bracket suite: worst deviation {max(worst.values()):.3e}, order {order:.3f}")
        return result
