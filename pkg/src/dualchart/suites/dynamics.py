"""
Dual-chart dynamics suite: the (q, π) and (𝒬, p) integrations from the same
initial states must agree after mapping through the pullbacks.
"""
import logging
from pathlib import Path

import numpy as np

from dualchart.classical.dynamics import (
    SystemHamiltonian,
    chart_disagreement,
    energy_error_order,
    evolve_ensemble,
    evolve_Q_p,
    reference_solution,
    relative_energy_drift,
    symplecticity_check,
    time_reversal_error,
    write_trajectory,
)
from dualchart.classical.phase_space import kinetic_chart, random_states
from dualchart.config.manager import ScenarioConfig
from dualchart.suites.base import Suite, SuiteResult, check_at_least, check_below

logger = logging.getLogger(__name__)

CHART_TOLERANCE = 1e-6
DRIFT_TOLERANCE = 1e-5
REVERSAL_TOLERANCE = 1e-10
MIN_ORDER = 1.8


class DynamicsSuite(Suite):
    name = "dynamics"
    description = "Strang-split evolution in the (q, pi) and (Q, p) charts: agreement, energy, reversibility, symplecticity"

    def run(self, config: ScenarioConfig, rng: np.random.Generator, workdir: Path) -> SuiteResult:
        k = config.physical
        settings = config.dynamics
        H = SystemHamiltonian(k, config.metric, config.constants.omega0,
                              settings.particle_model, settings.field_coupling)
        dt, n = settings.dt, settings.steps
        result = SuiteResult(self.name)
        result.notes.append(
            f"H_P {settings.particle_model}, field coupling {settings.field_coupling}: "
            "stand-in Hamiltonian forms"
        )

        states = random_states(rng, settings.n_states, config.metric.dim, scale=0.5)
        q_pi_runs = evolve_ensemble(H, states, dt, n, chart="q_pi")
        table = result.table("states", ["state", "chart_disagreement", "energy_drift", "reversal_error", "chart_energy_mismatch"])
        worst_chart = worst_drift = worst_reversal = worst_mismatch = 0.0
        for index, (state, q_pi) in enumerate(zip(states, q_pi_runs)):
            Q_p = evolve_Q_p(H, state, dt, n)
            disagreement = chart_disagreement(q_pi, Q_p, k)
            drift = relative_energy_drift(q_pi, H)
            reversal = time_reversal_error(H, state, dt, n, chart="Q_p")
            chart = kinetic_chart(state, k)
            mismatch = abs(H.energy(state) - H.energy_from_chart(chart, state.B, state.piB))
            table.add(index, disagreement, drift, reversal, mismatch)
            worst_chart = max(worst_chart, disagreement)
            worst_drift = max(worst_drift, drift)
            worst_reversal = max(worst_reversal, reversal)
            worst_mismatch = max(worst_mismatch, mismatch)
        detail = f"{len(states)} states, {n} steps, dt={dt}"
        result.checks.append(check_below("chart disagreement", worst_chart, CHART_TOLERANCE, detail))
        result.checks.append(check_below("relative energy drift", worst_drift, DRIFT_TOLERANCE, detail))
        result.checks.append(check_below("forward-backward return", worst_reversal, REVERSAL_TOLERANCE, detail))
        result.checks.append(check_below("H on state vs H on kinetic chart", worst_mismatch, 1e-12))
        write_trajectory(q_pi_runs[0], H, workdir / "trajectory_q_pi.csv")

        one_step_limit = 1e-10 if H.is_quadratic else 1e-6
        one_step = symplecticity_check(H, states[0], dt, 1)
        result.checks.append(check_below("single-step symplecticity defect", one_step, one_step_limit))
        full_run = symplecticity_check(H, states[0], dt, n, chart="Q_p")
        result.checks.append(check_below("full-run symplecticity defect", full_run, 1e-6, detail))

        points, order = energy_error_order(H, states[0], [4 * dt, 2 * dt, dt], duration=n * dt)
        sweep = result.table("energy_order", ["dt", "max_energy_error"])
        for step, error in points:
            sweep.add(step, error)
        result.checks.append(check_at_least("energy error order", order, MIN_ORDER))

        reference = reference_solution(H, states[0], [0.0, n * dt])[-1]
        reference_error = float(np.max(np.abs(reference.as_vector() - q_pi_runs[0].final.as_vector())))
        result.checks.append(check_below("agreement with DOP853 reference", reference_error, 1e-4, detail))
        logger.info(f"Dynamics suite: chart disagreement {worst_chart:.3e}, drift {worst_drift:.3e}")
        return result
