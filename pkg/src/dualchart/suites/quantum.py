"""
Quantum suite: commutator algebra on the truncated tensor product, the
kinetic-momentum commutator on a position grid, density evolution, the joint
(𝒬, π) eigenbasis, trajectory densities and scatter statistics.
"""
import dataclasses
import logging
from pathlib import Path

import numpy as np

from dualchart.config.manager import ScenarioConfig
from dualchart.exceptions import NonCommutingError
from dualchart.quantum.density import (
    DensityOperator,
    Propagator,
    evolution_diagnostics,
    gaussian_state,
    ground_state,
    short_time_error,
    system_hamiltonian,
)
from dualchart.quantum.grid import (
    grid_convergence,
    kinetic_momentum_curvature,
    separable_pure_gauge,
    symmetric_profile,
    zero_profile,
)
from dualchart.quantum.joint_basis import (
    joint_eigenbasis,
    scatter_statistics,
    trajectory_density,
    write_densities,
)
from dualchart.quantum.operators import build_operators, commutator_suite, save_operator_set
from dualchart.suites.base import Suite, SuiteResult, check_at_least, check_below
from dualchart.utils.numerics import convergence_order

logger = logging.getLogger(__name__)

ALGEBRA_TOLERANCE = 1e-10
EVOLUTION_TOLERANCE = 1e-10
GRID_TOLERANCE = 1e-2
MIN_ORDER = 1.9
RESIDUAL_TOLERANCE = 1e-6
SCATTER_SLACK = 1e-2


class QuantumSuite(Suite):
    name = "quantum"
    description = "Truncated commutator algebra, grid kinetic-momentum curvature, density evolution and scatter"

    def run(self, config: ScenarioConfig, rng: np.random.Generator, workdir: Path) -> SuiteResult:
        result = SuiteResult(self.name)
        self._algebra(config, result, workdir)
        self._grid(config, result)
        self._evolution(config, rng, result, workdir)
        return result

    def _algebra(self, config: ScenarioConfig, result: SuiteResult, workdir: Path) -> None:
        k = config.physical
        q = config.quantum
        result.notes.append(f"commutator identities quantified over Fock levels below "
                            f"{q.d_particle // 2} x {q.d_field // 2}")
        table = result.table("commutators", ["realization", "identity", "expected", "interior_defect", "full_defect"])
        for realization in ("fock", "kinetic"):
            ops = build_operators(q.d_particle, q.d_field, k, realization)
            report = commutator_suite(ops)
            for row in report.rows:
                table.add(realization, row.identity, row.expected, row.interior_defect, row.full_defect)
                result.checks.append(check_below(f"{realization} {row.identity} interior defect",
                                                 row.interior_defect, ALGEBRA_TOLERANCE))
            if realization == "fock":
                save_operator_set(ops, workdir / "operators_fock.npz")

        decoupled = dataclasses.replace(k, decoupled=True)
        ops = build_operators(q.d_particle, q.d_field, decoupled)
        result.checks.append(check_below("decoupled Q equals q", float(np.max(np.abs(ops.Q.entries - ops.q.entries))), 1e-15))

    def _grid(self, config: ScenarioConfig, result: SuiteResult) -> None:
        k = config.physical
        q = config.quantum
        b = config.lattice.field_strength
        points, width = q.grid_points, q.grid_width
        table = result.table("kinetic_momentum_curvature", ["profile", "points", "spacing", "residual", "relative_error", "field_norm"])

        flat = kinetic_momentum_curvature(zero_profile, points, k, 0.0, width)
        table.add("zero", points, flat.spacing, flat.residual, flat.relative_error, flat.field_norm)
        result.checks.append(check_below("grid [pi1,pi2] with B = 0", flat.residual, 1e-10))

        uniform = kinetic_momentum_curvature(symmetric_profile(b), points, k, b, width)
        table.add("symmetric", points, uniform.spacing, uniform.residual, uniform.relative_error, uniform.field_norm)
        result.checks.append(check_below("grid [pi1,pi2] vs 2imhbar/c F", uniform.relative_error, GRID_TOLERANCE,
                                         f"{points}^2 points"))

        pure = kinetic_momentum_curvature(separable_pure_gauge, points, k, 0.0, width)
        table.add("pure_gauge", points, pure.spacing, pure.residual, pure.relative_error, pure.field_norm)
        result.checks.append(check_below("grid [pi1,pi2] for pure gauge", pure.residual, 1e-8,
                                         "lambda = sin x1 + x2^2/2"))
        result.checks.append(check_at_least("pure gauge |B psi|", pure.field_norm, 1e-3))

        counts = [points // 2 + 1, points + 1, 2 * points + 1]
        checks, order = grid_convergence(symmetric_profile(b), counts, k, b, width)
        for check in checks:
            table.add("symmetric_sweep", check.points, check.spacing, check.residual, check.relative_error, check.field_norm)
        result.checks.append(check_at_least("grid commutator convergence order", order, MIN_ORDER))

    def _evolution(self, config: ScenarioConfig, rng: np.random.Generator, result: SuiteResult, workdir: Path) -> None:
        k = config.physical
        q = config.quantum
        hbar = k.hbar
        ops = build_operators(q.d_particle, q.d_field, k, "kinetic")
        H = system_hamiltonian(ops, config.constants.omega0)
        propagator = Propagator(H, hbar)
        times = np.linspace(0.0, q.t_max, q.n_times)

        # joint eigenbasis, and its refusal on the fock realization
        basis = joint_eigenbasis(ops.Q, ops.pi, seed=config.seed)
        result.checks.append(check_below("joint eigenbasis max residual", basis.max_residual, RESIDUAL_TOLERANCE))
        result.checks.append(check_below("joint eigenbasis completeness", basis.completeness_error(), 1e-10))
        fock = build_operators(q.d_particle, q.d_field, k, "fock")
        try:
            joint_eigenbasis(fock.Q, fock.pi, seed=config.seed)
            refused = 0.0
        except NonCommutingError as e:
            refused = e.defect
        result.checks.append(check_at_least("non-commuting pair refused (defect)", refused, 1e-8,
                                            "fock realization, full space"))

        # short-time series and stationary states
        states = [gaussian_state(ops, 0.5 * rng.standard_normal(4)) for _ in range(q.n_gaussian_states)]
        series_times = [1e-3, 2e-3, 4e-3]
        errors = [short_time_error(states[0], H, t, hbar) for t in series_times]
        result.checks.append(check_at_least("short-time series error order", convergence_order(series_times, errors), MIN_ORDER))
        stationary = ground_state(H)
        drift = float(np.max(np.abs(propagator.evolve(stationary, q.t_max).entries - stationary.entries)))
        result.checks.append(check_below("eigenstate projector is stationary", drift, EVOLUTION_TOLERANCE))

        # evolution invariants, trajectory densities and scatter
        table = result.table("evolution", ["state", "trace_error", "purity_error", "min_eigenvalue", "reversal_error",
                                           "max_G_sum_error", "min_G", "scatter_t0", "min_scatter"])
        bound = 0.5 * hbar * (1 - SCATTER_SLACK)
        scatter = result.table("scatter", ["state", "t", "dQ", "dpi", "product"])
        worst = {"trace": 0.0, "purity": 0.0, "reversal": 0.0, "sum": 0.0}
        min_eigenvalue = min_G = np.inf
        min_initial_scatter = np.inf
        evolved_scatter = []
        for index, rho0 in enumerate(states):
            diagnostics = evolution_diagnostics(propagator, rho0, times)
            densities = [trajectory_density(propagator.evolve(rho0, t), basis, t) for t in times]
            products = []
            for density in densities:
                stats = scatter_statistics(density)
                products.append(stats.product)
                scatter.add(index, density.time, stats.dQ, stats.dpi, stats.product)
            sum_error = max(abs(d.total - 1.0) for d in densities)
            lowest = min(d.min_value for d in densities)
            table.add(index, diagnostics.trace_error, diagnostics.purity_error, diagnostics.min_eigenvalue,
                      diagnostics.reversal_error, sum_error, lowest, products[0], min(products))
            worst["trace"] = max(worst["trace"], diagnostics.trace_error)
            worst["purity"] = max(worst["purity"], diagnostics.purity_error)
            worst["reversal"] = max(worst["reversal"], diagnostics.reversal_error)
            worst["sum"] = max(worst["sum"], sum_error)
            min_eigenvalue = min(min_eigenvalue, diagnostics.min_eigenvalue)
            min_G = min(min_G, lowest)
            min_initial_scatter = min(min_initial_scatter, products[0])
            if index == 0:
                write_densities(densities, workdir / "trajectory_density_state0.csv")
            evolved_scatter.append(min(products))
        detail = f"{len(states)} Gaussian states, {len(times)} times in [0, {q.t_max}]"
        result.checks.append(check_below("trace preserved", worst["trace"], EVOLUTION_TOLERANCE, detail))
        result.checks.append(check_below("purity preserved", worst["purity"], EVOLUTION_TOLERANCE, detail))
        result.checks.append(check_at_least("positivity preserved", min_eigenvalue, -EVOLUTION_TOLERANCE, detail))
        result.checks.append(check_below("evolve(t) then evolve(-t)", worst["reversal"], EVOLUTION_TOLERANCE, detail))
        result.checks.append(check_below("sum of G minus 1", worst["sum"], 1e-10, detail))
        result.checks.append(check_at_least("min G", min_G, -1e-12, detail))
        result.checks.append(check_at_least("initial scatter product", min_initial_scatter, bound,
                                            "dQ*dpi >= hbar/2 (1 - 1e-2)"))
        for index, product in enumerate(evolved_scatter):
            result.checks.append(check_at_least(f"scatter product state {index}", product, bound,
                                                f"minimum over {len(times)} times in [0, {q.t_max}]"))

        ground = scatter_statistics(trajectory_density(stationary, basis))
        scatter.add("ground", 0.0, ground.dQ, ground.dpi, ground.product)
        result.checks.append(check_at_least("ground state scatter product", ground.product, bound))
        delta = scatter_statistics(trajectory_density(DensityOperator.pure(basis.vectors[:, 0]), basis))
        result.checks.append(check_below("delta density has zero variance", delta.product, 1e-6,
                                         "single joint eigenstate; a truncation artifact, flagged"))
        mixed = trajectory_density(DensityOperator.maximally_mixed(ops.dim), basis)
        result.checks.append(check_below("maximally mixed G uniform", float(np.max(np.abs(mixed.G - 1.0 / ops.dim))), 1e-12))
        logger.info(f"Quantum suite: min initial scatter {min_initial_scatter:.4f} (bound {bound:.4f})")
