"""
Curvature and holonomy suite on a static two-dimensional lattice.
"""
import logging
from pathlib import Path

import numpy as np

from dualchart.config.manager import ScenarioConfig
from dualchart.gauge.io import save_connection, save_curvature
from dualchart.gauge.lattice import (
    DEFAULT_PHASE_PER_STEP,
    analytic_curl,
    curvature_from_commutator,
    enclosed_plaquettes,
    gauge_shift,
    holonomy_consistency,
    loop_holonomy,
    modulated_wave,
    plane_wave,
    polynomial_connection,
    pure_gauge,
    refinement_sweep,
    symmetric_gauge,
)
from dualchart.suites.base import Suite, SuiteResult, check_at_least, check_below

logger = logging.getLogger(__name__)

CURVATURE_TOLERANCE = 5e-3
MIN_ORDER = 1.9
FLAT_TOLERANCE = 1e-8
HOLONOMY_TOLERANCE = 0.05


class GaugeSuite(Suite):
    name = "gauge"
    description = "Curvature from covariant-derivative commutators, plaquette holonomy and gauge invariance"

    def run(self, config: ScenarioConfig, rng: np.random.Generator, workdir: Path) -> SuiteResult:
        k = config.physical
        lattice = config.lattice
        b = lattice.field_strength
        a = lattice.spacing
        dims = (lattice.points, lattice.points)
        result = SuiteResult(self.name)
        result.notes.append(f"lattice {dims[0]}x{dims[1]}, a={a}, 1/(2m chi)={k.covariant_coupling!r}")

        # uniform field in the symmetric gauge
        conn = symmetric_gauge(dims, a, k, b)
        F = curvature_from_commutator(conn)
        error = F.max_error(lambda mu, nu: np.full(conn.dims, b))
        result.checks.append(check_below("symmetric gauge F12 error", error, CURVATURE_TOLERANCE, f"b={b}"))
        save_connection(conn, workdir / "symmetric_connection.csv")
        save_curvature(F, conn, workdir / "symmetric_curvature.csv")

        other = curvature_from_commutator(conn, modulated_wave(conn))
        result.checks.append(check_below("test-field independence", F.max_error(other), CURVATURE_TOLERANCE,
                                         "plane wave against modulated wave"))

        # refinement at fixed physical extent and fixed test-field wavevector
        extent = (lattice.points - 1) * a
        spacings = [a / 2 ** i for i in range(lattice.refinements + 1)]
        wavevector = [DEFAULT_PHASE_PER_STEP / a] * 2

        def build(spacing):
            n = int(round(extent / spacing)) + 1
            return symmetric_gauge((n, n), spacing, k, b)

        points, order = refinement_sweep(build, spacings, lambda c: (lambda mu, nu: np.full(c.dims, b)), wavevector)
        sweep = result.table("curvature_convergence", ["spacing", "max_error", "holonomy_arg", "predicted_arg", "holonomy_rel_error"])
        holonomy_errors = []
        for point in points:
            refined = build(point.spacing)
            curvature = curvature_from_commutator(refined, plane_wave(refined, wavevector))
            centre = tuple(n // 2 for n in refined.dims)
            phase, predicted = holonomy_consistency(refined, curvature, centre)
            relative = abs(phase - predicted) / abs(predicted)
            holonomy_errors.append(relative)
            sweep.add(point.spacing, point.error, phase, predicted, relative)
        result.checks.append(check_at_least("curvature convergence order", order, MIN_ORDER,
                                            f"spacings {spacings}"))
        result.checks.append(check_below("holonomy vs -F a^2/(2m chi)", holonomy_errors[0], HOLONOMY_TOLERANCE,
                                         f"relative error at a={a}"))
        if len(holonomy_errors) > 1:
            growth = max(later / earlier for earlier, later in zip(holonomy_errors, holonomy_errors[1:]) if earlier > 0)
            result.checks.append(check_below("holonomy error shrinks with a", growth, 1.0, "largest finer/coarser ratio"))

        # pure gauge: flat curvature with a non-trivial connection
        flat = pure_gauge(dims, a, k)
        F_flat = curvature_from_commutator(flat)
        result.checks.append(check_below("pure gauge max |F|", F_flat.max_abs(), FLAT_TOLERANCE, "lambda = x1*x2"))
        result.checks.append(check_at_least("pure gauge max |B|", flat.max_abs(), 0.1))
        centre = tuple(n // 2 for n in dims)
        flat_phase = float(np.angle(loop_holonomy(flat, centre, 0, 1, (1, 1))))
        result.checks.append(check_below("pure gauge |arg plaquette|", abs(flat_phase), FLAT_TOLERANCE))

        # random smooth connection against its direct curl
        poly = polynomial_connection(dims, a, k, rng, degree=2, scale=0.5)
        F_poly = curvature_from_commutator(poly)
        result.checks.append(check_below("polynomial connection F vs curl", F_poly.max_error(analytic_curl(poly)),
                                         2 * CURVATURE_TOLERANCE))

        # gauge shift leaves F unchanged to O(a^2)
        x1, x2 = poly.coordinates()
        shifted = gauge_shift(poly, np.sin(x1) * np.cos(x2))
        shift_error = curvature_from_commutator(shifted).max_error(F_poly)
        result.checks.append(check_below("gauge shift invariance", shift_error, 20 * a ** 2,
                                         "lambda = sin(x1)cos(x2)"))

        # lattice Stokes: rectangular loop equals the product of its plaquettes
        corner = (dims[0] // 4, dims[1] // 4)
        loop = loop_holonomy(conn, corner, 0, 1, (5, 3))
        tiles = enclosed_plaquettes(conn, corner, 0, 1, (5, 3))
        result.checks.append(check_below("Wilson loop = product of plaquettes", abs(loop - tiles), 1e-12))

        logger.info(f"Gauge suite: F12 error {error:.3e}, order {order:.3f}")
        return result
