import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dualchart.exceptions import AxisError, DegenerateTestFieldError, DimensionError, PlaquetteOutOfGridError
from dualchart.gauge.io import load_connection, save_connection, save_curvature
from dualchart.gauge.lattice import (
    analytic_curl,
    constant_connection,
    covariant_derivative,
    curvature_from_commutator,
    enclosed_plaquettes,
    gauge_shift,
    holonomy_consistency,
    holonomy_map,
    loop_holonomy,
    modulated_wave,
    plaquette_holonomy,
    plane_wave,
    polynomial_connection,
    pure_gauge,
    refinement_sweep,
    symmetric_gauge,
    zero_connection,
)


def test_zero_connection_is_flat(constants):
    conn = zero_connection((16, 16), 0.1, constants)
    F = curvature_from_commutator(conn)
    assert F.max_abs() < 1e-10


def test_constant_connection_is_flat(constants):
    conn = constant_connection((16, 16), 0.1, constants, [0.4, -1.2])
    assert curvature_from_commutator(conn).max_abs() < 1e-8


def test_uniform_field_in_symmetric_gauge(constants):
    conn = symmetric_gauge((32, 32), 0.05, constants, b=1.5)
    F = curvature_from_commutator(conn)
    assert F.max_error(lambda mu, nu: np.full(conn.dims, 1.5)) < 5e-3
    assert_allclose(np.ma.getdata(F.component(1, 0)), -np.ma.getdata(F.component(0, 1)))
    assert F.max_error(analytic_curl(conn)) < 5e-3


def test_boundary_points_are_masked(constants):
    conn = symmetric_gauge((16, 16), 0.1, constants)
    F = curvature_from_commutator(conn)
    mask = np.ma.getmaskarray(F.component(0, 1))
    assert mask[0, :].all() and mask[-1, :].all() and mask[:, 0].all() and mask[:, -1].all()
    assert not mask[1:-1, 1:-1].any()
    assert len(F.interior_values(0, 1)) == 14 * 14


def test_curvature_independent_of_test_field(constants):
    conn = symmetric_gauge((32, 32), 0.05, constants)
    a = curvature_from_commutator(conn, plane_wave(conn))
    b = curvature_from_commutator(conn, modulated_wave(conn))
    assert a.max_error(b) < 5e-3


def test_pure_gauge_is_flat(constants):
    conn = pure_gauge((32, 32), 0.05, constants)
    assert conn.max_abs() >= 0.1
    assert curvature_from_commutator(conn).max_abs() < 1e-8
    phase = loop_holonomy(conn, (16, 16), 0, 1, (1, 1))
    assert abs(np.angle(phase)) < 1e-8


def test_plaquette_phase_value(unit_constants):
    # -(1/2m chi) F a^2 with m = chi = 1, a = 0.1, F = 1
    conn = symmetric_gauge((11, 11), 0.1, unit_constants, b=1.0)
    phase = plaquette_holonomy(conn, (5, 5), 0, 1)
    assert np.angle(phase) == pytest.approx(-0.005, rel=1e-10)
    assert abs(phase) == pytest.approx(1.0)


def test_holonomy_orientation(constants):
    conn = symmetric_gauge((11, 11), 0.1, constants)
    forward = plaquette_holonomy(conn, (3, 3), 0, 1)
    backward = plaquette_holonomy(conn, (3, 3), 1, 0)
    assert forward * backward == pytest.approx(1.0)


def test_holonomy_matches_curvature(constants):
    conn = symmetric_gauge((32, 32), 0.05, constants)
    F = curvature_from_commutator(conn)
    phase, predicted = holonomy_consistency(conn, F, (16, 16))
    assert abs(phase - predicted) / abs(predicted) < 0.05


def test_holonomy_map_shape(constants):
    conn = symmetric_gauge((10, 12), 0.1, constants)
    assert holonomy_map(conn, 0, 1).shape == (9, 11)
    assert_allclose(np.angle(holonomy_map(conn, 0, 1)), -constants.covariant_coupling * 0.01, rtol=1e-10)


def test_wilson_loop_is_product_of_plaquettes(constants, rng):
    conn = polynomial_connection((20, 20), 0.1, constants, rng, degree=3, scale=0.3)
    loop = loop_holonomy(conn, (4, 5), 0, 1, (6, 4))
    tiles = enclosed_plaquettes(conn, (4, 5), 0, 1, (6, 4))
    assert abs(loop - tiles) < 1e-12


def test_polynomial_connection_matches_curl(constants, rng):
    conn = polynomial_connection((40, 40), 0.05, constants, rng, degree=2, scale=0.5)
    F = curvature_from_commutator(conn)
    assert F.max_error(analytic_curl(conn)) < 1e-2


def test_gauge_shift_leaves_curvature_unchanged(constants, rng):
    conn = polynomial_connection((40, 40), 0.05, constants, rng, degree=2, scale=0.5)
    x1, x2 = conn.coordinates()
    shifted = gauge_shift(conn, np.sin(x1) * np.cos(x2))
    before = curvature_from_commutator(conn)
    after = curvature_from_commutator(shifted)
    assert after.max_error(before) < 20 * 0.05 ** 2


def test_three_dimensional_lattice(constants):
    conn = symmetric_gauge((12, 12, 12), 0.1, constants, b=0.8)
    F = curvature_from_commutator(conn)
    assert F.F.shape == (3, 3, 12, 12, 12)
    assert F.max_error(lambda mu, nu: np.full(conn.dims, 0.8), 0, 1) < 5e-3
    assert F.max_error(lambda mu, nu: np.zeros(conn.dims), 0, 2) < 1e-10


@pytest.mark.parametrize("spacings", [[0.1, 0.05, 0.025]])
def test_refinement_is_second_order(constants, spacings):
    extent = 1.6

    def build(a):
        n = int(round(extent / a)) + 1
        return symmetric_gauge((n, n), a, constants)

    points, order = refinement_sweep(build, spacings, lambda c: (lambda mu, nu: np.ones(c.dims)), wavevector=[3.0, 3.0])
    assert [p.spacing for p in points] == sorted(spacings, reverse=True)
    assert order == pytest.approx(2.0, abs=0.1)


def test_degenerate_test_field(constants):
    conn = symmetric_gauge((12, 12), 0.1, constants)
    f = np.ones(conn.dims, dtype=complex)
    f[5, 6] = 0.0
    with pytest.raises(DegenerateTestFieldError) as exc:
        curvature_from_commutator(conn, f)
    assert exc.value.point == (5, 6)


def test_errors(constants):
    conn = symmetric_gauge((8, 8), 0.1, constants)
    with pytest.raises(AxisError):
        covariant_derivative(conn, plane_wave(conn), 2)
    with pytest.raises(DimensionError):
        covariant_derivative(conn, np.ones((7, 8)), 0)
    with pytest.raises(PlaquetteOutOfGridError):
        plaquette_holonomy(conn, (7, 0), 0, 1)
    with pytest.raises(AxisError):
        plaquette_holonomy(conn, (0, 0), 1, 1)
    with pytest.raises(DimensionError):
        symmetric_gauge((2, 8), 0.1, constants)


def test_connection_csv_round_trip(tmp_path, constants, rng):
    conn = polynomial_connection((6, 7), (0.1, 0.2), constants, rng)
    path = tmp_path / "connection.csv"
    save_connection(conn, path)
    loaded = load_connection(path)
    assert loaded.dims == conn.dims
    assert loaded.spacing == conn.spacing
    assert_array_equal(loaded.B, conn.B)
    assert loaded.constants == conn.constants


def test_curvature_csv_keeps_interior_rows(tmp_path, constants):
    conn = symmetric_gauge((8, 8), 0.1, constants)
    path = tmp_path / "curvature.csv"
    save_curvature(curvature_from_commutator(conn), conn, path)
    lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
    assert lines[0] == "i0,i1,F01"
    assert len(lines) == 1 + 6 * 6
