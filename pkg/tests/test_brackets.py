import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualchart.classical.brackets import (
    BRACKET_FAMILIES,
    PhaseFunction,
    bracket_convergence,
    build_symplectic,
    canonical_algebra_report,
    canonical_one_form,
    coordinate_function,
    linear_function,
    max_deviation,
    poisson_bracket,
    two_form_from_one_form,
    write_algebra_report,
)
from dualchart.classical.phase_space import ExtendedState, Metric, PhysicalConstants, random_state, random_states
from dualchart.exceptions import DimensionError, DualChartError, NumericalError


def test_symplectic_matrix_structure():
    omega = build_symplectic(3)
    assert_allclose(omega.matrix, -omega.matrix.T)
    assert_allclose(omega.matrix @ omega.inverse, np.eye(6))
    assert omega.form(np.eye(6)[0], np.eye(6)[3]) == 1.0
    with pytest.raises(DualChartError):
        build_symplectic(0)


def test_q_p_bracket_is_one_at_origin(constants):
    at = ExtendedState.zeros(1)
    q0 = coordinate_function("q", 0, 1, constants).numerical()
    p0 = coordinate_function("p", 0, 1, constants).numerical()
    assert poisson_bracket(q0, p0, at) == pytest.approx(1.0, abs=1e-10)
    assert poisson_bracket(p0, q0, at) == pytest.approx(-1.0, abs=1e-10)


@pytest.mark.parametrize("analytic", [True, False])
def test_algebra_on_random_states(rng, constants, metric, analytic):
    for state in random_states(rng, 10, 2):
        rows = canonical_algebra_report(state, constants, metric, analytic=analytic)
        assert len(rows) == len(BRACKET_FAMILIES) * 4
        assert max_deviation(rows) < 1e-8


def test_Q_pi_table_is_zero_and_Q_p_is_metric(rng, constants, metric):
    rows = canonical_algebra_report(random_state(rng, 2), constants, metric)
    table = {(r.family, r.mu, r.nu): r.value for r in rows}
    for mu in range(2):
        for nu in range(2):
            assert table[("Q,pi", mu, nu)] == pytest.approx(0.0, abs=1e-8)
            assert table[("Q,p", mu, nu)] == pytest.approx(float(mu == nu), abs=1e-8)


def test_Q_pi_is_metric_when_decoupled(rng, metric):
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    rows = canonical_algebra_report(random_state(rng, 2), k, metric)
    assert max_deviation(rows) < 1e-8
    values = {(r.family, r.mu, r.nu): r.value for r in rows}
    assert values[("Q,pi", 1, 1)] == pytest.approx(1.0, abs=1e-8)


def test_indefinite_signature(rng, constants):
    metric = Metric((1, -1))
    rows = canonical_algebra_report(random_state(rng, 2), constants, metric)
    assert max_deviation(rows) < 1e-8
    values = {(r.family, r.mu, r.nu): r.value for r in rows}
    assert values[("q,p", 1, 1)] == pytest.approx(-1.0, abs=1e-8)


def test_antisymmetry_and_leibniz(rng, constants):
    at = random_state(rng, 2)
    F = PhaseFunction(lambda s: float(np.sin(s.q[0]) * s.p[1]), name="F")
    G = PhaseFunction(lambda s: float(s.B[0] ** 2 + s.piB[1] * s.q[1]), name="G")
    K = PhaseFunction(lambda s: float(np.exp(0.3 * s.p[0])), name="K")
    assert poisson_bracket(F, G, at) == pytest.approx(-poisson_bracket(G, F, at), abs=1e-8)
    left = poisson_bracket(F, G * K, at)
    right = poisson_bracket(F, G, at) * K(at) + G(at) * poisson_bracket(F, K, at)
    assert left == pytest.approx(right, abs=1e-6)


def test_non_finite_function_reports_coordinate():
    at = ExtendedState.zeros(1)
    F = PhaseFunction(lambda s: float("nan") if s.B[0] > 0 else 0.0, name="step")
    G = linear_function(np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(NumericalError) as exc:
        poisson_bracket(F, G, at)
    assert exc.value.index == 1


def test_metric_dimension_mismatch(rng, constants):
    with pytest.raises(DimensionError):
        canonical_algebra_report(random_state(rng, 2), constants, Metric.euclidean(3))


def test_finite_difference_error_is_second_order(rng, constants, metric):
    points, order = bracket_convergence(random_state(rng, 2, scale=0.5), constants, [1e-2, 5e-3, 2.5e-3], metric)
    assert len(points) == 3
    assert points[-1].deviation < points[0].deviation
    assert order == pytest.approx(2.0, abs=0.1)


def test_two_form_is_minus_d_theta(rng):
    omega = build_symplectic(4)
    for _ in range(5):
        at = random_state(rng, 2)
        v = rng.standard_normal(8)
        w = rng.standard_normal(8)
        assert two_form_from_one_form(at, v, w) == pytest.approx(omega.form(v, w), abs=1e-9)


def test_one_form_checks_length():
    with pytest.raises(DimensionError):
        canonical_one_form(ExtendedState.zeros(2), np.zeros(5))


def test_algebra_report_csv(tmp_path, rng, constants):
    rows = canonical_algebra_report(random_state(rng, 2), constants)
    path = tmp_path / "algebra.csv"
    write_algebra_report(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "bracket_family,mu,nu,value,expected,abs_error"
    assert len(lines) == 1 + len(rows)


def _random_quadratic(rng, size, name):
    A = rng.standard_normal((size, size))
    A = 0.5 * (A + A.T)
    b = rng.standard_normal(size)
    return PhaseFunction(
        evaluate=lambda s: float(0.5 * s.as_vector() @ A @ s.as_vector() + b @ s.as_vector()),
        gradient=lambda s: A @ s.as_vector() + b,
        name=name,
    )


def _bracket_function(F, G):
    return PhaseFunction(lambda s: poisson_bracket(F, G, s), name=f"{{{F.name},{G.name}}}")


def test_jacobi_identity_on_quadratics(rng):
    for _ in range(5):
        at = random_state(rng, 2)
        F, G, K = (_random_quadratic(rng, 8, name) for name in "FGK")
        total = (
            poisson_bracket(F, _bracket_function(G, K), at)
            + poisson_bracket(G, _bracket_function(K, F), at)
            + poisson_bracket(K, _bracket_function(F, G), at)
        )
        assert abs(total) < 1e-5
