import csv

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualchart.classical.dynamics import (
    SystemHamiltonian,
    chart_disagreement,
    energy_error_order,
    evolve,
    evolve_ensemble,
    evolve_q_pi,
    evolve_Q_p,
    reference_solution,
    relative_energy_drift,
    symplecticity_check,
    time_reversal_error,
    write_trajectory,
)
from dualchart.classical.phase_space import ExtendedState, PhysicalConstants, kinetic_chart, random_state, random_states
from dualchart.exceptions import DivergenceError, DualChartError
from dualchart.utils.numerics import convergence_order


@pytest.fixture
def hamiltonian(constants, metric):
    return SystemHamiltonian(constants, metric, omega0=1.0)


@pytest.fixture
def state(rng):
    return random_state(rng, 2, scale=0.5)


def test_energy_agrees_on_both_charts(rng, constants, metric):
    for coupling in ("canonical", "kinetic"):
        H = SystemHamiltonian(constants, metric, 1.0, "nonrelativistic", coupling)
        for s in random_states(rng, 5, 2):
            chart = kinetic_chart(s, constants)
            assert H.energy(s) == pytest.approx(H.energy_from_chart(chart, s.B, s.piB), abs=1e-12)


def test_vector_field_matches_gradient_of_energy(hamiltonian, state):
    eps = 1e-6
    x = state.as_vector()
    numeric = np.array([
        (hamiltonian.energy(ExtendedState.from_vector(x + eps * e)) - hamiltonian.energy(ExtendedState.from_vector(x - eps * e))) / (2 * eps)
        for e in np.eye(len(x))
    ])
    assert_allclose(hamiltonian.gradient(state), numeric, atol=1e-8)


@pytest.mark.parametrize("model,coupling", [
    ("nonrelativistic", "canonical"),
    ("nonrelativistic", "kinetic"),
    ("relativistic", "canonical"),
])
def test_charts_agree(constants, metric, state, model, coupling):
    H = SystemHamiltonian(constants, metric, 1.0, model, coupling)
    a = evolve_q_pi(H, state, 1e-3, 300)
    b = evolve_Q_p(H, state, 1e-3, 300)
    assert len(a) == len(b) == 301
    assert a.chart_tag == "q_pi" and b.chart_tag == "Q_p"
    assert chart_disagreement(a, b, constants) < 1e-9


def test_decoupled_charts_coincide(metric, state):
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    H = SystemHamiltonian(k, metric)
    a = evolve(H, state, 1e-3, 100, chart="q_pi")
    b = evolve(H, state, 1e-3, 100, chart="Q_p")
    assert_allclose(a.vectors(), b.vectors(), atol=1e-13)


def test_energy_drift_is_small(hamiltonian, state):
    trajectory = evolve_q_pi(hamiltonian, state, 1e-3, 1000)
    assert relative_energy_drift(trajectory, hamiltonian) < 1e-5


@pytest.mark.parametrize("chart", ["q_pi", "Q_p"])
def test_time_reversal(hamiltonian, state, chart):
    assert time_reversal_error(hamiltonian, state, 1e-3, 500, chart) < 1e-10


def test_single_step_is_symplectic(hamiltonian, state):
    assert symplecticity_check(hamiltonian, state, 1e-2, 1) < 1e-10


def test_many_steps_stay_symplectic(hamiltonian, state):
    assert symplecticity_check(hamiltonian, state, 1e-2, 200, chart="Q_p") < 1e-8


def test_energy_error_is_second_order(hamiltonian, state):
    points, order = energy_error_order(hamiltonian, state, [4e-2, 2e-2, 1e-2], duration=2.0)
    assert len(points) == 3
    assert order == pytest.approx(2.0, abs=0.2)


def test_agrees_with_reference_integrator(hamiltonian, state):
    n, dt = 200, 1e-3
    trajectory = evolve_q_pi(hamiltonian, state, dt, n)
    reference = reference_solution(hamiltonian, state, [0.0, n * dt])
    assert_allclose(reference[-1].as_vector(), trajectory.final.as_vector(), atol=1e-5)


def test_ensemble_keeps_input_order(hamiltonian, rng):
    states = random_states(rng, 4, 2, scale=0.5)
    runs = evolve_ensemble(hamiltonian, states, 1e-3, 50, workers=2)
    for s, run in zip(states, runs):
        assert_allclose(run.final.as_vector(), evolve_q_pi(hamiltonian, s, 1e-3, 50).final.as_vector())


def test_divergence_reports_step(hamiltonian):
    huge = ExtendedState.from_vector(np.full(8, 1e300))
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(DivergenceError) as exc:
            evolve_q_pi(hamiltonian, huge, 1e10, 5)
    assert exc.value.step == 1


def test_invalid_arguments(hamiltonian, state, constants, metric):
    with pytest.raises(DualChartError):
        evolve_q_pi(hamiltonian, state, 0.0, 10)
    with pytest.raises(DualChartError):
        evolve(hamiltonian, state, 1e-3, 10, chart="Q_q")
    with pytest.raises(DualChartError):
        SystemHamiltonian(constants, metric, particle_model="quantum")


def test_trajectory_csv(tmp_path, hamiltonian, state):
    trajectory = evolve_q_pi(hamiltonian, state, 1e-3, 10)
    path = tmp_path / "trajectory.csv"
    write_trajectory(trajectory, hamiltonian, path)
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0][0] == "t" and rows[0][-1] == "H"
    assert len(rows[0]) == 1 + 6 * 2 + 1
    assert len(rows) == 12
    assert float(rows[1][-1]) == hamiltonian.energy(state)


def test_free_decoupled_particle_moves_uniformly(metric):
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    H = SystemHamiltonian(k, metric, omega0=0.0)
    s0 = ExtendedState(q=[0.4, -1.1], p=[0.9, 0.3], B=[0.2, 0.5], piB=[-0.7, 0.1])
    trajectory = evolve_q_pi(H, s0, 0.01, 200)
    for t, s in zip(trajectory.times, trajectory.states):
        assert_allclose(s.q, s0.q + s0.p / k.m * t, rtol=1e-12, atol=1e-12)
        assert_allclose(s.p, s0.p, rtol=0, atol=0)


def test_harmonic_field_mode_is_second_order(metric):
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    H = SystemHamiltonian(k, metric, omega0=1.0)
    s0 = ExtendedState(q=[0.1, 0.2], p=[0.3, -0.2], B=[0.8, -0.4], piB=[0.5, 0.6])
    steps = [0.04, 0.02, 0.01]
    errors = []
    for dt in steps:
        final = evolve_q_pi(H, s0, dt, int(round(1.0 / dt))).final
        exact = s0.B * np.cos(1.0) + s0.piB * np.sin(1.0)
        error = float(np.max(np.abs(final.B - exact)))
        assert error < dt ** 2
        errors.append(error)
    assert 1.8 < convergence_order(steps, errors) < 2.2
