import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualchart.classical.phase_space import (
    ExtendedState,
    KineticChart,
    Metric,
    PhysicalConstants,
    inverse_pullbacks,
    kinetic_chart,
    pullback_coordinate,
    pullback_momentum,
    random_state,
    state_from_chart,
)
from dualchart.exceptions import DimensionError, DualChartError


def test_shift_factors(constants):
    assert constants.momentum_shift == pytest.approx(2 * 1.3 / 1.7)
    assert constants.coordinate_shift == pytest.approx(1.7 / (2 * 1.3))
    assert constants.momentum_shift * constants.coordinate_shift == pytest.approx(1.0)
    assert constants.covariant_coupling == pytest.approx(1 / (2 * 1.3 * 0.7))


def test_decoupled_switches_off_both_shifts():
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    assert k.momentum_shift == 0.0
    assert k.coordinate_shift == 0.0
    state = ExtendedState(q=[1.0, 2.0], p=[3.0, 4.0], B=[5.0, 6.0], piB=[7.0, 8.0])
    chart = kinetic_chart(state, k)
    assert_allclose(chart.Q, state.q)
    assert_allclose(chart.pi, state.p)


@pytest.mark.parametrize("name", ["m", "c", "chi", "hbar"])
def test_non_positive_constant_rejected(name):
    with pytest.raises(DualChartError):
        PhysicalConstants(**{name: 0.0})


def test_pullback_values(constants):
    kappa = 2 * 1.3 / 1.7
    lam = 1.7 / (2 * 1.3)
    assert_allclose(pullback_momentum([1.0, 2.0], [0.5, -1.0], constants), [1.0 - 0.5 * kappa, 2.0 + kappa])
    assert_allclose(pullback_coordinate([0.0, 1.0], [2.0, 0.0], constants), [-2.0 * lam, 1.0])


def test_pullback_length_mismatch(constants):
    with pytest.raises(DimensionError):
        pullback_momentum([1.0, 2.0], [1.0, 2.0, 3.0], constants)


def test_inverse_pullbacks_round_trip(rng, constants):
    for _ in range(20):
        state = random_state(rng, 3)
        chart = kinetic_chart(state, constants)
        q, p = inverse_pullbacks(chart, state.B, state.piB, constants)
        assert_allclose(q, state.q, atol=1e-14)
        assert_allclose(p, state.p, atol=1e-14)
        back = state_from_chart(chart, state.B, state.piB, constants)
        assert_allclose(back.as_vector(), state.as_vector(), atol=1e-14)


def test_vector_ordering():
    state = ExtendedState(q=[1.0], p=[2.0], B=[3.0], piB=[4.0])
    assert_allclose(state.as_vector(), [1.0, 3.0, 2.0, 4.0])
    assert ExtendedState.from_vector([1.0, 3.0, 2.0, 4.0]).p[0] == 2.0


def test_state_validation():
    with pytest.raises(DimensionError):
        ExtendedState(q=[1.0, 2.0], p=[1.0], B=[1.0, 2.0], piB=[1.0, 2.0])
    with pytest.raises(DimensionError):
        ExtendedState.from_vector(np.zeros(6))
    with pytest.raises(DualChartError):
        ExtendedState(q=[np.nan], p=[0.0], B=[0.0], piB=[0.0])
    with pytest.raises(DimensionError):
        KineticChart(Q=[1.0, 2.0], pi=[1.0])


def test_state_is_immutable(rng):
    state = random_state(rng, 2)
    with pytest.raises(ValueError):
        state.q[0] = 1.0


def test_metric():
    metric = Metric((1, -1, -1, -1))
    assert metric.dim == 4
    assert metric.square(np.array([2.0, 1.0, 0.0, 0.0])) == pytest.approx(3.0)
    assert_allclose(Metric.euclidean(2).components, np.eye(2))
    with pytest.raises(DualChartError):
        Metric((1, 2))
    with pytest.raises(DimensionError):
        random_state(np.random.default_rng(0), 2).check_metric(Metric.euclidean(3))
