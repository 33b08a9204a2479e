import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualchart.exceptions import DimensionError, NonCommutingError
from dualchart.quantum.density import DensityOperator, gaussian_state, ground_state, system_hamiltonian
from dualchart.quantum.joint_basis import (
    TrajectoryDensity,
    joint_eigenbasis,
    scatter_statistics,
    trajectory_density,
    write_densities,
)
from dualchart.quantum.operators import OperatorMatrix, build_operators


@pytest.fixture
def kinetic_ops(constants):
    return build_operators(12, 12, constants, "kinetic")


@pytest.fixture
def basis(kinetic_ops):
    return joint_eigenbasis(kinetic_ops.Q, kinetic_ops.pi, seed=3)


def test_joint_basis_diagonalizes_both(kinetic_ops, basis):
    assert basis.dim == kinetic_ops.dim
    assert basis.max_residual < 1e-8
    assert basis.completeness_error() < 1e-10
    V = basis.vectors
    assert_allclose(V.conj().T @ kinetic_ops.Q.entries @ V, np.diag(basis.Q_values), atol=1e-8)
    assert_allclose(V.conj().T @ kinetic_ops.pi.entries @ V, np.diag(basis.pi_values), atol=1e-8)


def test_degenerate_commuting_pair():
    rng = np.random.default_rng(11)
    U, _ = np.linalg.qr(rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10)))
    A = U @ np.diag([0, 0, 0, 1, 1, 1, 2, 2, 3, 4]) @ U.conj().T
    B = U @ np.diag([0, 0, 2, 1, 1, 2, 2, 3, 3, 4]) @ U.conj().T
    A = OperatorMatrix(0.5 * (A + A.conj().T), hermitian_flag=True)
    B = OperatorMatrix(0.5 * (B + B.conj().T), hermitian_flag=True)
    basis = joint_eigenbasis(A, B, seed=0)
    assert basis.max_residual < 1e-8
    assert basis.completeness_error() < 1e-10


def test_non_commuting_pair_refused(constants):
    ops = build_operators(10, 10, constants, "fock")
    with pytest.raises(NonCommutingError) as exc:
        joint_eigenbasis(ops.Q, ops.pi)
    assert exc.value.defect > 1e-8


def test_interior_subspace_defect_accepted(constants):
    ops = build_operators(10, 10, constants, "fock")
    basis = joint_eigenbasis(ops.Q, ops.pi, subspace=ops.interior_indices(), tolerance=1e-8)
    assert basis.defect < 1e-8


def test_density_is_a_distribution(kinetic_ops, basis, rng):
    rho = gaussian_state(kinetic_ops, 0.3 * rng.standard_normal(4))
    density = trajectory_density(rho, basis)
    assert density.total == pytest.approx(1.0, abs=1e-10)
    assert density.min_value > -1e-12


def test_maximally_mixed_density_is_uniform(kinetic_ops, basis):
    density = trajectory_density(DensityOperator.maximally_mixed(kinetic_ops.dim), basis)
    assert_allclose(density.G, 1.0 / kinetic_ops.dim, atol=1e-12)


def test_gaussian_scatter_bound(kinetic_ops, basis, constants):
    rho = gaussian_state(kinetic_ops, [0.0, 0.0, 0.0, 0.0])
    stats = scatter_statistics(trajectory_density(rho, basis))
    assert not stats.zero_variance
    assert stats.product >= 0.5 * constants.hbar * (1 - 1e-2)


def test_ground_state_statistics_are_finite(kinetic_ops, basis):
    H = system_hamiltonian(kinetic_ops)
    stats = scatter_statistics(trajectory_density(ground_state(H), basis))
    assert np.isfinite(stats.product)


def test_single_eigenvector_has_zero_variance(basis, caplog):
    density = trajectory_density(DensityOperator.pure(basis.vectors[:, 5]), basis)
    stats = scatter_statistics(density)
    assert stats.zero_variance
    assert stats.product < 1e-6
    assert "Zero-variance" in caplog.text


def test_scatter_statistics_by_hand():
    density = TrajectoryDensity(Q=np.array([-1.0, 1.0]), pi=np.array([-2.0, 2.0]), G=np.array([0.5, 0.5]))
    stats = scatter_statistics(density)
    assert stats.dQ == pytest.approx(1.0)
    assert stats.dpi == pytest.approx(2.0)
    assert stats.product == pytest.approx(2.0)


def test_dimension_mismatch(basis):
    with pytest.raises(DimensionError):
        trajectory_density(DensityOperator.maximally_mixed(4), basis)


def test_density_csv(tmp_path, basis, kinetic_ops):
    density = trajectory_density(DensityOperator.maximally_mixed(kinetic_ops.dim), basis, time=0.5)
    path = tmp_path / "G.csv"
    write_densities([density], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,Q,pi,G"
    assert len(lines) == 1 + kinetic_ops.dim
    assert lines[1].startswith("0.5,")
