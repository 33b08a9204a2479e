import numpy as np
import pytest
from numpy.testing import assert_allclose

from dualchart.classical.phase_space import PhysicalConstants
from dualchart.exceptions import DimensionError, NonHermitianError, TruncationError
from dualchart.quantum.operators import (
    OperatorMatrix,
    annihilation,
    build_operators,
    commutator_suite,
    load_operator_set,
    quadratures,
    save_operator_set,
)


def test_annihilation_lowers_levels():
    a = annihilation(5)
    state = np.zeros(5)
    state[3] = 1.0
    assert_allclose(a @ state, np.sqrt(3) * np.eye(5)[2])


def test_quadrature_commutator_below_cutoff():
    d, hbar = 12, 0.9
    x, p = quadratures(d, hbar, mass=1.3)
    commutator = x @ p - p @ x
    assert_allclose(commutator[:-1, :-1], 1j * hbar * np.eye(d - 1), atol=1e-12)
    assert commutator[-1, -1] == pytest.approx(-1j * hbar * (d - 1))


@pytest.mark.parametrize("realization", ["fock", "kinetic"])
def test_interior_commutator_algebra(constants, realization):
    ops = build_operators(12, 12, constants, realization)
    report = commutator_suite(ops)
    assert report.interior_dim == 36
    assert report.max_interior_defect() < 1e-10
    assert report.row("[q,p]").full_defect > 1.0


def test_kinetic_pair_commutes_on_full_space(constants):
    ops = build_operators(10, 10, constants, "kinetic")
    commutator = ops.Q.commutator(ops.pi)
    assert np.max(np.abs(commutator)) < 1e-10


def test_fock_pair_only_commutes_in_interior(constants):
    report = commutator_suite(build_operators(10, 10, constants, "fock"))
    row = report.row("[Q,pi]")
    assert row.interior_defect < 1e-10
    assert row.full_defect > 1e-3


def test_decoupled_composites_are_canonical():
    k = PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9, decoupled=True)
    ops = build_operators(8, 8, k)
    assert np.array_equal(ops.Q.entries, ops.q.entries)
    assert np.array_equal(ops.pi.entries, ops.p.entries)


def test_operators_are_hermitian(constants):
    for op in build_operators(8, 9, constants, "kinetic").as_dict().values():
        assert_allclose(op.entries, op.entries.conj().T, atol=1e-14)


def test_truncation_too_small(constants):
    with pytest.raises(TruncationError):
        build_operators(7, 12, constants)


def test_operator_matrix_validation():
    with pytest.raises(DimensionError):
        OperatorMatrix(np.zeros((2, 3)))
    with pytest.raises(NonHermitianError):
        OperatorMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian_flag=True, name="a")
    with pytest.raises(DimensionError):
        OperatorMatrix(np.eye(2)).commutator(OperatorMatrix(np.eye(3)))


def test_operator_archive_round_trip(tmp_path, constants):
    ops = build_operators(8, 8, constants, "kinetic", omega_particle=1.5)
    path = tmp_path / "ops.npz"
    save_operator_set(ops, path)
    loaded = load_operator_set(path)
    assert loaded.realization == "kinetic"
    assert loaded.frequencies == (1.5, 1.0)
    assert loaded.constants == constants
    for name, op in ops.as_dict().items():
        assert np.array_equal(loaded.as_dict()[name].entries, op.entries)
