"""
Density operators and their unitary evolution ρ(t) = U ρ U†, U = exp(−iHt/ħ).
"""
import logging
from dataclasses import InitVar, dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from dualchart.exceptions import DimensionError, DualChartError, NonHermitianError
from dualchart.quantum.operators import HERMITIAN_TOLERANCE, OperatorMatrix, OperatorSet, hermiticity_defect

logger = logging.getLogger(__name__)

TRACE_TOLERANCE = 1e-10
POSITIVITY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class DensityOperator:
    """
    Hermitian, positive semidefinite, unit-trace matrix.

    When built from an ensemble, `weights` and `states` keep the p_j and |ψ_j⟩.
    `check_positivity=False` skips the eigenvalue test for matrices known to be
    unitary images of a valid density.
    """
    matrix: OperatorMatrix
    weights: Optional[Tuple[float, ...]] = None
    states: Optional[Tuple[np.ndarray, ...]] = None
    check_positivity: InitVar[bool] = True

    def __post_init__(self, check_positivity: bool):
        matrix = self.matrix
        if not isinstance(matrix, OperatorMatrix):
            matrix = OperatorMatrix(matrix, hermitian_flag=True, name="rho")
            object.__setattr__(self, "matrix", matrix)
        entries = matrix.entries
        defect = hermiticity_defect(entries)
        if defect >= HERMITIAN_TOLERANCE:
            raise NonHermitianError(f"Density matrix is not hermitian: |ρ − ρ†| = {defect:.3e}")
        if abs(self.trace - 1.0) > TRACE_TOLERANCE:
            raise DualChartError(f"Density matrix trace is {self.trace!r}, expected 1")
        if check_positivity and self.min_eigenvalue < -POSITIVITY_TOLERANCE:
            raise DualChartError(f"Density matrix has negative eigenvalue {self.min_eigenvalue:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix.entries)))

    @property
    def purity(self) -> float:
        rho = self.matrix.entries
        return float(np.real(np.trace(rho @ rho)))

    @property
    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(self.matrix.entries)[0])

    def expectation(self, operator: OperatorMatrix) -> complex:
        return complex(np.trace(self.matrix.entries @ operator.entries))

    @classmethod
    def pure(cls, vector: Sequence[complex]) -> "DensityOperator":
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vector)
        if norm == 0:
            raise DualChartError("Cannot build a pure state from the zero vector")
        vector = vector / norm
        return cls(OperatorMatrix(np.outer(vector, vector.conj()), hermitian_flag=True, name="rho"),
                   weights=(1.0,), states=(vector,))

    @classmethod
    def from_ensemble(cls, weights: Sequence[float], states: Sequence[Sequence[complex]]) -> "DensityOperator":
        """
        ρ = Σ_j p_j |ψ_j⟩⟨ψ_j| with normalized ψ_j.

        Raises:
            DualChartError: If a weight is negative or the weights do not sum to 1.
        """
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(states) or len(weights) == 0:
            raise DimensionError(f"{len(weights)} weights for {len(states)} states")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise DualChartError(f"Ensemble weights must be non-negative and sum to 1, got {weights.tolist()}")
        vectors = []
        for psi in states:
            psi = np.asarray(psi, dtype=complex).reshape(-1)
            vectors.append(psi / np.linalg.norm(psi))
        if len({len(v) for v in vectors}) != 1:
            raise DimensionError("Ensemble states differ in dimension")
        rho = sum(w * np.outer(v, v.conj()) for w, v in zip(weights, vectors))
        rho = 0.5 * (rho + rho.conj().T)
        return cls(OperatorMatrix(rho, hermitian_flag=True, name="rho"),
                   weights=tuple(float(w) for w in weights), states=tuple(vectors))

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityOperator":
        return cls(OperatorMatrix(np.eye(d) / d, hermitian_flag=True, name="rho"))


def _symmetrized(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


class Propagator:
    """
    exp(−iHt/ħ) from one eigendecomposition of H, reused for every t.
    """

    def __init__(self, H: OperatorMatrix, hbar: float = 1.0):
        defect = hermiticity_defect(H.entries)
        if defect >= HERMITIAN_TOLERANCE:
            raise NonHermitianError(f"Hamiltonian is not hermitian: |H − H†| = {defect:.3e}")
        if hbar <= 0:
            raise DualChartError(f"ħ must be positive, got {hbar}")
        self.H = H
        self.hbar = hbar
        self.energies, self.vectors = linalg.eigh(_symmetrized(H.entries))

    @property
    def dim(self) -> int:
        return self.H.dim

    def unitary(self, t: float) -> np.ndarray:
        phases = np.exp(-1j * self.energies * t / self.hbar)
        return (self.vectors * phases) @ self.vectors.conj().T

    def evolve(self, rho: DensityOperator, t: float) -> DensityOperator:
        if rho.dim != self.dim:
            raise DimensionError(f"Density of dimension {rho.dim} under a Hamiltonian of dimension {self.dim}")
        if t == 0:
            return rho
        # rotate into the eigenbasis, apply phases, rotate back
        rho_e = self.vectors.conj().T @ rho.entries @ self.vectors
        phases = np.exp(-1j * self.energies * t / self.hbar)
        rho_e = phases[:, None] * rho_e * phases.conj()[None, :]
        evolved = _symmetrized(self.vectors @ rho_e @ self.vectors.conj().T)
        return DensityOperator(OperatorMatrix(evolved, hermitian_flag=True, name="rho"), check_positivity=False)

    def evolve_state(self, psi: np.ndarray, t: float) -> np.ndarray:
        return self.unitary(t) @ np.asarray(psi, dtype=complex)


def evolve_density(rho0: DensityOperator, H: OperatorMatrix, t: float, hbar: float = 1.0) -> DensityOperator:
    """
    ρ(t) = U(t) ρ0 U†(t) with U = exp(−iHt/ħ) via the eigendecomposition of H.

    Raises:
        NonHermitianError: If H is not hermitian.
    """
    return Propagator(H, hbar).evolve(rho0, t)


def short_time_error(rho0: DensityOperator, H: OperatorMatrix, t: float, hbar: float = 1.0) -> float:
    """Max deviation of ρ(t) from the first-order series ρ0 − (it/ħ)[H, ρ0]."""
    exact = evolve_density(rho0, H, t, hbar).entries
    commutator = H.entries @ rho0.entries - rho0.entries @ H.entries
    series = rho0.entries - 1j * t / hbar * commutator
    return float(np.max(np.abs(exact - series)))


def system_hamiltonian(ops: OperatorSet, omega0: float = 1.0) -> OperatorMatrix:
    """Quantised H = π̂²/2m + ½(π̂_B² + ω₀² B̂²)."""
    m = ops.constants.m
    pi = ops.pi.entries
    piB = ops.piB.entries
    B = ops.B.entries
    H = pi @ pi / (2.0 * m) + 0.5 * (piB @ piB + omega0 ** 2 * B @ B)
    return OperatorMatrix(_symmetrized(H), hermitian_flag=True, name="H")


def ground_state(H: OperatorMatrix) -> DensityOperator:
    """Projector on the lowest eigenvector of H."""
    _, vectors = linalg.eigh(_symmetrized(H.entries))
    return DensityOperator.pure(vectors[:, 0])


def gaussian_state(
    ops: OperatorSet,
    centre: Sequence[float],
    widths: Optional[Sequence[float]] = None,
) -> DensityOperator:
    """
    Minimum-uncertainty product state centred at (q₀, p₀, B₀, π_B0).

    Built as the ground state of the displaced reference oscillator
    (q − q₀)²/2ℓ_q² + ℓ_q²(p − p₀)²/2ħ² plus the same form in (B, π_B),
    so it is Gaussian in the canonical pairs for either realization.
    Default lengths are the quadrature scales √(ħ/mω) and √(ħ/ω).
    """
    q0, p0, B0, piB0 = (float(v) for v in centre)
    hbar = ops.constants.hbar
    if widths is None:
        omega_p, omega_f = ops.frequencies
        widths = (np.sqrt(hbar / (ops.constants.m * omega_p)), np.sqrt(hbar / omega_f))
    l_q, l_B = (float(w) for w in widths)
    identity = ops.identity()

    def displaced_square(op: OperatorMatrix, value: float) -> np.ndarray:
        shifted = op.entries - value * identity
        return shifted @ shifted

    reference = (
        displaced_square(ops.q, q0) / (2 * l_q ** 2)
        + l_q ** 2 * displaced_square(ops.p, p0) / (2 * hbar ** 2)
        + displaced_square(ops.B, B0) / (2 * l_B ** 2)
        + l_B ** 2 * displaced_square(ops.piB, piB0) / (2 * hbar ** 2)
    )
    return ground_state(OperatorMatrix(_symmetrized(reference), hermitian_flag=True, name="H_ref"))


@dataclass(frozen=True)
class EvolutionDiagnostics:
    """Worst deviations of the density invariants over a set of sample times."""
    trace_error: float
    purity_error: float
    min_eigenvalue: float
    reversal_error: float


def evolution_diagnostics(propagator: Propagator, rho0: DensityOperator, times: Sequence[float]) -> EvolutionDiagnostics:
    trace_error = 0.0
    purity_error = 0.0
    min_eigenvalue = np.inf
    reversal_error = 0.0
    purity0 = rho0.purity
    for t in times:
        rho = propagator.evolve(rho0, t)
        trace_error = max(trace_error, abs(rho.trace - 1.0))
        purity_error = max(purity_error, abs(rho.purity - purity0))
        min_eigenvalue = min(min_eigenvalue, rho.min_eigenvalue)
        back = propagator.evolve(rho, -t)
        reversal_error = max(reversal_error, float(np.max(np.abs(back.entries - rho0.entries))))
    return EvolutionDiagnostics(trace_error, purity_error, float(min_eigenvalue), reversal_error)
