"""
Joint eigenbasis of the commuting pair (𝒬̂, π̂), the trajectory density
G_k = ⟨𝒬_k, π_k|ρ|𝒬_k, π_k⟩ and the scatter statistics of G.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional

import numpy as np
from scipy import linalg

from dualchart.exceptions import DimensionError, NonCommutingError
from dualchart.quantum.density import DensityOperator
from dualchart.quantum.operators import OperatorMatrix

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8
NEGATIVITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class JointBasis:
    """
    Orthonormal columns |𝒬_k, π_k⟩ with Rayleigh-quotient eigenvalue pairs.

    Residuals are ‖𝒬̂v − 𝒬_k v‖ and ‖π̂v − π_k v‖ per column.
    """
    vectors: np.ndarray
    Q_values: np.ndarray
    pi_values: np.ndarray
    Q_residuals: np.ndarray
    pi_residuals: np.ndarray
    gamma: float
    defect: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def max_residual(self) -> float:
        return float(max(np.max(self.Q_residuals), np.max(self.pi_residuals)))

    def completeness_error(self) -> float:
        """max |Σ_k |v_k⟩⟨v_k| − I|."""
        V = self.vectors
        return float(np.max(np.abs(V @ V.conj().T - np.eye(self.dim))))

    def permuted(self, order: np.ndarray) -> "JointBasis":
        return JointBasis(self.vectors[:, order], self.Q_values[order], self.pi_values[order],
                          self.Q_residuals[order], self.pi_residuals[order], self.gamma, self.defect)


def commutator_defect(A: OperatorMatrix, B: OperatorMatrix, subspace: Optional[np.ndarray] = None) -> float:
    """Spectral norm of [A, B], optionally restricted to the given basis columns."""
    commutator = A.commutator(B)
    if subspace is not None:
        commutator = commutator[:, subspace]
    return float(np.linalg.norm(commutator, 2))


def _refine_clusters(vectors: np.ndarray, values: np.ndarray, A: np.ndarray, tol: float) -> np.ndarray:
    """Rediagonalize A inside each cluster of nearly equal eigenvalues."""
    k = 0
    n = len(values)
    while k < n:
        scale = max(tol, tol * abs(values[k]))
        cluster = np.flatnonzero(np.abs(values - values[k]) < scale)
        cluster = cluster[cluster >= k]
        if len(cluster) > 1:
            block = vectors[:, cluster]
            _, rotation = linalg.eigh(block.conj().T @ A @ block)
            vectors[:, cluster] = block @ rotation
        k = cluster[-1] + 1 if len(cluster) else k + 1
    return vectors


def joint_eigenbasis(
    Q: OperatorMatrix,
    pi: OperatorMatrix,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = 0,
    subspace: Optional[np.ndarray] = None,
    cluster_tolerance: float = 1e-9,
) -> JointBasis:
    """
    Simultaneously diagonalize a commuting hermitian pair.

    Diagonalizes Q + γπ for a generic γ drawn from a seeded generator, then
    rediagonalizes Q inside near-degenerate clusters.

    Args:
        Q, pi: The operator pair.
        tolerance: Largest accepted commutator defect.
        seed: Seed for γ.
        subspace: Optional basis indices on which the defect is measured.
        cluster_tolerance: Relative gap below which eigenvalues form a cluster.

    Raises:
        NonCommutingError: If the commutator defect exceeds the tolerance.
    """
    if Q.dim != pi.dim:
        raise DimensionError(f"Operators of dimension {Q.dim} and {pi.dim}")
    defect = commutator_defect(Q, pi, subspace)
    if defect > tolerance:
        raise NonCommutingError(f"Commutator defect {defect:.3e} exceeds tolerance {tolerance:.1e}", defect=defect)
    A = 0.5 * (Q.entries + Q.entries.conj().T)
    B = 0.5 * (pi.entries + pi.entries.conj().T)
    norm_a = np.linalg.norm(A, 2)
    norm_b = np.linalg.norm(B, 2)
    rng = np.random.default_rng(seed)
    gamma = float((0.5 + rng.random()) * (norm_a / norm_b if norm_b > 0 else 1.0))
    values, vectors = linalg.eigh(A + gamma * B)
    vectors = _refine_clusters(vectors, values, A, cluster_tolerance)

    Q_values = np.real(np.sum(vectors.conj() * (A @ vectors), axis=0))
    pi_values = np.real(np.sum(vectors.conj() * (B @ vectors), axis=0))
    Q_residuals = np.linalg.norm(A @ vectors - vectors * Q_values, axis=0)
    pi_residuals = np.linalg.norm(B @ vectors - vectors * pi_values, axis=0)
    basis = JointBasis(vectors, Q_values, pi_values, Q_residuals, pi_residuals, gamma, defect)
    logger.debug(f"Joint eigenbasis: dim={basis.dim}, gamma={gamma:.4f}, max residual {basis.max_residual:.3e}")
    return basis


@dataclass(frozen=True)
class TrajectoryDensity:
    """G_k ≥ 0 on the joint eigenvalue grid (𝒬_k, π_k) at one time."""
    Q: np.ndarray
    pi: np.ndarray
    G: np.ndarray
    time: float = 0.0

    @property
    def total(self) -> float:
        return float(np.sum(self.G))

    @property
    def min_value(self) -> float:
        return float(np.min(self.G))


def trajectory_density(rho: DensityOperator, basis: JointBasis, time: float = 0.0) -> TrajectoryDensity:
    """
    G_k = Re⟨v_k|ρ|v_k⟩.

    Raises:
        DimensionError: If ρ and the basis live on different spaces.
    """
    if rho.dim != basis.dim:
        raise DimensionError(f"Density of dimension {rho.dim} against a basis of dimension {basis.dim}")
    V = basis.vectors
    G = np.real(np.sum(V.conj() * (rho.entries @ V), axis=0))
    if G.min() < -NEGATIVITY_TOLERANCE:
        logger.warning(f"Trajectory density has a negative entry {G.min():.3e} at t={time}")
    return TrajectoryDensity(Q=basis.Q_values.copy(), pi=basis.pi_values.copy(), G=G, time=float(time))


@dataclass(frozen=True)
class ScatterStatistics:
    dQ: float
    dpi: float
    product: float
    zero_variance: bool


def scatter_statistics(density: TrajectoryDensity, threshold: float = 1e-14) -> ScatterStatistics:
    """
    Standard deviations of the 𝒬 and π marginals of G and their product.

    A single-point (or numerically single-point) G is flagged rather than
    rejected.
    """
    weights = np.clip(density.G, 0.0, None)
    total = weights.sum()
    if total <= 0:
        return ScatterStatistics(0.0, 0.0, 0.0, True)
    weights = weights / total
    mean_Q = float(np.dot(weights, density.Q))
    mean_pi = float(np.dot(weights, density.pi))
    dQ = float(np.sqrt(max(np.dot(weights, (density.Q - mean_Q) ** 2), 0.0)))
    dpi = float(np.sqrt(max(np.dot(weights, (density.pi - mean_pi) ** 2), 0.0)))
    zero_variance = dQ ** 2 < threshold or dpi ** 2 < threshold
    if zero_variance:
        logger.warning(f"Zero-variance trajectory density at t={density.time}: a single joint eigenstate carries the weight")
    return ScatterStatistics(dQ, dpi, dQ * dpi, zero_variance)


def write_densities(densities: Iterable[TrajectoryDensity], path: Path) -> None:
    """Rows (t, Q, pi, G)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "Q", "pi", "G"])
        for density in densities:
            for Q, pi, G in zip(density.Q, density.pi, density.G):
                writer.writerow([repr(density.time), repr(float(Q)), repr(float(pi)), repr(float(G))])
