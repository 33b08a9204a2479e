"""
Position-grid realization of the particle in an external connection.

π̂_μ = −iħ δ_μ − κ B_μ(x) on a uniform grid with zero values outside, where
δ_μ is the sparse central difference. [π̂_μ, π̂_ν] is compared with iħκ F_μν ψ
on a Gaussian ψ well inside the grid.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from dualchart.classical.phase_space import PhysicalConstants
from dualchart.exceptions import AxisError, DimensionError, DualChartError
from dualchart.utils.numerics import convergence_order

logger = logging.getLogger(__name__)

# Gaussian width in units of the grid half-width
WIDTH_IN_SIGMAS = 4.0
COARSE_RATIO = 0.25

Profile = Callable[..., Sequence[np.ndarray]]


def zero_profile(*x):
    return [np.zeros_like(x[0]) for _ in x]


def symmetric_profile(b: float = 1.0) -> Profile:
    """B = (−b x₂/2, b x₁/2): uniform F_12 = b."""
    def profile(*x):
        components = [np.zeros_like(x[0]) for _ in x]
        components[0] = -0.5 * b * x[1]
        components[1] = 0.5 * b * x[0]
        return components
    return profile


def separable_pure_gauge(*x):
    """B = ∇λ for λ = sin x₁ + x₂²/2 (+ x_μ²/2 on further axes)."""
    components = [np.array(xi) for xi in x]
    components[0] = np.cos(x[0])
    return components


@dataclass(frozen=True)
class PositionGrid:
    """Uniform grid of `points` per axis on [−width, width]^N."""
    points: int
    width: float
    ndim: int = 2

    def __post_init__(self):
        if self.points < 5:
            raise DimensionError(f"Grid needs at least 5 points per axis, got {self.points}")
        if self.ndim < 2:
            raise DimensionError("Kinetic momentum curvature needs at least two particle dimensions")
        if not self.width > 0:
            raise DualChartError(f"Grid width must be positive, got {self.width}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.width / (self.points - 1)

    @property
    def size(self) -> int:
        return self.points ** self.ndim

    def axis(self) -> np.ndarray:
        return np.linspace(-self.width, self.width, self.points)

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.ndim), indexing="ij")

    def difference(self, mu: int) -> sparse.csr_matrix:
        """Central difference along axis mu as a sparse matrix on the flattened grid."""
        if not 0 <= mu < self.ndim:
            raise AxisError(f"Axis {mu} out of range for a {self.ndim}-dimensional grid")
        n = self.points
        one_d = sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1]) / (2.0 * self.spacing)
        factors = [sparse.identity(n, format="csr")] * self.ndim
        factors[mu] = one_d
        operator = factors[0]
        for factor in factors[1:]:
            operator = sparse.kron(operator, factor, format="csr")
        return operator.tocsr()


@dataclass(frozen=True)
class KineticMomenta:
    grid: PositionGrid
    operators: Tuple[sparse.csr_matrix, ...]
    field: Tuple[np.ndarray, ...]


def kinetic_momenta(grid: PositionGrid, profile: Profile, k: PhysicalConstants) -> KineticMomenta:
    """π̂_μ = −iħ δ_μ − κ B_μ(x̂) for every axis."""
    components = profile(*grid.coordinates())
    if len(components) != grid.ndim:
        raise DimensionError(f"Profile returned {len(components)} components for {grid.ndim} axes")
    kappa = k.momentum_shift
    operators = []
    fields = []
    for mu in range(grid.ndim):
        B_mu = np.broadcast_to(np.asarray(components[mu], dtype=float), (grid.points,) * grid.ndim).reshape(-1)
        operators.append((-1j * k.hbar * grid.difference(mu) - kappa * sparse.diags(B_mu)).tocsr())
        fields.append(B_mu)
    return KineticMomenta(grid, tuple(operators), tuple(fields))


def gaussian_packet(grid: PositionGrid, sigma: Optional[float] = None) -> np.ndarray:
    """Normalized real Gaussian exp(−r²/2σ²) centred on the grid."""
    sigma = sigma or grid.width / WIDTH_IN_SIGMAS
    r2 = sum(x ** 2 for x in grid.coordinates())
    psi = np.exp(-r2 / (2.0 * sigma ** 2)).reshape(-1).astype(complex)
    return psi / np.linalg.norm(psi)


@dataclass(frozen=True)
class GridCommutatorCheck:
    """
    Result of one [π̂_μ, π̂_ν]ψ comparison.

    `residual` is ‖Cψ − iħκFψ‖/‖ψ‖; `relative_error` divides it by
    ‖iħκFψ‖/‖ψ‖ when F does not vanish, otherwise equals the residual.
    """
    points: int
    spacing: float
    sigma: float
    residual: float
    relative_error: float
    field_norm: float
    coarse: bool


def kinetic_momentum_curvature(
    profile: Profile,
    points: int,
    k: PhysicalConstants,
    field_strength: Union[float, Callable[..., np.ndarray]] = 0.0,
    width: float = 4.0,
    sigma: Optional[float] = None,
    mu: int = 0,
    nu: int = 1,
    ndim: int = 2,
) -> GridCommutatorCheck:
    """
    Check [π̂_μ, π̂_ν] = (2imħ/c) F_μν on a Gaussian test state.

    Args:
        profile: B as a function of the coordinate grids.
        points: Grid points per axis.
        k: Physical constants.
        field_strength: Exact F_μν, constant or function of the coordinate grids.
        width: Half-width of the grid.
        sigma: Gaussian width; defaults to width / 4.
    """
    grid = PositionGrid(points, width, ndim)
    sigma = sigma or width / WIDTH_IN_SIGMAS
    coarse = grid.spacing / sigma > COARSE_RATIO
    if coarse:
        logger.warning(f"Grid spacing {grid.spacing:.4f} exceeds {COARSE_RATIO} sigma; commutator is discretization-dominated")
    momenta = kinetic_momenta(grid, profile, k)
    psi = gaussian_packet(grid, sigma)
    A, B = momenta.operators[mu], momenta.operators[nu]
    commuted = A @ (B @ psi) - B @ (A @ psi)
    if callable(field_strength):
        F = np.asarray(field_strength(*grid.coordinates()), dtype=float).reshape(-1)
    else:
        F = np.full(grid.size, float(field_strength))
    expected = 1j * k.hbar * k.momentum_shift * F * psi
    residual = float(np.linalg.norm(commuted - expected))
    scale = float(np.linalg.norm(expected))
    relative = residual / scale if scale > 0 else residual
    field_norm = float(np.linalg.norm(momenta.field[mu] * psi) + np.linalg.norm(momenta.field[nu] * psi))
    return GridCommutatorCheck(points, grid.spacing, sigma, residual, relative, field_norm, coarse)


def grid_convergence(
    profile: Profile,
    point_counts: Sequence[int],
    k: PhysicalConstants,
    field_strength: Union[float, Callable[..., np.ndarray]],
    width: float = 4.0,
) -> Tuple[List[GridCommutatorCheck], float]:
    """Commutator error for each grid size at fixed width and σ, with the fitted order."""
    checks = [kinetic_momentum_curvature(profile, n, k, field_strength, width) for n in point_counts]
    order = convergence_order([c.spacing for c in checks], [c.residual for c in checks])
    return checks, order
