"""
Abelian connection sampled on a uniform spatial lattice.

The covariant derivative D_μ = ∂_μ − iε B_μ (ε = 1/2mχ) uses central
differences. Results are numpy masked arrays: the outermost layer of points is
masked, and each further central difference masks every point whose stencil
touches a masked one, so reductions only ever see valid interior values.

Curvature is recovered from [D_μ, D_ν] f = −iε F_μν f. Holonomy uses link
phases exp(−iε a B̄_μ) with B̄ the average of B over the link.
"""
import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from dualchart.classical.phase_space import PhysicalConstants
from dualchart.exceptions import (
    AxisError,
    DegenerateTestFieldError,
    DimensionError,
    DualChartError,
    PlaquetteOutOfGridError,
)
from dualchart.utils.numerics import convergence_order

logger = logging.getLogger(__name__)

TEST_FIELD_THRESHOLD = 1e-12
# default plane-wave phase advance per lattice step
DEFAULT_PHASE_PER_STEP = 0.03

LatticeField = Union[np.ndarray, np.ma.MaskedArray]


@dataclass(frozen=True)
class LatticeConnection:
    """
    Connection components B_μ(x) on a uniform grid.

    Attributes:
        dims: Grid shape (n₁, …, n_N).
        spacing: Lattice step per axis.
        B: Array of shape (N, n₁, …, n_N).
        constants: Physical constants; only m and χ enter.
    """
    dims: Tuple[int, ...]
    spacing: Tuple[float, ...]
    B: np.ndarray
    constants: PhysicalConstants

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        spacing = self.spacing
        if np.isscalar(spacing):
            spacing = (float(spacing),) * len(dims)
        spacing = tuple(float(a) for a in spacing)
        if len(spacing) != len(dims):
            raise DimensionError(f"{len(spacing)} spacings for a {len(dims)}-dimensional grid")
        if any(not np.isfinite(a) or a <= 0 for a in spacing):
            raise DualChartError(f"Lattice spacing must be positive, got {spacing}")
        if any(n < 3 for n in dims):
            raise DimensionError(f"Every axis needs at least 3 points, got {dims}")
        B = np.array(self.B, dtype=float)
        if B.shape != (len(dims),) + dims:
            raise DimensionError(f"Connection must have shape {(len(dims),) + dims}, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise DualChartError("Connection samples must be finite")
        B.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "spacing", spacing)
        object.__setattr__(self, "B", B)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def coupling(self) -> float:
        return self.constants.covariant_coupling

    def check_axis(self, mu: int) -> None:
        if not 0 <= mu < self.ndim:
            raise AxisError(f"Axis {mu} out of range for a {self.ndim}-dimensional lattice")

    def axis_coordinates(self, mu: int) -> np.ndarray:
        """Coordinates along one axis, centred on the middle of the grid."""
        self.check_axis(mu)
        n = self.dims[mu]
        return (np.arange(n) - (n - 1) / 2.0) * self.spacing[mu]

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*[self.axis_coordinates(mu) for mu in range(self.ndim)], indexing="ij")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.B)))


def from_function(
    dims: Sequence[int],
    spacing: Union[float, Sequence[float]],
    constants: PhysicalConstants,
    profile: Callable[..., Sequence[np.ndarray]],
) -> LatticeConnection:
    """Sample `profile(*coordinate_grids)` → (B_1, …, B_N) on the grid."""
    dims = tuple(int(n) for n in dims)
    blank = LatticeConnection(dims, spacing, np.zeros((len(dims),) + dims), constants)
    grids = blank.coordinates()
    components = [np.broadcast_to(np.asarray(c, dtype=float), dims) for c in profile(*grids)]
    return LatticeConnection(dims, blank.spacing, np.stack(components), constants)


def zero_connection(dims, spacing, constants: PhysicalConstants) -> LatticeConnection:
    dims = tuple(int(n) for n in dims)
    return LatticeConnection(dims, spacing, np.zeros((len(dims),) + dims), constants)


def constant_connection(dims, spacing, constants: PhysicalConstants, values: Sequence[float]) -> LatticeConnection:
    return from_function(dims, spacing, constants, lambda *x: [np.full_like(x[0], v) for v in values])


def symmetric_gauge(dims, spacing, constants: PhysicalConstants, b: float = 1.0) -> LatticeConnection:
    """Uniform field F_12 = b in the gauge B = (−b x₂/2, b x₁/2, 0, …)."""
    def profile(*x):
        components = [np.zeros_like(x[0]) for _ in x]
        components[0] = -0.5 * b * x[1]
        components[1] = 0.5 * b * x[0]
        return components
    if len(dims) < 2:
        raise DimensionError("Symmetric gauge needs at least two axes")
    return from_function(dims, spacing, constants, profile)


def pure_gauge(dims, spacing, constants: PhysicalConstants, gradient: Optional[Callable[..., Sequence[np.ndarray]]] = None) -> LatticeConnection:
    """B = ∇λ; by default λ = x₁x₂, so B = (x₂, x₁, 0, …)."""
    if gradient is None:
        if len(dims) < 2:
            raise DimensionError("Default pure gauge needs at least two axes")

        def gradient(*x):
            components = [np.zeros_like(x[0]) for _ in x]
            components[0] = np.array(x[1])
            components[1] = np.array(x[0])
            return components
    return from_function(dims, spacing, constants, gradient)


def polynomial_connection(dims, spacing, constants: PhysicalConstants, rng: np.random.Generator, degree: int = 2, scale: float = 1.0) -> LatticeConnection:
    """Each B_μ a random polynomial of the given total degree in the coordinates."""
    ndim = len(dims)
    exponents = [e for e in np.ndindex(*([degree + 1] * ndim)) if sum(e) <= degree]
    coefficients = scale * rng.standard_normal((ndim, len(exponents)))

    def profile(*x):
        components = []
        for mu in range(ndim):
            total = np.zeros_like(x[0])
            for c, e in zip(coefficients[mu], exponents):
                total = total + c * np.prod([x[i] ** e[i] for i in range(ndim)], axis=0)
            components.append(total)
        return components
    return from_function(dims, spacing, constants, profile)


def gauge_shift(conn: LatticeConnection, lam: np.ndarray) -> LatticeConnection:
    """B → B + ∇λ for gauge-function samples λ on the same grid."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape != conn.dims:
        raise DimensionError(f"Gauge function must have shape {conn.dims}, got {lam.shape}")
    grads = np.gradient(lam, *conn.spacing, edge_order=2)
    if conn.ndim == 1:
        grads = [grads]
    return LatticeConnection(conn.dims, conn.spacing, conn.B + np.stack(grads), conn.constants)


# derivatives

def _boundary_mask(shape: Tuple[int, ...], axis: int) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    edge = [slice(None)] * len(shape)
    edge[axis] = 0
    mask[tuple(edge)] = True
    edge[axis] = -1
    mask[tuple(edge)] = True
    return mask


def central_difference(f: LatticeField, axis: int, a: float) -> np.ma.MaskedArray:
    """Masked central difference along one axis."""
    data = np.ma.getdata(f)
    mask = np.ma.getmaskarray(f)
    derivative = (np.roll(data, -1, axis=axis) - np.roll(data, 1, axis=axis)) / (2.0 * a)
    new_mask = mask | np.roll(mask, -1, axis=axis) | np.roll(mask, 1, axis=axis) | _boundary_mask(data.shape, axis)
    return np.ma.MaskedArray(derivative, mask=new_mask)


def covariant_derivative(conn: LatticeConnection, f: LatticeField, mu: int) -> np.ma.MaskedArray:
    """
    D_μ f = ∂_μ f − iε B_μ f at interior points.

    Args:
        conn: The connection.
        f: Complex lattice field (plain or masked) on the same grid.
        mu: Axis index.

    Returns:
        Masked complex array; boundary points are masked.

    Raises:
        AxisError: If mu is out of range.
        DimensionError: If f is not defined on the connection's grid.
    """
    conn.check_axis(mu)
    if np.shape(f) != conn.dims:
        raise DimensionError(f"Field shape {np.shape(f)} does not match grid {conn.dims}")
    derivative = central_difference(np.ma.asarray(f).astype(complex), mu, conn.spacing[mu])
    return derivative - 1j * conn.coupling * conn.B[mu] * f


def plane_wave(conn: LatticeConnection, wavevector: Optional[Sequence[float]] = None) -> np.ndarray:
    """exp(i k·x); the default k advances the phase by a fixed amount per step."""
    if wavevector is None:
        wavevector = [DEFAULT_PHASE_PER_STEP / a for a in conn.spacing]
    wavevector = np.asarray(wavevector, dtype=float)
    if len(wavevector) != conn.ndim:
        raise DimensionError(f"Wavevector needs {conn.ndim} components, got {len(wavevector)}")
    phase = sum(k * x for k, x in zip(wavevector, conn.coordinates()))
    return np.exp(1j * phase)


def modulated_wave(conn: LatticeConnection, wavevector: Optional[Sequence[float]] = None, width: Optional[float] = None) -> np.ndarray:
    """A second admissible test field: a plane wave under a wide Gaussian envelope."""
    if width is None:
        width = max(n * a for n, a in zip(conn.dims, conn.spacing))
    envelope = np.exp(-sum(x ** 2 for x in conn.coordinates()) / (2.0 * width ** 2))
    return envelope * plane_wave(conn, wavevector)


@dataclass(frozen=True)
class CurvatureTensor:
    """
    F_μν on the lattice, shape (N, N, n₁, …, n_N), masked outside the valid interior.

    F[ν, μ] is stored as the exact negation of F[μ, ν].
    """
    F: np.ma.MaskedArray

    @property
    def ndim(self) -> int:
        return self.F.shape[0]

    def component(self, mu: int, nu: int) -> np.ma.MaskedArray:
        return self.F[mu, nu]

    def max_abs(self) -> float:
        value = np.ma.max(np.ma.abs(self.F))
        return 0.0 if value is np.ma.masked else float(value)

    def max_error(self, exact: Union["CurvatureTensor", Callable[[int, int], np.ndarray]], mu: int = 0, nu: int = 1) -> float:
        """Largest interior difference of one component against a reference."""
        reference = exact.component(mu, nu) if isinstance(exact, CurvatureTensor) else exact(mu, nu)
        diff = np.ma.abs(self.component(mu, nu) - reference)
        value = np.ma.max(diff)
        return 0.0 if value is np.ma.masked else float(value)

    def interior_values(self, mu: int, nu: int) -> np.ndarray:
        return self.component(mu, nu).compressed()


def _antisymmetric(components: dict, ndim: int, shape: Tuple[int, ...], mask: np.ndarray) -> CurvatureTensor:
    F = np.zeros((ndim, ndim) + shape)
    for (mu, nu), values in components.items():
        F[mu, nu] = values
        F[nu, mu] = -F[mu, nu]
    full_mask = np.broadcast_to(mask, (ndim, ndim) + shape)
    return CurvatureTensor(np.ma.MaskedArray(F, mask=full_mask.copy()))


def curvature_from_commutator(conn: LatticeConnection, f: Optional[LatticeField] = None) -> CurvatureTensor:
    """
    Solve [D_μ, D_ν] f = −iε F_μν f for F at interior points.

    Raises:
        DegenerateTestFieldError: If |f| ≤ 1e−12 at a point where F is needed.
    """
    if f is None:
        f = plane_wave(conn)
    if np.shape(f) != conn.dims:
        raise DimensionError(f"Test field shape {np.shape(f)} does not match grid {conn.dims}")
    f = np.ma.asarray(f).astype(complex)
    components = {}
    mask = None
    for mu in range(conn.ndim):
        for nu in range(mu + 1, conn.ndim):
            commutator = (
                covariant_derivative(conn, covariant_derivative(conn, f, nu), mu)
                - covariant_derivative(conn, covariant_derivative(conn, f, mu), nu)
            )
            valid = ~np.ma.getmaskarray(commutator)
            small = valid & (np.abs(np.ma.getdata(f)) <= TEST_FIELD_THRESHOLD)
            if np.any(small):
                point = tuple(int(i) for i in np.argwhere(small)[0])
                raise DegenerateTestFieldError(f"Test field vanishes at lattice point {point}", point=point)
            safe = np.where(valid, np.ma.getdata(f), 1.0)
            values = np.real(1j * np.ma.getdata(commutator) / (conn.coupling * safe))
            components[(mu, nu)] = np.where(valid, values, 0.0)
            mask = ~valid if mask is None else mask | ~valid
    if mask is None:
        mask = np.ones(conn.dims, dtype=bool)
    return _antisymmetric(components, conn.ndim, conn.dims, mask)


def analytic_curl(conn: LatticeConnection) -> CurvatureTensor:
    """Direct curl ∂_μB_ν − ∂_νB_μ from masked central differences of B."""
    components = {}
    mask = np.zeros(conn.dims, dtype=bool)
    for mu in range(conn.ndim):
        for nu in range(mu + 1, conn.ndim):
            curl = (
                central_difference(conn.B[nu], mu, conn.spacing[mu])
                - central_difference(conn.B[mu], nu, conn.spacing[nu])
            )
            mask |= np.ma.getmaskarray(curl)
            components[(mu, nu)] = np.ma.getdata(curl)
    return _antisymmetric(components, conn.ndim, conn.dims, mask)


# holonomy

def link_angles(conn: LatticeConnection, mu: int) -> np.ndarray:
    """
    Phase angle −ε a_μ B̄_μ of each link from x to x + μ̂.

    B̄ is the trapezoid average of the endpoint samples; the array has one
    point fewer along μ.
    """
    conn.check_axis(mu)
    B = conn.B[mu]
    lo = [slice(None)] * conn.ndim
    hi = [slice(None)] * conn.ndim
    lo[mu] = slice(0, -1)
    hi[mu] = slice(1, None)
    average = 0.5 * (B[tuple(lo)] + B[tuple(hi)])
    return -conn.coupling * conn.spacing[mu] * average


def _plaquette_angles(conn: LatticeConnection, mu: int, nu: int) -> np.ndarray:
    if mu == nu:
        raise AxisError(f"Plaquette needs two distinct axes, got ({mu}, {nu})")
    theta_mu = link_angles(conn, mu)
    theta_nu = link_angles(conn, nu)

    def window(array: np.ndarray, shift_mu: int, shift_nu: int, trim_mu: bool, trim_nu: bool) -> np.ndarray:
        index = [slice(None)] * conn.ndim
        index[mu] = slice(shift_mu, shift_mu + conn.dims[mu] - 1) if trim_mu else slice(shift_mu, None)
        index[nu] = slice(shift_nu, shift_nu + conn.dims[nu] - 1) if trim_nu else slice(shift_nu, None)
        return array[tuple(index)]

    # theta_mu already has n_mu - 1 points along mu; trim along nu, and vice versa
    return (
        window(theta_mu, 0, 0, False, True)
        + window(theta_nu, 1, 0, True, False)
        - window(theta_mu, 0, 1, False, True)
        - window(theta_nu, 0, 0, True, False)
    )


def holonomy_map(conn: LatticeConnection, mu: int, nu: int) -> np.ndarray:
    """Plaquette phases at every base point whose plaquette fits in the grid."""
    return np.exp(1j * _plaquette_angles(conn, mu, nu))


def _check_inside(conn: LatticeConnection, x: Sequence[int], mu: int, nu: int, extent: Tuple[int, int]) -> Tuple[int, ...]:
    conn.check_axis(mu)
    conn.check_axis(nu)
    if mu == nu:
        raise AxisError(f"Loop needs two distinct axes, got ({mu}, {nu})")
    x = tuple(int(i) for i in x)
    if len(x) != conn.ndim:
        raise DimensionError(f"Point {x} has {len(x)} indices for a {conn.ndim}-dimensional grid")
    if extent[0] < 1 or extent[1] < 1:
        raise PlaquetteOutOfGridError(f"Loop extent must be positive, got {extent}")
    inside = all(0 <= i < n for i, n in zip(x, conn.dims))
    inside = inside and x[mu] + extent[0] < conn.dims[mu] and x[nu] + extent[1] < conn.dims[nu]
    if not inside:
        raise PlaquetteOutOfGridError(f"Loop at {x} with extent {extent} along ({mu}, {nu}) leaves the grid {conn.dims}")
    return x


def plaquette_holonomy(conn: LatticeConnection, x: Sequence[int], mu: int, nu: int) -> complex:
    """
    Product of link phases around the a×a plaquette at x, oriented μ then ν.

    Its argument is −ε F_μν a_μ a_ν + O(a³).

    Raises:
        PlaquetteOutOfGridError: If the plaquette leaves the grid.
    """
    return loop_holonomy(conn, x, mu, nu, (1, 1))


def loop_holonomy(conn: LatticeConnection, x: Sequence[int], mu: int, nu: int, extent: Tuple[int, int]) -> complex:
    """Wilson loop around the rectangle of extent (L_μ, L_ν) links starting at x."""
    x = _check_inside(conn, x, mu, nu, extent)
    theta_mu = link_angles(conn, mu)
    theta_nu = link_angles(conn, nu)
    point = list(x)
    angle = 0.0
    for _ in range(extent[0]):
        angle += theta_mu[tuple(point)]
        point[mu] += 1
    for _ in range(extent[1]):
        angle += theta_nu[tuple(point)]
        point[nu] += 1
    for _ in range(extent[0]):
        point[mu] -= 1
        angle -= theta_mu[tuple(point)]
    for _ in range(extent[1]):
        point[nu] -= 1
        angle -= theta_nu[tuple(point)]
    return complex(np.exp(1j * angle))


def enclosed_plaquettes(conn: LatticeConnection, x: Sequence[int], mu: int, nu: int, extent: Tuple[int, int]) -> complex:
    """Product of the plaquettes tiling a rectangle; equals loop_holonomy for Abelian links."""
    x = _check_inside(conn, x, mu, nu, extent)
    angles = _plaquette_angles(conn, mu, nu)
    index = list(x)
    index[mu] = slice(x[mu], x[mu] + extent[0])
    index[nu] = slice(x[nu], x[nu] + extent[1])
    return complex(np.exp(1j * np.sum(angles[tuple(index)])))


def holonomy_consistency(conn: LatticeConnection, curvature: CurvatureTensor, x: Sequence[int], mu: int = 0, nu: int = 1) -> Tuple[float, float]:
    """
    Compare arg(plaquette) with −ε F a_μ a_ν at the plaquette centre.

    F is averaged over the four corners of the plaquette. Returns the phase
    argument and the prediction.
    """
    phase = plaquette_holonomy(conn, x, mu, nu)
    corners = []
    for dx in (0, 1):
        for dy in (0, 1):
            point = list(x)
            point[mu] += dx
            point[nu] += dy
            corners.append(curvature.F[(mu, nu) + tuple(point)])
    valid = [c for c in corners if c is not np.ma.masked]
    if not valid:
        raise PlaquetteOutOfGridError(f"No valid curvature sample around plaquette at {tuple(x)}")
    F = float(np.mean(valid))
    predicted = -conn.coupling * F * conn.spacing[mu] * conn.spacing[nu]
    return float(np.angle(phase)), predicted


@dataclass(frozen=True)
class RefinementPoint:
    spacing: float
    error: float


def refinement_sweep(
    build: Callable[[float], LatticeConnection],
    spacings: Sequence[float],
    exact: Callable[[LatticeConnection], Callable[[int, int], np.ndarray]],
    wavevector: Optional[Sequence[float]] = None,
    mu: int = 0,
    nu: int = 1,
) -> Tuple[List[RefinementPoint], float]:
    """
    Curvature error per spacing with the test field held fixed in physical units.

    Args:
        build: Maps a spacing to a connection covering the same physical region.
        spacings: Lattice steps to try.
        exact: Maps a connection to the exact F_μν sampler for it.
        wavevector: Test-field wavevector; defaults to the one of the coarsest grid.

    Returns:
        Points and the fitted convergence order.
    """
    spacings = sorted((float(a) for a in spacings), reverse=True)
    points = []
    for a in spacings:
        conn = build(a)
        if wavevector is None:
            wavevector = [DEFAULT_PHASE_PER_STEP / s for s in conn.spacing]
        F = curvature_from_commutator(conn, plane_wave(conn, wavevector))
        points.append(RefinementPoint(spacing=a, error=F.max_error(exact(conn), mu, nu)))
    order = convergence_order([p.spacing for p in points], [p.error for p in points])
    logger.debug(f"Curvature refinement: {[(p.spacing, p.error) for p in points]}, order {order:.3f}")
    return points, order
