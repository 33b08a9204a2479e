"""
Symplectic and bracket engine on the extended phase space.

Coordinates are ordered (q, B | p, π_B). The symplectic matrix ω_IJ has
ω_{i, i+M} = −ω_{i+M, i} = 1 (M = 2N), which is the component form of
ω = −dθ with θ = Σ p dq + Σ π_B dB. Brackets contract gradients with the
Poisson tensor Λ = [[0, G], [−G, 0]], G = blockdiag(g, g); for the Euclidean
metric Λ is the inverse of ω_IJ read with its indices transposed, so that
{q^μ, p^ν} = g^{μν}.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from dualchart.classical.phase_space import ExtendedState, Metric, PhysicalConstants
from dualchart.exceptions import DimensionError, DualChartError, NumericalError
from dualchart.utils.numerics import central_gradient, convergence_order

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5

# offsets of each variable block inside the 4N canonical vector
_BLOCKS = {"q": 0, "B": 1, "p": 2, "piB": 3}


@dataclass(frozen=True)
class SymplecticMatrix:
    """The antisymmetric matrix ω_IJ and its inverse ω^IJ."""
    half_dim: int
    matrix: np.ndarray
    inverse: np.ndarray

    @property
    def n_pairs(self) -> int:
        return self.half_dim

    def poisson_tensor(self, metric: Optional[Metric] = None) -> np.ndarray:
        """Bracket tensor Λ for the given metric (Euclidean when omitted)."""
        if metric is None:
            return self.inverse.T.copy()
        if 2 * metric.dim != self.half_dim:
            raise DimensionError(f"Metric of dimension {metric.dim} does not fit {self.half_dim} canonical pairs")
        g = np.kron(np.eye(2), metric.components)
        zero = np.zeros_like(g)
        return np.block([[zero, g], [-g, zero]])

    def form(self, v: np.ndarray, w: np.ndarray) -> float:
        """ω(v, w) = vᵀ ω_IJ w."""
        return float(np.asarray(v) @ self.matrix @ np.asarray(w))


def build_symplectic(half_dim: int) -> SymplecticMatrix:
    """
    Build ω_IJ for `half_dim` canonical pairs.

    Raises:
        DualChartError: If half_dim < 1.
    """
    if half_dim < 1:
        raise DualChartError(f"Symplectic half-dimension must be at least 1, got {half_dim}")
    identity = np.eye(half_dim)
    zero = np.zeros((half_dim, half_dim))
    matrix = np.block([[zero, identity], [-identity, zero]])
    inverse = np.block([[zero, -identity], [identity, zero]])
    matrix.setflags(write=False)
    inverse.setflags(write=False)
    return SymplecticMatrix(half_dim=half_dim, matrix=matrix, inverse=inverse)


@dataclass(frozen=True)
class PhaseFunction:
    """A scalar function on the extended phase space.

    Attributes:
        evaluate: Maps an ExtendedState to a real number.
        gradient: Optional analytic gradient in the (q, B, p, π_B) ordering.
        name: Label used in reports.
    """
    evaluate: Callable[[ExtendedState], float]
    gradient: Optional[Callable[[ExtendedState], np.ndarray]] = None
    name: str = "F"

    def __call__(self, state: ExtendedState) -> float:
        return float(self.evaluate(state))

    def grad(self, state: ExtendedState, h: float = DEFAULT_STEP) -> np.ndarray:
        if self.gradient is not None:
            return np.asarray(self.gradient(state), dtype=float)
        return central_gradient(lambda x: self.evaluate(ExtendedState.from_vector(x)), state.as_vector(), h)

    def numerical(self) -> "PhaseFunction":
        """Same function with the analytic gradient dropped."""
        return PhaseFunction(evaluate=self.evaluate, name=self.name)

    def __mul__(self, other: "PhaseFunction") -> "PhaseFunction":
        gradient = None
        if self.gradient is not None and other.gradient is not None:
            gradient = lambda s: self.gradient(s) * other(s) + self(s) * other.gradient(s)
        return PhaseFunction(
            evaluate=lambda s: self(s) * other(s),
            gradient=gradient,
            name=f"{self.name}*{other.name}",
        )


def linear_function(weights: np.ndarray, name: str = "L") -> PhaseFunction:
    """The linear function x ↦ weights·x on the canonical vector."""
    weights = np.array(weights, dtype=float)
    return PhaseFunction(
        evaluate=lambda s: float(weights @ s.as_vector()),
        gradient=lambda s: weights.copy(),
        name=name,
    )


def coordinate_weights(kind: str, index: int, dim: int, k: PhysicalConstants) -> np.ndarray:
    """Gradient of one chart coordinate (q, p, B, piB, Q or pi) in the canonical ordering."""
    if not 0 <= index < dim:
        raise DimensionError(f"Component index {index} outside dimension {dim}")
    weights = np.zeros(4 * dim)
    if kind in _BLOCKS:
        weights[_BLOCKS[kind] * dim + index] = 1.0
    elif kind == "Q":
        weights[_BLOCKS["q"] * dim + index] = 1.0
        weights[_BLOCKS["piB"] * dim + index] = -k.coordinate_shift
    elif kind == "pi":
        weights[_BLOCKS["p"] * dim + index] = 1.0
        weights[_BLOCKS["B"] * dim + index] = -k.momentum_shift
    else:
        raise DualChartError(f"Unknown phase-space coordinate '{kind}'")
    return weights


def coordinate_function(kind: str, index: int, dim: int, k: PhysicalConstants) -> PhaseFunction:
    return linear_function(coordinate_weights(kind, index, dim, k), name=f"{kind}{index}")


def poisson_bracket(
    F: PhaseFunction,
    G: PhaseFunction,
    at: ExtendedState,
    h: float = DEFAULT_STEP,
    metric: Optional[Metric] = None,
) -> float:
    """
    Numerical Poisson bracket {F, G} at a state.

    Gradients come from the analytic evaluators when present, otherwise from
    central differences with step h.

    Raises:
        NumericalError: If F or G is not finite near the state.
        DimensionError: If the metric does not match the state.
    """
    if h <= 0:
        raise DualChartError(f"Bracket step must be positive, got {h}")
    if metric is not None:
        at.check_metric(metric)
    grad_f = F.grad(at, h)
    grad_g = G.grad(at, h)
    if not (np.all(np.isfinite(grad_f)) and np.all(np.isfinite(grad_g))):
        bad = int(np.flatnonzero(~(np.isfinite(grad_f) & np.isfinite(grad_g)))[0])
        raise NumericalError(f"Non-finite gradient component at coordinate {bad}", index=bad)
    tensor = build_symplectic(2 * at.dim).poisson_tensor(metric)
    return float(grad_f @ tensor @ grad_g)


# (family, left kind, right kind, expected multiple of g given the constants)
# {Q, pi} = (1 - κλ)g, which vanishes unless the chart shifts are switched off
BRACKET_FAMILIES: Tuple[Tuple[str, str, str, Callable[[PhysicalConstants], float]], ...] = (
    ("q,p", "q", "p", lambda k: 1.0),
    ("q,pi", "q", "pi", lambda k: 1.0),
    ("B,piB", "B", "piB", lambda k: 1.0),
    ("Q,Q", "Q", "Q", lambda k: 0.0),
    ("Q,pi", "Q", "pi", lambda k: 0.0 if not k.decoupled else 1.0),
    ("Q,p", "Q", "p", lambda k: 1.0),
)


@dataclass(frozen=True)
class BracketRow:
    """One entry of the canonical algebra report."""
    family: str
    mu: int
    nu: int
    value: float
    expected: float

    @property
    def abs_error(self) -> float:
        return abs(self.value - self.expected)

    def as_dict(self) -> Dict[str, object]:
        return {
            "bracket_family": self.family,
            "mu": self.mu,
            "nu": self.nu,
            "value": self.value,
            "expected": self.expected,
            "abs_error": self.abs_error,
        }


def canonical_algebra_report(
    at: ExtendedState,
    k: PhysicalConstants,
    metric: Optional[Metric] = None,
    h: float = DEFAULT_STEP,
    analytic: bool = False,
) -> List[BracketRow]:
    """
    Evaluate the six fundamental bracket families for every index pair.

    The functions are differentiated numerically unless `analytic` is set, so
    the report measures the bracket engine rather than restating the algebra.
    """
    metric = metric or Metric.euclidean(at.dim)
    at.check_metric(metric)
    rows = []
    for family, left, right, multiple in BRACKET_FAMILIES:
        for mu in range(at.dim):
            for nu in range(at.dim):
                F = coordinate_function(left, mu, at.dim, k)
                G = coordinate_function(right, nu, at.dim, k)
                if not analytic:
                    F, G = F.numerical(), G.numerical()
                value = poisson_bracket(F, G, at, h=h, metric=metric)
                expected = multiple(k) * float(metric.components[mu, nu])
                rows.append(BracketRow(family, mu, nu, value, expected))
    return rows


def max_deviation(rows: Iterable[BracketRow]) -> float:
    return max((row.abs_error for row in rows), default=0.0)


def write_algebra_report(rows: Iterable[BracketRow], path: Path) -> None:
    """Write the report as CSV (bracket_family, mu, nu, value, expected, abs_error)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=["bracket_family", "mu", "nu", "value", "expected", "abs_error"])
        writer.writeheader()
        for row in rows:
            record = row.as_dict()
            for key in ("value", "expected", "abs_error"):
                record[key] = repr(float(record[key]))
            writer.writerow(record)


def canonical_one_form(at: ExtendedState, v: Sequence[float]) -> float:
    """θ(v) = Σ p·dq(v) + Σ π_B·dB(v) for a tangent vector in the canonical ordering."""
    v = np.asarray(v, dtype=float).reshape(-1)
    n = at.dim
    if len(v) != 4 * n:
        raise DimensionError(f"Tangent vector must have {4 * n} components, got {len(v)}")
    return float(at.p @ v[:n] + at.piB @ v[n:2 * n])


def two_form_from_one_form(at: ExtendedState, v: Sequence[float], w: Sequence[float], h: float = 1e-4) -> float:
    """
    ω(v, w) = −dθ(v, w) for constant vector fields v, w, by central differences.

    dθ(v, w) = v(θ(w)) − w(θ(v)); each directional derivative is a central
    difference of the one-form along the other vector.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    x = at.as_vector()

    def directional(direction: np.ndarray, argument: np.ndarray) -> float:
        plus = canonical_one_form(ExtendedState.from_vector(x + h * direction), argument)
        minus = canonical_one_form(ExtendedState.from_vector(x - h * direction), argument)
        return (plus - minus) / (2.0 * h)

    return -(directional(v, w) - directional(w, v))


@dataclass(frozen=True)
class ConvergencePoint:
    h: float
    deviation: float


def bracket_convergence(
    at: ExtendedState,
    k: PhysicalConstants,
    h_values: Sequence[float],
    metric: Optional[Metric] = None,
) -> Tuple[List[ConvergencePoint], float]:
    """
    Finite-difference bracket error against the analytic bracket, per step size.

    Uses the nonlinear pair F = sin(2𝒬⁰), G = exp(p⁰), whose bracket
    2cos(2𝒬⁰)exp(p⁰)g^{00} follows from {𝒬, p} = g. Returns the points and the
    fitted order.
    """
    n = at.dim
    q_weights = coordinate_weights("Q", 0, n, k)
    p_weights = coordinate_weights("p", 0, n, k)
    F = PhaseFunction(
        evaluate=lambda s: float(np.sin(2.0 * (q_weights @ s.as_vector()))),
        gradient=lambda s: 2.0 * np.cos(2.0 * (q_weights @ s.as_vector())) * q_weights,
        name="sin(2Q0)",
    )
    G = PhaseFunction(
        evaluate=lambda s: float(np.exp(p_weights @ s.as_vector())),
        gradient=lambda s: np.exp(p_weights @ s.as_vector()) * p_weights,
        name="exp(p0)",
    )
    exact = poisson_bracket(F, G, at, metric=metric)
    points = []
    for h in h_values:
        approx = poisson_bracket(F.numerical(), G.numerical(), at, h=h, metric=metric)
        points.append(ConvergencePoint(h=float(h), deviation=abs(approx - exact)))
    order = convergence_order([p.h for p in points], [p.deviation for p in points])
    logger.debug(f"Bracket convergence: {[(p.h, p.deviation) for p in points]}, order {order:.3f}")
    return points, order
