"""
Extended phase space of the particle–field system.

The classical point is (q, p, B, π_B): the particle's canonical coordinates and
momenta plus one field mode per direction and its conjugate momentum. Two
affine maps relate it to the kinetic variables

    π^μ = p^μ − (2m/c) B^μ        (kinetic momentum)
    𝒬^μ = q^μ − (c/2m) π_B^μ      (kinetic coordinate)

and both are invertible given the field values.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from dualchart.exceptions import DimensionError, DualChartError


def _as_vector(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise DualChartError(f"'{name}' contains non-finite entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants of a scenario.

    Attributes:
        m: Particle mass; the coupling "charge" is 2m.
        c: Speed constant.
        chi: Field coupling constant χ.
        hbar: Reduced Planck constant.
        decoupled: When true, both chart shifts (2m/c and c/2m) are switched off.
    """
    m: float = 1.0
    c: float = 1.0
    chi: float = 1.0
    hbar: float = 1.0
    decoupled: bool = False

    def __post_init__(self):
        for name in ("m", "c", "chi", "hbar"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DualChartError(f"Physical constant '{name}' must be strictly positive, got {value}")

    @property
    def charge(self) -> float:
        """The particle's coupling charge 2m."""
        return 2.0 * self.m

    @property
    def momentum_shift(self) -> float:
        """Factor 2m/c multiplying B in the kinetic momentum."""
        return 0.0 if self.decoupled else self.charge / self.c

    @property
    def coordinate_shift(self) -> float:
        """Factor c/2m multiplying π_B in the kinetic coordinate."""
        return 0.0 if self.decoupled else self.c / self.charge

    @property
    def covariant_coupling(self) -> float:
        """Factor 1/(2mχ) of the covariant derivative."""
        return 1.0 / (self.charge * self.chi)


@dataclass(frozen=True)
class Metric:
    """Diagonal metric g^{μν} with ±1 entries."""
    signature: Tuple[int, ...]

    def __post_init__(self):
        signature = tuple(int(s) for s in self.signature)
        if not signature:
            raise DimensionError("Metric needs at least one dimension")
        if any(s not in (1, -1) for s in signature):
            raise DualChartError(f"Metric signature entries must be ±1, got {signature}")
        object.__setattr__(self, "signature", signature)

    @classmethod
    def euclidean(cls, dim: int) -> "Metric":
        return cls(tuple([1] * dim))

    @property
    def dim(self) -> int:
        return len(self.signature)

    @property
    def components(self) -> np.ndarray:
        return np.diag(np.array(self.signature, dtype=float))

    def lower(self, vector: np.ndarray) -> np.ndarray:
        """Lower an index: v_μ = g_{μν} v^ν (g is its own inverse)."""
        return np.asarray(self.signature, dtype=float) * vector

    def square(self, vector: np.ndarray) -> float:
        """g_{μν} v^μ v^ν."""
        return float(np.dot(vector, self.lower(vector)))


@dataclass(frozen=True)
class ExtendedState:
    """A point (q, p, B, π_B) of the extended phase space.

    The canonical vector ordering is (q, B | p, π_B): all coordinates first,
    their conjugate momenta second.
    """
    q: np.ndarray
    p: np.ndarray
    B: np.ndarray
    piB: np.ndarray

    def __post_init__(self):
        arrays = {name: _as_vector(getattr(self, name), name) for name in ("q", "p", "B", "piB")}
        lengths = {name: len(a) for name, a in arrays.items()}
        if len(set(lengths.values())) != 1:
            raise DimensionError(f"State arrays must share one length, got {lengths}")
        if lengths["q"] == 0:
            raise DimensionError("State arrays must not be empty")
        for name, array in arrays.items():
            object.__setattr__(self, name, array)

    @property
    def dim(self) -> int:
        return len(self.q)

    def as_vector(self) -> np.ndarray:
        """Flatten to the canonical 4N ordering (q, B, p, π_B)."""
        return np.concatenate([self.q, self.B, self.p, self.piB])

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "ExtendedState":
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if len(vector) % 4 != 0 or len(vector) == 0:
            raise DimensionError(f"Extended vector length must be a positive multiple of 4, got {len(vector)}")
        n = len(vector) // 4
        return cls(q=vector[:n], B=vector[n:2 * n], p=vector[2 * n:3 * n], piB=vector[3 * n:])

    @classmethod
    def zeros(cls, dim: int) -> "ExtendedState":
        return cls.from_vector(np.zeros(4 * dim))

    def check_metric(self, metric: Metric) -> None:
        if metric.dim != self.dim:
            raise DimensionError(f"State has dimension {self.dim} but metric has {metric.dim}")


@dataclass(frozen=True)
class KineticChart:
    """Kinetic variables (𝒬, π) derived from an ExtendedState."""
    Q: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        Q = _as_vector(self.Q, "Q")
        pi = _as_vector(self.pi, "pi")
        if len(Q) != len(pi):
            raise DimensionError(f"Chart arrays differ in length: {len(Q)} != {len(pi)}")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "pi", pi)


def _check_lengths(**arrays: np.ndarray) -> None:
    lengths = {name: np.shape(a)[-1] if np.ndim(a) else 1 for name, a in arrays.items()}
    if len(set(lengths.values())) != 1:
        raise DimensionError(f"Length mismatch: {lengths}")


def pullback_momentum(p, B, k: PhysicalConstants) -> np.ndarray:
    """Kinetic momentum π = p − (2m/c)B, componentwise."""
    p = np.asarray(p, dtype=float)
    B = np.asarray(B, dtype=float)
    _check_lengths(p=p, B=B)
    return p - k.momentum_shift * B


def pullback_coordinate(q, piB, k: PhysicalConstants) -> np.ndarray:
    """Kinetic coordinate 𝒬 = q − (c/2m)π_B, componentwise."""
    q = np.asarray(q, dtype=float)
    piB = np.asarray(piB, dtype=float)
    _check_lengths(q=q, piB=piB)
    return q - k.coordinate_shift * piB


def kinetic_chart(state: ExtendedState, k: PhysicalConstants) -> KineticChart:
    return KineticChart(
        Q=pullback_coordinate(state.q, state.piB, k),
        pi=pullback_momentum(state.p, state.B, k),
    )


def inverse_pullbacks(chart: KineticChart, B, piB, k: PhysicalConstants) -> Tuple[np.ndarray, np.ndarray]:
    """Recover the canonical (q, p) from the kinetic chart and the field values.

    Args:
        chart: Kinetic variables (𝒬, π).
        B: Field mode values.
        piB: Field mode momenta.
        k: Physical constants.

    Returns:
        Tuple (q, p).

    Raises:
        DimensionError: If the arrays do not share one length.
    """
    B = np.asarray(B, dtype=float)
    piB = np.asarray(piB, dtype=float)
    _check_lengths(Q=chart.Q, pi=chart.pi, B=B, piB=piB)
    q = chart.Q + k.coordinate_shift * piB
    p = chart.pi + k.momentum_shift * B
    return q, p


def state_from_chart(chart: KineticChart, B, piB, k: PhysicalConstants) -> ExtendedState:
    q, p = inverse_pullbacks(chart, B, piB, k)
    return ExtendedState(q=q, p=p, B=B, piB=piB)


def random_state(rng: np.random.Generator, dim: int, scale: float = 1.0) -> ExtendedState:
    """Draw a state with independent normal entries of the given scale."""
    return ExtendedState.from_vector(scale * rng.standard_normal(4 * dim))


def random_states(rng: np.random.Generator, count: int, dim: int, scale: float = 1.0) -> List[ExtendedState]:
    return [random_state(rng, dim, scale) for _ in range(count)]
