"""
Hamiltonian flows of the particle–field system in the two dual charts.

The Hamiltonian is H = H_P(π) + ½ g(Y, Y) + ½ω₀² g(B, B), where π = p − κB is
the kinetic momentum and Y is the field-kinetic argument: π_B for the
"canonical" coupling, or π_B − κq for the "kinetic" coupling, which reads
−κ𝒬 when κλ = 1. Each of the three terms generates a flow that can be written in
closed form, so a Strang composition of exact sub-flows gives a reversible,
symplectic, second-order integrator. The sub-flows are written directly in the
chart's own variables: (q, π, B, π_B) or (𝒬, p, B, π_B).
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from dualchart.classical.brackets import build_symplectic
from dualchart.classical.phase_space import (
    ExtendedState,
    KineticChart,
    Metric,
    PhysicalConstants,
    kinetic_chart,
)
from dualchart.exceptions import DimensionError, DivergenceError, DualChartError, NumericalError
from dualchart.utils.numerics import convergence_order

logger = logging.getLogger(__name__)

PARTICLE_MODELS = ("nonrelativistic", "relativistic")
FIELD_COUPLINGS = ("canonical", "kinetic")
CHARTS = ("q_pi", "Q_p")


@dataclass(frozen=True)
class SystemHamiltonian:
    """
    Particle plus finite-mode field Hamiltonian.

    Attributes:
        constants: Physical constants (m, c, χ, ħ).
        metric: Diagonal metric used in every quadratic form.
        omega0: Field mode frequency ω₀ (0 gives a free mode).
        particle_model: "nonrelativistic" (π²/2m) or "relativistic" (c·√(π² + m²c²)).
        field_coupling: "canonical" or "kinetic" choice of the field-kinetic argument.
    """
    constants: PhysicalConstants
    metric: Metric
    omega0: float = 1.0
    particle_model: str = "nonrelativistic"
    field_coupling: str = "canonical"

    def __post_init__(self):
        if self.particle_model not in PARTICLE_MODELS:
            raise DualChartError(f"Unknown particle model '{self.particle_model}', expected one of {PARTICLE_MODELS}")
        if self.field_coupling not in FIELD_COUPLINGS:
            raise DualChartError(f"Unknown field coupling '{self.field_coupling}', expected one of {FIELD_COUPLINGS}")
        if not np.isfinite(self.omega0) or self.omega0 < 0:
            raise DualChartError(f"Mode frequency must be finite and non-negative, got {self.omega0}")

    @property
    def dim(self) -> int:
        return self.metric.dim

    @property
    def is_quadratic(self) -> bool:
        return self.particle_model == "nonrelativistic"

    # particle term

    def particle_energy(self, pi: np.ndarray) -> float:
        m, c = self.constants.m, self.constants.c
        if self.particle_model == "nonrelativistic":
            return self.metric.square(pi) / (2.0 * m)
        radicand = self.metric.square(pi) + (m * c) ** 2
        if radicand <= 0:
            raise NumericalError("Relativistic energy undefined for a non-positive mass shell", index=0)
        return c * float(np.sqrt(radicand))

    def particle_velocity(self, pi: np.ndarray) -> np.ndarray:
        """Raised gradient g·∂H_P/∂π, the particle velocity dq/dt."""
        pi = np.asarray(pi, dtype=float)
        m, c = self.constants.m, self.constants.c
        if self.particle_model == "nonrelativistic":
            return pi / m
        return c * pi / np.sqrt(self.metric.square(pi) + (m * c) ** 2)

    # field term

    def field_argument(self, state: ExtendedState) -> np.ndarray:
        if self.field_coupling == "canonical":
            return np.array(state.piB)
        return state.piB - self.constants.momentum_shift * state.q

    def field_energy(self, B: np.ndarray, argument: np.ndarray) -> float:
        return 0.5 * (self.metric.square(argument) + self.omega0 ** 2 * self.metric.square(B))

    def energy(self, state: ExtendedState) -> float:
        """H evaluated on the canonical variables."""
        state.check_metric(self.metric)
        pi = state.p - self.constants.momentum_shift * state.B
        return self.particle_energy(pi) + self.field_energy(state.B, self.field_argument(state))

    def energy_from_chart(self, chart: KineticChart, B, piB) -> float:
        """H evaluated on the kinetic variables (𝒬, π) and the field values."""
        B = np.asarray(B, dtype=float)
        piB = np.asarray(piB, dtype=float)
        kappa, lam = self.constants.momentum_shift, self.constants.coordinate_shift
        if self.field_coupling == "canonical":
            argument = piB
        else:
            argument = (1.0 - kappa * lam) * piB - kappa * chart.Q
        return self.particle_energy(chart.pi) + self.field_energy(B, argument)

    def gradient(self, state: ExtendedState) -> np.ndarray:
        """∂H in the canonical ordering (q, B, p, π_B), lowered indices."""
        kappa = self.constants.momentum_shift
        pi = state.p - kappa * state.B
        dpi = self.metric.lower(self.particle_velocity(pi))
        argument = self.metric.lower(self.field_argument(state))
        dq = -kappa * argument if self.field_coupling == "kinetic" else np.zeros(state.dim)
        dB = -kappa * dpi + self.omega0 ** 2 * self.metric.lower(state.B)
        return np.concatenate([dq, dB, dpi, argument])

    def vector_field(self, state: ExtendedState) -> np.ndarray:
        """Hamiltonian vector field Λ·∂H in the canonical ordering."""
        tensor = build_symplectic(2 * state.dim).poisson_tensor(self.metric)
        return tensor @ self.gradient(state)


@dataclass(frozen=True)
class Trajectory:
    """Sampled states of one integration run.

    `states` are always stored in canonical variables; `native` holds the
    chart's own variables in the order (coordinate, momentum, B, π_B).
    """
    times: np.ndarray
    states: Tuple[ExtendedState, ...]
    native: np.ndarray
    chart_tag: str

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise DimensionError(f"{len(self.times)} times for {len(self.states)} states")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise DualChartError("Trajectory times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def final(self) -> ExtendedState:
        return self.states[-1]

    def vectors(self) -> np.ndarray:
        return np.array([s.as_vector() for s in self.states])

    def kinetic(self, k: PhysicalConstants) -> np.ndarray:
        """Rows (q, π, B, π_B) for every sample, for chart comparisons."""
        rows = []
        for s in self.states:
            chart = kinetic_chart(s, k)
            rows.append(np.concatenate([s.q, chart.pi, s.B, s.piB]))
        return np.array(rows)

    def energies(self, H: SystemHamiltonian) -> np.ndarray:
        return np.array([H.energy(s) for s in self.states])


def relative_energy_drift(trajectory: Trajectory, H: SystemHamiltonian) -> float:
    energies = trajectory.energies(H)
    scale = abs(energies[0]) if energies[0] != 0 else 1.0
    return float(np.max(np.abs(energies - energies[0])) / scale)


def chart_disagreement(a: Trajectory, b: Trajectory, k: PhysicalConstants) -> float:
    """Max pointwise difference of two trajectories in (q, π, B, π_B)."""
    if len(a) != len(b):
        raise DimensionError(f"Trajectories differ in length: {len(a)} != {len(b)}")
    return float(np.max(np.abs(a.kinetic(k) - b.kinetic(k))))


# exact sub-flows
#
# Each function advances the chart variables (x, y, B, piB) in place by time t
# under one term of H. In the q_pi chart x = q, y = π; in the Q_p chart x = 𝒬, y = p.

def _particle_flow(H: SystemHamiltonian, chart: str, x, y, B, piB, t: float) -> None:
    kappa, lam = H.constants.momentum_shift, H.constants.coordinate_shift
    if chart == "q_pi":
        v = H.particle_velocity(y)
        x += v * t
    else:
        v = H.particle_velocity(y - kappa * B)
        x += (1.0 - lam * kappa) * v * t
    piB += kappa * v * t


def _field_kinetic_flow(H: SystemHamiltonian, chart: str, x, y, B, piB, t: float) -> None:
    kappa, lam = H.constants.momentum_shift, H.constants.coordinate_shift
    if H.field_coupling == "canonical":
        B += piB * t
        if chart == "q_pi":
            y -= kappa * piB * t
        return
    if chart == "q_pi":
        Z = piB - kappa * x
        B += Z * t
    else:
        Z = (1.0 - kappa * lam) * piB - kappa * x
        B += Z * t
        y += kappa * Z * t


def _potential_flow(H: SystemHamiltonian, chart: str, x, y, B, piB, t: float) -> None:
    if H.omega0 == 0:
        return
    kick = H.omega0 ** 2 * B * t
    piB -= kick
    if chart == "Q_p":
        x += H.constants.coordinate_shift * kick


def _strang_step(H: SystemHamiltonian, chart: str, x, y, B, piB, dt: float) -> None:
    half = 0.5 * dt
    _potential_flow(H, chart, x, y, B, piB, half)
    _field_kinetic_flow(H, chart, x, y, B, piB, half)
    _particle_flow(H, chart, x, y, B, piB, dt)
    _field_kinetic_flow(H, chart, x, y, B, piB, half)
    _potential_flow(H, chart, x, y, B, piB, half)


def _to_native(state: ExtendedState, k: PhysicalConstants, chart: str) -> List[np.ndarray]:
    kin = kinetic_chart(state, k)
    if chart == "q_pi":
        return [np.array(state.q), np.array(kin.pi), np.array(state.B), np.array(state.piB)]
    return [np.array(kin.Q), np.array(state.p), np.array(state.B), np.array(state.piB)]


def _from_native(x, y, B, piB, k: PhysicalConstants, chart: str) -> ExtendedState:
    if chart == "q_pi":
        return ExtendedState(q=x, p=y + k.momentum_shift * B, B=B, piB=piB)
    return ExtendedState(q=x + k.coordinate_shift * piB, p=y, B=B, piB=piB)


def _integrate(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int, chart: str) -> Tuple[np.ndarray, List[ExtendedState]]:
    if chart not in CHARTS:
        raise DualChartError(f"Unknown chart '{chart}', expected one of {CHARTS}")
    if n < 0:
        raise DualChartError(f"Step count must be non-negative, got {n}")
    s0.check_metric(H.metric)
    k = H.constants
    x, y, B, piB = _to_native(s0, k, chart)
    native = [np.concatenate([x, y, B, piB])]
    states = [s0]
    for step in range(1, n + 1):
        _strang_step(H, chart, x, y, B, piB, dt)
        row = np.concatenate([x, y, B, piB])
        if not np.all(np.isfinite(row)):
            raise DivergenceError(f"Non-finite state in chart {chart} at step {step}", step=step)
        native.append(row)
        states.append(_from_native(x, y, B, piB, k, chart))
    return np.array(native), states


def _evolve(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int, chart: str) -> Trajectory:
    if not dt > 0:
        raise DualChartError(f"Time step must be positive, got {dt}")
    native, states = _integrate(H, s0, dt, n, chart)
    times = dt * np.arange(n + 1)
    return Trajectory(times=times, states=tuple(states), native=native, chart_tag=chart)


def evolve_q_pi(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int) -> Trajectory:
    """
    Integrate in the (q, π, B, π_B) variables.

    Raises:
        DivergenceError: If a non-finite state appears; carries the step index.
    """
    return _evolve(H, s0, dt, n, "q_pi")


def evolve_Q_p(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int) -> Trajectory:
    """
    Integrate in the (𝒬, p, B, π_B) variables.

    Raises:
        DivergenceError: If a non-finite state appears; carries the step index.
    """
    return _evolve(H, s0, dt, n, "Q_p")


def evolve(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int, chart: str = "q_pi") -> Trajectory:
    return _evolve(H, s0, dt, n, chart)


def flow_map(H: SystemHamiltonian, dt: float, n: int, chart: str = "q_pi") -> Callable[[np.ndarray], np.ndarray]:
    """The n-step integrator as a map on canonical vectors."""
    def apply(vector: np.ndarray) -> np.ndarray:
        _, states = _integrate(H, ExtendedState.from_vector(vector), dt, n, chart)
        return states[-1].as_vector()
    return apply


def time_reversal_error(H: SystemHamiltonian, s0: ExtendedState, dt: float, n: int, chart: str = "q_pi") -> float:
    """Integrate n steps forward then n steps with −dt; max distance from s0."""
    _, forward = _integrate(H, s0, dt, n, chart)
    _, backward = _integrate(H, forward[-1], -dt, n, chart)
    return float(np.max(np.abs(backward[-1].as_vector() - s0.as_vector())))


def symplecticity_check(
    H: SystemHamiltonian,
    s0: ExtendedState,
    dt: float,
    n: int,
    chart: str = "q_pi",
    eps: float = 1e-3,
) -> float:
    """
    max |Jᵀ ω J − ω| for the Jacobian J of the n-step map at s0.

    J is built column by column from central differences of perturbed runs.
    For quadratic Hamiltonians the map is linear and the differences are exact
    up to rounding.
    """
    if not dt > 0:
        raise DualChartError(f"Time step must be positive, got {dt}")
    phi = flow_map(H, dt, n, chart)
    x0 = s0.as_vector()
    size = len(x0)
    jacobian = np.empty((size, size))
    for j in range(size):
        e = np.zeros(size)
        e[j] = eps
        jacobian[:, j] = (phi(x0 + e) - phi(x0 - e)) / (2.0 * eps)
    omega = build_symplectic(2 * s0.dim).poisson_tensor(H.metric)
    deviation = float(np.max(np.abs(jacobian.T @ omega @ jacobian - omega)))
    logger.debug(f"Symplecticity defect after {n} steps (dt={dt}, chart={chart}): {deviation:.3e}")
    return deviation


def energy_error_order(
    H: SystemHamiltonian,
    s0: ExtendedState,
    dt_values: Sequence[float],
    duration: float,
    chart: str = "q_pi",
) -> Tuple[List[Tuple[float, float]], float]:
    """Max energy error over a fixed duration per step size, with the fitted order."""
    points = []
    for dt in dt_values:
        n = max(1, int(round(duration / dt)))
        trajectory = _evolve(H, s0, dt, n, chart)
        energies = trajectory.energies(H)
        points.append((float(dt), float(np.max(np.abs(energies - energies[0])))))
    order = convergence_order([p[0] for p in points], [p[1] for p in points])
    return points, order


def reference_solution(
    H: SystemHamiltonian,
    s0: ExtendedState,
    times: Sequence[float],
    rtol: float = 1e-12,
    atol: float = 1e-12,
) -> List[ExtendedState]:
    """
    High-order oracle: DOP853 on the canonical vector field at the given times.

    Raises:
        NumericalError: If the solver fails.
    """
    times = np.asarray(times, dtype=float)

    def rhs(_, x):
        return H.vector_field(ExtendedState.from_vector(x))

    solution = solve_ivp(rhs, (float(times[0]), float(times[-1])), s0.as_vector(), method="DOP853",
                         t_eval=times, rtol=rtol, atol=atol)
    if not solution.success:
        raise NumericalError(f"Reference integration failed: {solution.message}", index=0)
    return [ExtendedState.from_vector(column) for column in solution.y.T]


def evolve_ensemble(
    H: SystemHamiltonian,
    states: Iterable[ExtendedState],
    dt: float,
    n: int,
    chart: str = "q_pi",
    workers: Optional[int] = None,
) -> List[Trajectory]:
    """Evolve independent initial states concurrently; results keep the input order."""
    states = list(states)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: _evolve(H, s, dt, n, chart), states))


def write_trajectory(trajectory: Trajectory, H: SystemHamiltonian, path: Path) -> None:
    """Write (t, q…, p…, B…, piB…, Q…, pi…, H) rows."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = trajectory.states[0].dim
    header = ["t"]
    for name in ("q", "p", "B", "piB", "Q", "pi"):
        header += [f"{name}{i}" for i in range(n)]
    header.append("H")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for t, s in zip(trajectory.times, trajectory.states):
            chart = kinetic_chart(s, H.constants)
            values = [t, *s.q, *s.p, *s.B, *s.piB, *chart.Q, *chart.pi, H.energy(s)]
            writer.writerow([repr(float(v)) for v in values])
