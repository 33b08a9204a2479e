"""
Truncated tensor-product realizations of (q̂, p̂, B̂, π̂_B) and the composites
𝒬̂ = q̂ − (c/2m)π̂_B and π̂ = p̂ − (2m/c)B̂.

Two realizations are available:

- "fock": q̂, p̂ are oscillator quadratures on the particle factor and B̂, π̂_B
  on the field factor. 𝒬̂ and π̂ mix both factors, so their commutator
  vanishes only away from the cutoff.
- "kinetic": the factors carry the pairs (q, π) and (B, π_B − κq). The
  canonical operators are rebuilt from them, so 𝒬̂ and π̂ act on different
  factors and commute on the whole truncated space whenever κλ = 1.

Both satisfy the same commutator algebra below the cutoff.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from dualchart.classical.phase_space import PhysicalConstants
from dualchart.exceptions import DimensionError, DualChartError, NonHermitianError, TruncationError

logger = logging.getLogger(__name__)

MIN_FACTOR_DIM = 8
HERMITIAN_TOLERANCE = 1e-12
REALIZATIONS = ("fock", "kinetic")


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix on a truncated Hilbert space."""
    entries: np.ndarray
    hermitian_flag: bool = False
    name: str = ""

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionError(f"Operator '{self.name}' must be square, got shape {entries.shape}")
        if self.hermitian_flag:
            defect = hermiticity_defect(entries)
            if defect >= HERMITIAN_TOLERANCE:
                raise NonHermitianError(f"Operator '{self.name}' flagged hermitian but |A − A†| = {defect:.3e}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.hermitian_flag, f"{self.name}†")

    def commutator(self, other: "OperatorMatrix") -> np.ndarray:
        if other.dim != self.dim:
            raise DimensionError(f"Cannot commute operators of dimension {self.dim} and {other.dim}")
        return self.entries @ other.entries - other.entries @ self.entries

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            return self.entries @ other.entries
        return self.entries @ other


def hermiticity_defect(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def annihilation(d: int) -> np.ndarray:
    """Truncated ladder operator a with a|n⟩ = √n |n−1⟩."""
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def quadratures(d: int, hbar: float, mass: float = 1.0, omega: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Position and momentum quadratures of a truncated oscillator.

    x = √(ħ/2mω)(a + a†), p = i√(ħmω/2)(a† − a). [x, p] = iħ except on the
    top level, where the truncation defect −iħ(d−1) sits.
    """
    a = annihilation(d)
    ad = a.conj().T
    x = np.sqrt(hbar / (2.0 * mass * omega)) * (a + ad)
    p = 1j * np.sqrt(hbar * mass * omega / 2.0) * (ad - a)
    return x, p


@dataclass(frozen=True)
class OperatorSet:
    """
    The six operators on H_particle ⊗ H_field.

    Basis index i·d_field + j labels particle level i and field level j.
    """
    q: OperatorMatrix
    p: OperatorMatrix
    B: OperatorMatrix
    piB: OperatorMatrix
    Q: OperatorMatrix
    pi: OperatorMatrix
    d_particle: int
    d_field: int
    constants: PhysicalConstants
    realization: str = "fock"
    frequencies: Tuple[float, float] = (1.0, 1.0)

    @property
    def dim(self) -> int:
        return self.d_particle * self.d_field

    def as_dict(self) -> Dict[str, OperatorMatrix]:
        return {"q": self.q, "p": self.p, "B": self.B, "piB": self.piB, "Q": self.Q, "pi": self.pi}

    def interior_indices(self, fraction: float = 0.5) -> np.ndarray:
        """Basis indices with both factor levels below fraction × cutoff."""
        cut_p = int(np.floor(fraction * self.d_particle))
        cut_f = int(np.floor(fraction * self.d_field))
        return np.array([i * self.d_field + j for i in range(cut_p) for j in range(cut_f)], dtype=int)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


def build_operators(
    d_particle: int,
    d_field: int,
    k: PhysicalConstants,
    realization: str = "fock",
    omega_particle: float = 1.0,
    omega_field: float = 1.0,
) -> OperatorSet:
    """
    Build q̂, p̂, B̂, π̂_B, 𝒬̂, π̂ on a truncated tensor product.

    Args:
        d_particle: Particle factor dimension (≥ 8).
        d_field: Field factor dimension (≥ 8).
        k: Physical constants; the particle quadratures use mass m.
        realization: "fock" or "kinetic".
        omega_particle: Frequency setting the particle quadrature scale.
        omega_field: Frequency setting the field quadrature scale.

    Raises:
        TruncationError: If a factor dimension is below 8.
    """
    if d_particle < MIN_FACTOR_DIM or d_field < MIN_FACTOR_DIM:
        raise TruncationError(f"Factor dimensions must be at least {MIN_FACTOR_DIM}, got ({d_particle}, {d_field})")
    if realization not in REALIZATIONS:
        raise DualChartError(f"Unknown realization '{realization}', expected one of {REALIZATIONS}")
    hbar = k.hbar
    kappa, lam = k.momentum_shift, k.coordinate_shift
    x1, k1 = quadratures(d_particle, hbar, k.m, omega_particle)
    x2, k2 = quadratures(d_field, hbar, 1.0, omega_field)
    one_p = np.eye(d_particle)
    one_f = np.eye(d_field)

    if realization == "fock":
        q = np.kron(x1, one_f)
        p = np.kron(k1, one_f)
        B = np.kron(one_p, x2)
        piB = np.kron(one_p, k2)
    else:
        q = np.kron(x1, one_f)
        B = np.kron(one_p, x2)
        p = np.kron(k1, one_f) + kappa * B
        piB = np.kron(one_p, k2) + kappa * q
    Q = q - lam * piB
    pi = p - kappa * B

    def make(matrix, name):
        return OperatorMatrix(matrix, hermitian_flag=True, name=name)

    logger.debug(f"Built {realization} operators on {d_particle}x{d_field}")
    return OperatorSet(
        q=make(q, "q"), p=make(p, "p"), B=make(B, "B"), piB=make(piB, "piB"),
        Q=make(Q, "Q"), pi=make(pi, "pi"),
        d_particle=d_particle, d_field=d_field, constants=k,
        realization=realization, frequencies=(float(omega_particle), float(omega_field)),
    )


@dataclass(frozen=True)
class CommutatorRow:
    identity: str
    expected: str
    interior_defect: float
    full_defect: float


@dataclass
class CommutatorReport:
    """Defects of the commutator identities on the interior subspace and the full space."""
    rows: List[CommutatorRow] = field(default_factory=list)
    interior_dim: int = 0
    fraction: float = 0.5

    def max_interior_defect(self) -> float:
        return max((r.interior_defect for r in self.rows), default=0.0)

    def row(self, identity: str) -> CommutatorRow:
        for r in self.rows:
            if r.identity == identity:
                return r
        raise KeyError(identity)


# (label, left, right, expected multiple of iħ)
COMMUTATOR_IDENTITIES = (
    ("[q,p]", "q", "p", 1.0),
    ("[q,pi]", "q", "pi", 1.0),
    ("[B,piB]", "B", "piB", 1.0),
    ("[Q,pi]", "Q", "pi", 0.0),
    ("[Q,p]", "Q", "p", 1.0),
    ("[Q,Q]", "Q", "Q", 0.0),
)


def commutator_suite(ops: OperatorSet, fraction: float = 0.5) -> CommutatorReport:
    """
    Measure max over ψ of ‖(C − E)ψ‖/‖ψ‖ for each identity.

    The interior value ranges over states supported below `fraction` of the
    cutoff in both factors (the spectral norm of (C − E) restricted to those
    columns); the full-space value is reported alongside.
    """
    interior = ops.interior_indices(fraction)
    operators = ops.as_dict()
    identity = ops.identity()
    report = CommutatorReport(interior_dim=len(interior), fraction=fraction)
    for label, left, right, multiple in COMMUTATOR_IDENTITIES:
        difference = operators[left].commutator(operators[right]) - 1j * ops.constants.hbar * multiple * identity
        interior_defect = float(np.linalg.norm(difference[:, interior], 2)) if len(interior) else 0.0
        full_defect = float(np.linalg.norm(difference, 2))
        expected = "0" if multiple == 0 else "i*hbar"
        report.rows.append(CommutatorRow(label, expected, interior_defect, full_defect))
        if full_defect > 1e-8 and interior_defect < 1e-10:
            logger.debug(f"{label}: truncation defect {full_defect:.3e} confined above the interior subspace")
    return report


def save_operator_set(ops: OperatorSet, path: Path) -> None:
    """Store the six matrices in an .npz archive with a JSON header entry."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    k = ops.constants
    header = {
        "format": "dualchart-operators",
        "version": 1,
        "realization": ops.realization,
        "d_particle": ops.d_particle,
        "d_field": ops.d_field,
        "frequencies": list(ops.frequencies),
        "constants": {"m": k.m, "c": k.c, "chi": k.chi, "hbar": k.hbar, "decoupled": k.decoupled},
        "ordering": "particle index major: i*d_field + j",
        "operators": list(ops.as_dict().keys()),
    }
    arrays = {name: op.entries for name, op in ops.as_dict().items()}
    with open(path, "wb") as f:
        np.savez(f, header=np.array(json.dumps(header, sort_keys=True)), **arrays)


def load_operator_set(path: Path) -> OperatorSet:
    with np.load(Path(path), allow_pickle=False) as archive:
        header = json.loads(str(archive["header"]))
        if header.get("format") != "dualchart-operators":
            raise DualChartError(f"{path} is not an operator archive")
        matrices = {name: OperatorMatrix(archive[name], hermitian_flag=True, name=name) for name in header["operators"]}
    return OperatorSet(
        **matrices,
        d_particle=header["d_particle"],
        d_field=header["d_field"],
        constants=PhysicalConstants(**header["constants"]),
        realization=header["realization"],
        frequencies=tuple(header["frequencies"]),
    )
