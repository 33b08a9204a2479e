"""
Scenario configuration loading and validation.
"""
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from dualchart.classical.dynamics import FIELD_COUPLINGS, PARTICLE_MODELS
from dualchart.classical.phase_space import Metric, PhysicalConstants
from dualchart.exceptions import DualChartError

SCHEMA_VERSION = 1
OUTPUT_ENV_VAR = "DUALCHART_OUT"


class ConfigError(DualChartError):
    """Base exception for configuration errors."""
    pass


class ConfigValidationError(ConfigError):
    """Exception raised when configuration validation fails; names the offending field."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


@dataclass
class DimensionsConfig:
    n: int = 2
    signature: Optional[List[int]] = None

    def metric(self) -> Metric:
        if self.signature is None:
            return Metric.euclidean(self.n)
        return Metric(tuple(self.signature))


@dataclass
class ConstantsConfig:
    m: float
    c: float
    chi: float
    hbar: float
    omega0: float = 1.0
    decoupled: bool = False

    def physical(self) -> PhysicalConstants:
        return PhysicalConstants(m=self.m, c=self.c, chi=self.chi, hbar=self.hbar, decoupled=self.decoupled)


@dataclass
class BracketsConfig:
    n_states: int = 100
    h: float = 1e-5
    h_sweep: List[float] = field(default_factory=lambda: [1e-3, 1e-4, 1e-5])


@dataclass
class LatticeConfig:
    points: int = 64
    spacing: float = 0.05
    field_strength: float = 1.0
    refinements: int = 2


@dataclass
class DynamicsConfig:
    n_states: int = 10
    dt: float = 1e-3
    steps: int = 1000
    particle_model: str = "nonrelativistic"
    field_coupling: str = "canonical"


@dataclass
class QuantumConfig:
    d_particle: int = 24
    d_field: int = 24
    grid_points: int = 64
    grid_width: float = 4.0
    t_max: float = 10.0
    n_times: int = 100
    n_gaussian_states: int = 5


@dataclass
class ScenarioConfig:
    """A validated scenario: constants, per-suite settings, selection and output."""
    constants: ConstantsConfig
    dimensions: DimensionsConfig = field(default_factory=DimensionsConfig)
    brackets: BracketsConfig = field(default_factory=BracketsConfig)
    lattice: LatticeConfig = field(default_factory=LatticeConfig)
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    quantum: QuantumConfig = field(default_factory=QuantumConfig)
    suites: List[str] = field(default_factory=lambda: ["all"])
    seed: int = 0
    output_dir: Path = Path("reports")
    ledger: Optional[Path] = None
    schema_version: int = SCHEMA_VERSION

    @property
    def physical(self) -> PhysicalConstants:
        return self.constants.physical()

    @property
    def metric(self) -> Metric:
        return self.dimensions.metric()


def default_config() -> ScenarioConfig:
    """The built-in scenario: non-unit constants, desk-scale sizes."""
    return ScenarioConfig(constants=ConstantsConfig(m=1.3, c=1.7, chi=0.7, hbar=0.9))


# (section, dataclass, keys that must be present)
_SECTIONS = (
    ("dimensions", DimensionsConfig, ()),
    ("constants", ConstantsConfig, ("m", "c", "chi", "hbar")),
    ("brackets", BracketsConfig, ()),
    ("lattice", LatticeConfig, ()),
    ("dynamics", DynamicsConfig, ()),
    ("quantum", QuantumConfig, ()),
)

_POSITIVE = {
    "constants": ("m", "c", "chi", "hbar"),
    "brackets": ("n_states", "h"),
    "lattice": ("points", "spacing", "refinements"),
    "dynamics": ("n_states", "dt", "steps"),
    "quantum": ("d_particle", "d_field", "grid_points", "grid_width", "t_max", "n_times", "n_gaussian_states"),
}


def _coerce(path: str, value: Any, target: Any) -> Any:
    try:
        if target is bool:
            if not isinstance(value, bool):
                raise TypeError(f"expected true/false, got {value!r}")
            return value
        if target is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise TypeError(f"expected an integer, got {value!r}")
            return int(value)
        if target is float:
            if isinstance(value, bool):
                raise TypeError(f"expected a number, got {value!r}")
            return float(value)
        if target is str:
            return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigValidationError(path, str(e))
    return value


class ConfigManager:
    """Loads a YAML scenario file and validates it into a ScenarioConfig."""

    def __init__(self, config_path: Path):
        self.config_path = Path(config_path)
        self._config: Optional[Dict[str, Any]] = None
        self._scenario: Optional[ScenarioConfig] = None

    def load(self) -> None:
        """Load configuration from file."""
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML format in config file: {e}")
        except FileNotFoundError:
            raise ConfigError(f"Config file not found: {self.config_path}")
        except OSError as e:
            raise ConfigError(f"Could not read config: {e}")

    def validate(self) -> ScenarioConfig:
        """Validate configuration structure and content."""
        if self._config is None:
            raise ConfigError("Configuration not loaded")
        self._scenario = parse_scenario(self._config)
        return self._scenario

    def get_scenario(self) -> ScenarioConfig:
        if self._scenario is None:
            self.load()
            self.validate()
        return self._scenario


def _parse_section(name: str, cls, required: Tuple[str, ...], raw: Any):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigValidationError(name, "must be a mapping")
    for key in required:
        if key not in raw:
            raise ConfigValidationError(f"{name}.{key}", "missing required field")
    known = {f.name: f for f in fields(cls)}
    unknown = set(raw) - set(known)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigValidationError(f"{name}.{key}", "unknown field")
    values = {}
    for key, value in raw.items():
        path = f"{name}.{key}"
        target = known[key].type
        if target in (int, float, bool, str):
            value = _coerce(path, value, target)
        elif key in ("h_sweep",):
            if not isinstance(value, list) or len(value) < 2:
                raise ConfigValidationError(path, "must be a list of at least two step sizes")
            value = [_coerce(path, v, float) for v in value]
            if any(not v > 0 for v in value):
                raise ConfigValidationError(path, "step sizes must be strictly positive")
        elif key == "signature" and value is not None:
            if not isinstance(value, list) or any(v not in (1, -1) for v in value):
                raise ConfigValidationError(path, "must be a list of +1/-1 entries")
        values[key] = value
    section = cls(**values)
    for key in _POSITIVE.get(name, ()):
        if not getattr(section, key) > 0:
            raise ConfigValidationError(f"{name}.{key}", f"must be strictly positive, got {getattr(section, key)!r}")
    return section


def parse_scenario(raw: Any) -> ScenarioConfig:
    """
    Build a ScenarioConfig from parsed YAML.

    Raises:
        ConfigValidationError: Names the dotted path of the first bad field.
    """
    if not isinstance(raw, dict):
        raise ConfigValidationError("<root>", "config file must contain a mapping")
    if "schema_version" not in raw:
        raise ConfigValidationError("schema_version", "missing required field")
    version = _coerce("schema_version", raw["schema_version"], int)
    if version != SCHEMA_VERSION:
        raise ConfigValidationError("schema_version", f"unsupported version {version}, expected {SCHEMA_VERSION}")
    if "constants" not in raw:
        raise ConfigValidationError("constants", "missing required section")

    sections = {name: _parse_section(name, cls, required, raw.get(name)) for name, cls, required in _SECTIONS}
    dims = sections["dimensions"]
    if dims.n < 1:
        raise ConfigValidationError("dimensions.n", f"must be at least 1, got {dims.n}")
    if dims.signature is not None and len(dims.signature) != dims.n:
        raise ConfigValidationError("dimensions.signature", f"needs {dims.n} entries, got {len(dims.signature)}")
    if sections["constants"].omega0 < 0:
        raise ConfigValidationError("constants.omega0", "must be non-negative")
    if sections["lattice"].points < 8:
        raise ConfigValidationError("lattice.points", "must be at least 8")
    if min(sections["quantum"].d_particle, sections["quantum"].d_field) < 8:
        raise ConfigValidationError("quantum.d_particle", "factor dimensions must be at least 8")
    dynamics = sections["dynamics"]
    if dynamics.particle_model not in PARTICLE_MODELS:
        raise ConfigValidationError("dynamics.particle_model", f"expected one of {list(PARTICLE_MODELS)}, got {dynamics.particle_model!r}")
    if dynamics.field_coupling not in FIELD_COUPLINGS:
        raise ConfigValidationError("dynamics.field_coupling", f"expected one of {list(FIELD_COUPLINGS)}, got {dynamics.field_coupling!r}")

    suites = raw.get("suites", ["all"])
    if isinstance(suites, str):
        suites = [suites]
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        raise ConfigValidationError("suites", "must be a suite name or a list of names")

    seed = _coerce("seed", raw.get("seed", 0), int)
    if seed < 0:
        raise ConfigValidationError("seed", "must be non-negative")
    output_dir = Path(raw.get("output_dir", "reports"))
    ledger = raw.get("ledger")

    known = {"schema_version", "seed", "output_dir", "suites", "ledger"} | {name for name, _, _ in _SECTIONS}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigValidationError(unknown[0], "unknown field")

    return ScenarioConfig(
        constants=sections["constants"],
        dimensions=dims,
        brackets=sections["brackets"],
        lattice=sections["lattice"],
        dynamics=sections["dynamics"],
        quantum=sections["quantum"],
        suites=suites,
        seed=seed,
        output_dir=output_dir,
        ledger=Path(ledger) if ledger else None,
        schema_version=version,
    )


def resolve_output_dir(config: ScenarioConfig, override: Optional[Path] = None) -> Path:
    """CLI flag, then the DUALCHART_OUT variable, then the config value."""
    if override is not None:
        return Path(override)
    env = os.environ.get(OUTPUT_ENV_VAR)
    if env:
        return Path(env)
    return config.output_dir
