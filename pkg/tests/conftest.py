"""
Shared fixtures: a seeded generator, non-unit constants and a desk-scale scenario.
"""
import numpy as np
import pytest
import yaml

from dualchart.classical.phase_space import Metric, PhysicalConstants
from dualchart.config.manager import parse_scenario


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def constants():
    # non-unit values so that misplaced factors of m, c, chi or hbar show up
    return PhysicalConstants(m=1.3, c=1.7, chi=0.7, hbar=0.9)


@pytest.fixture
def unit_constants():
    return PhysicalConstants(m=1.0, c=1.0, chi=1.0, hbar=1.0)


@pytest.fixture
def metric():
    return Metric.euclidean(2)


@pytest.fixture
def small_scenario_dict(tmp_path):
    return {
        "schema_version": 1,
        "seed": 7,
        "output_dir": str(tmp_path / "reports"),
        "constants": {"m": 1.3, "c": 1.7, "chi": 0.7, "hbar": 0.9},
        "brackets": {"n_states": 4},
        "lattice": {"points": 24, "spacing": 0.05, "refinements": 1},
        "dynamics": {"n_states": 2, "steps": 100},
        "quantum": {"d_particle": 10, "d_field": 10, "grid_points": 33, "t_max": 1.0,
                    "n_times": 5, "n_gaussian_states": 2},
        "suites": ["brackets"],
    }


@pytest.fixture
def small_scenario(small_scenario_dict):
    return parse_scenario(small_scenario_dict)


@pytest.fixture
def scenario_file(tmp_path, small_scenario_dict):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(small_scenario_dict), encoding="utf-8")
    return path
