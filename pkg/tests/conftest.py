"""Pytest configuration and fixtures for MMWaveMC tests."""

import os
import tempfile
from pathlib import Path
from typing import Any, Dict

import pytest
import yaml


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def small_config_dict() -> Dict[str, Any]:
    """Return a valid configuration small enough to run every study in seconds."""
    return {
        "logger": {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {"simple": {"format": "%(levelname)s %(name)s %(message)s"}},
            "handlers": {"console": {"class": "logging.StreamHandler", "formatter": "simple"}},
            "root": {"level": "WARNING", "handlers": ["console"]},
        },
        "dimensions": {"n_ms": 8, "n_bs": 8, "n_rf_ms": 2, "n_rf_bs": 2},
        "channel": {"num_paths": 2},
        "sampling": {"density": 0.5},
        "sweeps": {
            "pnr_db": [10.0, 25.0],
            "densities": [0.5, 0.75],
            "step_sizes": [1.4, 1.8],
            "gamma_max": [0.0, 0.2],
            "snr_db": [0.0, 10.0],
        },
        "studies": {
            "convergence": {"pnr_db": 25.0, "max_iterations": 10},
            "stopping": {"max_iterations": 30},
            "se": {"pnr_db": 10.0, "max_sweeps": 3},
        },
        "trials": {
            "convergence": 3,
            "stopping": 4,
            "nmse": 3,
            "se": 2,
            "missprob": 200,
            "incoherence": 4,
        },
        "missprob": [{"n_ms": 8, "n_bs": 8, "n_rf_ms": 2, "num_samples": 16}],
        "master_seed": 7,
    }


@pytest.fixture
def small_config(small_config_dict):
    """Return the small configuration as a validated model."""
    from MMWaveMC.config_models import ExperimentConfig

    return ExperimentConfig.from_dict(small_config_dict)


@pytest.fixture
def small_config_yaml(temp_dir, small_config_dict) -> Path:
    """Create the small configuration as a YAML file."""
    config_path = temp_dir / "config.yaml"
    with open(config_path, "w") as f:
        yaml.dump(small_config_dict, f)
    return config_path


@pytest.fixture
def invalid_config_dict(small_config_dict) -> Dict[str, Any]:
    """Return a configuration whose density breaks the sampling divisibility rule."""
    small_config_dict["sampling"] = {"density": 0.3}
    return small_config_dict


@pytest.fixture
def small_geometries():
    """Ideal 8-antenna arrays with two RF chains on each side."""
    from MMWaveMC.models.channel import ArrayGeometry

    return ArrayGeometry(8, 2), ArrayGeometry(8, 2)


@pytest.fixture
def mock_env_vars():
    """Fixture to temporarily set environment variables."""
    original_env = os.environ.copy()

    def _set_env(**kwargs):
        for key, value in kwargs.items():
            os.environ[key] = value

    yield _set_env

    os.environ.clear()
    os.environ.update(original_env)
