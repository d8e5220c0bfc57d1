"""Configuration loading utilities for MMWaveMC.

This module loads experiment configuration from YAML files, merges it
over the base configuration in :mod:`MMWaveMC.baseconfig` and validates
the result with :class:`MMWaveMC.config_models.ExperimentConfig`.

Example:
    >>> from MMWaveMC.helpers import hconfigs
    >>> config = hconfigs.load_config('experiment.yaml')
    >>> config.dimensions.n_ms
    64
"""

import copy
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from MMWaveMC import baseconfig
from MMWaveMC.helpers import hlogging, util

_log = hlogging.get_logger(__name__)


def load_yaml(filepath: Union[str, Path]) -> Dict[str, Any]:
    """Read a YAML mapping from ``filepath``.

    Arguments:
        filepath: Path to the YAML file.

    Returns:
        The parsed mapping; an empty file gives an empty dict.

    Raises:
        FileNotFoundError: If the file does not exist.
        yaml.YAMLError: If YAML parsing fails.
        ValueError: If the document is not a mapping.
    """
    filepath = Path(filepath)
    if not filepath.exists():
        raise FileNotFoundError(f"Configuration file not found: {filepath}")

    with open(filepath, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}

    if not isinstance(data, dict):
        raise ValueError(f"Configuration file {filepath} must hold a mapping at the top level")
    return data


def merged_dict(filepath: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Base configuration with the user file merged over it; user values take precedence."""
    merged = copy.deepcopy(baseconfig.config_dict)
    if filepath is not None:
        merged = util.deep_merge_dicts(merged, load_yaml(filepath))
    return merged


def load_config(filepath: Optional[Union[str, Path]] = None):
    """Load, merge and validate an experiment configuration.

    Arguments:
        filepath: Path to the user YAML file; ``None`` loads the base configuration.

    Returns:
        A validated :class:`MMWaveMC.config_models.ExperimentConfig`.

    Raises:
        FileNotFoundError: If configuration file not found.
        yaml.YAMLError: If YAML parsing fails.
        pydantic.ValidationError: If the merged configuration is invalid.
    """
    from MMWaveMC.config_models import ExperimentConfig

    try:
        config = ExperimentConfig.from_dict(merged_dict(filepath))
    except Exception as e:
        _log.error("Configuration validation failed: %s", e)
        raise

    _log.debug("Loaded configuration %s; digest %s", filepath or "(base)", config.digest())
    return config
