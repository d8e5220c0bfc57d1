"""Base configuration.

Attributes:
    config_yaml (str): Base configuration as YAML code.
    config_dict (dict): Base configuration as Python dictionary.

Here is the complete base configuration present as a string in the
:obj:`config_yaml` attribute::

{}

"""

import textwrap

import yaml

config_yaml = """# Base configuration
logger:
  version: 1

  disable_existing_loggers: false

  formatters:
    simple:
      format: >-
          [%(processName)s] %(name)s - %(message)s
      datefmt: "%Y-%m-%d %H:%M:%S"

  handlers:
    rich_console:
      "()": MMWaveMC.helpers.hlogging.rich_stderr_handler
      formatter: simple
      level: INFO

  root:
    level: INFO
    handlers:
      - rich_console

dimensions:
  n_ms: 64
  n_bs: 64
  n_rf_ms: 4
  n_rf_bs: 4

channel:
  num_paths: 4
  gain_variance: 1.0
  gamma_max_ms: 0.0
  gamma_max_bs: 0.0
  element_spacing: 0.5

sampling:
  density: 0.5
  pilot_amplitude: 1.0
  pilot_phase: 0.0

svp:
  tolerance_floor: 0.001
  max_iterations: 100
  projection_method: gram_eigendecomposition
  early_stopping: true

master_seed: 0
processes: 1
"""


config_dict = yaml.safe_load(config_yaml)
__doc__ = __doc__.format(textwrap.indent(config_yaml, "    "))
