"""MMWaveMC helpers package.

This package provides utility modules for logging, configuration
loading and general dictionary utilities.
"""

from . import hconfigs, hlogging, util

__all__ = ["hlogging", "hconfigs", "util"]
