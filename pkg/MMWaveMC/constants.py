"""Centralized constants for MMWaveMC.

This module contains all shared constants used across the MMWaveMC package.
Import version and numeric defaults from here to ensure consistency.
"""

from typing import Dict, List

# Version - Single source of truth
VERSION = "0.1.0"

# Array defaults (spacing is in wavelengths, d / lambda)
DEFAULT_ELEMENT_SPACING = 0.5
DEFAULT_GAIN_VARIANCE = 1.0

# SVP defaults
DEFAULT_TOLERANCE_FLOOR = 1e-3
DEFAULT_MAX_ITERATIONS = 100
STEP_SIZE_HIGH_DENSITY = 1.8
STEP_SIZE_LOW_DENSITY = 1.4
HIGH_DENSITY_THRESHOLD = 0.5
MAX_RIP_CONSTANT = 1.0 / 3.0

# A residual this many times the initial residual ends the loop as diverged
DIVERGENCE_FACTOR = 1e6

# Relative gap between the L-th and (L+1)-th singular values below which
# the rank-L subspace is considered ill-defined
DEGENERACY_GAP = 1e-8

# Iterations used by both estimators at each PNR (dB) in the NMSE and SE studies
PNR_ITERATION_SCHEDULE: Dict[int, int] = {
    5: 2,
    10: 3,
    15: 4,
    20: 5,
    25: 6,
}

# Miss probabilities below this are reported analytically only
MIN_ESTIMABLE_MISS_PROBABILITY = 1e-4

# Default trial counts per study
DEFAULT_TRIALS: Dict[str, int] = {
    "convergence": 50,
    "stopping": 200,
    "nmse": 200,
    "se": 100,
    "missprob": 100000,
    "incoherence": 100,
}

STUDY_NAMES: List[str] = ["convergence", "stopping", "nmse", "se", "missprob", "incoherence"]

# Estimator and scheme labels used in CSV output
ESTIMATORS: List[str] = ["svp", "omp_unitary", "omp_redundant"]
SE_SCHEMES: List[str] = ["perfect", "svp", "omp_unitary", "omp_redundant", "no_as"]

# Greedy joint selection stops after this many BS/MS sweep pairs
DEFAULT_MAX_SWEEPS = 5

# Float format for CSV cells; fixed so reruns are byte-identical
CSV_FLOAT_FORMAT = "{:.10g}"
