"""Configuration models with Pydantic validation.

This module defines Pydantic models for validating MMWaveMC experiment
files. All configuration is validated at load time, and every sampling
divisibility violation is reported together before any trial runs.

Configuration Structure:
    The YAML configuration file has these main sections:
    - logger: Logging configuration (Python logging dictConfig format)
    - dimensions: Array sizes and RF chain counts
    - channel: Path count, gain variance, phase mismatch, element spacing
    - sampling: Sampling density (or sample count) and pilot symbol
    - svp: SVP estimator settings
    - omp: Dictionary grid sizes and iteration override for OMP
    - sweeps: Axes swept by the studies (PNR, density, step size, mismatch, SNR)
    - studies: Per-study settings
    - trials: Monte-Carlo trial count per study
    - missprob: Grid of array sizes for the miss-probability table

Example:
    >>> from MMWaveMC.config_models import ExperimentConfig
    >>> config = ExperimentConfig.from_yaml('config.yaml')
    >>> config.num_samples
    2048

    >>> # Validate a configuration file
    >>> from MMWaveMC.config_models import validate_config
    >>> config = validate_config('config.yaml')
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from MMWaveMC.constants import (
    DEFAULT_ELEMENT_SPACING,
    DEFAULT_GAIN_VARIANCE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_MAX_SWEEPS,
    DEFAULT_TOLERANCE_FLOOR,
    DEFAULT_TRIALS,
    PNR_ITERATION_SCHEDULE,
    STUDY_NAMES,
)
from MMWaveMC.models.channel import ArrayGeometry
from MMWaveMC.models.sampling import nearest_valid_num_samples, num_samples_for_density
from MMWaveMC.models.svp import ProjectionMethod, default_step_size

__all__ = [
    "ExperimentConfig",
    "validate_config",
    "LoggerConfig",
    "DimensionsConfig",
    "ChannelConfig",
    "SamplingConfig",
    "SvpSection",
    "OmpSection",
    "SweepsConfig",
    "StudiesConfig",
    "TrialsConfig",
    "MissProbPoint",
]


class LoggerConfig(BaseModel):
    """Logging configuration section.

    Uses Python's logging.config.dictConfig format.

    Attributes:
        version: Config version (must be 1).
        disable_existing_loggers: Whether to disable existing loggers.
        formatters: Dictionary of formatter configurations.
        handlers: Dictionary of handler configurations.
        loggers: Per-logger levels and handlers.
        root: Root logger configuration.
    """

    version: int = 1
    disable_existing_loggers: bool = False
    formatters: Dict[str, Any] = Field(default_factory=dict)
    handlers: Dict[str, Any] = Field(default_factory=dict)
    loggers: Dict[str, Any] = Field(default_factory=dict)
    root: Dict[str, Any] = Field(default_factory=dict)


class DimensionsConfig(BaseModel):
    """Array sizes.

    Example:
        dimensions:
          n_ms: 64
          n_bs: 64
          n_rf_ms: 4
          n_rf_bs: 4
    """

    n_ms: int = Field(default=64, ge=1, description="MS antennas (rows of H)")
    n_bs: int = Field(default=64, ge=1, description="BS antennas (columns of H)")
    n_rf_ms: int = Field(default=4, ge=1, description="MS RF chains")
    n_rf_bs: int = Field(default=4, ge=1, description="BS RF chains")


class ChannelConfig(BaseModel):
    """Channel model settings.

    Phase-error bounds are given in multiples of pi, so ``0.5`` means
    errors drawn from ``U[-0.5 pi, 0.5 pi]``.
    """

    num_paths: int = Field(default=4, ge=1, description="Number of paths L")
    gain_variance: float = Field(default=DEFAULT_GAIN_VARIANCE, gt=0)
    gamma_max_ms: float = Field(default=0.0, ge=0, le=1, description="MS phase error bound / pi")
    gamma_max_bs: float = Field(default=0.0, ge=0, le=1, description="BS phase error bound / pi")
    element_spacing: float = Field(default=DEFAULT_ELEMENT_SPACING, gt=0, le=1)


class SamplingConfig(BaseModel):
    """Sampling settings.

    ``num_samples`` overrides ``density`` when set. The pilot symbol is
    ``pilot_amplitude * exp(j pilot_phase)``.
    """

    density: float = Field(default=0.5, gt=0, le=1, description="Sampling density p")
    num_samples: Optional[int] = Field(default=None, ge=1, description="Sample count M")
    pilot_amplitude: float = Field(default=1.0, gt=0)
    pilot_phase: float = Field(default=0.0, description="Pilot phase, radians")


class SvpSection(BaseModel):
    """SVP estimator settings; ``None`` picks the density-based default step size."""

    step_size: Optional[float] = Field(default=None, gt=0)
    rank_budget: Optional[int] = Field(default=None, ge=1, description="Defaults to num_paths")
    tolerance_floor: float = Field(default=DEFAULT_TOLERANCE_FLOOR, ge=0)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    projection_method: ProjectionMethod = ProjectionMethod.gram_eigendecomposition
    early_stopping: bool = True


class OmpSection(BaseModel):
    """OMP dictionary settings; grid sizes default to N (unitary) and 2N (redundant)."""

    unitary_grid_ms: Optional[int] = Field(default=None, ge=1)
    unitary_grid_bs: Optional[int] = Field(default=None, ge=1)
    redundant_grid_ms: Optional[int] = Field(default=None, ge=1)
    redundant_grid_bs: Optional[int] = Field(default=None, ge=1)
    iterations: Optional[int] = Field(
        default=None, ge=1, description="Fixed OMP iterations; default follows the PNR schedule"
    )


class SweepsConfig(BaseModel):
    """Axes swept by the studies.

    ``gamma_max`` is in multiples of pi; ``snr_db`` is the SE-study axis.
    """

    pnr_db: List[float] = Field(
        default_factory=lambda: [float(k) for k in PNR_ITERATION_SCHEDULE]
    )
    densities: List[float] = Field(default_factory=lambda: [0.25, 0.5, 0.75])
    step_sizes: List[float] = Field(default_factory=lambda: [0.6, 1.4, 1.8, 2.4])
    gamma_max: List[float] = Field(
        default_factory=lambda: [round(0.05 * k, 2) for k in range(11)]
    )
    snr_db: List[float] = Field(default_factory=lambda: [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0])

    @field_validator("pnr_db", "densities", "step_sizes", "gamma_max", "snr_db")
    @classmethod
    def validate_non_empty(cls, v: List[float]) -> List[float]:
        """Every axis needs at least one point."""
        if not v:
            raise ValueError("sweep axes must not be empty")
        return v

    @field_validator("densities")
    @classmethod
    def validate_densities(cls, v: List[float]) -> List[float]:
        """Densities lie in (0, 1]."""
        for p in v:
            if not 0 < p <= 1:
                raise ValueError(f"density {p} outside (0, 1]")
        return v

    @field_validator("step_sizes")
    @classmethod
    def validate_step_sizes(cls, v: List[float]) -> List[float]:
        """Step sizes are positive."""
        for eta in v:
            if eta <= 0:
                raise ValueError(f"step size {eta} must be positive")
        return v

    @field_validator("gamma_max")
    @classmethod
    def validate_gamma_max(cls, v: List[float]) -> List[float]:
        """Phase-error bounds lie in [0, 1] (multiples of pi)."""
        for gamma in v:
            if not 0 <= gamma <= 1:
                raise ValueError(f"gamma_max {gamma} outside [0, 1] (multiples of pi)")
        return v


class ConvergenceStudyConfig(BaseModel):
    """Convergence study: fixed-length SVP runs at one PNR."""

    pnr_db: float = 25.0
    max_iterations: int = Field(default=50, ge=1)


class StoppingStudyConfig(BaseModel):
    """Stopping study: SVP with the tolerance rule at each swept PNR."""

    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)


class SeStudyConfig(BaseModel):
    """SE study: estimation PNR, stream count and joint-selection sweep cap."""

    pnr_db: float = 10.0
    num_streams: Optional[int] = Field(default=None, ge=1, description="Defaults to num_paths")
    max_sweeps: int = Field(default=DEFAULT_MAX_SWEEPS, ge=1)


class StudiesConfig(BaseModel):
    """Per-study settings."""

    convergence: ConvergenceStudyConfig = Field(default_factory=ConvergenceStudyConfig)
    stopping: StoppingStudyConfig = Field(default_factory=StoppingStudyConfig)
    se: SeStudyConfig = Field(default_factory=SeStudyConfig)


class TrialsConfig(BaseModel):
    """Monte-Carlo trial counts per study."""

    convergence: int = Field(default=DEFAULT_TRIALS["convergence"], ge=1)
    stopping: int = Field(default=DEFAULT_TRIALS["stopping"], ge=1)
    nmse: int = Field(default=DEFAULT_TRIALS["nmse"], ge=1)
    se: int = Field(default=DEFAULT_TRIALS["se"], ge=1)
    missprob: int = Field(default=DEFAULT_TRIALS["missprob"], ge=1)
    incoherence: int = Field(default=DEFAULT_TRIALS["incoherence"], ge=1)


class MissProbPoint(BaseModel):
    """One row of the miss-probability table."""

    n_ms: int = Field(ge=1)
    n_bs: int = Field(ge=1)
    n_rf_ms: int = Field(ge=1)
    num_samples: int = Field(ge=1)


def _default_missprob_grid() -> List[MissProbPoint]:
    return [
        MissProbPoint(n_ms=64, n_bs=64, n_rf_ms=4, num_samples=2048),
        MissProbPoint(n_ms=64, n_bs=64, n_rf_ms=4, num_samples=4096),
        MissProbPoint(n_ms=8, n_bs=8, n_rf_ms=2, num_samples=16),
    ]


class ExperimentConfig(BaseModel):
    """Root configuration model for MMWaveMC.

    Example:
        >>> config = ExperimentConfig.from_yaml('config.yaml')
        >>> print(f"{config.dimensions.n_ms}x{config.dimensions.n_bs}, M={config.num_samples}")
    """

    logger: LoggerConfig = Field(default_factory=LoggerConfig, description="Logging configuration")
    dimensions: DimensionsConfig = Field(default_factory=DimensionsConfig)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    svp: SvpSection = Field(default_factory=SvpSection)
    omp: OmpSection = Field(default_factory=OmpSection)
    sweeps: SweepsConfig = Field(default_factory=SweepsConfig)
    studies: StudiesConfig = Field(default_factory=StudiesConfig)
    trials: TrialsConfig = Field(default_factory=TrialsConfig)
    missprob: List[MissProbPoint] = Field(default_factory=_default_missprob_grid)
    master_seed: int = Field(default=0, ge=0, lt=2**64, description="Seed of every study")
    processes: int = Field(default=1, ge=1, description="Worker processes for trials")

    @model_validator(mode="after")
    def validate_sampling_constraints(self):
        """Collect every divisibility and capacity violation into one error."""
        problems = self.violations()
        if problems:
            raise ValueError(
                f"{len(problems)} configuration violation(s):\n"
                + "\n".join(f"  - {p}" for p in problems)
            )
        return self

    def violations(self) -> List[str]:
        """List every constraint the configuration breaks; empty when valid."""
        problems: List[str] = []
        dims = self.dimensions
        if dims.n_ms % dims.n_rf_ms:
            problems.append(f"n_rf_ms ({dims.n_rf_ms}) must divide n_ms ({dims.n_ms})")
        if dims.n_bs % dims.n_rf_bs:
            problems.append(f"n_rf_bs ({dims.n_rf_bs}) must divide n_bs ({dims.n_bs})")
        if self.rank_budget > min(dims.n_ms, dims.n_bs):
            problems.append(
                f"rank budget {self.rank_budget} exceeds min(n_ms, n_bs) "
                f"= {min(dims.n_ms, dims.n_bs)}"
            )
        if self.num_streams > dims.n_rf_ms:
            problems.append(
                f"se.num_streams ({self.num_streams}) exceeds n_rf_ms ({dims.n_rf_ms})"
            )
        for name, grid, n in (
            ("omp.unitary_grid_ms", self.omp.unitary_grid_ms, dims.n_ms),
            ("omp.unitary_grid_bs", self.omp.unitary_grid_bs, dims.n_bs),
            ("omp.redundant_grid_ms", self.omp.redundant_grid_ms, dims.n_ms),
            ("omp.redundant_grid_bs", self.omp.redundant_grid_bs, dims.n_bs),
        ):
            if grid is not None and grid < n:
                problems.append(f"{name} ({grid}) must be at least the array size ({n})")

        if dims.n_ms % dims.n_rf_ms == 0:
            if self.sampling.num_samples is not None:
                problems.extend(self._sample_count_problems("sampling.num_samples", None))
            else:
                problems.extend(
                    self._sample_count_problems("sampling.density", self.sampling.density)
                )
            for p in self.sweeps.densities:
                problems.extend(self._sample_count_problems("sweeps.densities", p))

        for k, point in enumerate(self.missprob):
            step = point.n_rf_ms * point.n_bs
            if point.n_ms % point.n_rf_ms:
                problems.append(f"missprob[{k}]: n_rf_ms must divide n_ms")
            elif point.num_samples % step or point.num_samples > point.n_ms * point.n_bs:
                nearest = nearest_valid_num_samples(
                    point.n_ms, point.n_bs, point.num_samples, point.n_rf_ms
                )
                problems.append(
                    f"missprob[{k}]: num_samples={point.num_samples} is not a multiple of "
                    f"{step} within [{step}, {point.n_ms * point.n_bs}]; nearest valid {nearest}"
                )
        return problems

    def _sample_count_problems(self, name: str, density: Optional[float]) -> List[str]:
        dims = self.dimensions
        if density is None:
            m = int(self.sampling.num_samples)
            label = f"{name}={m}"
        else:
            m = num_samples_for_density(dims.n_ms, dims.n_bs, density)
            label = f"{name}: p={density} gives M={m}"
        step = dims.n_rf_ms * dims.n_bs
        if m > 0 and m % step == 0 and m // step <= dims.n_ms // dims.n_rf_ms:
            return []
        nearest = nearest_valid_num_samples(dims.n_ms, dims.n_bs, m, dims.n_rf_ms)
        return [
            f"{label}, not a multiple of N_RF_MS*N_BS={step} within [{step}, "
            f"{dims.n_ms * dims.n_bs}]; nearest valid M={nearest} "
            f"(p={nearest / (dims.n_ms * dims.n_bs):g})"
        ]

    @property
    def num_samples(self) -> int:
        """Sample count M of the base sampling setting."""
        if self.sampling.num_samples is not None:
            return self.sampling.num_samples
        return num_samples_for_density(self.dimensions.n_ms, self.dimensions.n_bs, self.density)

    @property
    def density(self) -> float:
        """Sampling density p of the base sampling setting."""
        if self.sampling.num_samples is not None:
            return self.sampling.num_samples / (self.dimensions.n_ms * self.dimensions.n_bs)
        return self.sampling.density

    @property
    def pilot(self) -> complex:
        return complex(self.sampling.pilot_amplitude * np.exp(1j * self.sampling.pilot_phase))

    @property
    def rank_budget(self) -> int:
        return self.svp.rank_budget or self.channel.num_paths

    @property
    def num_streams(self) -> int:
        return self.studies.se.num_streams or self.channel.num_paths

    def step_size(self, density: Optional[float] = None) -> float:
        """Configured SVP step size, or the density-based default."""
        if self.svp.step_size is not None:
            return self.svp.step_size
        return default_step_size(self.density if density is None else density)

    def geometries(self) -> tuple:
        """Ideal ``(ms_geometry, bs_geometry)`` of the configured arrays."""
        dims = self.dimensions
        spacing = self.channel.element_spacing
        return (
            ArrayGeometry(dims.n_ms, dims.n_rf_ms, element_spacing=spacing),
            ArrayGeometry(dims.n_bs, dims.n_rf_bs, element_spacing=spacing),
        )

    def grid_sizes(self) -> Dict[str, tuple]:
        """``{"omp_unitary": (G_r, G_t), "omp_redundant": (G_r, G_t)}``."""
        dims, omp = self.dimensions, self.omp
        return {
            "omp_unitary": (omp.unitary_grid_ms or dims.n_ms, omp.unitary_grid_bs or dims.n_bs),
            "omp_redundant": (
                omp.redundant_grid_ms or 2 * dims.n_ms,
                omp.redundant_grid_bs or 2 * dims.n_bs,
            ),
        }

    def with_overrides(
        self, master_seed: Optional[int] = None, trials: Optional[int] = None
    ) -> "ExperimentConfig":
        """Return a copy with the seed and every trial count replaced where given."""
        data = self.model_dump(mode="json")
        if master_seed is not None:
            data["master_seed"] = master_seed
        if trials is not None:
            data["trials"] = {name: trials for name in STUDY_NAMES}
        return ExperimentConfig.from_dict(data)

    def digest(self) -> str:
        """Short SHA-256 digest of every setting that affects study results."""
        data = self.model_dump(mode="json", exclude={"logger", "processes"})
        payload = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    @classmethod
    def from_yaml(cls, filepath: str) -> "ExperimentConfig":
        """Load and validate configuration from YAML file.

        Arguments:
            filepath: Path to the YAML configuration file.

        Returns:
            Validated ExperimentConfig instance.

        Raises:
            FileNotFoundError: If configuration file not found.
            ValidationError: If configuration is invalid.
        """
        import yaml

        path = Path(filepath)
        if not path.exists():
            raise FileNotFoundError(f"Configuration file not found: {filepath}")

        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}

        return cls(**data)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Create configuration from dictionary."""
        return cls(**data)


def validate_config(filepath: str) -> ExperimentConfig:
    """Validate a configuration file.

    Arguments:
        filepath: Path to configuration file.

    Returns:
        Validated configuration.

    Raises:
        FileNotFoundError: If file not found.
        ValidationError: If configuration is invalid.
    """
    return ExperimentConfig.from_yaml(filepath)
