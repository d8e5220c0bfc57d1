"""Geometric multipath mmWave channel model.

The channel between a BS with ``N_BS`` antennas and an MS with ``N_MS``
antennas is a sum of ``L`` plane-wave paths::

    H = sqrt(N_BS * N_MS / L) * A_MS diag(alpha) A_BS^H

where the columns of ``A_MS`` and ``A_BS`` are steering vectors of the
uniform linear arrays at the path AoAs and AoDs. Each array may carry a
per-element phase error ``gamma_i`` that rotates element ``i`` of every
steering vector without changing its amplitude.

Antenna indices are 0-based throughout the package.

Example:
    >>> from MMWaveMC.models.channel import ArrayGeometry, generate_channel
    >>> ms = ArrayGeometry(num_antennas=64, num_rf_chains=4)
    >>> bs = ArrayGeometry(num_antennas=64, num_rf_chains=4)
    >>> channel = generate_channel(ms, bs, num_paths=4, gain_variance=1.0, rng_seed=7)
    >>> channel.matrix.shape
    (64, 64)
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Union

import numpy as np

from MMWaveMC.constants import DEFAULT_ELEMENT_SPACING
from MMWaveMC.helpers import hlogging

_log = hlogging.get_logger(__name__)

__all__ = [
    "ArrayGeometry",
    "PathSet",
    "ChannelInstance",
    "GeometryError",
    "steering_vector",
    "steering_matrix",
    "draw_phase_errors",
    "sample_paths",
    "assemble_channel",
    "generate_channel",
]

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

_HALF_PI = np.pi / 2


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array of one terminal wired as equal switch subarrays.

    Attributes:
        num_antennas: Number of array elements N.
        num_rf_chains: Number of RF chains; each drives one contiguous subarray.
        element_spacing: Element spacing in wavelengths (d / lambda).
        phase_errors: Per-element phase errors gamma_i in radians.
    """

    num_antennas: int
    num_rf_chains: int
    element_spacing: float = DEFAULT_ELEMENT_SPACING
    phase_errors: np.ndarray = field(default=None, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.num_antennas < 1:
            raise GeometryError(f"num_antennas must be positive, got {self.num_antennas}")
        if self.num_rf_chains < 1:
            raise GeometryError(f"num_rf_chains must be positive, got {self.num_rf_chains}")
        if self.num_antennas % self.num_rf_chains:
            raise GeometryError(
                f"num_rf_chains ({self.num_rf_chains}) must divide "
                f"num_antennas ({self.num_antennas})"
            )
        if self.element_spacing <= 0:
            raise GeometryError(f"element_spacing must be positive, got {self.element_spacing}")

        if self.phase_errors is None:
            errors = np.zeros(self.num_antennas)
        else:
            errors = np.asarray(self.phase_errors, dtype=float).reshape(-1)
        if errors.shape != (self.num_antennas,):
            raise GeometryError(
                f"phase_errors has length {errors.shape[0]}, expected {self.num_antennas}"
            )
        errors.setflags(write=False)
        object.__setattr__(self, "phase_errors", errors)

    @property
    def subarray_size(self) -> int:
        """Number of antennas sharing one RF chain."""
        return self.num_antennas // self.num_rf_chains

    @property
    def is_ideal(self) -> bool:
        """True when no element carries a phase error."""
        return not np.any(self.phase_errors)

    def subarrays(self) -> List[np.ndarray]:
        """Return the antenna indices of each contiguous subarray."""
        size = self.subarray_size
        return [np.arange(k * size, (k + 1) * size) for k in range(self.num_rf_chains)]

    def ideal(self) -> "ArrayGeometry":
        """Return the same array without phase errors."""
        return replace(self, phase_errors=None)

    def with_phase_errors(self, gamma_max: float, rng_seed: SeedLike = None) -> "ArrayGeometry":
        """Return the same array with phase errors drawn uniformly from [-gamma_max, gamma_max]."""
        return replace(
            self, phase_errors=draw_phase_errors(self.num_antennas, gamma_max, rng_seed)
        )


@dataclass(frozen=True)
class PathSet:
    """Ground-truth parameters of the propagation paths.

    Attributes:
        aoas: Angles of arrival theta_l at the MS, radians.
        aods: Angles of departure phi_l at the BS, radians.
        gains: Complex path gains alpha_l.
        gain_variance: Variance sigma_alpha^2 the gains were drawn with.
    """

    aoas: np.ndarray
    aods: np.ndarray
    gains: np.ndarray
    gain_variance: float = 1.0

    def __post_init__(self) -> None:
        aoas = np.asarray(self.aoas, dtype=float).reshape(-1)
        aods = np.asarray(self.aods, dtype=float).reshape(-1)
        gains = np.asarray(self.gains, dtype=complex).reshape(-1)

        if aoas.size < 1:
            raise GeometryError("a path set needs at least one path")
        if not (aoas.size == aods.size == gains.size):
            raise GeometryError(
                f"aoas, aods and gains lengths differ: {aoas.size}, {aods.size}, {gains.size}"
            )
        for name, angles in (("aoas", aoas), ("aods", aods)):
            _check_angles(angles, name)
        if self.gain_variance <= 0:
            raise GeometryError(f"gain_variance must be positive, got {self.gain_variance}")

        object.__setattr__(self, "aoas", aoas)
        object.__setattr__(self, "aods", aods)
        object.__setattr__(self, "gains", gains)

    @property
    def count(self) -> int:
        """Number of paths L."""
        return int(self.gains.size)

    def scaled(self, factor: complex) -> "PathSet":
        """Return the same paths with every gain multiplied by ``factor``."""
        return replace(self, gains=self.gains * factor)


@dataclass(frozen=True)
class ChannelInstance:
    """One channel realization together with what generated it.

    Attributes:
        matrix: Complex ``N_MS x N_BS`` channel matrix.
        paths: The paths the matrix was assembled from.
        ms_geometry: Receive array.
        bs_geometry: Transmit array.
    """

    matrix: np.ndarray
    paths: PathSet
    ms_geometry: ArrayGeometry
    bs_geometry: ArrayGeometry

    @property
    def shape(self):
        return self.matrix.shape

    def reassemble(self) -> np.ndarray:
        """Rebuild the matrix from the stored paths and geometries."""
        return _synthesize(self.paths, self.ms_geometry, self.bs_geometry)


def steering_vector(geometry: ArrayGeometry, angle: float) -> np.ndarray:
    """Array response of ``geometry`` to a plane wave from ``angle``.

    Element ``i`` equals ``exp(j(2 pi i d sin(angle) / lambda + gamma_i)) / sqrt(N)``.
    The vector has unit norm with or without phase errors.

    Arguments:
        geometry: The array.
        angle: Direction in radians, within [-pi/2, pi/2].

    Returns:
        Complex vector of length ``geometry.num_antennas``.

    Raises:
        GeometryError: If ``angle`` lies outside [-pi/2, pi/2].
    """
    return steering_matrix(geometry, [angle])[:, 0]


def steering_matrix(geometry: ArrayGeometry, angles: Sequence[float]) -> np.ndarray:
    """Stack the steering vectors of ``angles`` as columns.

    Arguments:
        geometry: The array.
        angles: Directions in radians, each within [-pi/2, pi/2].

    Returns:
        Complex ``N x len(angles)`` matrix.
    """
    angles = np.asarray(angles, dtype=float).reshape(-1)
    _check_angles(angles, "angle")

    n = np.arange(geometry.num_antennas)[:, None]
    phase = 2 * np.pi * geometry.element_spacing * n * np.sin(angles)[None, :]
    phase = phase + geometry.phase_errors[:, None]
    return np.exp(1j * phase) / np.sqrt(geometry.num_antennas)


def draw_phase_errors(num_antennas: int, gamma_max: float, rng_seed: SeedLike = None) -> np.ndarray:
    """Draw i.i.d. phase errors uniformly from [-gamma_max, gamma_max].

    The uniform variates are drawn on [-1, 1] and scaled, so the same seed
    gives the same error pattern shape at every ``gamma_max`` and exact
    zeros when ``gamma_max`` is 0.

    Arguments:
        num_antennas: Number of elements.
        gamma_max: Largest error magnitude in radians (>= 0).
        rng_seed: Seed or generator.

    Returns:
        Array of ``num_antennas`` phase errors.
    """
    if gamma_max < 0:
        raise GeometryError(f"gamma_max must be non-negative, got {gamma_max}")
    rng = np.random.default_rng(rng_seed)
    return gamma_max * rng.uniform(-1.0, 1.0, size=num_antennas)


def sample_paths(count: int, gain_variance: float, rng_seed: SeedLike = None) -> PathSet:
    """Draw random path parameters.

    AoAs and AoDs are i.i.d. uniform on [-pi/2, pi/2]; gains are i.i.d.
    circularly symmetric complex Gaussian with variance ``gain_variance``.
    The draw order (AoAs, AoDs, real parts, imaginary parts) is fixed so a
    seed always yields the same path set.

    Arguments:
        count: Number of paths L (>= 1).
        gain_variance: Gain variance sigma_alpha^2 (> 0).
        rng_seed: Seed or generator.

    Returns:
        A :class:`PathSet`.
    """
    if count < 1:
        raise GeometryError(f"count must be at least 1, got {count}")
    if gain_variance <= 0:
        raise GeometryError(f"gain_variance must be positive, got {gain_variance}")

    rng = np.random.default_rng(rng_seed)
    aoas = rng.uniform(-_HALF_PI, _HALF_PI, size=count)
    aods = rng.uniform(-_HALF_PI, _HALF_PI, size=count)
    scale = np.sqrt(gain_variance / 2)
    gains = scale * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
    return PathSet(aoas=aoas, aods=aods, gains=gains, gain_variance=gain_variance)


def assemble_channel(
    paths: PathSet, ms_geometry: ArrayGeometry, bs_geometry: ArrayGeometry
) -> ChannelInstance:
    """Assemble the channel matrix from paths and array geometries.

    Arguments:
        paths: Path parameters.
        ms_geometry: Receive array (rows of H).
        bs_geometry: Transmit array (columns of H).

    Returns:
        A :class:`ChannelInstance` whose matrix has rank at most ``paths.count``.
    """
    if paths.count > min(ms_geometry.num_antennas, bs_geometry.num_antennas):
        _log.debug(
            "assemble_channel: %d paths exceed array size %dx%d; rank is capped",
            paths.count,
            ms_geometry.num_antennas,
            bs_geometry.num_antennas,
        )
    matrix = _synthesize(paths, ms_geometry, bs_geometry)
    return ChannelInstance(
        matrix=matrix, paths=paths, ms_geometry=ms_geometry, bs_geometry=bs_geometry
    )


def generate_channel(
    ms_geometry: ArrayGeometry,
    bs_geometry: ArrayGeometry,
    num_paths: int,
    gain_variance: float = 1.0,
    rng_seed: SeedLike = None,
    paths: Optional[PathSet] = None,
) -> ChannelInstance:
    """Draw paths and assemble a channel in one call.

    Arguments:
        ms_geometry: Receive array.
        bs_geometry: Transmit array.
        num_paths: Number of paths L.
        gain_variance: Gain variance sigma_alpha^2.
        rng_seed: Seed or generator for :func:`sample_paths`.
        paths: Use these paths instead of drawing new ones.

    Returns:
        A :class:`ChannelInstance`.
    """
    if paths is None:
        paths = sample_paths(num_paths, gain_variance, rng_seed)
    return assemble_channel(paths, ms_geometry, bs_geometry)


def _synthesize(
    paths: PathSet, ms_geometry: ArrayGeometry, bs_geometry: ArrayGeometry
) -> np.ndarray:
    a_ms = steering_matrix(ms_geometry, paths.aoas)
    a_bs = steering_matrix(bs_geometry, paths.aods)
    scale = np.sqrt(ms_geometry.num_antennas * bs_geometry.num_antennas / paths.count)
    return (a_ms * (scale * paths.gains)[None, :]) @ a_bs.conj().T


def _check_angles(angles: np.ndarray, name: str) -> None:
    # Small slack for angles computed as arcsin of grid values
    if np.any(np.abs(angles) > _HALF_PI + 1e-12) or not np.all(np.isfinite(angles)):
        raise GeometryError(f"{name} values must lie in [-pi/2, pi/2]")


class GeometryError(ValueError):
    """Represents an invalid array geometry or path set."""
