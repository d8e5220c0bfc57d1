"""Switch-based uniform spatial sampling (USS) of the channel matrix.

During training the BS activates one transmit antenna per stage and each
MS RF chain switches on one antenna of its subarray, so one stage observes
``N_RF_MS`` entries of one column of ``H``. The schedule sweeps the BS
antennas cyclically and, within every (column, subarray) pair, draws MS
antennas without replacement, so each column ends up with exactly
``M / (N_BS * N_RF_MS)`` distinct samples per subarray.

Example:
    >>> from MMWaveMC.models.channel import ArrayGeometry
    >>> from MMWaveMC.models.sampling import build_uss_schedule, miss_probability
    >>> ms = ArrayGeometry(64, 4)
    >>> bs = ArrayGeometry(64, 4)
    >>> schedule = build_uss_schedule(ms, bs, num_samples=2048, rng_seed=1)
    >>> schedule.num_stages
    512
    >>> f"{miss_probability(64, 64, 2048, 4):.1e}"
    '5.4e-20'
"""

from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from MMWaveMC.helpers import hlogging
from MMWaveMC.models.channel import ArrayGeometry, ChannelInstance, SeedLike

_log = hlogging.get_logger(__name__)

__all__ = [
    "TrainingSchedule",
    "SampleSet",
    "SamplingError",
    "build_uss_schedule",
    "observe",
    "apply_mask",
    "miss_probability",
    "empirical_miss_frequency",
    "nearest_valid_num_samples",
    "num_samples_for_density",
    "pnr_to_noise_variance",
]

Omega = Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class TrainingSchedule:
    """Antennas switched on at every training stage.

    Attributes:
        bs_antennas: Active BS antenna j_t per stage, shape ``(N_s,)``.
        ms_antennas: Active MS antenna per subarray per stage, shape ``(N_s, N_RF_MS)``.
        shape: ``(N_MS, N_BS)`` of the sampled channel.
    """

    bs_antennas: np.ndarray
    ms_antennas: np.ndarray
    shape: Tuple[int, int]

    @property
    def num_stages(self) -> int:
        return int(self.bs_antennas.size)

    @property
    def num_samples(self) -> int:
        return int(self.ms_antennas.size)

    def omega(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the sampled (row, column) indices in stage order."""
        rows = self.ms_antennas.reshape(-1)
        cols = np.repeat(self.bs_antennas, self.ms_antennas.shape[1])
        return rows, cols

    def header(self) -> List[str]:
        n_rf = self.ms_antennas.shape[1]
        return ["stage", "bs_antenna"] + [f"ms_antenna_{k + 1}" for k in range(n_rf)]

    def as_rows(self) -> List[List[int]]:
        """Return one CSV row per stage: stage, bs_antenna, ms_antenna_1..N_RF."""
        return [
            [t, int(self.bs_antennas[t])] + [int(i) for i in self.ms_antennas[t]]
            for t in range(self.num_stages)
        ]


@dataclass(frozen=True)
class SampleSet:
    """Noisy observations of a subset Omega of channel entries.

    Attributes:
        rows: Row indices of Omega.
        cols: Column indices of Omega.
        observed: ``N_MS x N_BS`` matrix holding the observations on Omega, zero elsewhere.
        density: Sampling density p = |Omega| / (N_MS * N_BS).
        noise_variance: Noise variance sigma^2 of the training observations.
    """

    rows: np.ndarray
    cols: np.ndarray
    observed: np.ndarray
    density: float
    noise_variance: float = 0.0

    @property
    def shape(self) -> Tuple[int, int]:
        return self.observed.shape

    @property
    def num_samples(self) -> int:
        return int(self.rows.size)

    @property
    def mask(self) -> np.ndarray:
        """Boolean matrix that is True on Omega."""
        mask = np.zeros(self.observed.shape, dtype=bool)
        mask[self.rows, self.cols] = True
        return mask

    @property
    def values(self) -> np.ndarray:
        """Observed values on Omega, aligned with ``rows`` and ``cols``."""
        return self.observed[self.rows, self.cols]


def num_samples_for_density(n_ms: int, n_bs: int, density: float) -> int:
    """Number of samples M = round(p * N_MS * N_BS)."""
    return int(round(density * n_ms * n_bs))


def nearest_valid_num_samples(n_ms: int, n_bs: int, num_samples: int, n_rf_ms: int) -> int:
    """Closest M that satisfies the USS divisibility and capacity constraints."""
    step = n_rf_ms * n_bs
    per_column_max = n_ms // n_rf_ms
    visits = int(round(num_samples / step))
    visits = min(max(visits, 1), per_column_max)
    return visits * step


def _check_num_samples(n_ms: int, n_bs: int, num_samples: int, n_rf_ms: int) -> int:
    """Validate M and return the per-(column, subarray) sample count."""
    if n_ms % n_rf_ms:
        raise SamplingError(f"N_RF_MS ({n_rf_ms}) must divide N_MS ({n_ms})")
    step = n_rf_ms * n_bs
    per_column = num_samples // step if num_samples > 0 else 0
    subarray_size = n_ms // n_rf_ms
    if num_samples <= 0 or num_samples % step or per_column > subarray_size:
        nearest = nearest_valid_num_samples(n_ms, n_bs, num_samples, n_rf_ms)
        raise SamplingError(
            f"num_samples={num_samples} is not a multiple of N_RF_MS*N_BS={step} "
            f"between {step} and {n_ms * n_bs}; nearest valid value is {nearest}",
            nearest_valid=nearest,
        )
    return per_column


def build_uss_schedule(
    ms_geometry: ArrayGeometry,
    bs_geometry: ArrayGeometry,
    num_samples: int,
    rng_seed: SeedLike = None,
) -> TrainingSchedule:
    """Build a uniform spatial sampling training schedule.

    Stage ``t`` (0-based) activates BS antenna ``t mod N_BS``. Every
    (column, subarray) pair gets its own random permutation of the
    subarray's antennas, consumed in order across that column's visits.

    Arguments:
        ms_geometry: Receive array; its RF chains define the subarrays.
        bs_geometry: Transmit array.
        num_samples: Total number of sampled entries M.
        rng_seed: Seed or generator.

    Returns:
        A :class:`TrainingSchedule` with ``M / N_RF_MS`` stages.

    Raises:
        SamplingError: If M violates divisibility; the message names the nearest valid M.
    """
    n_ms, n_bs = ms_geometry.num_antennas, bs_geometry.num_antennas
    n_rf = ms_geometry.num_rf_chains
    per_column = _check_num_samples(n_ms, n_bs, num_samples, n_rf)
    subarray_size = ms_geometry.subarray_size

    rng = np.random.default_rng(rng_seed)
    # picks[j, k, v]: local index of the v-th visit of column j in subarray k
    picks = rng.random((n_bs, n_rf, subarray_size)).argsort(axis=-1)[..., :per_column]
    offsets = (np.arange(n_rf) * subarray_size)[None, :, None]
    ms_antennas = (picks + offsets).transpose(2, 0, 1).reshape(-1, n_rf)
    bs_antennas = np.tile(np.arange(n_bs), per_column)

    _log.debug(
        "build_uss_schedule: %d stages, %d samples per column per subarray",
        bs_antennas.size,
        per_column,
    )
    return TrainingSchedule(bs_antennas=bs_antennas, ms_antennas=ms_antennas, shape=(n_ms, n_bs))


def observe(
    channel: ChannelInstance,
    schedule: TrainingSchedule,
    pilot: complex = 1.0,
    noise_variance: float = 0.0,
    rng_seed: SeedLike = None,
) -> SampleSet:
    """Run the training stages of ``schedule`` over ``channel``.

    Each scheduled entry is received as ``H[i, j] s + n`` with
    ``n ~ CN(0, sigma^2)`` and normalized by the pilot, so the recorded
    value is ``H[i, j] + n / s``.

    Arguments:
        channel: The true channel.
        schedule: The training schedule.
        pilot: Pilot symbol s (nonzero).
        noise_variance: Receiver noise variance sigma^2 (>= 0).
        rng_seed: Seed or generator for the noise.

    Returns:
        A :class:`SampleSet`.
    """
    if pilot == 0:
        raise SamplingError("pilot must be nonzero")
    if noise_variance < 0:
        raise SamplingError(f"noise_variance must be non-negative, got {noise_variance}")
    if tuple(schedule.shape) != tuple(channel.shape):
        raise SamplingError(
            f"schedule shape {schedule.shape} does not match channel shape {channel.shape}"
        )

    rows, cols = schedule.omega()
    rng = np.random.default_rng(rng_seed)
    count = rows.size
    noise = np.sqrt(noise_variance / 2) * (
        rng.standard_normal(count) + 1j * rng.standard_normal(count)
    )
    received = channel.matrix[rows, cols] * pilot + noise

    observed = np.zeros(channel.shape, dtype=complex)
    observed[rows, cols] = received / pilot
    density = count / (channel.shape[0] * channel.shape[1])
    return SampleSet(
        rows=rows, cols=cols, observed=observed, density=density, noise_variance=noise_variance
    )


def apply_mask(matrix: np.ndarray, omega: Omega) -> np.ndarray:
    """Sampling operator P_Omega: keep entries on Omega and zero the rest.

    Arguments:
        matrix: Any matrix.
        omega: Boolean mask of the same shape or a ``(rows, cols)`` index pair.

    Returns:
        A new matrix; applying it twice gives the same result.
    """
    matrix = np.asarray(matrix)
    if isinstance(omega, tuple):
        rows, cols = omega
        out = np.zeros_like(matrix)
        out[rows, cols] = matrix[rows, cols]
        return out
    return np.where(omega, matrix, 0)


def miss_probability(n_ms: int, n_bs: int, num_samples: int, n_rf_ms: int) -> float:
    """Probability that a given row of H receives no sample under USS.

    Each column samples ``M / N_BS`` of its ``N_MS`` rows, independently
    across columns, so a fixed row is missed with probability
    ``((N_MS - M / N_BS) / N_MS) ** N_BS``.

    Arguments:
        n_ms: Number of MS antennas.
        n_bs: Number of BS antennas.
        num_samples: Total number of samples M.
        n_rf_ms: Number of MS RF chains.

    Returns:
        Probability in [0, 1].
    """
    _check_num_samples(n_ms, n_bs, num_samples, n_rf_ms)
    per_column = num_samples / n_bs
    return float(((n_ms - per_column) / n_ms) ** n_bs)


def empirical_miss_frequency(
    ms_geometry: ArrayGeometry,
    bs_geometry: ArrayGeometry,
    num_samples: int,
    trials: int,
    rng_seed: SeedLike = None,
    row: int = 0,
) -> Tuple[float, float]:
    """Estimate row-miss frequencies by drawing fresh schedules.

    Arguments:
        ms_geometry: Receive array.
        bs_geometry: Transmit array.
        num_samples: Total number of samples M.
        trials: Number of schedules to draw.
        rng_seed: Seed or generator.
        row: The row whose miss frequency is reported.

    Returns:
        ``(row_frequency, any_row_frequency)``: how often ``row`` and how
        often at least one row received no sample.
    """
    rng = np.random.default_rng(rng_seed)
    n_ms = ms_geometry.num_antennas
    row_misses = 0
    any_misses = 0
    for _ in range(trials):
        schedule = build_uss_schedule(ms_geometry, bs_geometry, num_samples, rng)
        hit = np.zeros(n_ms, dtype=bool)
        hit[schedule.ms_antennas.reshape(-1)] = True
        row_misses += int(not hit[row])
        any_misses += int(not hit.all())
    return row_misses / trials, any_misses / trials


def pnr_to_noise_variance(pnr_db: float, pilot: complex = 1.0, gain_variance: float = 1.0) -> float:
    """Noise variance for a pilot-to-noise ratio |s|^2 sigma_alpha^2 / sigma^2 in dB."""
    return float(abs(pilot) ** 2 * gain_variance / 10 ** (pnr_db / 10))


class SamplingError(ValueError):
    """Represents an invalid training schedule request.

    Attributes:
        nearest_valid: The closest valid number of samples, when one applies.
    """

    def __init__(self, message: str, nearest_valid: Union[int, None] = None):
        super().__init__(message)
        self.nearest_valid = nearest_valid
