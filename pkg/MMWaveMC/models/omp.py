"""Compressive-sensing baseline: steering-vector dictionaries and OMP.

The channel is expanded on a grid of quantized directions::

    H = A_MSD H_v A_BSD^H,   vec(H) = (conj(A_BSD) kron A_MSD) vec(H_v)

and the sampled entries give ``y = Phi Psi x + z`` with ``x = vec(H_v)``
sparse. Orthogonal matching pursuit picks one (MS, BS) grid pair per
iteration and refits all picked coefficients by least squares. The
Kronecker dictionary is never formed: the residual correlation with every
pair is ``A_MSD^H R A_BSD`` where ``R`` is the residual scattered back onto
the sampled positions.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from MMWaveMC.constants import DEFAULT_ELEMENT_SPACING, PNR_ITERATION_SCHEDULE
from MMWaveMC.helpers import hlogging
from MMWaveMC.models.channel import ArrayGeometry, steering_matrix
from MMWaveMC.models.sampling import SampleSet
from MMWaveMC.models.svp import svp_per_iteration_flops

_log = hlogging.get_logger(__name__)

__all__ = [
    "Dictionary",
    "SparseEstimate",
    "DictionaryError",
    "build_dictionary",
    "omp_estimate",
    "synthesize",
    "default_iterations",
    "per_iteration_flops",
    "complexity_ratio",
]


@dataclass(frozen=True)
class Dictionary:
    """Pair of steering-vector dictionaries on uniform sine grids.

    Attributes:
        ms_atoms: ``N_MS x G_r`` receive atoms.
        bs_atoms: ``N_BS x G_t`` transmit atoms.
        grid_angles_ms: The ``G_r`` receive grid angles, radians.
        grid_angles_bs: The ``G_t`` transmit grid angles, radians.
    """

    ms_atoms: np.ndarray
    bs_atoms: np.ndarray
    grid_angles_ms: np.ndarray
    grid_angles_bs: np.ndarray

    @classmethod
    def build(
        cls,
        n_ms: int,
        g_r: int,
        n_bs: int,
        g_t: int,
        d_over_lambda: float = DEFAULT_ELEMENT_SPACING,
    ) -> "Dictionary":
        """Build both dictionaries for an ``n_ms x n_bs`` channel."""
        ms_atoms, ms_angles = build_dictionary(n_ms, g_r, d_over_lambda)
        bs_atoms, bs_angles = build_dictionary(n_bs, g_t, d_over_lambda)
        return cls(
            ms_atoms=ms_atoms,
            bs_atoms=bs_atoms,
            grid_angles_ms=ms_angles,
            grid_angles_bs=bs_angles,
        )

    @property
    def grid_shape(self) -> Tuple[int, int]:
        """``(G_r, G_t)``."""
        return self.ms_atoms.shape[1], self.bs_atoms.shape[1]


@dataclass
class SparseEstimate:
    """Output of :func:`omp_estimate`.

    Attributes:
        support: Selected ``(ms_grid_index, bs_grid_index)`` pairs in selection order.
        coefficients: Least-squares coefficients aligned with ``support``.
        reconstructed: ``N_MS x N_BS`` channel estimate.
        residual_norms: Residual norm on the sampled entries after each iteration.
        rank_deficient: True if any least-squares refit was rank deficient.
    """

    support: List[Tuple[int, int]]
    coefficients: np.ndarray
    reconstructed: np.ndarray
    residual_norms: List[float] = field(default_factory=list)
    rank_deficient: bool = False

    @property
    def iterations(self) -> int:
        return len(self.support)

    def header(self) -> List[str]:
        return ["iteration", "ms_grid_index", "bs_grid_index", "coef_real", "coef_imag"]

    def as_rows(self) -> List[list]:
        """Return the support and coefficients as CSV rows."""
        return [
            [k + 1, r, t, float(c.real), float(c.imag)]
            for k, ((r, t), c) in enumerate(zip(self.support, self.coefficients))
        ]


def build_dictionary(
    num_antennas: int, grid_size: int, d_over_lambda: float = DEFAULT_ELEMENT_SPACING
) -> Tuple[np.ndarray, np.ndarray]:
    """Steering-vector dictionary on a uniform grid of spatial frequencies.

    Grid point ``g`` (0-based) has angle ``theta_g`` with
    ``2 pi (d / lambda) sin(theta_g) = 2 pi g / G - pi``. With ``d = lambda / 2``
    and ``G = N`` the dictionary is unitary.

    Arguments:
        num_antennas: Array size N.
        grid_size: Number of grid points G (>= N).
        d_over_lambda: Element spacing in wavelengths.

    Returns:
        ``(atoms, angles)``: the ``N x G`` atom matrix and the ``G`` grid angles.

    Raises:
        DictionaryError: If ``G < N`` or some grid point has no real angle.
    """
    if grid_size < num_antennas:
        raise DictionaryError(
            f"grid_size ({grid_size}) must be at least num_antennas ({num_antennas})"
        )
    if d_over_lambda <= 0:
        raise DictionaryError(f"d_over_lambda must be positive, got {d_over_lambda}")

    sines = (2.0 * np.arange(grid_size) / grid_size - 1.0) / (2.0 * d_over_lambda)
    if np.any(np.abs(sines) > 1 + 1e-12):
        raise DictionaryError(
            f"grid is unsolvable for d/lambda={d_over_lambda}: |sin(theta)| would exceed 1"
        )
    angles = np.arcsin(np.clip(sines, -1.0, 1.0))
    geometry = ArrayGeometry(
        num_antennas=num_antennas, num_rf_chains=1, element_spacing=d_over_lambda
    )
    return steering_matrix(geometry, angles), angles


def omp_estimate(
    samples: SampleSet, dictionary: Dictionary, num_iterations: int
) -> SparseEstimate:
    """Recover a sparse virtual channel from ``samples`` with OMP.

    Each iteration selects the grid pair whose sampled atom correlates most
    with the residual (ties go to the lowest linear index), refits all
    selected coefficients by least squares on the sampled entries and
    updates the residual.

    Arguments:
        samples: Observed entries; the same set SVP consumes.
        dictionary: Receive/transmit dictionaries matching the channel shape.
        num_iterations: Number of atoms to select (>= 1).

    Returns:
        A :class:`SparseEstimate`.
    """
    if num_iterations < 1:
        raise DictionaryError(f"num_iterations must be at least 1, got {num_iterations}")
    if samples.num_samples == 0:
        raise DictionaryError("omp_estimate needs at least one sample")
    n_ms, n_bs = samples.shape
    if dictionary.ms_atoms.shape[0] != n_ms or dictionary.bs_atoms.shape[0] != n_bs:
        raise DictionaryError(
            f"dictionary atoms ({dictionary.ms_atoms.shape[0]}, {dictionary.bs_atoms.shape[0]}) "
            f"do not match channel shape {samples.shape}"
        )

    a_ms, a_bs = dictionary.ms_atoms, dictionary.bs_atoms
    g_r, g_t = dictionary.grid_shape
    num_iterations = min(num_iterations, g_r * g_t)

    rows, cols = samples.rows, samples.cols
    y = samples.values
    ms_sampled = a_ms[rows]
    bs_sampled = a_bs[cols].conj()

    residual = y.copy()
    scattered = np.zeros((n_ms, n_bs), dtype=complex)
    taken = np.zeros((g_r, g_t), dtype=bool)
    support: List[Tuple[int, int]] = []
    columns: List[np.ndarray] = []
    norms: List[float] = []
    coefficients = np.zeros(0, dtype=complex)
    rank_deficient = False

    for iteration in range(num_iterations):
        scattered[rows, cols] = residual
        correlation = np.abs(a_ms.conj().T @ scattered @ a_bs)
        correlation[taken] = -1.0
        r, t = divmod(int(np.argmax(correlation)), g_t)
        taken[r, t] = True
        support.append((r, t))
        columns.append(ms_sampled[:, r] * bs_sampled[:, t])

        phi = np.column_stack(columns)
        coefficients, _, rank, _ = np.linalg.lstsq(phi, y, rcond=None)
        if rank < phi.shape[1]:
            if not rank_deficient:
                _log.warning(
                    "omp_estimate: least squares rank deficient at iteration %d "
                    "(rank %d < %d); using minimum-norm solution",
                    iteration + 1,
                    rank,
                    phi.shape[1],
                )
            rank_deficient = True
        residual = y - phi @ coefficients
        norms.append(float(np.linalg.norm(residual)))
        _log.debug(
            "omp_estimate: iteration %d picked (%d, %d), residual %.6g",
            iteration + 1,
            r,
            t,
            norms[-1],
        )

    return SparseEstimate(
        support=support,
        coefficients=coefficients,
        reconstructed=synthesize(dictionary, support, coefficients),
        residual_norms=norms,
        rank_deficient=rank_deficient,
    )


def synthesize(
    dictionary: Dictionary, support: List[Tuple[int, int]], coefficients: np.ndarray
) -> np.ndarray:
    """Channel ``sum_k c_k a_ms(r_k) a_bs(t_k)^H`` from a support and its coefficients."""
    ms_index = [r for r, _ in support]
    bs_index = [t for _, t in support]
    ms_part = dictionary.ms_atoms[:, ms_index] * np.asarray(coefficients)[None, :]
    return ms_part @ dictionary.bs_atoms[:, bs_index].conj().T


def default_iterations(pnr_db: float) -> int:
    """Iteration count used for both estimators at ``pnr_db`` (nearest tabulated PNR)."""
    nearest = min(PNR_ITERATION_SCHEDULE, key=lambda key: (abs(key - pnr_db), key))
    return PNR_ITERATION_SCHEDULE[nearest]


def per_iteration_flops(num_samples: int, g_t: int, g_r: int) -> int:
    """Flops of one OMP iteration: 8 M G_t G_r."""
    if min(num_samples, g_t, g_r) < 1:
        raise DictionaryError("per_iteration_flops arguments must be positive")
    return 8 * num_samples * g_t * g_r


def complexity_ratio(
    num_samples: int, g_t: int, g_r: int, n_ms: int, n_bs: int, rank: int
) -> float:
    """Per-iteration flop ratio of OMP over SVP."""
    return per_iteration_flops(num_samples, g_t, g_r) / svp_per_iteration_flops(n_ms, n_bs, rank)


class DictionaryError(ValueError):
    """Represents an invalid dictionary or OMP request."""
