"""Singular value projection (SVP) matrix completion.

SVP is projected gradient descent on ``||P_Omega(X) - P_Omega(Y)||_F^2``
over matrices of rank at most ``L``::

    Z     = X - eta * (P_Omega(X) - P_Omega(Y))
    X_new = best rank-L approximation of Z

starting from ``X = 0``. The loop stops once the masked residual falls to
``p * N_MS * N_BS * sigma^2 + eps0``, the expected noise energy on the
observed entries plus a floor.

Example:
    >>> from MMWaveMC.models.svp import SvpConfig, svp_estimate
    >>> config = SvpConfig(rank_budget=4, step_size=1.8, noise_variance=10**-2.5)
    >>> result = svp_estimate(samples, config)  # doctest: +SKIP
    >>> result.converged, result.iterations_used  # doctest: +SKIP
    (True, 6)
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Union

import numpy as np
import scipy.linalg

from MMWaveMC.constants import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE_FLOOR,
    DIVERGENCE_FACTOR,
    HIGH_DENSITY_THRESHOLD,
    MAX_RIP_CONSTANT,
    STEP_SIZE_HIGH_DENSITY,
    STEP_SIZE_LOW_DENSITY,
)
from MMWaveMC.helpers import hlogging
from MMWaveMC.models.sampling import SampleSet

_log = hlogging.get_logger(__name__)

__all__ = [
    "ProjectionMethod",
    "SvpConfig",
    "SvpResult",
    "SvpConfigError",
    "rank_projection",
    "svp_estimate",
    "default_step_size",
    "theoretical_step_size",
    "svp_per_iteration_flops",
]


class ProjectionMethod(str, Enum):
    """How the rank-L approximation is computed."""

    direct_svd = "direct_svd"
    gram_eigendecomposition = "gram_eigendecomposition"


@dataclass(frozen=True)
class SvpConfig:
    """Inputs of the SVP estimator.

    Attributes:
        rank_budget: Target rank L.
        step_size: Gradient step eta.
        tolerance_floor: Floor eps0 added to the noise term of the tolerance.
        noise_variance: Noise variance sigma^2 assumed in the tolerance.
        max_iterations: Iteration cap.
        projection_method: Rank-L projection algorithm.
        early_stopping: Stop as soon as the residual meets the tolerance.
        divergence_factor: Residual growth over the initial residual that ends the loop.
    """

    rank_budget: int
    step_size: float = STEP_SIZE_HIGH_DENSITY
    tolerance_floor: float = DEFAULT_TOLERANCE_FLOOR
    noise_variance: float = 0.0
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    projection_method: ProjectionMethod = ProjectionMethod.gram_eigendecomposition
    early_stopping: bool = True
    divergence_factor: float = DIVERGENCE_FACTOR

    def __post_init__(self) -> None:
        if self.rank_budget < 1:
            raise SvpConfigError(f"rank_budget must be at least 1, got {self.rank_budget}")
        if not self.step_size > 0:
            raise SvpConfigError(f"step_size must be positive, got {self.step_size}")
        if self.tolerance_floor < 0:
            raise SvpConfigError(f"tolerance_floor must be >= 0, got {self.tolerance_floor}")
        if self.noise_variance < 0:
            raise SvpConfigError(f"noise_variance must be >= 0, got {self.noise_variance}")
        if self.max_iterations < 1:
            raise SvpConfigError(f"max_iterations must be at least 1, got {self.max_iterations}")
        if not self.divergence_factor > 1:
            raise SvpConfigError(
                f"divergence_factor must exceed 1, got {self.divergence_factor}"
            )
        object.__setattr__(self, "projection_method", ProjectionMethod(self.projection_method))

    def tolerance(self, samples: SampleSet) -> float:
        """Stopping tolerance eps = p * N_MS * N_BS * sigma^2 + eps0 for ``samples``."""
        n_ms, n_bs = samples.shape
        return samples.density * n_ms * n_bs * self.noise_variance + self.tolerance_floor


@dataclass
class SvpResult:
    """Output of :func:`svp_estimate`.

    Attributes:
        estimate: Channel estimate X^t; the last finite iterate when a run diverges.
        iterations_used: Number of finite iterates produced (the length of the traces).
        residual_trace: Masked residual ``||P_Omega(X^t) - P_Omega(Y)||_F^2`` per iteration.
        converged: True when the tolerance test fired.
        diverged: True when the iterates blew up or the residual grew.
        tolerance: The tolerance eps the run was tested against.
        nmse_trace: NMSE per iteration, when the true channel was supplied.
    """

    estimate: np.ndarray
    iterations_used: int
    residual_trace: List[float]
    converged: bool
    diverged: bool = False
    tolerance: float = 0.0
    nmse_trace: Optional[List[float]] = field(default=None)

    def header(self) -> List[str]:
        return ["iteration", "residual", "nmse"]

    def as_rows(self) -> List[List[Union[int, float, str]]]:
        """Return the residual trace as CSV rows (iteration, residual, nmse-if-known)."""
        rows: List[List[Union[int, float, str]]] = []
        for t, residual in enumerate(self.residual_trace, start=1):
            nmse = self.nmse_trace[t - 1] if self.nmse_trace is not None else ""
            rows.append([t, residual, nmse])
        return rows


def rank_projection(
    matrix: np.ndarray,
    rank: int,
    method: Union[ProjectionMethod, str] = ProjectionMethod.gram_eigendecomposition,
) -> np.ndarray:
    """Best rank-``rank`` approximation of ``matrix`` in Frobenius norm.

    ``direct_svd`` truncates the thin SVD. ``gram_eigendecomposition``
    takes the top eigenvectors ``U_L`` of the Gram matrix of the shorter
    side and returns ``U_L U_L^H Z``, which only needs an eigenproblem of
    size ``min(N_MS, N_BS)``.

    Arguments:
        matrix: Matrix Z to project.
        rank: Target rank L (>= 1).
        method: Projection algorithm.

    Returns:
        The projected matrix; a copy of ``matrix`` when ``rank`` reaches its smaller dimension.
    """
    if rank < 1:
        raise SvpConfigError(f"rank must be at least 1, got {rank}")
    method = ProjectionMethod(method)
    matrix = np.asarray(matrix)
    if rank >= min(matrix.shape):
        return matrix.copy()

    if method is ProjectionMethod.direct_svd:
        u, s, vh = np.linalg.svd(matrix, full_matrices=False)
        return (u[:, :rank] * s[:rank]) @ vh[:rank]

    transpose = matrix.shape[0] > matrix.shape[1]
    wide = matrix.conj().T if transpose else matrix
    n = wide.shape[0]
    gram = wide @ wide.conj().T
    # eigh returns ascending eigenvalues; keep the top `rank`
    _, vecs = scipy.linalg.eigh(gram, subset_by_index=[n - rank, n - 1])
    projected = vecs @ (vecs.conj().T @ wide)
    return projected.conj().T if transpose else projected


def svp_estimate(
    samples: SampleSet, config: SvpConfig, truth: Optional[np.ndarray] = None
) -> SvpResult:
    """Recover the channel from ``samples`` with singular value projection.

    Arguments:
        samples: Observed entries.
        config: Estimator settings.
        truth: True channel; when given, the NMSE of every iterate is recorded.

    Returns:
        An :class:`SvpResult`. A run that produces non-finite iterates, a
        residual beyond ``divergence_factor`` times the initial residual, or
        ends above the initial residual is flagged ``diverged``.
    """
    n_ms, n_bs = samples.shape
    rank = min(config.rank_budget, n_ms, n_bs)
    if rank < config.rank_budget:
        _log.debug("svp_estimate: rank budget %d clamped to %d", config.rank_budget, rank)

    mask = samples.mask
    observed = samples.observed
    tolerance = config.tolerance(samples)
    initial = float(np.vdot(observed, observed).real)
    truth_energy = None
    if truth is not None:
        truth_energy = float(np.linalg.norm(truth) ** 2)

    estimate = np.zeros((n_ms, n_bs), dtype=complex)
    residuals: List[float] = []
    nmses: Optional[List[float]] = [] if truth is not None else None
    converged = False
    diverged = False

    for iteration in range(1, config.max_iterations + 1):
        gradient = np.where(mask, estimate, 0) - observed
        with np.errstate(over="ignore", invalid="ignore"):
            step = estimate - config.step_size * gradient
            energy = np.vdot(step, step).real
        # Traces and the returned estimate only ever hold finite iterates.
        # A finite energy keeps the Gram matrix finite too.
        if not np.isfinite(energy):
            diverged = True
            break
        candidate = rank_projection(step, rank, config.projection_method)
        difference = np.where(mask, candidate, 0) - observed
        residual = float(np.vdot(difference, difference).real)
        if not np.isfinite(residual) or not np.all(np.isfinite(candidate)):
            diverged = True
            break

        estimate = candidate
        residuals.append(residual)
        if nmses is not None:
            nmses.append(float(np.linalg.norm(truth - estimate) ** 2 / truth_energy))

        _log.debug("svp_estimate: iteration %d residual %.6g", iteration, residual)

        if residual > config.divergence_factor * initial > 0:
            diverged = True
            break
        if config.early_stopping and residual <= tolerance:
            converged = True
            break
    else:
        if not config.early_stopping:
            converged = residuals[-1] <= tolerance
        if residuals[-1] > initial > 0:
            diverged = True
            converged = False

    if diverged:
        _log.warning(
            "svp_estimate: diverged after %d iterations (eta=%s, p=%.3f)",
            len(residuals),
            config.step_size,
            samples.density,
        )

    return SvpResult(
        estimate=estimate,
        iterations_used=len(residuals),
        residual_trace=residuals,
        converged=converged,
        diverged=diverged,
        tolerance=tolerance,
        nmse_trace=nmses,
    )


def default_step_size(density: float) -> float:
    """Step size eta: 1.8 for p >= 0.5 and 1.4 below."""
    if density >= HIGH_DENSITY_THRESHOLD:
        return STEP_SIZE_HIGH_DENSITY
    return STEP_SIZE_LOW_DENSITY


def theoretical_step_size(density: float, delta: float = MAX_RIP_CONSTANT) -> float:
    """Conservative step size eta = 1 / (p (1 + delta)) for RIP constant delta <= 1/3."""
    if not 0 < density <= 1:
        raise SvpConfigError(f"density must lie in (0, 1], got {density}")
    if not 0 <= delta <= MAX_RIP_CONSTANT:
        raise SvpConfigError(f"delta must lie in [0, 1/3], got {delta}")
    return 1.0 / (density * (1.0 + delta))


def svp_per_iteration_flops(n_ms: int, n_bs: int, rank: int) -> int:
    """Flops of one SVP iteration with the Gram projection: 16N_MS^2 N_BS + 23N_MS^3 + 8N_MS^2 L."""
    return 16 * n_ms**2 * n_bs + 23 * n_ms**3 + 8 * n_ms**2 * rank


class SvpConfigError(ValueError):
    """Represents invalid SVP estimator settings."""
