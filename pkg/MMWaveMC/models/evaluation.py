"""Downstream quality metrics of a channel estimate.

Besides the NMSE, an estimate is judged by the spectral efficiency (SE) of
the link it configures. The BS precodes with the ``L`` dominant right
singular vectors of the estimate, and each switch subarray connects exactly
one antenna to its RF chain. The antennas are picked greedily on the
estimate, and the SE is then evaluated on the true channel::

    SE = log2 det(I + (snr / L) H_eff H_eff^H),   H_eff = H[S_MS, S_BS] P

Setting A selects receive antennas only and the precoder spans the whole
BS array. Setting B selects both sides; the precoder is recomputed on the
selected BS columns after every BS sweep.
"""

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from MMWaveMC.constants import DEFAULT_MAX_SWEEPS
from MMWaveMC.helpers import hlogging
from MMWaveMC.models.channel import ArrayGeometry, SeedLike

_log = hlogging.get_logger(__name__)

__all__ = [
    "SelectionSide",
    "SelectionSetting",
    "SelectionConstraint",
    "SeResult",
    "EvaluationError",
    "nmse",
    "svd_precoder",
    "spectral_efficiency",
    "greedy_selection",
    "exhaustive_selection",
    "random_selection",
]

# Upper bound on the number of selections exhaustive_selection enumerates.
MAX_EXHAUSTIVE_CANDIDATES = 1_000_000


class SelectionSide(str, Enum):
    """Which terminals take part in antenna selection."""

    ms_only = "ms_only"
    joint = "joint"


class SelectionSetting(str, Enum):
    """Evaluation setting: A selects MS antennas, B selects both sides."""

    A = "A"
    B = "B"


@dataclass(frozen=True)
class SelectionConstraint:
    """One-antenna-per-subarray constraint on the MS and optionally the BS.

    Attributes:
        side: ``ms_only`` or ``joint``.
        ms_subarray_map: Antenna indices of each MS subarray.
        bs_subarray_map: Antenna indices of each BS subarray, for joint selection.
    """

    side: SelectionSide
    ms_subarray_map: Tuple[np.ndarray, ...]
    bs_subarray_map: Optional[Tuple[np.ndarray, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "side", SelectionSide(self.side))
        object.__setattr__(self, "ms_subarray_map", _check_partition(self.ms_subarray_map, "MS"))
        if self.side is SelectionSide.joint:
            if self.bs_subarray_map is None:
                raise EvaluationError("joint selection needs a BS subarray map")
            object.__setattr__(
                self, "bs_subarray_map", _check_partition(self.bs_subarray_map, "BS")
            )
        elif self.bs_subarray_map is not None:
            object.__setattr__(
                self, "bs_subarray_map", _check_partition(self.bs_subarray_map, "BS")
            )

    @classmethod
    def from_geometries(
        cls, ms_geometry: ArrayGeometry, bs_geometry: Optional[ArrayGeometry] = None
    ) -> "SelectionConstraint":
        """Constraint induced by the switch wiring; joint when ``bs_geometry`` is given."""
        if bs_geometry is None:
            return cls(side=SelectionSide.ms_only, ms_subarray_map=tuple(ms_geometry.subarrays()))
        return cls(
            side=SelectionSide.joint,
            ms_subarray_map=tuple(ms_geometry.subarrays()),
            bs_subarray_map=tuple(bs_geometry.subarrays()),
        )

    @property
    def num_ms_antennas(self) -> int:
        return sum(group.size for group in self.ms_subarray_map)

    @property
    def num_bs_antennas(self) -> Optional[int]:
        if self.bs_subarray_map is None:
            return None
        return sum(group.size for group in self.bs_subarray_map)

    def admits(
        self, selected_ms: Sequence[int], selected_bs: Optional[Sequence[int]] = None
    ) -> bool:
        """True when the selection takes exactly one antenna from every subarray."""
        if not _one_per_group(selected_ms, self.ms_subarray_map):
            return False
        if self.side is SelectionSide.joint:
            return selected_bs is not None and _one_per_group(selected_bs, self.bs_subarray_map)
        return True


@dataclass
class SeResult:
    """Outcome of an antenna selection.

    Attributes:
        selected_ms: One MS antenna per subarray, in subarray order.
        selected_bs: One BS antenna per subarray under joint selection.
        spectral_efficiency: SE in bits/s/Hz.
        sweeps: Number of alternating sweeps (Setting B); 1 for Setting A.
    """

    selected_ms: np.ndarray
    selected_bs: Optional[np.ndarray]
    spectral_efficiency: float
    sweeps: int = 1


def nmse(truth: np.ndarray, estimate: np.ndarray) -> float:
    """Normalized squared error ``||H - H_hat||_F^2 / ||H||_F^2``.

    Raises:
        EvaluationError: On mismatched shapes or an all-zero ``truth``.
    """
    truth = np.asarray(truth)
    estimate = np.asarray(estimate)
    if truth.shape != estimate.shape:
        raise EvaluationError(f"shape mismatch: truth {truth.shape}, estimate {estimate.shape}")
    energy = float(np.vdot(truth, truth).real)
    if energy == 0:
        raise EvaluationError("nmse is undefined for an all-zero true channel")
    error = truth - estimate
    return float(np.vdot(error, error).real) / energy


def svd_precoder(estimate: np.ndarray, num_streams: int) -> np.ndarray:
    """Precoder ``V_L``: the ``num_streams`` dominant right singular vectors of ``estimate``.

    Returns:
        ``N_BS x L`` matrix with orthonormal columns.
    """
    estimate = np.asarray(estimate)
    if not 1 <= num_streams <= min(estimate.shape):
        raise EvaluationError(
            f"num_streams must lie in [1, {min(estimate.shape)}], got {num_streams}"
        )
    _, _, vh = np.linalg.svd(estimate, full_matrices=False)
    return vh[:num_streams].conj().T


def spectral_efficiency(
    true_channel: np.ndarray,
    precoder: np.ndarray,
    selected_ms: Sequence[int],
    snr: float,
    selected_bs: Optional[Sequence[int]] = None,
) -> float:
    """SE of the precoded link through the selected antennas.

    Arguments:
        true_channel: ``N_MS x N_BS`` channel the link runs over.
        precoder: ``N_BS x L`` precoder, or ``|selected_bs| x L`` when BS antennas are selected.
        selected_ms: Receive antennas connected to RF chains.
        snr: Linear transmit SNR (>= 0), split equally over the L streams.
        selected_bs: Transmit antennas connected to RF chains; all when omitted.

    Returns:
        ``log2 det(I + (snr / L) H_eff H_eff^H)`` in bits/s/Hz.
    """
    if snr < 0:
        raise EvaluationError(f"snr must be non-negative, got {snr}")
    channel = np.asarray(true_channel)[np.asarray(selected_ms, dtype=int)]
    if selected_bs is not None:
        channel = channel[:, np.asarray(selected_bs, dtype=int)]
    precoder = np.asarray(precoder)
    if precoder.shape[0] != channel.shape[1]:
        raise EvaluationError(
            f"precoder has {precoder.shape[0]} rows, channel has {channel.shape[1]} columns"
        )
    effective = channel @ precoder
    streams = precoder.shape[1]
    gram = np.eye(effective.shape[0]) + (snr / streams) * (effective @ effective.conj().T)
    _, logdet = np.linalg.slogdet(gram)
    return float(logdet / np.log(2))


def greedy_selection(
    channel_estimate: np.ndarray,
    constraint: SelectionConstraint,
    snr: float,
    setting: Union[SelectionSetting, str],
    num_streams: int,
    true_channel: Optional[np.ndarray] = None,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
) -> SeResult:
    """Select one antenna per subarray by greedy SE maximization on the estimate.

    Setting A visits the MS subarrays in order and adds the antenna that
    maximizes the SE of the partial selection under the fixed precoder
    ``V_L`` of the estimate. Setting B first picks BS antennas with all MS
    rows active, then MS antennas, and then repeats replacement sweeps over
    both sides until no slot changes or ``max_sweeps`` is reached.

    Arguments:
        channel_estimate: Estimated ``N_MS x N_BS`` channel; drives every decision.
        constraint: Subarray wiring; must be joint for Setting B.
        snr: Linear SNR.
        setting: ``A`` or ``B``.
        num_streams: Number of data streams L.
        true_channel: Channel the reported SE is evaluated on; the estimate when omitted.
        max_sweeps: Sweep cap for Setting B.

    Returns:
        An :class:`SeResult`.
    """
    estimate = np.asarray(channel_estimate)
    setting = SelectionSetting(setting)
    truth = estimate if true_channel is None else np.asarray(true_channel)
    _check_selection_inputs(estimate, truth, constraint, setting, num_streams)
    if max_sweeps < 1:
        raise EvaluationError(f"max_sweeps must be at least 1, got {max_sweeps}")
    groups_ms = constraint.ms_subarray_map

    if setting is SelectionSetting.A:
        streams = min(num_streams, len(groups_ms))
        precoder = svd_precoder(estimate, streams)

        def ms_score(rows: List[int]) -> float:
            return spectral_efficiency(estimate, precoder, rows, snr)

        selected_ms = _greedy_pick(groups_ms, None, ms_score)
        return SeResult(
            selected_ms=np.asarray(selected_ms),
            selected_bs=None,
            spectral_efficiency=spectral_efficiency(truth, precoder, selected_ms, snr),
        )

    groups_bs = constraint.bs_subarray_map
    streams = min(num_streams, len(groups_ms), len(groups_bs))
    all_rows = list(range(estimate.shape[0]))
    selected_ms: Optional[List[int]] = None
    selected_bs: Optional[List[int]] = None
    sweeps = 0

    while sweeps < max_sweeps:
        sweeps += 1
        rows = all_rows if selected_ms is None else selected_ms

        def bs_score(cols: List[int], rows: List[int] = rows) -> float:
            precoder = _column_precoder(estimate, cols, streams)
            return spectral_efficiency(estimate, precoder, rows, snr, cols)

        new_bs = _greedy_pick(groups_bs, selected_bs, bs_score)
        precoder = _column_precoder(estimate, new_bs, streams)

        def ms_score(rows: List[int]) -> float:
            return spectral_efficiency(estimate, precoder, rows, snr, new_bs)

        new_ms = _greedy_pick(groups_ms, selected_ms, ms_score)
        stable = new_bs == selected_bs and new_ms == selected_ms
        selected_bs, selected_ms = new_bs, new_ms
        _log.debug("greedy_selection: sweep %d bs=%s ms=%s", sweeps, selected_bs, selected_ms)
        if stable:
            break

    precoder = _column_precoder(estimate, selected_bs, streams)
    return SeResult(
        selected_ms=np.asarray(selected_ms),
        selected_bs=np.asarray(selected_bs),
        spectral_efficiency=spectral_efficiency(truth, precoder, selected_ms, snr, selected_bs),
        sweeps=sweeps,
    )


def exhaustive_selection(
    channel_estimate: np.ndarray,
    constraint: SelectionConstraint,
    snr: float,
    setting: Union[SelectionSetting, str],
    num_streams: int,
    true_channel: Optional[np.ndarray] = None,
) -> SeResult:
    """Best feasible selection by enumerating every one-per-subarray choice.

    The search scores selections on the estimate with the same precoders
    :func:`greedy_selection` uses; the reported SE is evaluated on
    ``true_channel`` when given.
    """
    estimate = np.asarray(channel_estimate)
    setting = SelectionSetting(setting)
    truth = estimate if true_channel is None else np.asarray(true_channel)
    _check_selection_inputs(estimate, truth, constraint, setting, num_streams)
    groups_ms = constraint.ms_subarray_map

    candidates = int(np.prod([group.size for group in groups_ms]))
    if setting is SelectionSetting.B:
        candidates *= int(np.prod([group.size for group in constraint.bs_subarray_map]))
    if candidates > MAX_EXHAUSTIVE_CANDIDATES:
        raise EvaluationError(
            f"exhaustive search over {candidates} selections exceeds "
            f"{MAX_EXHAUSTIVE_CANDIDATES}"
        )

    best_score = -np.inf
    best: Tuple[Tuple[int, ...], Optional[Tuple[int, ...]]] = ((), None)
    if setting is SelectionSetting.A:
        precoder = svd_precoder(estimate, min(num_streams, len(groups_ms)))
        for rows in itertools.product(*groups_ms):
            score = spectral_efficiency(estimate, precoder, rows, snr)
            if score > best_score:
                best_score, best = score, (rows, None)
        rows, _ = best
        return SeResult(
            selected_ms=np.asarray(rows),
            selected_bs=None,
            spectral_efficiency=spectral_efficiency(truth, precoder, rows, snr),
            sweeps=0,
        )

    groups_bs = constraint.bs_subarray_map
    streams = min(num_streams, len(groups_ms), len(groups_bs))
    for cols in itertools.product(*groups_bs):
        precoder = _column_precoder(estimate, list(cols), streams)
        for rows in itertools.product(*groups_ms):
            score = spectral_efficiency(estimate, precoder, rows, snr, cols)
            if score > best_score:
                best_score, best = score, (rows, cols)
    rows, cols = best
    precoder = _column_precoder(estimate, list(cols), streams)
    return SeResult(
        selected_ms=np.asarray(rows),
        selected_bs=np.asarray(cols),
        spectral_efficiency=spectral_efficiency(truth, precoder, rows, snr, cols),
        sweeps=0,
    )


def random_selection(
    constraint: SelectionConstraint, rng_seed: SeedLike = None
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Draw one uniformly random feasible selection.

    Returns:
        ``(selected_ms, selected_bs)``; ``selected_bs`` is None unless the constraint is joint.
    """
    rng = np.random.default_rng(rng_seed)
    selected_ms = np.array([rng.choice(group) for group in constraint.ms_subarray_map])
    selected_bs = None
    if constraint.side is SelectionSide.joint:
        selected_bs = np.array([rng.choice(group) for group in constraint.bs_subarray_map])
    return selected_ms, selected_bs


def _greedy_pick(
    groups: Sequence[np.ndarray],
    current: Optional[List[int]],
    score_fn: Callable[[List[int]], float],
) -> List[int]:
    """One greedy pass over ``groups``.

    Without a current selection the pass is incremental: each group adds its
    best antenna given the antennas already added. With one, each slot in
    turn is replaced by the best antenna of its group given the others.
    Ties go to the lowest antenna index.
    """
    if current is None:
        selected: List[int] = []
        for group in groups:
            scores = [score_fn(selected + [int(a)]) for a in group]
            selected.append(int(group[int(np.argmax(scores))]))
        return selected

    selected = list(current)
    for k, group in enumerate(groups):
        scores = [score_fn(selected[:k] + [int(a)] + selected[k + 1 :]) for a in group]
        selected[k] = int(group[int(np.argmax(scores))])
    return selected


def _column_precoder(estimate: np.ndarray, cols: Sequence[int], streams: int) -> np.ndarray:
    submatrix = estimate[:, np.asarray(cols, dtype=int)]
    return svd_precoder(submatrix, min(streams, *submatrix.shape))


def _check_selection_inputs(
    estimate: np.ndarray,
    truth: np.ndarray,
    constraint: SelectionConstraint,
    setting: SelectionSetting,
    num_streams: int,
) -> None:
    if estimate.shape != truth.shape:
        raise EvaluationError(f"shape mismatch: estimate {estimate.shape}, truth {truth.shape}")
    if num_streams < 1:
        raise EvaluationError(f"num_streams must be at least 1, got {num_streams}")
    if constraint.num_ms_antennas != estimate.shape[0]:
        raise EvaluationError(
            f"MS subarrays cover {constraint.num_ms_antennas} antennas, "
            f"channel has {estimate.shape[0]} rows"
        )
    if setting is SelectionSetting.B:
        if constraint.side is not SelectionSide.joint:
            raise EvaluationError("Setting B needs a joint selection constraint")
        if constraint.num_bs_antennas != estimate.shape[1]:
            raise EvaluationError(
                f"BS subarrays cover {constraint.num_bs_antennas} antennas, "
                f"channel has {estimate.shape[1]} columns"
            )


def _check_partition(groups: Sequence[Sequence[int]], side: str) -> Tuple[np.ndarray, ...]:
    """Validate contiguous, equal-sized groups that tile 0..N-1 in order."""
    groups = tuple(np.asarray(group, dtype=int).reshape(-1) for group in groups)
    if not groups or groups[0].size == 0:
        raise EvaluationError(f"{side} subarray map must hold non-empty groups")
    size = groups[0].size
    for k, group in enumerate(groups):
        if not np.array_equal(group, np.arange(k * size, (k + 1) * size)):
            raise EvaluationError(
                f"{side} subarray {k} must be the contiguous block "
                f"{k * size}..{(k + 1) * size - 1}"
            )
    return groups


def _one_per_group(selected: Sequence[int], groups: Sequence[np.ndarray]) -> bool:
    selected = list(selected)
    if len(selected) != len(groups):
        return False
    return all(int(a) in set(group.tolist()) for a, group in zip(selected, groups))


class EvaluationError(ValueError):
    """Represents an invalid evaluation request."""
