"""Strong-incoherence parameter of a low-rank channel matrix.

For the top-``L`` singular pairs of ``H`` with projections
``P_U = U_L U_L^H``, ``P_V = V_L V_L^H`` and ``E = U_L V_L^H``, the strong
incoherence parameter is the smallest ``mu`` with::

    |[P_U]_{a,a'} - (L / N_MS) 1{a = a'}| <= mu sqrt(L) / N_MS
    |[P_V]_{b,b'} - (L / N_BS) 1{b = b'}| <= mu sqrt(L) / N_BS
    |E_{a,b}| <= mu sqrt(L / (N_MS N_BS))

The sample complexity of exact completion grows with ``mu``; single-path
channels on ideal arrays reach ``mu = 1``.
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Union

import numpy as np

from MMWaveMC.constants import DEGENERACY_GAP
from MMWaveMC.helpers import hlogging

_log = hlogging.get_logger(__name__)

__all__ = ["IncoherenceReport", "IncoherenceError", "incoherence_mu"]


@dataclass(frozen=True)
class IncoherenceReport:
    """Incoherence components of one matrix.

    Attributes:
        mu_u: Tightest mu for the left projection bound.
        mu_v: Tightest mu for the right projection bound.
        mu_e: Tightest mu for the bound on E.
        mu: max(mu_u, mu_v, mu_e).
        rank_used: The rank L the projections were built from.
        degenerate: True when the L-th and (L+1)-th singular values nearly coincide.
        singular_gap: Relative gap (s_L - s_{L+1}) / s_L; 1 when L is full rank.
    """

    mu_u: float
    mu_v: float
    mu_e: float
    mu: float
    rank_used: int
    degenerate: bool = False
    singular_gap: float = 1.0

    @staticmethod
    def header() -> List[str]:
        return ["mu_u", "mu_v", "mu_e", "mu", "rank_used", "degenerate", "singular_gap"]

    def as_row(self) -> Dict[str, Union[float, int, bool]]:
        """Return the report as one CSV row keyed by :meth:`header`."""
        return asdict(self)


def incoherence_mu(matrix: np.ndarray, rank: int) -> IncoherenceReport:
    """Compute the strong-incoherence parameter of ``matrix`` at rank ``rank``.

    Arguments:
        matrix: ``N_MS x N_BS`` matrix.
        rank: Rank L of the singular subspaces (1 <= L <= min dimension).

    Returns:
        An :class:`IncoherenceReport`.

    Raises:
        IncoherenceError: If ``rank`` is out of range or the matrix is zero.
    """
    matrix = np.asarray(matrix)
    n_ms, n_bs = matrix.shape
    if not 1 <= rank <= min(n_ms, n_bs):
        raise IncoherenceError(f"rank must lie in [1, {min(n_ms, n_bs)}], got {rank}")

    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    if s[0] == 0:
        raise IncoherenceError("incoherence is undefined for the zero matrix")

    gap = 1.0
    if rank < s.size:
        gap = float((s[rank - 1] - s[rank]) / s[rank - 1])
    degenerate = gap < DEGENERACY_GAP
    if degenerate:
        _log.warning(
            "incoherence_mu: singular values %d and %d coincide (gap %.3g); "
            "the rank-%d subspace is ill-defined",
            rank,
            rank + 1,
            gap,
            rank,
        )

    u_l = u[:, :rank]
    v_l = vh[:rank].conj().T
    p_u = u_l @ u_l.conj().T
    p_v = v_l @ v_l.conj().T
    e = u_l @ v_l.conj().T

    root = np.sqrt(rank)
    mu_u = n_ms / root * float(np.max(np.abs(p_u - (rank / n_ms) * np.eye(n_ms))))
    mu_v = n_bs / root * float(np.max(np.abs(p_v - (rank / n_bs) * np.eye(n_bs))))
    mu_e = float(np.sqrt(n_ms * n_bs / rank) * np.max(np.abs(e)))

    return IncoherenceReport(
        mu_u=mu_u,
        mu_v=mu_v,
        mu_e=mu_e,
        mu=max(mu_u, mu_v, mu_e),
        rank_used=rank,
        degenerate=degenerate,
        singular_gap=gap,
    )


class IncoherenceError(ValueError):
    """Represents an invalid incoherence request."""
