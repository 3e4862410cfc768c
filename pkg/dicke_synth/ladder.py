"""
Symmetric Dicke ladder: collective-operator matrix elements and the closed-form
coefficients every other module is built on.

Levels are indexed by the excitation number k = 0..N of |J, -J+k> with J = N/2.
Half-integer J is never formed: every formula is written in N and k.
S_z is taken as 1/2 sum_j (|e_j><e_j| - |g_j><g_j|), so the all-ground state
|J, -J> has eigenvalue -J and level k has eigenvalue k - J.
"""

import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import CapacityError, NoTransitionError
from .schemas import LadderIndex
from .settings import get_settings

logger = logging.getLogger(__name__)


class CollectiveOperators(NamedTuple):
    """S+, S-, S_z and S+S- on the N+1 symmetric levels"""
    raising: np.ndarray
    lowering: np.ndarray
    sz: np.ndarray
    hopping: np.ndarray


def ladder_up_coeff(idx: LadderIndex) -> float:
    """<k+1| S+ |k> = sqrt((2J-k)(k+1)); zero at the top of the ladder"""
    n, k = idx.n_qubits, idx.k
    return math.sqrt((n - k) * (k + 1))


def ladder_down_coeff(idx: LadderIndex) -> float:
    """<k-1| S- |k> = sqrt(k(2J-k+1)); zero at the bottom of the ladder"""
    n, k = idx.n_qubits, idx.k
    return math.sqrt(k * (n - k + 1))


def level_shift(idx: LadderIndex, lambda_: float) -> float:
    """Energy shift alpha_k = k(2J-k+1) lambda produced by lambda S+S-"""
    n, k = idx.n_qubits, idx.k
    return k * (n - k + 1) * lambda_


def level_shifts(n_qubits: int, lambda_: float) -> np.ndarray:
    """alpha_k for every level k = 0..N"""
    k = np.arange(n_qubits + 1)
    return k * (n_qubits - k + 1) * lambda_


def level_energy(idx: LadderIndex, omega0: float, lambda_: float) -> float:
    """Diagonal of omega0 S_z + lambda S+S- for level k"""
    return (idx.k - idx.n_qubits / 2) * omega0 + level_shift(idx, lambda_)


def _require_transition(idx: LadderIndex):
    if idx.is_top:
        raise NoTransitionError(f"level k={idx.k} is the top of the N={idx.n_qubits} ladder; no upward transition")


def step_rabi_rate(idx: LadderIndex, epsilon: float) -> float:
    """Effective Rabi rate of |k> <-> |k+1>, keyed by the lower level k"""
    _require_transition(idx)
    return ladder_up_coeff(idx) * epsilon


def transition_frequency(idx: LadderIndex, omega0: float, lambda_: float) -> float:
    """Resonance of |k> -> |k+1>: omega0 + 2(J-k) lambda"""
    _require_transition(idx)
    return omega0 + (idx.n_qubits - 2 * idx.k) * lambda_


def collective_matrices(n_qubits: int) -> CollectiveOperators:
    """
    Dense S+, S-, S_z and S+S- on the N+1 symmetric levels.

    S+ sits on the subdiagonal with (k+1, k) = sqrt((N-k)(k+1)).
    """
    if n_qubits < 1:
        raise ValueError("need at least one qubit")
    k = np.arange(n_qubits)
    up = np.sqrt((n_qubits - k) * (k + 1.0))
    raising = np.diag(up, -1).astype(complex)
    lowering = raising.conj().T
    sz = np.diag(np.arange(n_qubits + 1) - n_qubits / 2).astype(complex)
    return CollectiveOperators(raising, lowering, sz, raising @ lowering)


def excitation_counts(n_qubits: int) -> np.ndarray:
    """Hamming weight of every computational basis index (bit j set = qubit j excited)"""
    indices = np.arange(2 ** n_qubits)
    return ((indices[:, None] >> np.arange(n_qubits)) & 1).sum(axis=1)


def _check_capacity(n_qubits: int, bound: Optional[int]):
    bound = get_settings().oracle_max_qubits if bound is None else bound
    if n_qubits > bound:
        raise CapacityError(f"N={n_qubits} exceeds the full-space bound of {bound} qubits")


def dicke_expansion(idx: LadderIndex, max_qubits: Optional[int] = None) -> np.ndarray:
    """|J,-J+k> in the 2^N product basis: C(N,k)^(-1/2) on every weight-k bitstring"""
    _check_capacity(idx.n_qubits, max_qubits)
    weights = excitation_counts(idx.n_qubits)
    vector = np.zeros(2 ** idx.n_qubits, dtype=complex)
    vector[weights == idx.k] = 1.0 / math.sqrt(math.comb(idx.n_qubits, idx.k))
    return vector


def dicke_isometry(n_qubits: int, max_qubits: Optional[int] = None) -> np.ndarray:
    """Columns are the N+1 symmetric Dicke states; V^dagger V = 1"""
    _check_capacity(n_qubits, max_qubits)
    logger.debug("building symmetric isometry for N=%d", n_qubits)
    return np.stack(
        [dicke_expansion(LadderIndex(n_qubits=n_qubits, k=k), max_qubits) for k in range(n_qubits + 1)],
        axis=1,
    )
