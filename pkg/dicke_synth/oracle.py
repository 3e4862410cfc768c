"""
Brute-force 2^N product-space simulation built from single-qubit operators.

Certifies the symmetric reduction: the same schedule is integrated here and
on the N+1 ladder, and the full trajectory is projected onto the Dicke
basis. Bit j of a basis index is qubit j (1 = excited). Operators are dense
up to the configured threshold and applied matrix-free above it.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .dynamics import build_dicke_model, state_fidelity
from .exceptions import CapacityError
from .ladder import dicke_isometry, excitation_counts
from .propagation import DrivenModel, Operator, propagate
from .schemas import (
    DickeVector,
    Frame,
    IntegratorConfig,
    PhysicalParams,
    PulseSchedule,
    PulseSegment,
    SymmetryReport,
)
from .settings import get_settings

logger = logging.getLogger(__name__)

SIGMA_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)


class CollectiveLadderOperator(LinearOperator):
    """sum_j w_j sigma+_j (or its adjoint) applied by flipping bit j"""

    def __init__(self, n_qubits: int, weights: Sequence[float], lowering: bool = False):
        size = 2 ** n_qubits
        super().__init__(shape=(size, size), dtype=complex)
        self.n_qubits = n_qubits
        self.weights = np.asarray(weights, dtype=float)
        self.lowering = lowering
        self._indices = np.arange(size)

    def _matvec(self, x):
        x = np.ravel(x)
        out = np.zeros(self.shape[0], dtype=complex)
        for j, w in enumerate(self.weights):
            bit = 1 << j
            ground = self._indices[(self._indices & bit) == 0]
            if self.lowering:
                out[ground] += w * x[ground | bit]
            else:
                out[ground | bit] += w * x[ground]
        return out

    def _adjoint(self) -> "CollectiveLadderOperator":
        return CollectiveLadderOperator(self.n_qubits, self.weights, lowering=not self.lowering)

    def toarray(self) -> np.ndarray:
        return self.matmat(np.eye(self.shape[1], dtype=complex))


def _check_capacity(n_qubits: int):
    bound = get_settings().oracle_max_qubits
    if n_qubits > bound:
        raise CapacityError(f"N={n_qubits} exceeds the full-space bound of {bound} qubits")


def _resolve_weights(n_qubits: int, qubit_weights: Optional[Sequence[float]]) -> np.ndarray:
    if qubit_weights is None:
        return np.ones(n_qubits)
    weights = np.asarray(qubit_weights, dtype=float)
    if weights.shape != (n_qubits,):
        raise ValueError(f"expected {n_qubits} qubit weights, got {weights.shape}")
    return weights


def dense_raising(n_qubits: int, weights: Optional[Sequence[float]] = None) -> np.ndarray:
    """sum_j w_j sigma+_j by Kronecker products; qubit j sits at position N-1-j"""
    weights = _resolve_weights(n_qubits, weights)
    total = np.zeros((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for j, w in enumerate(weights):
        factors = [np.eye(2, dtype=complex)] * n_qubits
        factors[n_qubits - 1 - j] = SIGMA_PLUS
        term = factors[0]
        for factor in factors[1:]:
            term = np.kron(term, factor)
        total += w * term
    return total


def full_sz(n_qubits: int) -> np.ndarray:
    """Diagonal of S_z = 1/2 sum_j (|e><e| - |g><g|)"""
    return excitation_counts(n_qubits) - n_qubits / 2


def build_full_model(
    params: PhysicalParams,
    n_qubits: int,
    qubit_weights: Optional[Sequence[float]] = None,
    dense: Optional[bool] = None,
) -> DrivenModel:
    """
    omega0 S_z + lambda S+S- + drive over 2^N amplitudes.

    qubit_weights scale each qubit's drive coupling; anything but all-ones
    breaks permutation symmetry.
    """
    _check_capacity(n_qubits)
    weights = _resolve_weights(n_qubits, qubit_weights)
    dense = n_qubits <= get_settings().dense_threshold if dense is None else dense
    sz = full_sz(n_qubits)

    if dense:
        unweighted = dense_raising(n_qubits)
        raising = dense_raising(n_qubits, weights)
        lowering = raising.conj().T
        static_rotating = params.lambda_ * (unweighted @ unweighted.conj().T)
        static_lab = static_rotating + params.omega0 * np.diag(sz)
    else:
        unweighted = CollectiveLadderOperator(n_qubits, np.ones(n_qubits))
        raising = CollectiveLadderOperator(n_qubits, weights)
        lowering = raising.H
        static_rotating = params.lambda_ * (unweighted @ unweighted.H)
        static_lab = static_rotating + aslinearoperator(diags(params.omega0 * sz.astype(complex)))

    reduced = build_dicke_model(params, n_qubits)
    logger.debug("full-space model N=%d (%s)", n_qubits, "dense" if dense else "matrix-free")
    return DrivenModel(
        static_rotating=static_rotating,
        static_lab=static_lab,
        raising=raising,
        lowering=lowering,
        frame_generator=sz,
        omega0=params.omega0,
        static_scale=reduced.static_scale,
        coupling_scale=reduced.coupling_scale * float(np.max(weights)),
    )


def build_full_hamiltonian(
    params: PhysicalParams,
    n_qubits: int,
    segment: PulseSegment,
    t: float = 0.0,
    frame: Frame = Frame.ROTATING,
    qubit_weights: Optional[Sequence[float]] = None,
    dense: Optional[bool] = None,
) -> Operator:
    """Full-space H at local time t of a segment starting at 0"""
    return build_full_model(params, n_qubits, qubit_weights, dense).operator_at(t, segment, frame)


def symmetric_projector(n_qubits: int) -> np.ndarray:
    """Dense 2^N x 2^N projector onto the symmetric subspace"""
    isometry = dicke_isometry(n_qubits)
    return isometry @ isometry.conj().T


def _swap_bits(n_qubits: int, i: int, j: int) -> np.ndarray:
    indices = np.arange(2 ** n_qubits)
    bi = (indices >> i) & 1
    bj = (indices >> j) & 1
    differ = bi != bj
    swapped = indices.copy()
    swapped[differ] ^= (1 << i) | (1 << j)
    return swapped


def transpositions(n_qubits: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]


def permutation_check(
    operator: Operator,
    n_qubits: int,
    rng: np.random.Generator,
    n_vectors: int = 3,
) -> float:
    """max ||P H P x - H x|| / ||H x|| over qubit transpositions P and random x"""
    worst = 0.0
    for _ in range(n_vectors):
        x = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
        hx = operator @ x
        scale = float(np.linalg.norm(hx)) or 1.0
        for i, j in transpositions(n_qubits):
            perm = _swap_bits(n_qubits, i, j)
            phpx = (operator @ x[perm])[perm]
            worst = max(worst, float(np.linalg.norm(phpx - hx)) / scale)
    return worst


def _symmetric_start(n_qubits: int, initial: Optional[DickeVector]) -> Tuple[np.ndarray, np.ndarray]:
    isometry = dicke_isometry(n_qubits)
    reduced = DickeVector.basis(n_qubits, 0) if initial is None else initial
    return isometry, isometry @ np.asarray(reduced.amplitudes)


def verify_symmetry_invariance(
    schedule: PulseSchedule,
    config: Optional[IntegratorConfig] = None,
    initial: Optional[DickeVector] = None,
    frame: Frame = Frame.ROTATING,
    qubit_weights: Optional[Sequence[float]] = None,
) -> SymmetryReport:
    """Integrate in the full space and report the largest weight outside the symmetric subspace"""
    config = config or IntegratorConfig()
    n_qubits = schedule.n_qubits
    _check_capacity(n_qubits)
    model = build_full_model(schedule.params, n_qubits, qubit_weights)
    isometry, start = _symmetric_start(n_qubits, initial)
    run = propagate(model, schedule.segments, start, config, frame)

    projected = run.states @ isometry.conj()
    residual = run.states - projected @ isometry.T
    asymmetric = float(np.max(np.sum(np.abs(residual) ** 2, axis=1)))

    target = np.array(schedule.target.as_vector().amplitudes)
    if frame == Frame.LAB:
        target = build_dicke_model(schedule.params, n_qubits).to_lab(target, schedule.total_duration)
    report = SymmetryReport(
        n_qubits=n_qubits,
        max_asymmetric_population=asymmetric,
        final_symmetric_fidelity=state_fidelity(target, projected[-1]),
    )
    logger.info("N=%d: asymmetric population %.2e", n_qubits, asymmetric)
    return report


def reduction_equivalence(
    schedule: PulseSchedule,
    config: Optional[IntegratorConfig] = None,
    initial: Optional[DickeVector] = None,
    frame: Frame = Frame.ROTATING,
) -> float:
    """max |c_k(full, projected) - c_k(ladder)| over the shared sample times"""
    config = config or IntegratorConfig()
    n_qubits = schedule.n_qubits
    bound = get_settings().reduction_max_qubits
    if n_qubits > bound:
        raise CapacityError(f"reduction equivalence is checked up to N={bound}; got N={n_qubits}")
    _check_capacity(n_qubits)
    isometry, start = _symmetric_start(n_qubits, initial)
    reduced_start = isometry.conj().T @ start

    full = propagate(build_full_model(schedule.params, n_qubits), schedule.segments, start, config, frame)
    ladder = propagate(build_dicke_model(schedule.params, n_qubits), schedule.segments, reduced_start, config, frame)
    if full.times.shape != ladder.times.shape or not np.allclose(full.times, ladder.times, rtol=0, atol=1e-15):
        raise ValueError("full-space and ladder runs were sampled at different times")

    projected = full.states @ isometry.conj()
    deviation = float(np.max(np.abs(projected - ladder.states)))
    logger.info("N=%d: reduction deviation %.2e over %d samples", n_qubits, deviation, len(full.times))
    return deviation
