"""
Pulse compiler: turns a target symmetric superposition into a drive schedule.

Segment m (m = 1..K) drives the transition |m-1> -> |m> at its resonance
frequency. Its duration fixes how much amplitude stays on level m-1; its
phase fixes the phase level m ends up with. Durations follow the principal
branch t_m = arccos(x_m) / Omega_m. Phases are solved one step at a time from
an exact forward ledger of every phase factor the ideal evolution produces.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from .exceptions import InfeasibleTargetError, OutOfLadderError, SelectivityError
from .ladder import ladder_up_coeff, level_shifts, step_rabi_rate, transition_frequency
from .schemas import DickeVector, LadderIndex, PhysicalParams, PulseSchedule, PulseSegment, TargetState
from .settings import get_settings

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


def _ledger(
    durations: Sequence[float],
    thetas: Sequence[float],
    shifts: np.ndarray,
) -> np.ndarray:
    """Accumulated phase of every level after the given segments"""
    phases = np.zeros(len(shifts))
    for step, (t, theta) in enumerate(zip(durations, thetas), start=1):
        lower = step - 1
        carried = phases[lower]
        phases = phases - shifts * t
        phases[lower + 1] = carried + theta - math.pi / 2 - shifts[lower + 1] * t
    phases[len(durations) + 1:] = 0.0
    return phases


def phase_ledger(schedule: PulseSchedule, upto: Optional[int] = None) -> np.ndarray:
    """
    Per-level phase after segments 1..upto (all of them by default).

    Level m picks up theta_m - pi/2 from the transfer that populates it and
    -alpha_m * t for every segment it lives through. Levels not yet populated
    read 0.
    """
    segments = schedule.segments if upto is None else schedule.segments[:upto]
    shifts = level_shifts(schedule.n_qubits, schedule.params.lambda_)
    return _ledger([s.duration_s for s in segments], [s.phase_rad for s in segments], shifts)


def solve_phases(durations: Sequence[float], shifts: np.ndarray, target_phases: Sequence[float]) -> List[float]:
    """
    Drive phases making level m end with target_phases[m].

    The final phase of level m is linear in theta_m with unit slope and does not
    depend on any later theta, so each step is one subtraction.
    """
    thetas = [0.0] * len(durations)
    for m in range(1, len(durations) + 1):
        thetas[m - 1] = 0.0
        reached = _ledger(durations, thetas, shifts)[m]
        thetas[m - 1] = float(np.mod(target_phases[m] - reached, TWO_PI))
    return thetas


def _two_level_step(amplitudes: np.ndarray, segment: PulseSegment, shifts: np.ndarray) -> np.ndarray:
    lower = segment.lower_level
    n_qubits = len(amplitudes) - 1
    rate = ladder_up_coeff(LadderIndex(n_qubits=n_qubits, k=lower)) * segment.amplitude_rad_s
    angle = rate * segment.duration_s
    c, s = math.cos(angle), math.sin(angle)
    phase = np.exp(1j * segment.phase_rad)
    a, b = amplitudes[lower], amplitudes[lower + 1]
    out = amplitudes.copy()
    out[lower] = c * a - 1j * np.conj(phase) * s * b
    out[lower + 1] = -1j * phase * s * a + c * b
    return out * np.exp(-1j * shifts * segment.duration_s)


def ideal_trajectory(schedule: PulseSchedule, initial: Optional[DickeVector] = None) -> List[DickeVector]:
    """States before the first segment and after each one, under the selective two-level model"""
    n_qubits = schedule.n_qubits
    state = DickeVector.basis(n_qubits, 0) if initial is None else initial
    shifts = level_shifts(n_qubits, schedule.params.lambda_)
    amplitudes = np.array(state.amplitudes)
    states = [state]
    for segment in schedule.segments:
        amplitudes = _two_level_step(amplitudes, segment, shifts)
        states.append(DickeVector(n_qubits=n_qubits, amplitudes=amplitudes))
    return states


def simulate_ideal(schedule: PulseSchedule, initial: Optional[DickeVector] = None) -> DickeVector:
    """
    Closed-form evolution: each segment rotates its resonant pair and every
    level, spectators included, picks up exp(-i alpha_k t).
    """
    return ideal_trajectory(schedule, initial)[-1]


def closed_form_phases(schedule: PulseSchedule, literal: bool = False) -> np.ndarray:
    """
    Final level phases from the closed-form sum.

    phi_k = sum_{j<=k} theta_j - k pi/2 - sum_{j<k} alpha_j t_j - alpha_k * S_k
    with S_k = t_k + ... + t_K. With literal=True, S_k = t_1 + ... + t_{K-k+1},
    the limits as usually printed, which only agree when the durations allow it.
    """
    K = len(schedule.segments)
    shifts = level_shifts(schedule.n_qubits, schedule.params.lambda_)
    t = np.array([s.duration_s for s in schedule.segments])
    theta = np.array([s.phase_rad for s in schedule.segments])
    phases = np.zeros(K + 1)
    for k in range(1, K + 1):
        tail = t[: K - k + 1].sum() if literal else t[k - 1:].sum()
        phases[k] = theta[:k].sum() - k * math.pi / 2 - np.dot(shifts[1:k], t[: k - 1]) - shifts[k] * tail
    return phases


def wrapped_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a - b| folded into [0, pi]"""
    return np.abs(np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b)))))


class PulseCompiler:
    """
    Compiles targets into schedules.

    Preconditions enforced:
    1. K <= N (OutOfLadderError)
    2. 0 < epsilon < lambda (SelectivityError); a warning above the
       selectivity threshold
    3. the remaining amplitude never vanishes while later levels still need
       loading (InfeasibleTargetError)
    """

    def __init__(self, zero_tol: float = 1e-12):
        self.zero_tol = zero_tol

    def compile(self, target: TargetState, params: PhysicalParams) -> PulseSchedule:
        """
        Compile a target into one resonant segment per rung up to level K.

        Args:
            target: Superposition over levels 0..K, d_0 real and non-negative
            params: Physical parameters; epsilon and lambda set durations and frequencies

        Returns:
            PulseSchedule with K segments (none when d_0 = 1)
        """
        n_qubits, K = target.n_qubits, target.K
        if K > n_qubits:
            raise OutOfLadderError(f"target reaches level {K} but N={n_qubits} has only levels 0..{n_qubits}")
        if K == 0:
            return PulseSchedule(segments=[], params=params, target=target, global_phase=target.global_phase)

        self._check_selectivity(params)
        durations = self._durations(target, params)
        shifts = level_shifts(n_qubits, params.lambda_)
        thetas = solve_phases(durations, shifts, np.angle(target.amplitudes))

        segments = []
        for m, (t, theta) in enumerate(zip(durations, thetas), start=1):
            lower = LadderIndex(n_qubits=n_qubits, k=m - 1)
            segments.append(
                PulseSegment(
                    step_index=m,
                    frequency_rad_s=transition_frequency(lower, params.omega0, params.lambda_),
                    phase_rad=theta,
                    amplitude_rad_s=params.epsilon,
                    duration_s=t,
                )
            )
        schedule = PulseSchedule(segments=segments, params=params, target=target, global_phase=target.global_phase)
        logger.debug(
            "compiled N=%d K=%d target into %.4g s (closed-form phase mismatch with printed limits: %.3g rad)",
            n_qubits, K, schedule.total_duration, self.literal_phase_discrepancy(schedule),
        )
        return schedule

    def literal_phase_discrepancy(self, schedule: PulseSchedule) -> float:
        """Largest disagreement between the ledger and the printed closed-form limits, on populated levels"""
        if not schedule.segments:
            return 0.0
        K = len(schedule.segments)
        populated = np.abs(schedule.target.amplitudes[1: K + 1]) > self.zero_tol
        if not populated.any():
            return 0.0
        ledger = phase_ledger(schedule)[1: K + 1]
        literal = closed_form_phases(schedule, literal=True)[1:]
        return float(np.max(wrapped_difference(ledger, literal)[populated]))

    def _check_selectivity(self, params: PhysicalParams):
        if params.epsilon <= 0:
            raise SelectivityError("drive amplitude epsilon must be positive to load any level")
        if params.epsilon >= params.lambda_:
            raise SelectivityError(
                f"epsilon/lambda = {params.selectivity:.3g}; selective addressing needs epsilon << lambda"
            )
        threshold = get_settings().selectivity_warning
        if params.selectivity > threshold:
            logger.warning(
                "epsilon/lambda = %.3g is above %.3g; off-resonant leakage will be noticeable",
                params.selectivity, threshold,
            )

    def _durations(self, target: TargetState, params: PhysicalParams) -> List[float]:
        magnitudes = np.abs(target.amplitudes)
        durations = []
        consumed = 0.0
        for m in range(1, target.K + 1):
            lower = m - 1
            remaining = math.sqrt(max(0.0, 1.0 - consumed))
            if remaining < self.zero_tol:
                if np.any(magnitudes[lower:] > self.zero_tol):
                    raise InfeasibleTargetError(
                        f"no amplitude left to load level {lower} onwards (remaining {remaining:.2e})"
                    )
                x = 1.0
            else:
                x = min(1.0, magnitudes[lower] / remaining)
            rate = step_rabi_rate(LadderIndex(n_qubits=target.n_qubits, k=lower), params.epsilon)
            durations.append(math.acos(x) / rate)
            consumed += magnitudes[lower] ** 2
        return durations


def random_target(n_qubits: int, rng: np.random.Generator, K: Optional[int] = None) -> TargetState:
    """Normalized complex Gaussian amplitudes on levels 0..K"""
    K = n_qubits if K is None else K
    raw = rng.normal(size=K + 1) + 1j * rng.normal(size=K + 1)
    return TargetState(n_qubits=n_qubits, amplitudes=raw / np.linalg.norm(raw))


def ghz_target(n_qubits: int) -> TargetState:
    """(|J,-J> + |J,J>)/sqrt(2)"""
    amplitudes = np.zeros(n_qubits + 1, dtype=complex)
    amplitudes[0] = amplitudes[-1] = 1 / math.sqrt(2)
    return TargetState(n_qubits=n_qubits, amplitudes=amplitudes)


def w_target(n_qubits: int) -> TargetState:
    """Single-excitation Dicke level"""
    return TargetState(n_qubits=n_qubits, amplitudes=[0.0, 1.0])


def equal_superposition_target(n_qubits: int, K: int) -> TargetState:
    return TargetState(n_qubits=n_qubits, amplitudes=np.full(K + 1, 1 / math.sqrt(K + 1), dtype=complex))
