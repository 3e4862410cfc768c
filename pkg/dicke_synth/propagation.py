"""
Piecewise-driven Schrödinger propagation shared by every Hamiltonian backend.

A backend describes H(t) = H_static + f(t) R + conj(f(t)) R^dagger, where R is
the (possibly weighted) collective raising operator and f(t) is the complex
drive of the active segment. Operators may be dense arrays or scipy
LinearOperators; only products with a state vector are taken.

Frames:
  rotating  picture rotating at omega0 * G (G = S_z, or S_z + a^dagger a with a
            cavity); the drive phase is referenced to the segment start, so
            f(tau) = eps * exp(-i((omega_m - omega0) tau - theta_m)).
  lab       f(t) = eps * exp(-i(omega_m t - theta_m - (omega_m - omega0) T_m)),
            with T_m the segment start. The extra phase makes both frames
            describe the same physical drive.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import LinearOperator

from .exceptions import IntegratorError
from .schemas import Frame, IntegrationMethod, IntegratorConfig, PulseSegment

logger = logging.getLogger(__name__)

Operator = Union[np.ndarray, LinearOperator]


@dataclass(frozen=True)
class DrivenModel:
    """Static part in both frames plus the driven raising/lowering pair"""
    static_rotating: Operator
    static_lab: Operator
    raising: Operator
    lowering: Operator
    frame_generator: np.ndarray
    omega0: float
    static_scale: float
    coupling_scale: float

    @property
    def dim(self) -> int:
        return len(self.frame_generator)

    def static(self, frame: Frame) -> Operator:
        return self.static_lab if frame == Frame.LAB else self.static_rotating

    def frequency_bound(self, frame: Frame, segment: PulseSegment) -> float:
        """Upper estimate of the fastest angular frequency during a segment"""
        bound = self.static_scale + 2 * segment.amplitude_rad_s * self.coupling_scale
        if frame == Frame.LAB:
            return bound + self.omega0 * float(np.max(np.abs(self.frame_generator))) + abs(segment.frequency_rad_s)
        return bound + abs(segment.frequency_rad_s - self.omega0)

    def to_lab(self, state: np.ndarray, t: float) -> np.ndarray:
        return state * np.exp(-1j * self.omega0 * self.frame_generator * t)

    def from_lab(self, state: np.ndarray, t: float) -> np.ndarray:
        return state * np.exp(1j * self.omega0 * self.frame_generator * t)

    def operator_at(self, tau: float, segment: PulseSegment, frame: Frame, segment_start: float = 0.0) -> Operator:
        """H at local time tau inside a segment"""
        f = complex(drive_coefficient(segment, frame, self.omega0, segment_start)(tau))
        return self.static(frame) + f * self.raising + f.conjugate() * self.lowering


@dataclass
class Propagation:
    """Sampled states of one propagation"""
    times: np.ndarray
    states: np.ndarray
    norm_drift: float
    rhs_evaluations: int

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def drive_coefficient(
    segment: PulseSegment, frame: Frame, omega0: float, segment_start: float
) -> Callable[[float], complex]:
    eps = segment.amplitude_rad_s
    theta = segment.phase_rad
    detuning = segment.frequency_rad_s - omega0
    if frame == Frame.LAB:
        omega = segment.frequency_rad_s
        offset = theta + detuning * segment_start

        def lab(tau: float) -> complex:
            return eps * np.exp(-1j * (omega * (segment_start + tau) - offset))

        return lab

    def rotating(tau: float) -> complex:
        return eps * np.exp(-1j * (detuning * tau - theta))

    return rotating


def _right_hand_side(model: DrivenModel, frame: Frame, drive: Callable[[float], complex]):
    static = model.static(frame)
    raising, lowering = model.raising, model.lowering

    def rhs(tau: float, psi: np.ndarray) -> np.ndarray:
        f = drive(tau)
        return -1j * (static @ psi + f * (raising @ psi) + np.conj(f) * (lowering @ psi))

    return rhs


def _lab_step_cap(segments: Sequence[PulseSegment], config: IntegratorConfig) -> float:
    """Shortest drive period / 20, tightened further by the configured cap"""
    fastest = max(abs(s.frequency_rad_s) for s in segments)
    cap = 2 * math.pi / (20 * fastest) if fastest > 0 else math.inf
    if config.max_step is not None and config.max_step > cap:
        logger.warning("max_step %.3g s exceeds a twentieth of the drive period; using %.3g s", config.max_step, cap)
    return min(cap, config.max_step) if config.max_step is not None else cap


def _rk4_segment(rhs, psi: np.ndarray, duration: float, n_steps: int, samples: int):
    h = duration / n_steps
    keep = set(np.unique(np.linspace(0, n_steps, samples).round().astype(int)).tolist())
    times, states = [0.0], [psi.copy()]
    tau = 0.0
    for step in range(1, n_steps + 1):
        k1 = rhs(tau, psi)
        k2 = rhs(tau + 0.5 * h, psi + 0.5 * h * k1)
        k3 = rhs(tau + 0.5 * h, psi + 0.5 * h * k2)
        k4 = rhs(tau + h, psi + h * k3)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        tau = step * h
        if step in keep:
            times.append(tau)
            states.append(psi.copy())
    return np.array(times), np.array(states), 4 * n_steps


def _adaptive_segment(rhs, psi: np.ndarray, duration: float, config: IntegratorConfig, max_step: float, index: int, start: float):
    sample_times = np.linspace(0.0, duration, config.samples_per_segment)
    sol = solve_ivp(
        rhs,
        (0.0, duration),
        psi,
        method=config.adaptive_solver,
        t_eval=sample_times,
        rtol=config.rel_tol,
        atol=config.abs_tol,
        max_step=max_step,
    )
    if not sol.success:
        reached = start + (float(sol.t[-1]) if len(sol.t) else 0.0)
        raise IntegratorError(f"{config.adaptive_solver} failed: {sol.message}", segment=index, time_reached=reached)
    return sol.t, sol.y.T, int(sol.nfev)


def propagate(
    model: DrivenModel,
    segments: Sequence[PulseSegment],
    initial: np.ndarray,
    config: IntegratorConfig,
    frame: Frame = Frame.ROTATING,
) -> Propagation:
    """Integrate segment by segment; the returned times are absolute"""
    psi = np.array(initial, dtype=complex)
    if psi.shape != (model.dim,):
        raise ValueError(f"initial state has shape {psi.shape}, model dimension is {model.dim}")
    reference = float(np.vdot(psi, psi).real)

    active = [s for s in segments if s.duration_s > 0]
    if frame == Frame.LAB and active:
        max_step = _lab_step_cap(active, config)
    else:
        max_step = config.max_step if config.max_step is not None else math.inf

    all_times: List[np.ndarray] = [np.array([0.0])]
    all_states: List[np.ndarray] = [psi[None, :]]
    evaluations = 0
    start = 0.0
    for segment in segments:
        if segment.duration_s == 0:
            continue
        rhs = _right_hand_side(model, frame, drive_coefficient(segment, frame, model.omega0, start))
        if config.method == IntegrationMethod.RK4:
            if math.isinf(max_step):
                max_step_here = 0.05 / model.frequency_bound(frame, segment)
            else:
                max_step_here = max_step
            n_steps = max(1, math.ceil(segment.duration_s / max_step_here - 1e-9))
            times, states, n_eval = _rk4_segment(rhs, psi, segment.duration_s, n_steps, config.samples_per_segment)
        else:
            times, states, n_eval = _adaptive_segment(
                rhs, psi, segment.duration_s, config, max_step, segment.step_index, start
            )
        evaluations += n_eval
        all_times.append(start + times[1:])
        all_states.append(states[1:])
        psi = states[-1].copy()
        start += segment.duration_s

    times = np.concatenate(all_times)
    states = np.concatenate(all_states, axis=0)
    norms = np.sum(np.abs(states) ** 2, axis=1)
    drift = float(np.max(np.abs(norms - reference)))
    logger.debug("propagated %d segments, dim=%d, norm drift %.2e", len(active), model.dim, drift)
    return Propagation(times=times, states=states, norm_drift=drift, rhs_evaluations=evaluations)
