"""
Time-dependent Schrödinger integration on the N+1 symmetric levels.

The model is H = omega0 S_z + lambda S+S- + drive, with the Hermitian drive
eps [exp(-i(wt - theta)) S+ + exp(i(wt - theta)) S-]. The rotating frame is the
interaction picture with respect to omega0 S_z; its static part is
diag(alpha_k) and every off-resonant coupling of the ladder is kept.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

import numpy as np

from .ladder import collective_matrices, level_shifts
from .propagation import DrivenModel, propagate
from .schemas import (
    DickeVector,
    Frame,
    IntegratorConfig,
    LeakagePoint,
    PhysicalParams,
    PulseSchedule,
    PulseSegment,
    SimulationResult,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def build_dicke_model(params: PhysicalParams, n_qubits: int) -> DrivenModel:
    """Ladder Hamiltonian pieces: diag(alpha_k) in the rotating frame, plus omega0 S_z in the lab"""
    ops = collective_matrices(n_qubits)
    shifts = level_shifts(n_qubits, params.lambda_)
    static_rotating = np.diag(shifts).astype(complex)
    up = np.abs(np.diag(ops.raising, -1))
    return DrivenModel(
        static_rotating=static_rotating,
        static_lab=static_rotating + params.omega0 * ops.sz,
        raising=ops.raising,
        lowering=ops.lowering,
        frame_generator=np.real(np.diag(ops.sz)),
        omega0=params.omega0,
        static_scale=float(np.max(np.abs(shifts))),
        coupling_scale=float(np.max(up)),
    )


def hamiltonian_at(
    t: float,
    segment: PulseSegment,
    params: PhysicalParams,
    n_qubits: int,
    frame: Frame = Frame.ROTATING,
    segment_start: float = 0.0,
) -> np.ndarray:
    """
    Dense H at local time t inside a segment that starts at segment_start.

    In the rotating frame the (k+1, k) element is
    eps * sqrt((N-k)(k+1)) * exp(-i((omega_m - omega0) t - theta_m)).
    """
    return build_dicke_model(params, n_qubits).operator_at(t, segment, frame, segment_start)


def fidelity(a: DickeVector, b: DickeVector) -> float:
    """|<a|b>|^2"""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"cannot compare states of N={a.n_qubits} and N={b.n_qubits}")
    return state_fidelity(a.amplitudes, b.amplitudes)


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    if np.shape(a) != np.shape(b):
        raise ValueError(f"state shapes differ: {np.shape(a)} vs {np.shape(b)}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def off_target_population(state: DickeVector, K: int) -> float:
    """Population on levels above K, the ones no segment is meant to load"""
    return float(np.sum(state.populations[K + 1:]))


def integrate(
    schedule: PulseSchedule,
    initial: Optional[DickeVector] = None,
    config: Optional[IntegratorConfig] = None,
    frame: Frame = Frame.ROTATING,
) -> SimulationResult:
    """
    Propagate initial (ground level by default) through every segment.

    The fidelity is taken against the schedule's target expressed in the same
    frame at the final time, so it is frame independent.

    Args:
        schedule: Compiled drive schedule; its params set the Hamiltonian
        initial: Normalized starting state on the N+1 levels
        config: Integrator settings (adaptive DOP853 by default)
        frame: Picture to integrate in

    Returns:
        SimulationResult with the sampled trajectory, final state, norm drift
        and fidelity; converged is False when the drift exceeds the tolerance
    """
    config = config or IntegratorConfig()
    n_qubits = schedule.n_qubits
    initial = DickeVector.basis(n_qubits, 0) if initial is None else initial
    if initial.n_qubits != n_qubits:
        raise ValueError(f"initial state has N={initial.n_qubits}, schedule has N={n_qubits}")
    if not initial.is_normalized():
        raise ValueError(f"initial state has norm {initial.norm():.9f}; integrate needs a normalized state")

    model = build_dicke_model(schedule.params, n_qubits)
    run = propagate(model, schedule.segments, initial.amplitudes, config, frame)

    target = np.array(schedule.target.as_vector().amplitudes)
    if frame == Frame.LAB:
        target = model.to_lab(target, schedule.total_duration)
    final = DickeVector(n_qubits=n_qubits, amplitudes=run.final)

    converged = run.norm_drift <= config.norm_tolerance
    if not converged:
        logger.warning(
            "norm drift %.2e exceeds tolerance %.1e; result flagged non-converged",
            run.norm_drift, config.norm_tolerance,
        )
    return SimulationResult(
        final_state=final,
        times=run.times,
        trajectory=run.states,
        norm_drift=run.norm_drift,
        fidelity_vs_target=state_fidelity(target, run.final),
        converged=converged,
        frame=frame,
        rhs_evaluations=run.rhs_evaluations,
    )


def detuned(schedule: PulseSchedule, detuning: float) -> PulseSchedule:
    """Every drive pulled below its resonance by detuning (transition minus drive)"""
    segments = [s.model_copy(update={"frequency_rad_s": s.frequency_rad_s - detuning}) for s in schedule.segments]
    return schedule.model_copy(update={"segments": segments})


def _spectrum_point(
    detuning: float,
    schedule: PulseSchedule,
    initial: Optional[DickeVector],
    config: Optional[IntegratorConfig],
    frame: Frame,
) -> LeakagePoint:
    result = integrate(detuned(schedule, detuning), initial, config, frame)
    return LeakagePoint(
        detuning=detuning,
        leakage=off_target_population(result.final_state, len(schedule.segments)),
        fidelity=result.fidelity_vs_target,
    )


def parallel_map(fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> List[R]:
    """Order-preserving map over a process pool; runs inline for jobs <= 1"""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def leakage_spectrum(
    schedule: PulseSchedule,
    initial: Optional[DickeVector] = None,
    config: Optional[IntegratorConfig] = None,
    detuning_grid: Sequence[float] = (0.0,),
    frame: Frame = Frame.ROTATING,
    jobs: int = 1,
) -> List[LeakagePoint]:
    """
    Re-run the schedule with every drive detuned by each grid value.

    Leakage is the population left above the last level the schedule loads.
    """
    worker = partial(_spectrum_point, schedule=schedule, initial=initial, config=config, frame=frame)
    points = parallel_map(worker, [float(d) for d in detuning_grid], jobs)
    logger.info("leakage spectrum over %d detunings, peak %.3e", len(points), max(p.leakage for p in points))
    return points
