"""
Atoms-plus-cavity realization of the ladder coupling.

Full model over (symmetric level k) x (photon number n), flat index
k * (n_max + 1) + n:

    H = omega0 S_z + omega_c a^dagger a + g (a^dagger S- + a S+) + drive on the atoms

integrated in the frame rotating at omega0 (S_z + a^dagger a), where the
cavity term becomes -delta_c a^dagger a and the Tavis-Cummings coupling is
unchanged. With delta_c >> g sqrt(n + 1) the cavity is only virtually
excited and the atoms feel lambda_c S+S- with lambda_c = g^2/delta_c.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import build_dicke_model
from .exceptions import ConfigError
from .ladder import collective_matrices
from .propagation import DrivenModel, propagate
from .schemas import (
    AtomCavityState,
    DickeVector,
    DispersiveParams,
    Frame,
    IntegratorConfig,
    ModelComparison,
    PhysicalParams,
    PulseSchedule,
)
from .settings import get_settings

logger = logging.getLogger(__name__)


def annihilation(n_max: int) -> np.ndarray:
    """Photon annihilation operator truncated at n_max photons"""
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(complex)


def build_full_model(params: PhysicalParams, n_qubits: int, n_max: Optional[int] = None) -> DrivenModel:
    """Tavis-Cummings atoms and cavity with the classical drive on the atoms only"""
    n_max = params.n_max if n_max is None else n_max
    ops = collective_matrices(n_qubits)
    a = annihilation(n_max)
    photon_eye = np.eye(n_max + 1, dtype=complex)
    atom_eye = np.eye(n_qubits + 1, dtype=complex)
    number = a.conj().T @ a

    coupling = params.g * (np.kron(ops.lowering, a.conj().T) + np.kron(ops.raising, a))
    static_rotating = -params.delta_c * np.kron(atom_eye, number) + coupling
    static_lab = (
        params.omega0 * np.kron(ops.sz, photon_eye)
        + params.omega_c * np.kron(atom_eye, number)
        + coupling
    )
    generator = np.real(np.diag(np.kron(ops.sz, photon_eye) + np.kron(atom_eye, number)))
    up = np.abs(np.diag(ops.raising, -1))
    return DrivenModel(
        static_rotating=static_rotating,
        static_lab=static_lab,
        raising=np.kron(ops.raising, photon_eye),
        lowering=np.kron(ops.lowering, photon_eye),
        frame_generator=generator,
        omega0=params.omega0,
        static_scale=params.delta_c * n_max + 2 * params.g * math.sqrt(n_max) * float(np.max(up)),
        coupling_scale=float(np.max(up)),
    )


def excitation_number(n_qubits: int, n_max: int) -> np.ndarray:
    """Diagonal of S_z + a^dagger a, conserved by the coupling"""
    ops = collective_matrices(n_qubits)
    number = np.arange(n_max + 1, dtype=float)
    return np.real(np.diag(ops.sz))[:, None] + number[None, :]


def effective_model(params: PhysicalParams, n_qubits: int, photon_number: int = 0) -> np.ndarray:
    """
    lambda_c (2 S_z n + S+S-) for a cavity holding n photons.

    In vacuum this is lambda_c S+S-, the ladder coupling with lambda = lambda_c.
    """
    ops = collective_matrices(n_qubits)
    return params.lambda_c * (2 * photon_number * ops.sz + ops.hopping)


def dispersive_params(params: PhysicalParams, mean_photons: float = 0.0) -> DispersiveParams:
    """lambda_c and the ratio g sqrt(n+1)/delta_c; warns when the ratio is above the validity threshold"""
    ratio = params.g * math.sqrt(mean_photons + 1) / params.delta_c
    dispersive = DispersiveParams(lambda_c=params.lambda_c, validity_ratio=ratio)
    if not dispersive.is_valid:
        logger.warning(
            "g*sqrt(n+1)/delta_c = %.3g is above %.3g; the dispersive picture is marginal",
            ratio, get_settings().validity_warning,
        )
    return dispersive


def at_detuning(params: PhysicalParams, delta_c: float) -> PhysicalParams:
    """
    Same cavity at another delta_c: lambda follows g^2/delta_c and epsilon
    keeps its ratio to lambda, so the effective dynamics is unchanged in
    units of lambda.
    """
    lambda_c = params.g ** 2 / delta_c
    return params.with_updates(delta_c=delta_c, lambda_=lambda_c, epsilon=params.selectivity * lambda_c)


def vacuum_persistence_bound(n_qubits: int, k: int, g: float, delta_c: float) -> float:
    """Peak photon population of an undriven bare |k, 0>, to leading order in g/delta_c: 4 k(N-k+1) (g/delta_c)^2"""
    return 4 * k * (n_qubits - k + 1) * (g / delta_c) ** 2


@dataclass(frozen=True)
class CavityRun:
    """Sampled atom-cavity trajectory; states have shape (T, N+1, n_max+1)"""
    times: np.ndarray
    states: np.ndarray
    n_max: int
    norm_drift: float
    truncation_ok: bool

    @property
    def n_qubits(self) -> int:
        return self.states.shape[1] - 1

    @property
    def photon_populations(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)

    @property
    def atomic_populations(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=2)

    @property
    def tail_population(self) -> float:
        return float(np.max(self.photon_populations[:, -1]))

    @property
    def max_photon_population(self) -> float:
        return float(np.max(1.0 - self.photon_populations[:, 0]))

    def final_state(self) -> AtomCavityState:
        return AtomCavityState(n_qubits=self.n_qubits, n_max=self.n_max, amplitudes=self.states[-1])


def _initial(n_qubits: int, n_max: int, initial: Optional[DickeVector]) -> np.ndarray:
    atoms = DickeVector.basis(n_qubits, 0) if initial is None else initial
    vacuum = np.zeros(n_max + 1, dtype=complex)
    vacuum[0] = 1.0
    return np.kron(np.asarray(atoms.amplitudes), vacuum)


def run_full_model(
    schedule: PulseSchedule,
    params: Optional[PhysicalParams] = None,
    config: Optional[IntegratorConfig] = None,
    initial: Optional[DickeVector] = None,
    frame: Frame = Frame.ROTATING,
) -> CavityRun:
    """
    Integrate the schedule with the cavity in vacuum at the start.

    If the top Fock level ever holds more than the tail bound, n_max grows by
    2 and the run is repeated, up to the configured ceiling.
    """
    params = params or schedule.params
    config = config or IntegratorConfig()
    settings = get_settings()
    n_qubits = schedule.n_qubits
    n_max = params.n_max
    while True:
        model = build_full_model(params, n_qubits, n_max)
        run = propagate(model, schedule.segments, _initial(n_qubits, n_max, initial), config, frame)
        states = run.states.reshape(len(run.times), n_qubits + 1, n_max + 1)
        tail = float(np.max(np.sum(np.abs(states[:, :, -1]) ** 2, axis=1)))
        if tail <= settings.photon_tail_bound:
            return CavityRun(run.times, states, n_max, run.norm_drift, truncation_ok=True)
        if n_max + 2 > settings.n_max_ceiling:
            logger.warning("photon tail %.2e at n_max=%d and no room left to escalate", tail, n_max)
            return CavityRun(run.times, states, n_max, run.norm_drift, truncation_ok=False)
        logger.warning("photon tail %.2e at n_max=%d; escalating to %d", tail, n_max, n_max + 2)
        n_max += 2


def compare_models(
    schedule: PulseSchedule,
    params: Optional[PhysicalParams] = None,
    config: Optional[IntegratorConfig] = None,
    frame: Frame = Frame.ROTATING,
    full_run: Optional[CavityRun] = None,
) -> ModelComparison:
    """
    Run the schedule under the full model and under lambda_c S+S-, then
    compare the reduced atomic state with the effective one.

    Args:
        schedule: Schedule compiled for lambda = lambda_c
        params: Cavity parameters (the schedule's own by default)
        config: Integrator settings for both models
        frame: Picture to integrate in
        full_run: Already computed full-model run to reuse

    Returns:
        ModelComparison with the overlap, photon peak and truncation status
    """
    params = params or schedule.params
    config = config or IntegratorConfig()
    if params.delta_c <= 0:
        raise ConfigError("model comparison needs a positive dispersive detuning", field="physical.delta_c")
    if not math.isclose(schedule.params.lambda_, params.lambda_c, rel_tol=1e-9, abs_tol=1e-12):
        logger.warning(
            "schedule was compiled for lambda=%.6g rad/s but the cavity gives lambda_c=%.6g rad/s",
            schedule.params.lambda_, params.lambda_c,
        )

    run = full_run or run_full_model(schedule, params, config, frame=frame)
    effective_params = params.with_updates(lambda_=params.lambda_c)
    effective = propagate(
        build_dicke_model(effective_params, schedule.n_qubits),
        schedule.segments,
        np.asarray(DickeVector.basis(schedule.n_qubits, 0).amplitudes),
        config,
        frame,
    )

    overlap = min(1.0, max(0.0, atomic_overlap(run, effective.final)))
    dispersive = dispersive_params(params, mean_photons=float(np.max(run.photon_populations @ np.arange(run.n_max + 1))))

    report = ModelComparison(
        fidelity_full_vs_effective=overlap,
        disagreement=1.0 - overlap,
        max_photon_population=run.max_photon_population,
        validity_ratio=dispersive.validity_ratio,
        n_max_used=run.n_max,
        tail_population=run.tail_population,
        truncation_ok=run.truncation_ok,
    )
    logger.info(
        "delta_c=%.4g rad/s: disagreement %.3e, peak photons %.3e, n_max %d",
        params.delta_c, report.disagreement, report.max_photon_population, run.n_max,
    )
    return report


def atomic_overlap(run: CavityRun, effective: np.ndarray) -> float:
    """<psi_e| rho_atoms |psi_e> at the end of a full run"""
    rho = run.final_state().reduced_atomic()
    psi = np.asarray(effective)
    return float(np.real(np.vdot(psi, rho @ psi)))

