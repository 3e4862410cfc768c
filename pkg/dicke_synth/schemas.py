"""
Data models for states, drive schedules, physical parameters and reports.
All amplitudes are complex numpy arrays; all frequencies are angular (rad/s).
"""

import math
from enum import Enum
from typing import Annotated, Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, model_validator

from .settings import get_settings


def _as_complex_array(value: Any) -> np.ndarray:
    """Accept ndarrays, complex lists, (re, im) pairs or {"re", "im"} dicts"""
    if isinstance(value, np.ndarray):
        arr = np.array(value, dtype=complex)
    else:
        arr = np.array([_as_complex(v) for v in value], dtype=complex)
    arr.flags.writeable = False
    return arr


def _as_complex(value: Any):
    if isinstance(value, dict):
        return complex(value["re"], value["im"])
    if isinstance(value, (list, tuple)):
        if value and isinstance(value[0], (list, tuple, dict)):
            return [_as_complex(v) for v in value]
        if len(value) != 2:
            raise ValueError(f"expected a (re, im) pair, got {value!r}")
        return complex(value[0], value[1])
    return complex(value)


def _as_real_array(value: Any) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.flags.writeable = False
    return arr


def _complex_to_json(arr: np.ndarray):
    if arr.ndim > 1:
        return [_complex_to_json(row) for row in arr]
    return [[float(z.real), float(z.imag)] for z in arr]


ComplexArray = Annotated[
    Any,
    PlainValidator(_as_complex_array),
    PlainSerializer(_complex_to_json, when_used="json"),
]
RealArray = Annotated[
    Any,
    PlainValidator(_as_real_array),
    PlainSerializer(lambda a: [float(x) for x in np.ravel(a)], when_used="json"),
]


class Frame(str, Enum):
    """Picture the Schrödinger equation is integrated in"""
    LAB = "lab"
    ROTATING = "rotating"


class IntegrationMethod(str, Enum):
    """Time-stepping scheme"""
    RK4 = "rk4"
    ADAPTIVE = "adaptive"


class LadderIndex(BaseModel):
    """Symmetric Dicke level |J, -J+k> of N qubits, stored as (N, k) so J = N/2 is never halved"""
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(..., ge=1, description="Number of qubits N")
    k: int = Field(..., ge=0, description="Excitation number")

    @model_validator(mode="after")
    def _check_range(self):
        if self.k > self.n_qubits:
            raise ValueError(f"excitation number k={self.k} outside [0, {self.n_qubits}]")
        return self

    @property
    def is_top(self) -> bool:
        return self.k == self.n_qubits


class DickeVector(BaseModel):
    """Pure state over the N+1 symmetric levels"""
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(..., ge=1, description="Number of qubits N")
    amplitudes: ComplexArray = Field(..., description="c_0..c_N over |J,-J+k>")

    @model_validator(mode="after")
    def _check_length(self):
        if len(self.amplitudes) != self.n_qubits + 1:
            raise ValueError(
                f"expected {self.n_qubits + 1} amplitudes for N={self.n_qubits}, got {len(self.amplitudes)}"
            )
        return self

    @classmethod
    def basis(cls, n_qubits: int, k: int = 0) -> "DickeVector":
        LadderIndex(n_qubits=n_qubits, k=k)
        amplitudes = np.zeros(n_qubits + 1, dtype=complex)
        amplitudes[k] = 1.0
        return cls(n_qubits=n_qubits, amplitudes=amplitudes)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: Optional[float] = None) -> bool:
        tol = get_settings().normalization_tol if tol is None else tol
        return abs(1.0 - self.norm() ** 2) <= tol


class PhysicalParams(BaseModel):
    """
    Qubit, coupling, drive and cavity parameters.

    Defaults for the cavity fields are the long-lived Rydberg-atom setup:
    g = 2pi x 25 kHz, delta_c = 10 g, T_r = 30 ms, T_c = 1 ms.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    omega0: float = Field(2 * math.pi * 51.1e9, gt=0, description="Qubit transition frequency (rad/s)")
    lambda_: float = Field(..., ge=0, alias="lambda", description="Qubit-qubit coupling (rad/s)")
    epsilon: float = Field(..., ge=0, description="Drive Rabi amplitude (rad/s)")
    g: float = Field(2 * math.pi * 25e3, ge=0, description="Atom-cavity coupling (rad/s)")
    delta_c: float = Field(2 * math.pi * 250e3, ge=0, description="Dispersive detuning omega0 - omega_c (rad/s)")
    T_r: float = Field(3e-2, gt=0, description="Atomic radiative lifetime (s)")
    T_c: float = Field(1e-3, gt=0, description="Cavity photon lifetime (s)")
    n_max: int = Field(4, ge=2, description="Cavity Fock truncation")

    @property
    def omega_c(self) -> float:
        return self.omega0 - self.delta_c

    @property
    def lambda_c(self) -> float:
        if self.delta_c <= 0:
            raise ValueError("lambda_c needs a positive dispersive detuning delta_c")
        return self.g ** 2 / self.delta_c

    @property
    def selectivity(self) -> float:
        """epsilon/lambda; must be well below 1 for selective addressing"""
        return self.epsilon / self.lambda_ if self.lambda_ > 0 else math.inf

    def with_updates(self, **changes) -> "PhysicalParams":
        data = self.model_dump()
        data.update(changes)
        return PhysicalParams(**data)


class TargetState(BaseModel):
    """
    Desired superposition sum_k d_k |J,-J+k>, k = 0..K.

    The whole vector is rotated by a global phase so that d_0 is real and
    non-negative; the removed phase is kept in global_phase.
    """
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(..., ge=1, description="Number of qubits N")
    amplitudes: ComplexArray = Field(..., description="d_0..d_K")
    global_phase: float = Field(0.0, description="Phase removed to make d_0 real (rad)")

    @model_validator(mode="before")
    @classmethod
    def _normalize_phase(cls, data: Any):
        if not isinstance(data, dict) or "amplitudes" not in data:
            return data
        data = dict(data)
        amplitudes = np.array(_as_complex_array(data["amplitudes"]))
        if amplitudes.size == 0:
            raise ValueError("target needs at least one amplitude")
        norm_sq = float(np.sum(np.abs(amplitudes) ** 2))
        tol = get_settings().normalization_tol
        if abs(norm_sq - 1.0) > tol:
            raise ValueError(
                f"target norm is {math.sqrt(norm_sq):.6f} (squared {norm_sq:.6f}); "
                f"amplitudes must be normalized within {tol:g}"
            )
        phase = float(np.angle(amplitudes[0])) if abs(amplitudes[0]) > 0 else 0.0
        if phase != 0.0:
            amplitudes = amplitudes * np.exp(-1j * phase)
            amplitudes[0] = abs(amplitudes[0])
            data["global_phase"] = float(data.get("global_phase", 0.0)) + phase
        data["amplitudes"] = amplitudes
        return data

    @property
    def K(self) -> int:
        return len(self.amplitudes) - 1

    def as_vector(self) -> DickeVector:
        """Zero-padded to the full N+1 ladder"""
        padded = np.zeros(self.n_qubits + 1, dtype=complex)
        padded[: len(self.amplitudes)] = self.amplitudes
        return DickeVector(n_qubits=self.n_qubits, amplitudes=padded)


class PulseSegment(BaseModel):
    """One constant-parameter drive interval; segment m loads level m-1"""
    model_config = ConfigDict(frozen=True)

    step_index: int = Field(..., ge=1, description="Segment number m")
    frequency_rad_s: float = Field(..., description="Drive frequency omega_m")
    phase_rad: float = Field(..., description="Drive phase theta_m, referenced to the segment start")
    amplitude_rad_s: float = Field(..., ge=0, description="Drive Rabi amplitude epsilon")
    duration_s: float = Field(..., ge=0, description="Segment length t_m")

    @property
    def lower_level(self) -> int:
        return self.step_index - 1


class PulseSchedule(BaseModel):
    """Ordered drive segments plus the parameters and target they were built for"""
    model_config = ConfigDict(frozen=True)

    segments: List[PulseSegment] = Field(default_factory=list)
    params: PhysicalParams
    target: TargetState
    global_phase: float = Field(0.0, description="Phase removed from the requested target (rad)")

    @model_validator(mode="after")
    def _check_segments(self):
        for expected, segment in enumerate(self.segments, start=1):
            if segment.step_index != expected:
                raise ValueError(f"segment step indices must run 1..K, found {segment.step_index} at position {expected}")
        if len(self.segments) > self.target.n_qubits:
            raise ValueError("schedule has more segments than ladder transitions")
        return self

    @property
    def n_qubits(self) -> int:
        return self.target.n_qubits

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration_s for s in self.segments))


class IntegratorConfig(BaseModel):
    """Time-integration settings"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    method: IntegrationMethod = Field(IntegrationMethod.ADAPTIVE)
    adaptive_solver: str = Field("DOP853", pattern="^(DOP853|RK45)$", description="Embedded pair for the adaptive method")
    rel_tol: float = Field(1e-11, gt=0)
    abs_tol: float = Field(1e-13, gt=0)
    max_step: Optional[float] = Field(None, gt=0, description="Step cap (s); RK4 step size")
    samples_per_segment: int = Field(50, ge=2)
    norm_tolerance: float = Field(1e-9, gt=0, description="Norm drift above this flags the run non-converged")


class SimulationResult(BaseModel):
    """Outcome of integrating a schedule on the N+1 symmetric levels"""
    model_config = ConfigDict(frozen=True)

    final_state: DickeVector
    times: RealArray = Field(..., description="Sample times (s)")
    trajectory: ComplexArray = Field(..., description="Amplitudes at each sample, shape (T, N+1)")
    norm_drift: float = Field(..., ge=0)
    fidelity_vs_target: float = Field(..., ge=0, le=1 + 1e-9)
    converged: bool
    frame: Frame
    rhs_evaluations: int = Field(0, ge=0, description="Hamiltonian applications spent by the integrator")

    @property
    def final_populations(self) -> np.ndarray:
        return self.final_state.populations


class LeakageEstimate(BaseModel):
    """Off-resonant Rabi-formula transfer probability"""
    value: float = Field(..., ge=0, le=0.5)
    averaged: float = Field(..., ge=0, le=0.5, description="sin^2 replaced by its mean 1/2")
    envelope: float = Field(..., ge=0, le=0.5, description="Upper bound over all durations")
    detuning: float


class LeakagePoint(BaseModel):
    """One point of a leakage spectrum"""
    detuning: float = Field(..., description="Transition frequency minus drive frequency (rad/s)")
    leakage: float = Field(..., ge=0)
    fidelity: float = Field(..., ge=0)


class ErrorBudget(BaseModel):
    """Closed-form error estimates for a schedule"""
    total_time_s: float = Field(..., ge=0)
    t_d_s: float = Field(..., gt=0, description="Decay time of the prepared superposition")
    kappa_hz: float = Field(..., ge=0, description="Effective cavity-induced decoherence rate")
    decoherence_infidelity: float = Field(..., ge=0, le=1)
    leakage_analytic: float = Field(..., ge=0, le=1, description="Rabi estimate at the physical detuning")
    leakage_analytic_alt: float = Field(..., ge=0, le=1, description="Rabi estimate with the detuning as printed")
    leakage_numeric: Optional[float] = Field(None, ge=0, le=1)
    total_error: float = Field(..., ge=0, le=1)
    interpretation_flags: Dict[str, str] = Field(default_factory=dict)


class DispersiveParams(BaseModel):
    """Cavity-mediated coupling and how deep in the dispersive regime we are"""
    lambda_c: float = Field(..., ge=0)
    validity_ratio: float = Field(..., ge=0, description="g*sqrt(n+1)/delta_c")

    @property
    def is_valid(self) -> bool:
        return self.validity_ratio <= get_settings().validity_warning


class AtomCavityState(BaseModel):
    """Pure state over (symmetric level k) x (photon number n)"""
    model_config = ConfigDict(frozen=True)

    n_qubits: int = Field(..., ge=1)
    n_max: int = Field(..., ge=1)
    amplitudes: ComplexArray = Field(..., description="Shape (N+1, n_max+1)")

    @model_validator(mode="before")
    @classmethod
    def _reshape(cls, data: Any):
        if isinstance(data, dict) and "amplitudes" in data:
            data = dict(data)
            arr = np.array(_as_complex_array(data["amplitudes"]))
            data["amplitudes"] = arr.reshape(data["n_qubits"] + 1, data["n_max"] + 1)
        return data

    @classmethod
    def ground_vacuum(cls, n_qubits: int, n_max: int) -> "AtomCavityState":
        amplitudes = np.zeros((n_qubits + 1, n_max + 1), dtype=complex)
        amplitudes[0, 0] = 1.0
        return cls(n_qubits=n_qubits, n_max=n_max, amplitudes=amplitudes)

    @property
    def photon_populations(self) -> np.ndarray:
        return np.sum(np.abs(self.amplitudes) ** 2, axis=0)

    @property
    def mean_photons(self) -> float:
        return float(np.dot(np.arange(self.n_max + 1), self.photon_populations))

    @property
    def tail_population(self) -> float:
        return float(self.photon_populations[-1])

    def reduced_atomic(self) -> np.ndarray:
        """Atomic density matrix with the cavity traced out"""
        return self.amplitudes @ self.amplitudes.conj().T


class Check(BaseModel):
    """Single numerical check outcome"""
    rule: str = Field(..., description="Check that produced this entry")
    quantity: Optional[str] = Field(None, description="Measured quantity")
    message: str = Field(..., description="Human-readable description")
    severity: str = Field(default="error", description="error or warning")


class CheckReport(BaseModel):
    """Collected checks for one run; invalid as soon as any error is added"""
    name: str
    is_valid: bool = True
    metrics: Dict[str, float] = Field(default_factory=dict)
    errors: List[Check] = Field(default_factory=list)
    warnings: List[Check] = Field(default_factory=list)

    def add_error(self, rule: str, message: str, quantity: Optional[str] = None):
        self.errors.append(Check(rule=rule, quantity=quantity, message=message, severity="error"))
        self.is_valid = False

    def add_warning(self, rule: str, message: str, quantity: Optional[str] = None):
        self.warnings.append(Check(rule=rule, quantity=quantity, message=message, severity="warning"))

    def require(self, rule: str, value: float, limit: float, quantity: str):
        """Record value as a metric and add an error when it exceeds limit"""
        self.metrics[quantity] = float(value)
        if not value <= limit:
            self.add_error(rule, f"{quantity} = {value:.3e} exceeds {limit:.1e}", quantity=quantity)


class SymmetryReport(BaseModel):
    """Full-space run projected onto the symmetric subspace"""
    n_qubits: int
    max_asymmetric_population: float = Field(..., ge=0)
    final_symmetric_fidelity: float = Field(..., ge=0, description="Projected final state vs target")


class ModelComparison(BaseModel):
    """Full atom-cavity dynamics against the dispersive effective model"""
    fidelity_full_vs_effective: float = Field(..., ge=0)
    disagreement: float = Field(..., description="1 - fidelity_full_vs_effective")
    max_photon_population: float = Field(..., ge=0)
    validity_ratio: float = Field(..., ge=0)
    n_max_used: int
    tail_population: float = Field(..., ge=0)
    truncation_ok: bool
