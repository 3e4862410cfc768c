"""
Closed-form error estimates for a compiled schedule: decoherence from the
atomic and cavity lifetimes, and off-resonant leakage from the Rabi formula.

Leakage is evaluated at the physical detuning of the next rung (2 lambda) and,
alongside, with lambda in the denominator as the formula is usually printed.
The integrator's number, when supplied, takes precedence in the total.
"""

import logging
import math
from typing import Dict, Optional

from .exceptions import ConfigError
from .ladder import step_rabi_rate
from .schemas import ErrorBudget, LadderIndex, LeakageEstimate, PulseSchedule

logger = logging.getLogger(__name__)

PHYSICAL_DETUNING = 2.0
PRINTED_DETUNING = 1.0


def effective_cavity_rate(g: float, delta_c: float, T_c: float) -> float:
    """kappa = (g/delta_c)^2 / T_c, in Hz"""
    if delta_c <= 0:
        raise ConfigError("the cavity-induced rate needs a positive dispersive detuning", field="physical.delta_c")
    return (g / delta_c) ** 2 / T_c


def decoherence_infidelity(
    total_time: float,
    n_qubits: int,
    T_r: float,
    T_c: float,
    g: float,
    delta_c: float,
    t_d: Optional[float] = None,
) -> float:
    """t/T_d + t*kappa with T_d = T_r/N unless given, capped at 1"""
    t_d = T_r / n_qubits if t_d is None else t_d
    return min(1.0, total_time / t_d + total_time * effective_cavity_rate(g, delta_c, T_c))


def leakage_estimate(step_rabi: float, detuning: float, duration: float) -> LeakageEstimate:
    """
    P = 1/2 eta^2/(eta^2 + D^2) sin^2(sqrt(eta^2 + D^2) t).

    `averaged` replaces sin^2 by 1/2; `envelope` is the bound over all t.
    """
    generalized_sq = step_rabi ** 2 + detuning ** 2
    if generalized_sq == 0:
        return LeakageEstimate(value=0.0, averaged=0.0, envelope=0.0, detuning=detuning)
    envelope = 0.5 * step_rabi ** 2 / generalized_sq
    value = envelope * math.sin(math.sqrt(generalized_sq) * duration) ** 2
    return LeakageEstimate(value=value, averaged=envelope / 2, envelope=envelope, detuning=detuning)


def schedule_leakage(schedule: PulseSchedule, detuning_factor: float = PHYSICAL_DETUNING) -> float:
    """
    Sum of single-step estimates: during segment m the drive also couples
    level m to m+1, detuned by detuning_factor * lambda.
    """
    n_qubits = schedule.n_qubits
    detuning = detuning_factor * schedule.params.lambda_
    total = 0.0
    for segment in schedule.segments:
        upper = segment.lower_level + 1
        if segment.duration_s == 0 or upper >= n_qubits:
            continue
        eta = step_rabi_rate(LadderIndex(n_qubits=n_qubits, k=upper), segment.amplitude_rad_s)
        total += leakage_estimate(eta, detuning, segment.duration_s).value
    return min(1.0, total)


def total_error(decoherence: float, leakage_analytic: float, leakage_numeric: Optional[float] = None) -> float:
    return min(1.0, decoherence + (leakage_analytic if leakage_numeric is None else leakage_numeric))


def build_budget(
    schedule: PulseSchedule,
    leakage_numeric: Optional[float] = None,
    t_d: Optional[float] = None,
    reference_leakage: Optional[float] = None,
) -> ErrorBudget:
    """
    Assemble the budget report; flags say which estimate each number rests on.

    Args:
        schedule: Compiled schedule; params supply lifetimes, g and delta_c
        leakage_numeric: Integrated leakage, preferred over the analytic one
        t_d: Decay time override (s); T_r/N when omitted
        reference_leakage: Externally quoted leakage to total against

    Returns:
        ErrorBudget with every infidelity capped at 1
    """
    params = schedule.params
    total_time = schedule.total_duration
    resolved_t_d = params.T_r / schedule.n_qubits if t_d is None else t_d
    kappa = effective_cavity_rate(params.g, params.delta_c, params.T_c)
    decoherence = decoherence_infidelity(
        total_time, schedule.n_qubits, params.T_r, params.T_c, params.g, params.delta_c, t_d=resolved_t_d
    )
    analytic = schedule_leakage(schedule, PHYSICAL_DETUNING)
    analytic_alt = schedule_leakage(schedule, PRINTED_DETUNING)

    flags: Dict[str, str] = {
        "t_d": "override" if t_d is not None else "estimate T_r/N",
        "leakage_analytic": "detuning 2*lambda (next rung)",
        "leakage_analytic_alt": "detuning lambda (formula as printed)",
        "leakage_source": "numeric" if leakage_numeric is not None else "analytic",
    }
    if reference_leakage is not None:
        flags["reference_total"] = repr(min(1.0, decoherence + reference_leakage))
    if leakage_numeric is not None and analytic > 0:
        flags["numeric_to_analytic"] = repr(leakage_numeric / analytic)
    if decoherence >= 1.0:
        flags["decoherence"] = "saturated: t/T_d + t*kappa reaches 1, the linear estimate no longer applies"
        logger.warning("decoherence estimate saturates at 1 for a %.4g s schedule with T_d = %.4g s", total_time, resolved_t_d)

    budget = ErrorBudget(
        total_time_s=total_time,
        t_d_s=resolved_t_d,
        kappa_hz=kappa,
        decoherence_infidelity=decoherence,
        leakage_analytic=analytic,
        leakage_analytic_alt=analytic_alt,
        leakage_numeric=leakage_numeric,
        total_error=total_error(decoherence, analytic, leakage_numeric),
        interpretation_flags=flags,
    )
    logger.info(
        "budget: decoherence %.4g, leakage %.3g (%s), total %.4g",
        decoherence, leakage_numeric if leakage_numeric is not None else analytic,
        flags["leakage_source"], budget.total_error,
    )
    return budget
