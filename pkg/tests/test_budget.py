"""
Unit tests for the closed-form error budget
"""

import math

import pytest

from dicke_synth.budget import (
    build_budget,
    decoherence_infidelity,
    effective_cavity_rate,
    leakage_estimate,
    schedule_leakage,
    total_error,
)
from dicke_synth.compiler import PulseCompiler
from dicke_synth.dynamics import integrate, off_target_population
from dicke_synth.exceptions import ConfigError
from dicke_synth.schemas import ErrorBudget, PhysicalParams, PulseSchedule, TargetState

G = 2 * math.pi * 25e3
CAVITY = PhysicalParams(lambda_=G / 10, epsilon=G / 100, g=G, delta_c=10 * G)


def half_and_half():
    return TargetState(n_qubits=3, amplitudes=[1 / math.sqrt(2), 1 / math.sqrt(2)])


def cavity_decoherence(t):
    return decoherence_infidelity(t, 3, CAVITY.T_r, CAVITY.T_c, G, 10 * G)


def test_cavity_rate():
    """Test kappa = (g/delta_c)^2 / T_c = 10 Hz at delta_c = 10 g"""
    assert effective_cavity_rate(G, 10 * G, 1e-3) == pytest.approx(10.0, rel=1e-12)


def test_cavity_rate_needs_detuning():
    """Test that delta_c = 0 is a configuration error"""
    with pytest.raises(ConfigError):
        effective_cavity_rate(G, 0.0, 1e-3)


def test_decoherence_at_quoted_time():
    """Test t/T_d + t kappa at t = 0.29 ms, T_d = 10 ms"""
    assert cavity_decoherence(0.29e-3) == pytest.approx(0.0319, rel=1e-9)


def test_decoherence_at_compiled_time():
    """Test the exact single-segment duration against the quoted 0.0319"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    assert cavity_decoherence(schedule.total_duration) == pytest.approx(0.0319, rel=5e-3)


def test_decoherence_is_linear_in_time():
    """Test zero at t = 0 and doubling with t"""
    assert cavity_decoherence(0.0) == 0.0
    assert cavity_decoherence(2e-4) == pytest.approx(2 * cavity_decoherence(1e-4), rel=1e-12)


def test_decoherence_monotonicity():
    """Test growth with N and g, decay with T_r, T_c and delta_c"""
    base = decoherence_infidelity(1e-4, 3, 3e-2, 1e-3, G, 10 * G)
    assert decoherence_infidelity(1e-4, 4, 3e-2, 1e-3, G, 10 * G) > base
    assert decoherence_infidelity(1e-4, 3, 3e-2, 1e-3, 1.1 * G, 10 * G) > base
    assert decoherence_infidelity(1e-4, 3, 6e-2, 1e-3, G, 10 * G) < base
    assert decoherence_infidelity(1e-4, 3, 3e-2, 2e-3, G, 10 * G) < base
    assert decoherence_infidelity(1e-4, 3, 3e-2, 1e-3, G, 20 * G) < base


def test_decoherence_override():
    """Test that an explicit T_d replaces T_r/N"""
    assert decoherence_infidelity(1e-3, 3, 3e-2, 1e-3, 0.0, 10 * G, t_d=1e-2) == pytest.approx(0.1)


def test_leakage_on_resonance():
    """Test that D = 0 reduces to (1/2) sin^2(eta t)"""
    estimate = leakage_estimate(2.0, 0.0, 0.3)
    assert estimate.value == pytest.approx(0.5 * math.sin(0.6) ** 2)
    assert estimate.envelope == pytest.approx(0.5)


def test_leakage_bounded_by_envelope():
    """Test P <= envelope for any duration"""
    for t in (0.0, 0.1, 1.0, 3.7, 10.0):
        estimate = leakage_estimate(0.3, 2.0, t)
        assert 0 <= estimate.value <= estimate.envelope
        assert estimate.averaged == pytest.approx(estimate.envelope / 2)


def test_leakage_without_drive():
    """Test that eta = D = 0 leaks nothing"""
    assert leakage_estimate(0.0, 0.0, 1.0).value == 0.0


def test_leakage_physical_detuning():
    """Test the next-rung estimate: eta = g/50, D = g/5 over the single segment"""
    t = math.pi / (4 * math.sqrt(3) * CAVITY.epsilon)
    estimate = leakage_estimate(G / 50, G / 5, t)
    assert 3e-4 < estimate.value < 6e-4
    assert estimate.envelope == pytest.approx(0.5 / 101, rel=1e-9)


def test_leakage_printed_detuning():
    """Test the estimate with lambda in the denominator"""
    t = math.pi / (4 * math.sqrt(3) * CAVITY.epsilon)
    estimate = leakage_estimate(G / 50, G / 10, t)
    assert 1.5e-2 < estimate.value < 2e-2


def test_schedule_leakage_single_segment():
    """Test that the schedule sum uses eta = sqrt((N-1) 2) eps and D = 2 lambda"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    t = schedule.total_duration
    assert schedule_leakage(schedule) == pytest.approx(leakage_estimate(G / 50, G / 5, t).value, rel=1e-9)
    assert schedule_leakage(schedule, 1.0) == pytest.approx(leakage_estimate(G / 50, G / 10, t).value, rel=1e-9)


def test_schedule_leakage_skips_top():
    """Test that the last rung has nothing above it to leak to"""
    target = TargetState(n_qubits=1, amplitudes=[0.6, 0.8])
    params = CAVITY.with_updates(lambda_=1.0, epsilon=0.01)
    assert schedule_leakage(PulseCompiler().compile(target, params)) == 0.0


def test_total_error():
    """Test decoherence plus leakage, numeric preferred"""
    assert total_error(0.0319, 0.0038) == pytest.approx(0.0357)
    assert total_error(0.0, 0.0) == 0.0
    assert total_error(0.0319, 0.0038, 0.005) == pytest.approx(0.0369)


def test_budget_for_single_segment():
    """Test the assembled budget for the cavity example"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    budget = build_budget(schedule, reference_leakage=0.0038)
    assert budget.kappa_hz == pytest.approx(10.0, rel=1e-12)
    assert budget.t_d_s == pytest.approx(1e-2)
    assert budget.decoherence_infidelity == pytest.approx(0.0319, rel=5e-3)
    assert budget.leakage_numeric is None
    assert budget.total_error == pytest.approx(budget.decoherence_infidelity + budget.leakage_analytic)
    assert budget.interpretation_flags["leakage_source"] == "analytic"
    assert budget.interpretation_flags["t_d"] == "estimate T_r/N"
    assert float(budget.interpretation_flags["reference_total"]) == pytest.approx(0.0357, rel=5e-3)


def test_budget_prefers_numeric_leakage():
    """Test that the integrator's leakage replaces the analytic one in the total"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    budget = build_budget(schedule, leakage_numeric=0.005, t_d=2e-2)
    assert budget.total_error == pytest.approx(budget.decoherence_infidelity + 0.005)
    assert budget.interpretation_flags["leakage_source"] == "numeric"
    assert budget.interpretation_flags["t_d"] == "override"
    assert budget.t_d_s == 2e-2


def test_decoherence_saturates_at_one():
    """Test that a schedule far longer than T_d caps the estimate at 1"""
    assert decoherence_infidelity(1.0, 3, 3e-2, 1e-3, G, 10 * G) == 1.0
    assert total_error(1.0, 0.2) == 1.0


def test_budget_flags_saturated_decoherence(caplog):
    """Test the saturation flag when T_d is much shorter than the schedule"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    assert "decoherence" not in build_budget(schedule).interpretation_flags

    with caplog.at_level("WARNING", logger="dicke_synth.budget"):
        budget = build_budget(schedule, t_d=1e-6, reference_leakage=0.5)
    assert budget.decoherence_infidelity == 1.0
    assert budget.total_error == 1.0
    assert budget.interpretation_flags["decoherence"].startswith("saturated")
    assert float(budget.interpretation_flags["reference_total"]) == 1.0
    assert "saturates" in caplog.text


def test_empty_schedule_budget():
    """Test that no segments means no error"""
    schedule = PulseSchedule(segments=[], params=CAVITY, target=TargetState(n_qubits=3, amplitudes=[1.0]))
    budget = build_budget(schedule)
    assert budget.total_error == 0.0
    assert budget.decoherence_infidelity == 0.0
    assert budget.leakage_analytic == 0.0


def test_budget_keys():
    """Test the serialized field names"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    keys = set(build_budget(schedule).model_dump(mode="json"))
    assert keys == set(ErrorBudget.model_fields)
    assert {"total_time_s", "t_d_s", "kappa_hz", "decoherence_infidelity", "leakage_analytic",
            "leakage_analytic_alt", "leakage_numeric", "total_error"} <= keys


def test_numeric_leakage_within_envelope():
    """Test that the integrated leakage stays below four times the Rabi envelope"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    numeric = off_target_population(integrate(schedule).final_state, 1)
    envelope = leakage_estimate(G / 50, G / 5, schedule.total_duration).envelope
    assert numeric <= 4 * envelope
