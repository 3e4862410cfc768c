"""
Unit tests for the atoms-plus-cavity model and its dispersive reduction
"""

import logging
import math

import numpy as np
import pytest

from dicke_synth.cavity import (
    annihilation,
    at_detuning,
    build_full_model,
    compare_models,
    dispersive_params,
    effective_model,
    excitation_number,
    run_full_model,
    vacuum_persistence_bound,
)
from dicke_synth.compiler import PulseCompiler
from dicke_synth.dynamics import build_dicke_model, integrate
from dicke_synth.exceptions import ConfigError
from dicke_synth.ladder import collective_matrices
from dicke_synth.schemas import (
    DickeVector,
    Frame,
    IntegratorConfig,
    PhysicalParams,
    PulseSchedule,
    PulseSegment,
    TargetState,
)
from dicke_synth.settings import get_settings

G = 2 * math.pi * 25e3
CAVITY = PhysicalParams(lambda_=G / 10, epsilon=G / 100, g=G, delta_c=10 * G)


def half_and_half():
    return TargetState(n_qubits=3, amplitudes=[1 / math.sqrt(2), 1 / math.sqrt(2)])


def idle_schedule(params, n_qubits, duration, frequency=20.0, amplitude=0.0):
    segment = PulseSegment(
        step_index=1, frequency_rad_s=frequency, phase_rad=0.0, amplitude_rad_s=amplitude, duration_s=duration
    )
    return PulseSchedule(segments=[segment], params=params, target=TargetState(n_qubits=n_qubits, amplitudes=[1.0]))


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_annihilation_operator():
    """Test a|n> = sqrt(n)|n-1> and [a, a^dagger] = 1 below the cutoff"""
    a = annihilation(4)
    assert a[1, 2] == pytest.approx(math.sqrt(2))
    commutator = a @ a.conj().T - a.conj().T @ a
    assert np.allclose(np.diag(commutator)[:-1], 1.0)


def test_full_model_is_hermitian():
    """Test Hermiticity of the atom-cavity Hamiltonian in both frames"""
    params = PhysicalParams(omega0=20.0, lambda_=0.1, epsilon=0.01, g=1.0, delta_c=10.0)
    model = build_full_model(params, 3, n_max=4)
    segment = idle_schedule(params, 3, 2.0, frequency=23.0, amplitude=0.01).segments[0]
    for frame in (Frame.ROTATING, Frame.LAB):
        for t in (0.0, 0.4, 1.7):
            h = model.operator_at(t, segment, frame)
            assert np.max(np.abs(h - h.conj().T)) <= 1e-12


def test_excitation_number_grid():
    """Test S_z + n over levels and photon numbers"""
    grid = excitation_number(2, 3)
    assert grid.shape == (3, 4)
    assert grid[0, 0] == -1.0
    assert grid[2, 3] == 4.0


def test_uncoupled_cavity_factorizes():
    """Test g = 0: the vacuum column follows the lab-frame ladder dynamics"""
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.1, g=0.0, delta_c=1.0)
    schedule = idle_schedule(params, 2, 5.0, frequency=20.0, amplitude=0.1)
    run = run_full_model(schedule, frame=Frame.LAB)
    ladder = integrate(schedule, frame=Frame.LAB)
    assert np.allclose(run.times, ladder.times)
    assert np.allclose(run.states[:, :, 0], ladder.trajectory, atol=1e-8)
    assert np.max(np.abs(run.states[:, :, 1:])) == 0.0


def test_vacuum_rabi_oscillation():
    """Test one excited atom on resonance: P_e = cos^2(g t)"""
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.0, g=1.0, delta_c=0.0)
    schedule = idle_schedule(params, 1, 3.0)
    run = run_full_model(schedule, initial=DickeVector.basis(1, 1))
    assert np.allclose(run.atomic_populations[:, 1], np.cos(run.times) ** 2, atol=1e-8)
    assert np.allclose(run.photon_populations[:, 1], np.sin(run.times) ** 2, atol=1e-8)


def test_excitation_number_conserved():
    """Test that <S_z + n> is constant without a drive"""
    params = PhysicalParams(omega0=20.0, lambda_=0.1, epsilon=0.0, g=1.0, delta_c=10.0)
    run = run_full_model(idle_schedule(params, 3, 20.0), initial=DickeVector.basis(3, 2))
    weights = excitation_number(3, run.n_max)
    expectation = np.sum(np.abs(run.states) ** 2 * weights[None, :, :], axis=(1, 2))
    assert np.max(np.abs(expectation - expectation[0])) <= 1e-9


def test_vacuum_persistence():
    """Test the peak photon population of each bare level against 4 k(N-k+1) (g/delta_c)^2"""
    n_qubits, g, delta_c = 3, 1.0, 10.0
    params = PhysicalParams(omega0=20.0, lambda_=0.1, epsilon=0.0, g=g, delta_c=delta_c)
    config = IntegratorConfig(samples_per_segment=400)
    peaks = []
    for k in range(n_qubits + 1):
        run = run_full_model(idle_schedule(params, n_qubits, 5.0), config=config, initial=DickeVector.basis(n_qubits, k))
        peaks.append(run.max_photon_population)
    assert peaks[0] <= 1e-12
    for k in range(1, n_qubits + 1):
        assert peaks[k] == pytest.approx(vacuum_persistence_bound(n_qubits, k, g, delta_c), rel=0.2)
    # the middle level couples more strongly than 4N(g/delta_c)^2 allows
    assert peaks[2] > 4 * n_qubits * (g / delta_c) ** 2


def test_effective_model_is_ladder_coupling():
    """Test lambda_c S+S- with lambda_c = g^2/delta_c"""
    assert CAVITY.lambda_c == pytest.approx(G / 10, rel=1e-12)
    effective = effective_model(CAVITY, 3)
    ladder = build_dicke_model(CAVITY.with_updates(lambda_=CAVITY.lambda_c), 3).static_rotating
    assert np.allclose(effective, ladder, rtol=1e-12, atol=1e-9)


def test_effective_model_with_photons():
    """Test the extra 2 lambda_c n S_z term"""
    ops = collective_matrices(2)
    difference = effective_model(CAVITY, 2, photon_number=1) - effective_model(CAVITY, 2)
    assert np.allclose(difference, 2 * CAVITY.lambda_c * ops.sz)


def test_effective_model_vanishes_without_coupling():
    """Test g = 0"""
    assert np.allclose(effective_model(CAVITY.with_updates(g=0.0), 3), 0.0)


def test_dispersive_validity(caplog):
    """Test the g sqrt(n+1)/delta_c ratio and the warning when it is large"""
    assert dispersive_params(CAVITY).validity_ratio == pytest.approx(0.1)
    assert dispersive_params(CAVITY).is_valid
    with caplog.at_level(logging.WARNING, logger="dicke_synth.cavity"):
        marginal = dispersive_params(CAVITY.with_updates(delta_c=2 * G))
    assert not marginal.is_valid
    assert any("dispersive" in record.getMessage() for record in caplog.records)


def test_at_detuning_keeps_selectivity():
    """Test that moving delta_c rescales lambda and epsilon together"""
    moved = at_detuning(CAVITY, 20 * G)
    assert moved.lambda_ == pytest.approx(G / 20)
    assert moved.selectivity == pytest.approx(CAVITY.selectivity)
    assert moved.g == CAVITY.g


def test_comparison_without_coupling():
    """Test g = 0: both models are free atoms"""
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.1, g=0.0, delta_c=1.0)
    comparison = compare_models(idle_schedule(params, 2, 5.0, frequency=20.0, amplitude=0.1))
    assert comparison.fidelity_full_vs_effective == pytest.approx(1.0, abs=1e-9)
    assert comparison.max_photon_population == 0.0


def test_comparison_needs_detuning():
    """Test that delta_c = 0 has no effective model"""
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.0, g=1.0, delta_c=0.0)
    with pytest.raises(ConfigError):
        compare_models(idle_schedule(params, 1, 1.0))


def test_single_segment_comparison():
    """Test the cavity example: few photons, percent-level disagreement"""
    schedule = PulseCompiler().compile(half_and_half(), CAVITY)
    comparison = compare_models(schedule)
    assert comparison.max_photon_population <= 4 * (CAVITY.g / CAVITY.delta_c) ** 2
    assert 1e-3 < comparison.disagreement < 0.1
    assert comparison.truncation_ok
    assert comparison.n_max_used == 4
    assert comparison.tail_population <= 1e-6


def test_fock_escalation(caplog):
    """Test that a populated top Fock level grows the truncation"""
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.0, g=1.0, delta_c=0.0, n_max=2)
    with caplog.at_level(logging.WARNING, logger="dicke_synth.cavity"):
        run = run_full_model(idle_schedule(params, 3, 2.0), initial=DickeVector.basis(3, 3))
    assert run.n_max == 4
    assert run.truncation_ok
    assert any("escalating" in record.getMessage() for record in caplog.records)


def test_fock_ceiling(monkeypatch, fresh_settings):
    """Test that escalation stops at the configured ceiling"""
    monkeypatch.setenv("DICKE_SYNTH_N_MAX_CEILING", "3")
    params = PhysicalParams(omega0=20.0, lambda_=0.0, epsilon=0.0, g=1.0, delta_c=0.0, n_max=2)
    run = run_full_model(idle_schedule(params, 3, 2.0), initial=DickeVector.basis(3, 3))
    assert run.n_max == 2
    assert not run.truncation_ok


@pytest.mark.slow
def test_disagreement_falls_with_detuning():
    """Test the dispersive sweep at fixed eps/lambda_c: monotone, and 1/delta_c^2 once the quartic shift is gone"""
    config = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
    compiler = PulseCompiler()
    deltas = [5 * G, 10 * G, 20 * G, 40 * G, 80 * G]
    disagreements = []
    for delta_c in deltas:
        params = at_detuning(CAVITY, delta_c)
        comparison = compare_models(compiler.compile(half_and_half(), params), params, config)
        assert comparison.max_photon_population <= 4 * (G / delta_c) ** 2
        disagreements.append(comparison.disagreement)
    assert all(a > b for a, b in zip(disagreements, disagreements[1:]))
    assert disagreements[1] <= 0.1
    overall = np.polyfit(np.log(deltas[:4]), np.log(disagreements[:4]), 1)[0]
    assert overall <= -1.6
    tail = math.log(disagreements[4] / disagreements[3]) / math.log(2)
    assert tail == pytest.approx(-2.0, abs=0.4)
