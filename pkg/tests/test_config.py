"""
Unit tests for TOML run configuration
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from dicke_synth.config import load_config, parse_config, parse_frequency
from dicke_synth.exceptions import ConfigError
from dicke_synth.schemas import Frame

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

CAVITY_TEXT = """
[physical]
omega0 = "2pi*51.1e9"
g = "2pi*25e3"
delta_c = "2pi*250e3"
epsilon = "2pi*250"

[target]
n_qubits = 3
amplitudes = [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]
"""


def test_frequency_forms():
    """Test Hz numbers, 2pi*X and X rad/s"""
    assert parse_frequency(1.0) == pytest.approx(2 * math.pi)
    assert parse_frequency("2pi*25e3") == pytest.approx(2 * math.pi * 25e3)
    assert parse_frequency("2*pi*10") == pytest.approx(20 * math.pi)
    assert parse_frequency("0.5 rad/s") == 0.5
    assert parse_frequency("100 Hz") == pytest.approx(200 * math.pi)


def test_frequency_rejects_garbage():
    """Test that unreadable values are refused"""
    for value in ("fast", True, [1.0]):
        with pytest.raises(ValueError):
            parse_frequency(value)


def test_lambda_defaults_to_cavity_coupling():
    """Test that an omitted lambda becomes g^2/delta_c"""
    config = parse_config(CAVITY_TEXT)
    params = config.params()
    g = 2 * math.pi * 25e3
    assert params.lambda_ == pytest.approx(g / 10, rel=1e-12)
    assert params.epsilon == pytest.approx(g / 100, rel=1e-12)
    assert params.selectivity == pytest.approx(0.1, rel=1e-12)
    assert config.run.frame == Frame.ROTATING


def test_target_section():
    """Test cartesian pairs become the equal split"""
    target = parse_config(CAVITY_TEXT).target.to_target()
    assert np.allclose(target.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_unknown_key_reports_field_and_line():
    """Test that a misspelled key is an error naming where it is"""
    text = CAVITY_TEXT.replace('g = "2pi*25e3"', 'lamda = "2pi*2.5e3"')
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.field == "physical.lamda"
    assert excinfo.value.line == 4
    assert excinfo.value.exit_code == 2


def test_unnormalized_target():
    """Test that a norm of 0.8 is reported"""
    text = CAVITY_TEXT.replace(
        "amplitudes = [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]", "amplitudes = [[0.8, 0.0]]"
    )
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert "norm" in str(excinfo.value)
    assert excinfo.value.field == "target"


def test_toml_syntax_error():
    """Test that broken TOML is a configuration error"""
    with pytest.raises(ConfigError):
        parse_config("[physical\nepsilon = 1")


def test_polar_amplitudes():
    """Test magnitude/phase pairs"""
    text = """
[physical]
omega0 = "20 rad/s"
lambda = "1 rad/s"
epsilon = "0.01 rad/s"

[target]
n_qubits = 2
format = "polar"
amplitudes = [[0.6, 0.0], [0.8, 1.5]]
"""
    target = parse_config(text).target.to_target()
    assert target.amplitudes[1] == pytest.approx(0.8 * np.exp(1.5j))


def test_preset_target():
    """Test the GHZ preset"""
    text = CAVITY_TEXT.split("[target]")[0] + "[target]\nn_qubits = 4\npreset = \"ghz\"\n"
    target = parse_config(text).target.to_target()
    assert target.K == 4
    assert abs(target.amplitudes[0]) ** 2 == pytest.approx(0.5)
    assert abs(target.amplitudes[4]) ** 2 == pytest.approx(0.5)


def test_preset_and_amplitudes_conflict():
    """Test that a target is given exactly one way"""
    with pytest.raises(ConfigError) as excinfo:
        parse_config(CAVITY_TEXT + 'preset = "w"\n')
    assert "exactly one" in str(excinfo.value)


def test_initial_level_within_ladder():
    """Test that the starting level must exist"""
    with pytest.raises(ConfigError):
        parse_config(CAVITY_TEXT + "\n[run]\ninitial_level = 4\n")


def test_sweep_needs_values():
    """Test that a swept parameter needs values"""
    with pytest.raises(ConfigError):
        parse_config(CAVITY_TEXT + '\n[sweep]\nparameter = "epsilon"\n')


@pytest.mark.parametrize(
    "parameter, value",
    [("lambda", '"-1 rad/s"'), ("epsilon", '"0 rad/s"'), ("epsilon", "-5"), ("delta_c", "0")],
)
def test_sweep_values_out_of_range(parameter, value):
    """Test that sweep values below the parameter's floor are config errors"""
    with pytest.raises(ConfigError) as excinfo:
        parse_config(CAVITY_TEXT + f'\n[sweep]\nparameter = "{parameter}"\nvalues = [{value}]\n')
    assert excinfo.value.field == "sweep"
    assert f"sweep over {parameter}" in str(excinfo.value)


def test_sweep_allows_uncoupled_lambda():
    """Test that lambda = 0 is an accepted sweep value"""
    config = parse_config(CAVITY_TEXT + '\n[sweep]\nparameter = "lambda"\nvalues = ["0 rad/s", "1 rad/s"]\n')
    assert config.sweep.values == [0.0, 1.0]


def test_cavity_sweep_detunings_positive():
    """Test that a zero delta_c in the cavity sweep is rejected with its line"""
    text = CAVITY_TEXT + '\n[cavity]\ndelta_c_sweep = ["2pi*250e3", 0]\n'
    with pytest.raises(ConfigError) as excinfo:
        parse_config(text)
    assert excinfo.value.field == "cavity.delta_c_sweep.1"
    assert excinfo.value.line == text.splitlines().index('delta_c_sweep = ["2pi*250e3", 0]') + 1


def test_resolved_config_is_json():
    """Test the normalized dump used for results"""
    resolved = parse_config(CAVITY_TEXT).resolved()
    json.dumps(resolved)
    assert resolved["physical"]["lambda"] == pytest.approx(2 * math.pi * 2.5e3, rel=1e-12)
    assert "validate" in resolved


def test_missing_file(tmp_path):
    """Test that an absent config is a configuration error"""
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


@pytest.mark.parametrize("name", ["cavity_example.toml", "validate_n3.toml", "selectivity_sweep.toml"])
def test_shipped_configs_load(name):
    """Test the example configs"""
    config = load_config(CONFIGS / name)
    assert config.params().selectivity < 1
