"""
Run configuration: TOML sections validated by pydantic, every frequency
normalized to rad/s on parse.

Frequencies accept a plain number (Hz), "2pi*X" (X in Hz) or "X rad/s".
Unknown keys are errors; failures carry the dotted field and the line it is
on.
"""

import logging
import math
from pathlib import Path
from typing import Annotated, Any, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from .compiler import ghz_target, w_target
from .exceptions import ConfigError
from .schemas import Frame, IntegratorConfig, PhysicalParams, TargetState

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


def parse_frequency(value: Any) -> float:
    """Hz number, '2pi*X' or 'X rad/s' -> rad/s"""
    if isinstance(value, bool):
        raise ValueError("expected a frequency, got a boolean")
    if isinstance(value, (int, float)):
        return TWO_PI * float(value)
    if not isinstance(value, str):
        raise ValueError(f"expected a frequency, got {value!r}")
    text = value.strip().lower().replace(" ", "")
    try:
        if text.endswith("rad/s"):
            return float(text[: -len("rad/s")])
        for prefix in ("2pi*", "2*pi*", "2π*"):
            if text.startswith(prefix):
                return TWO_PI * float(text[len(prefix):])
        if text.endswith("hz"):
            return TWO_PI * float(text[:-2])
        return TWO_PI * float(text)
    except ValueError:
        raise ValueError(f"cannot read {value!r} as a frequency (Hz, '2pi*X' or 'X rad/s')") from None


Frequency = Annotated[float, BeforeValidator(parse_frequency)]
PositiveFrequency = Annotated[Frequency, Field(gt=0)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class PhysicalSection(_Section):
    omega0: Frequency = Field(TWO_PI * 51.1e9, gt=0)
    lambda_: Optional[Frequency] = Field(None, alias="lambda", ge=0, description="Defaults to g^2/delta_c")
    epsilon: Frequency = Field(..., ge=0)
    g: Frequency = Field(TWO_PI * 25e3, ge=0)
    delta_c: Frequency = Field(TWO_PI * 250e3, ge=0)
    T_r: float = Field(3e-2, gt=0)
    T_c: float = Field(1e-3, gt=0)
    n_max: int = Field(4, ge=2)

    @model_validator(mode="after")
    def _check_lambda(self):
        if self.lambda_ is None and self.delta_c <= 0:
            raise ValueError("lambda is omitted, so delta_c must be positive to derive g^2/delta_c")
        return self

    def to_params(self) -> PhysicalParams:
        data = self.model_dump(exclude={"lambda_"})
        lambda_ = self.lambda_ if self.lambda_ is not None else self.g ** 2 / self.delta_c
        return PhysicalParams(lambda_=lambda_, **data)


class TargetSection(_Section):
    n_qubits: int = Field(..., ge=1)
    amplitudes: Optional[List[Tuple[float, float]]] = Field(None, description="Pairs per level k = 0..K")
    format: Literal["cartesian", "polar"] = "cartesian"
    preset: Optional[Literal["ghz", "w"]] = None

    @model_validator(mode="after")
    def _check_target(self):
        if (self.amplitudes is None) == (self.preset is None):
            raise ValueError("give exactly one of 'amplitudes' or 'preset'")
        self.to_target()
        return self

    def complex_amplitudes(self) -> np.ndarray:
        pairs = np.array(self.amplitudes, dtype=float).reshape(-1, 2)
        if self.format == "polar":
            return pairs[:, 0] * np.exp(1j * pairs[:, 1])
        return pairs[:, 0] + 1j * pairs[:, 1]

    def to_target(self) -> TargetState:
        if self.preset == "ghz":
            return ghz_target(self.n_qubits)
        if self.preset == "w":
            return w_target(self.n_qubits)
        try:
            return TargetState(n_qubits=self.n_qubits, amplitudes=self.complex_amplitudes())
        except ValidationError as exc:
            raise ValueError(exc.errors()[0]["msg"]) from None


class RunSection(_Section):
    frame: Frame = Frame.ROTATING
    out_dir: Path = Path("output")
    seed: int = 0
    initial_level: int = Field(0, ge=0)
    spectrum: List[float] = Field(default_factory=list, description="Drive detunings in units of lambda")


class BudgetSection(_Section):
    t_d: Optional[float] = Field(None, gt=0, description="Override for T_r/N (s)")
    reference_leakage: Optional[float] = Field(None, ge=0, le=1, description="Externally quoted leakage to total against")


class CavitySection(_Section):
    delta_c_sweep: List[PositiveFrequency] = Field(default_factory=list)


class SweepSection(_Section):
    parameter: Optional[Literal["lambda", "epsilon", "delta_c"]] = None
    values: List[Frequency] = Field(default_factory=list)
    random_targets: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_sweep(self):
        if self.parameter is not None and not self.values:
            raise ValueError(f"sweep over {self.parameter} needs 'values'")
        # lambda may be 0 (uncoupled); epsilon and delta_c must stay positive
        allow_zero = self.parameter == "lambda"
        for value in self.values if self.parameter is not None else []:
            if value < 0 or (value == 0 and not allow_zero):
                bound = ">= 0" if allow_zero else "> 0"
                raise ValueError(f"sweep over {self.parameter} needs values {bound} rad/s, got {value:g}")
        return self


class ValidateSection(_Section):
    random_schedules: int = Field(0, ge=0)
    control_weight: float = Field(1.1, gt=0)
    max_deviation: float = Field(1e-7, gt=0)
    max_asymmetric: float = Field(1e-10, gt=0)
    min_control: float = Field(1e-4, gt=0)


class RunConfig(_Section):
    physical: PhysicalSection
    target: TargetSection
    integrator: IntegratorConfig = Field(default_factory=IntegratorConfig)
    run: RunSection = Field(default_factory=RunSection)
    budget: BudgetSection = Field(default_factory=BudgetSection)
    cavity: CavitySection = Field(default_factory=CavitySection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    validate_: ValidateSection = Field(default_factory=ValidateSection, alias="validate")

    @model_validator(mode="after")
    def _check_initial_level(self):
        if self.run.initial_level > self.target.n_qubits:
            raise ValueError(f"run.initial_level {self.run.initial_level} is above N={self.target.n_qubits}")
        return self

    def params(self) -> PhysicalParams:
        return self.physical.to_params()

    def resolved(self) -> dict:
        """Fully normalized config (rad/s everywhere, lambda filled in) as JSON-ready data"""
        data = self.model_dump(mode="json", by_alias=True)
        data["physical"]["lambda"] = self.params().lambda_
        return data


def _line_of(text: str, loc: Sequence[Any]) -> Optional[int]:
    """1-based line of the TOML key addressed by a pydantic error location"""
    keys = [str(part) for part in loc if isinstance(part, str)]
    if not keys:
        return None
    section, key = keys[0], keys[1] if len(keys) > 1 else None
    current = None
    section_line = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line.startswith("[") and line.endswith("]"):
            current = line.strip("[]").strip()
            if current == section:
                section_line = number
            continue
        if current == section and key is not None and line.split("=", 1)[0].strip() == key:
            return number
    return section_line


def _field_name(loc: Sequence[Any]) -> str:
    return ".".join(str(part) for part in loc)


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as exc:
        errors = exc.errors()
        first = errors[0]["loc"]
        details = "; ".join(f"{_field_name(e['loc'])}: {e['msg']}" for e in errors)
        raise ConfigError(f"{source}: {details}", field=_field_name(first), line=_line_of(text, first)) from None
    logger.debug("loaded config %s", source)
    return config


def load_config(path: Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    return parse_config(path.read_text(), source=str(path))
