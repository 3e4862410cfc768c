"""
Process-wide settings, overridable through DICKE_SYNTH_* environment variables.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class DickeSettings(BaseSettings):
    """Numerical bounds and warning thresholds shared by every module"""

    model_config = SettingsConfigDict(env_prefix="DICKE_SYNTH_", extra="ignore")

    oracle_max_qubits: int = Field(12, ge=1, description="Largest N for full 2^N-space work")
    reduction_max_qubits: int = Field(10, ge=1, description="Largest N for the reduction-equivalence check")
    dense_threshold: int = Field(8, ge=1, description="Full-space operators are dense up to this N")
    normalization_tol: float = Field(1e-9, gt=0, description="Tolerance on unit norm")
    selectivity_warning: float = Field(0.1, gt=0, description="Warn when epsilon/lambda exceeds this")
    validity_warning: float = Field(0.2, gt=0, description="Warn when g*sqrt(n+1)/delta_c exceeds this")
    photon_tail_bound: float = Field(1e-6, gt=0, description="Max population allowed at n = n_max")
    n_max_ceiling: int = Field(12, ge=2, description="Fock escalation stops here")
    log_level: str = Field("INFO", description="Root log level for the CLI")


@lru_cache(maxsize=1)
def get_settings() -> DickeSettings:
    return DickeSettings()
