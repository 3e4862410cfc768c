"""
Error types raised by dicke_synth.
Each carries the CLI exit code it maps to.
"""

from typing import Optional


class DickeError(Exception):
    """Base class for all package errors"""
    exit_code = 4


class ConfigError(DickeError):
    """Run configuration could not be parsed or validated"""
    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(field)
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class IntegratorError(DickeError):
    """The time integrator failed before reaching the end of a segment"""
    exit_code = 3

    def __init__(self, message: str, segment: Optional[int] = None, time_reached: Optional[float] = None):
        self.segment = segment
        self.time_reached = time_reached
        details = []
        if segment is not None:
            details.append(f"segment {segment}")
        if time_reached is not None:
            details.append(f"t={time_reached:.6g} s")
        suffix = f" ({', '.join(details)})" if details else ""
        super().__init__(message + suffix)


class CapacityError(DickeError):
    """Qubit count above the full-space bound"""


class NoTransitionError(DickeError):
    """Asked for an upward transition from the top of the ladder"""


class OutOfLadderError(DickeError):
    """Target reaches beyond the N+1 symmetric levels"""


class InfeasibleTargetError(DickeError):
    """Target cannot be loaded by the sequential two-level recursion"""


class SelectivityError(DickeError):
    """Drive amplitude too strong (or zero) for selective addressing"""


class TruncationError(DickeError):
    """Cavity Fock truncation insufficient even after escalation"""


class InvariantViolation(DickeError):
    """A numerical check reported by the CLI failed"""
