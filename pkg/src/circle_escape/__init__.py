"""Escape from the open circular billiard: exact survival constants,
their Mellin-transform asymptotics and Monte Carlo checks."""

from .arithmetic import character_table, farey_sequence, sieve_tables
from .billiard import (
    EscapeResult,
    HoleConfiguration,
    PhasePoint,
    billiard_map,
    escape_count,
    surviving_psi_intervals,
)
from .errors import (
    AccuracyError,
    DegenerateFitError,
    DomainError,
    OutsideValidatedBoxWarning,
    PoleError,
)
from .montecarlo import SurvivalEstimate, estimate_survival
from .survival import p_infinity, p_infinity_q_holes, p_infinity_two_holes

__all__ = [
    "AccuracyError",
    "DegenerateFitError",
    "DomainError",
    "EscapeResult",
    "HoleConfiguration",
    "OutsideValidatedBoxWarning",
    "PhasePoint",
    "PoleError",
    "SurvivalEstimate",
    "billiard_map",
    "character_table",
    "escape_count",
    "estimate_survival",
    "farey_sequence",
    "p_infinity",
    "p_infinity_q_holes",
    "p_infinity_two_holes",
    "sieve_tables",
    "surviving_psi_intervals",
]
