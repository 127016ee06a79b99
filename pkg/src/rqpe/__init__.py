"""Synthesis, exact simulation and analysis of reductive quantum phase
estimation (RQPE) circuits.

Given a finite set of rational phase hypotheses, the toolkit synthesizes a
circuit that identifies the true phase in a single shot, simulates it
exactly, and quantifies its performance (distinguishability, Fisher
information, resource cost, Bayesian reconstruction).
"""

from .exactmath import (
    PhaseSet,
    format_rational,
    gcd_set,
    normalize_phase_set,
    parse_rational,
    rational_from_float,
)
from .reduction import (
    ReductionStage,
    ReductionTrace,
    default_ladder,
    mode_difference,
    qubit_bounds,
    reduce_phase_set,
    replay_numerator,
    stage_modulus,
)

__version__ = "0.1.0"
