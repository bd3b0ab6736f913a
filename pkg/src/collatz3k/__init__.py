"""Generalized Collatz map 3n + 3^k: orbits, exact closed forms, range sweeps."""

from .core import (
    CycleReport,
    CycleTag,
    OddEvenProfile,
    Params,
    Status,
    StreamResult,
    Trajectory,
    default_budget,
    detect_cycle,
    iter_profiles,
    parity_profile,
    parse_natural,
    step,
    stream,
    three_adic_valuation,
    trajectory,
)
from .dyadic import DyadicRational
from .errors import (
    CheckpointError,
    FormulaDivisionByZero,
    InternalInvariantBroken,
    NonIntegerResult,
    NotPowerOfTwo,
)
from .formula import (
    cross_check,
    epsilon,
    epsilon_sum,
    eval_term_formula,
    k0_term_formula,
    same_time_partner,
    total_stopping_time_formula,
)

__version__ = "0.1.0"
