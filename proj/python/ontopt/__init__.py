"""Classify, transform, solve and certify small optimization problems."""

from ._core import (
    DimensionError,
    DomainError,
    Error,
    InapplicableError,
    NondifferentiableError,
    NumericalError,
    ParseError,
    Problem,
    Transform,
    UnboundError,
    ValidationError,
    check_kkt,
    check_local_optimum,
    check_stationarity,
    classify,
    envelope_sensitivity,
    eq_to_ineq,
    gp_log,
    load,
    lp_dual,
    parse,
    phase1,
    socp_to_lp,
    solve,
    to_convex_min,
    version,
)

__version__ = version()

__all__ = [
    "DimensionError",
    "DomainError",
    "Error",
    "InapplicableError",
    "NondifferentiableError",
    "NumericalError",
    "ParseError",
    "Problem",
    "Transform",
    "UnboundError",
    "ValidationError",
    "check_kkt",
    "check_local_optimum",
    "check_stationarity",
    "classify",
    "envelope_sensitivity",
    "eq_to_ineq",
    "gp_log",
    "load",
    "lp_dual",
    "parse",
    "phase1",
    "socp_to_lp",
    "solve",
    "to_convex_min",
]
