"""Undiscounted nonnegative-cost control to a terminal set."""

from ._core import (
    IoError,
    ParseError,
    PreconditionError,
    Problem,
    ValidationError,
    check_assumptions,
    fixture,
    load_problem,
    min_time,
    multiplicity,
    optimal_cost,
    optimistic_policy_iteration,
    parse_problem,
    policy_iteration,
    residual,
    target_tube,
    value_iteration,
)

__all__ = [
    "IoError",
    "ParseError",
    "PreconditionError",
    "Problem",
    "ValidationError",
    "check_assumptions",
    "fixture",
    "load_problem",
    "min_time",
    "multiplicity",
    "optimal_cost",
    "optimistic_policy_iteration",
    "parse_problem",
    "policy_iteration",
    "residual",
    "target_tube",
    "value_iteration",
]
