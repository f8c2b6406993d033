"""Parallel multidimensional integration (PAGANI cubature, m-Cubes Monte Carlo)."""

from ._paracube import (
    ArgumentError,
    Error,
    IntegralResult,
    MonteCarloResult,
    RuleTable,
    build_rule,
    integrand_ids,
    make_plan,
    mcubes,
    pagani,
    reference,
)

__all__ = [
    "ArgumentError",
    "Error",
    "IntegralResult",
    "MonteCarloResult",
    "RuleTable",
    "build_rule",
    "integrand_ids",
    "make_plan",
    "mcubes",
    "pagani",
    "reference",
]
