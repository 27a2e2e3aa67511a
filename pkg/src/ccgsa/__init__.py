"""Gravitational search, differential grouping and their cooperative
coevolution combination (CCGSA-DG) for large-scale black-box minimisation."""

from .benchmarks import (
    GroupStructure,
    ObjectiveFunction,
    StructuredProblem,
    make_classical,
    make_structured,
    optimum_info,
)
from .cc import CcConfig, RunResult, run_ccgsa_dg
from .errors import BudgetExhaustedError, ConfigurationError, NumericFailureError, NumericInputError
from .grouping import GroupingConfig, GroupingReport, detect_interaction, group
from .gsa import GsaParams, Swarm, compute_masses, gravitational_constant, kbest_size, run_gsa

__all__ = [
    "BudgetExhaustedError", "CcConfig", "ConfigurationError", "GroupStructure", "GroupingConfig",
    "GroupingReport", "GsaParams", "NumericFailureError", "NumericInputError", "ObjectiveFunction",
    "RunResult", "StructuredProblem", "Swarm", "compute_masses", "detect_interaction",
    "gravitational_constant", "group", "kbest_size", "make_classical", "make_structured",
    "optimum_info", "run_ccgsa_dg", "run_gsa",
]
