"""Worst-case dynamic programming over finite scenario lattices.

Solves sup-inf problems where an adapted, grid-valued strategy is chosen
against a family of product measures built from per-node ambiguity
kernels, with extended-real payoffs bounded above.
"""

from .extreal import NEG_INF, is_finite
from .lattice import (AmbiguityKernel, ConfigurationError, KernelSelection,
                      ScenarioTree, build_tree, enumerate_selections, expectation)
from .integrand import (GridConditionViolation, GridDomain, NotAvailable,
                        NotStabilizedError, action_key, check_grid_condition,
                        flatten, horizon_analytic, horizon_numeric, make_utility,
                        unflatten)
from .models import (FrictionlessIntegerModel, LiquidationModel, RochSonerModel,
                     SemiStaticModel, StoppingModel, bits_of_stopping_time,
                     build_model, stopping_time_of_bits)
from .solver import (ConsistencyError, InfeasibleProblem, PolicyTable, ValueField,
                     backward_induct, evaluate_policy, extract_policy,
                     lexmin_strategy, pinned_worst_case, solve)
from .oracle import (BudgetError, EnumerationBudget, count_adapted,
                     enumerate_adapted, stopping_bruteforce, supinf_bruteforce)
from .noarb import (ArbitrageReport, Inconclusive, global_na_check,
                    horizon_dp_check, local_cone, na_report, per_measure_scan)
from .config import (Problem, SolverOptions, ValidationError, build_problem,
                     load_config, load_problem, preflight)
from .report import canonical_json, config_hash

__version__ = "0.1.0"

__all__ = [
    "NEG_INF", "is_finite",
    "AmbiguityKernel", "ConfigurationError", "KernelSelection", "ScenarioTree",
    "build_tree", "enumerate_selections", "expectation",
    "GridConditionViolation", "GridDomain", "NotAvailable", "NotStabilizedError",
    "action_key", "check_grid_condition", "flatten", "horizon_analytic",
    "horizon_numeric", "make_utility", "unflatten",
    "FrictionlessIntegerModel", "LiquidationModel", "RochSonerModel",
    "SemiStaticModel", "StoppingModel", "bits_of_stopping_time", "build_model",
    "stopping_time_of_bits",
    "ConsistencyError", "InfeasibleProblem", "PolicyTable", "ValueField",
    "backward_induct", "evaluate_policy", "extract_policy", "lexmin_strategy",
    "pinned_worst_case", "solve",
    "BudgetError", "EnumerationBudget", "count_adapted", "enumerate_adapted",
    "stopping_bruteforce", "supinf_bruteforce",
    "ArbitrageReport", "Inconclusive", "global_na_check", "horizon_dp_check",
    "local_cone", "na_report", "per_measure_scan",
    "Problem", "SolverOptions", "ValidationError", "build_problem",
    "load_config", "load_problem", "preflight",
    "canonical_json", "config_hash",
]
