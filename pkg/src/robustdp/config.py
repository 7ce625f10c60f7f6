"""Config file loading, strict validation, and problem assembly.

Configs are JSON objects with "tree", "kernels" and "model" sections plus
an optional "options" block.  Unknown fields anywhere are an error, as is
any structural defect (bad probabilities, wrong table sizes, grid
condition failures); all of these surface as ValidationError.
"""

import itertools
import json
from dataclasses import dataclass, field

from .extreal import NEG_INF
from .integrand import GridConditionViolation
from .lattice import AmbiguityKernel, ConfigurationError, build_tree
from .models import build_model
from .oracle import EnumerationBudget
from .solver import ConsistencyError, InfeasibleProblem, pinned_worst_case

PROBE_LIMIT = 64


class ValidationError(Exception):
    """Config file rejected before any solving was attempted."""


@dataclass
class SolverOptions:
    budget: EnumerationBudget = field(default_factory=EnumerationBudget)
    doubling_check: bool = True
    workers: int = 1
    horizon_mode: str = "auto"


@dataclass
class Problem:
    tree: object
    kernels: object
    model: object
    options: SolverOptions
    config: dict


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("cannot read config %s: %s" % (path, exc)) from exc
    if not isinstance(cfg, dict):
        raise ValidationError("config root must be a JSON object")
    return cfg


def _build_kernels(tree, spec):
    spec = dict(spec)
    if "per_depth" in spec:
        per_depth = spec.pop("per_depth")
        if spec:
            raise ValidationError("unknown kernel fields: %s" % sorted(spec))
        if len(per_depth) != tree.T:
            raise ValidationError(
                "per_depth kernels cover %d depths, tree has %d" % (len(per_depth), tree.T)
            )
        vectors = [[list(per_depth[t]) for _ in range(tree.n_nodes(t))]
                   for t in range(tree.T)]
    elif "per_node" in spec:
        vectors = spec.pop("per_node")
        if spec:
            raise ValidationError("unknown kernel fields: %s" % sorted(spec))
    else:
        raise ValidationError("kernels need either 'per_depth' or 'per_node'")
    return AmbiguityKernel(tree, vectors)


def _build_options(spec):
    spec = dict(spec)
    opts = SolverOptions()
    if "budget_strategies" in spec:
        opts.budget.max_strategies = int(spec.pop("budget_strategies"))
    if "budget_selections" in spec:
        opts.budget.max_selections = int(spec.pop("budget_selections"))
    if "doubling_check" in spec:
        opts.doubling_check = bool(spec.pop("doubling_check"))
    if "workers" in spec:
        opts.workers = int(spec.pop("workers"))
        if opts.workers < 1:
            raise ValidationError("workers must be >= 1")
    if "horizon_mode" in spec:
        opts.horizon_mode = spec.pop("horizon_mode")
        if opts.horizon_mode not in ("auto", "analytic", "numeric"):
            raise ValidationError("horizon_mode must be auto, analytic or numeric")
    if spec:
        raise ValidationError("unknown option fields: %s" % sorted(spec))
    return opts


def build_problem(cfg):
    """Assemble (tree, kernels, model, options) from a parsed config."""
    original = json.loads(json.dumps(cfg))
    cfg = dict(cfg)
    version = cfg.pop("schema_version", None)
    if version != 1:
        raise ValidationError("unsupported schema_version %r" % version)
    try:
        tree_spec = dict(cfg.pop("tree"))
        stages = tree_spec.pop("stages")
        if tree_spec:
            raise ValidationError("unknown tree fields: %s" % sorted(tree_spec))
        kernel_spec = cfg.pop("kernels")
        model_spec = cfg.pop("model")
    except KeyError as exc:
        raise ValidationError("config missing section %s" % exc) from exc
    options = _build_options(cfg.pop("options", {}))
    if cfg:
        raise ValidationError("unknown config fields: %s" % sorted(cfg))
    try:
        tree = build_tree(stages)
        kernels = _build_kernels(tree, kernel_spec)
        model = build_model(tree, model_spec)
        model.grid_domain()  # grid condition is part of ingestion
    except (ConfigurationError, GridConditionViolation, ValueError, TypeError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(str(exc)) from exc
    return Problem(tree, kernels, model, options, original)


def load_problem(path):
    return build_problem(load_config(path))


def _path_strategies(model):
    def rec(t, prefix):
        if t == model.T:
            yield prefix
            return
        for a in model.feasible_actions(t, prefix):
            yield from rec(t + 1, prefix + (a,))
    return rec(0, ())


def preflight(problem):
    """Ingestion-time sanity checks that need the assembled problem.

    Probes a deterministic sample of strategies against the declared
    upper bound and verifies the zero strategy has a finite worst-case
    value; the latter failing means the problem is infeasible as posed.
    """
    tree, kernels, model = problem.tree, problem.kernels, problem.model
    leaves = range(tree.n_leaves)
    probe_leaves = list(itertools.islice(leaves, 8))
    for strat in itertools.islice(_path_strategies(model), PROBE_LIMIT):
        for leaf in probe_leaves:
            v = model.value(tree.path(tree.T, leaf), strat)
            if v > model.upper_bound + 1e-9:
                raise ConsistencyError(
                    "payoff %r exceeds declared upper bound %r" % (v, model.upper_bound)
                )
    zero = tuple(((0.0,) * model.d) for _ in range(tree.T))
    leaf_values = [model.value(tree.path(tree.T, leaf), zero) for leaf in leaves]
    if pinned_worst_case(tree, kernels, leaf_values) == NEG_INF:
        raise InfeasibleProblem(
            "zero strategy has worst-case value -inf; the integrability "
            "assumption fails for this configuration"
        )
