"""No-arbitrage diagnostics on the quasi-sure (all-selections) model.

The global condition asks that the only adapted strategy whose terminal
horizon payoff is nonnegative on every reachable path is the strategy
that is zero quasi-surely.  Three views are offered: the global scan, a
per-measure arbitrage scan for gain-form payoffs, and per-node one-step
cones (exact for frictionless trading, surrogate otherwise).
"""

from dataclasses import dataclass, field

from .extreal import NEG_INF
from .integrand import NotAvailable, NotStabilizedError, flatten, horizon_numeric
from .oracle import (EnumerationBudget, BudgetError, count_adapted,
                     enumerate_adapted, strategy_key)
from .solver import ConsistencyError, pinned_worst_case

HORIZON_OK_TOL = 1e-9
SCAN_TOL = 1e-12


class Inconclusive(Exception):
    """Numeric horizon estimation failed to stabilize on some probe."""


@dataclass
class ArbitrageReport:
    na_holds: object          # True / False / None (inconclusive)
    witness: object = None    # offending strategy when na_holds is False
    n_checked: int = 0
    n_unresolved: int = 0
    method: str = "analytic"
    notes: list = field(default_factory=list)


def horizon_of(model, path, flat, mode="auto"):
    """Horizon value of a flat strategy along one path.

    mode "auto" prefers the registered closed form and falls back to the
    numeric estimator; "numeric" forces the estimator.
    """
    if mode != "numeric":
        val = model.analytic_horizon(path, flat)
        if val is not None:
            return val
        if mode == "analytic":
            raise NotAvailable(model.model_tag)
    return horizon_numeric(model, path, flat)


def _is_zero_qs(tree, kernels, strategy):
    zero = None
    for t in range(tree.T):
        for node in range(tree.n_nodes(t)):
            if not kernels.reachable(t, node):
                continue
            a = strategy[t][node]
            if zero is None:
                zero = (0.0,) * len(a)
            if a != zero:
                return False
    return True


def _strategy_budget(tree, model, budget):
    if budget is None:
        budget = EnumerationBudget()
    n = count_adapted(tree, model)
    if n > budget.max_strategies:
        raise BudgetError("strategies", n, budget.max_strategies)


def global_na_check(tree, kernels, model, budget=None, mode="auto"):
    """Scan every adapted strategy for a quasi-sure nonnegative horizon.

    Returns an ArbitrageReport; na_holds is None when no witness was
    found but some probes did not stabilize numerically.
    """
    _strategy_budget(tree, model, budget)
    leaves = kernels.reachable_leaves()
    paths = {leaf: tree.path(tree.T, leaf) for leaf in leaves}
    node_lists = {leaf: tree.nodes_on_path(leaf) for leaf in leaves}
    witnesses = []
    unresolved = 0
    checked = 0
    used_numeric = False
    for strategy in enumerate_adapted(tree, model):
        if _is_zero_qs(tree, kernels, strategy):
            continue
        checked += 1
        ok = True
        failed_numeric = False
        for leaf in leaves:
            nodes = node_lists[leaf]
            flat = flatten(tuple(strategy[t][nodes[t]] for t in range(tree.T)))
            try:
                h = horizon_of(model, paths[leaf], flat, mode)
            except NotStabilizedError:
                failed_numeric = True
                break
            if mode == "numeric" or model.analytic_horizon(paths[leaf], flat) is None:
                used_numeric = True
            if h < -HORIZON_OK_TOL:
                ok = False
                break
        if failed_numeric:
            unresolved += 1
            continue
        if ok:
            witnesses.append((strategy_key(strategy), strategy))
    method = "numeric" if mode == "numeric" else ("mixed" if used_numeric else "analytic")
    if witnesses:
        key, witness = min(witnesses, key=lambda item: item[0])
        return ArbitrageReport(False, witness, checked, unresolved, method)
    if unresolved:
        rep = ArbitrageReport(None, None, checked, unresolved, method)
        rep.notes.append("numeric horizon did not stabilize on %d strategies" % unresolved)
        return rep
    return ArbitrageReport(True, None, checked, 0, method)


def require_conclusive(report):
    if report.na_holds is None:
        raise Inconclusive("; ".join(report.notes) or "no-arbitrage check inconclusive")
    return report


def per_measure_scan(tree, model, selection, budget=None):
    """Classical arbitrage scan under one fixed product measure.

    Gain-form payoffs only: a strategy is an arbitrage when its pathwise
    gain is >= 0 on the measure's support and > 0 somewhere on it.
    Returns witness strategies sorted by the shared tie-break key.
    """
    if not hasattr(model, "gain_vector"):
        raise NotAvailable(model.model_tag)
    _strategy_budget(tree, model, budget)
    probs = selection.leaf_probabilities()
    support = [leaf for leaf, p in enumerate(probs) if p > 0.0]
    paths = {leaf: tree.path(tree.T, leaf) for leaf in support}
    node_lists = {leaf: tree.nodes_on_path(leaf) for leaf in support}
    hits = []
    for strategy in enumerate_adapted(tree, model):
        nonneg = True
        strict = False
        for leaf in support:
            nodes = node_lists[leaf]
            flat = flatten(tuple(strategy[t][nodes[t]] for t in range(tree.T)))
            g = sum(a * b for a, b in zip(flat, model.gain_vector(paths[leaf])))
            if g < -SCAN_TOL:
                nonneg = False
                break
            if g > SCAN_TOL:
                strict = True
        if nonneg and strict:
            hits.append((strategy_key(strategy), strategy))
    hits.sort(key=lambda item: item[0])
    return [s for _, s in hits]


def _subtree_leaves(tree, t, node):
    span = 1
    for s in range(t, tree.T):
        span *= tree.branching(s)
    return range(node * span, (node + 1) * span)


def _subtree_worst_case(tree, kernels, t, node, leaf_values):
    """Backward inf recursion restricted to the subtree below (t, node)."""
    vals = dict(leaf_values)
    for s in range(tree.T - 1, t - 1, -1):
        nxt = {}
        # nodes at depth s below (t, node)
        span = 1
        for u in range(t, s):
            span *= tree.branching(u)
        for m in range(node * span, (node + 1) * span):
            children = [vals[tree.child(s, m, j)] for j in range(tree.branching(s))]
            best = None
            for vec in kernels.at(s, m):
                e = 0.0
                for v, p in zip(children, vec):
                    if p == 0.0:
                        continue
                    if v == NEG_INF:
                        e = NEG_INF
                        break
                    e += p * v
                if best is None or e < best:
                    best = e
            nxt[m] = best
        vals = nxt
    return vals[node]


def local_cone(tree, kernels, model, t, node, mode="auto"):
    """One-step no-arbitrage cone membership at a node.

    Candidates are the actions feasible after an all-zero prefix.  For
    frictionless integer trading the cone is evaluated in closed form
    from the one-step price increments ("exact"); for the other families
    it is the set of actions whose zero-padded strategy has nonnegative
    worst-case expected horizon over the subtree ("surrogate").
    """
    zero_prefix = tuple(((0.0,) * model.d) for _ in range(t))
    candidates = list(model.feasible_actions(t, zero_prefix))
    if model.model_tag == "frictionless":
        price = tree.path(t, node)[-1] if t > 0 else model.s0
        supported = [j for j in range(tree.branching(t))
                     if any(vec[j] > 0.0 for vec in kernels.at(t, node))]
        members = []
        for h in candidates:
            ok = all(
                sum(hc * (cc - pc) for hc, cc, pc in zip(h, tree.stages[t][j], price))
                >= -SCAN_TOL
                for j in supported
            )
            members.append((h, ok))
        return "exact", members

    members = []
    for h in candidates:
        # zero-pad after t; every model here admits the zero action after
        # any feasible action, so the padded strategy is in the domain
        padded = zero_prefix + (h,) + tuple(((0.0,) * model.d) for _ in range(t + 1, tree.T))
        flat = flatten(padded)
        leaf_values = {}
        for leaf in _subtree_leaves(tree, t, node):
            path = tree.path(tree.T, leaf)
            leaf_values[leaf] = horizon_of(model, path, flat, mode)
        rho = _subtree_worst_case(tree, kernels, t, node, leaf_values)
        members.append((h, rho >= -HORIZON_OK_TOL))
    return "surrogate", members


def horizon_dp_check(tree, kernels, model, budget=None, mode="auto"):
    """Backward-recursion variant of the global scan.

    Computes for every non-trivial strategy the worst-case expected
    terminal horizon; the no-arbitrage condition holds exactly when that
    value is negative for all of them.  Must agree with global_na_check.
    """
    _strategy_budget(tree, model, budget)
    witnesses = []
    unresolved = 0
    for strategy in enumerate_adapted(tree, model):
        if _is_zero_qs(tree, kernels, strategy):
            continue
        leaf_values = []
        failed = False
        for leaf in range(tree.n_leaves):
            nodes = tree.nodes_on_path(leaf)
            flat = flatten(tuple(strategy[t][nodes[t]] for t in range(tree.T)))
            try:
                leaf_values.append(horizon_of(model, tree.path(tree.T, leaf), flat, mode))
            except NotStabilizedError:
                failed = True
                break
        if failed:
            unresolved += 1
            continue
        rho = pinned_worst_case(tree, kernels, leaf_values)
        if rho >= -HORIZON_OK_TOL:
            witnesses.append((strategy_key(strategy), strategy))
    if witnesses:
        key, witness = min(witnesses, key=lambda item: item[0])
        return ArbitrageReport(False, witness, 0, unresolved, mode)
    if unresolved:
        return ArbitrageReport(None, None, 0, unresolved, mode)
    return ArbitrageReport(True, None, 0, 0, mode)


def na_report(tree, kernels, model, budget=None, mode="auto"):
    """Global scan cross-checked against the backward-recursion variant."""
    rep = global_na_check(tree, kernels, model, budget, mode)
    dp = horizon_dp_check(tree, kernels, model, budget, mode)
    if rep.na_holds is not None and dp.na_holds is not None and rep.na_holds != dp.na_holds:
        raise ConsistencyError(
            "no-arbitrage verdicts disagree: global %r vs recursion %r"
            % (rep.na_holds, dp.na_holds)
        )
    rep.notes.append("recursion check verdict: %r" % (dp.na_holds,))
    return rep
