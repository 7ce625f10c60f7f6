"""Independent brute-force reference for small instances.

Enumerates every adapted strategy and every kernel selection outright,
with no shared code path through the backward recursion, so oracle and
solver can only agree by computing the same mathematical object.
"""

import itertools
from dataclasses import dataclass

from .extreal import NEG_INF
from .integrand import action_key
from .lattice import enumerate_selections
from .models import stopping_time_of_bits


@dataclass
class EnumerationBudget:
    max_strategies: int = 10 ** 7
    max_selections: int = 10 ** 6


class BudgetError(RuntimeError):

    def __init__(self, kind, count, limit):
        self.kind = kind
        self.count = count
        self.limit = limit
        super().__init__(
            "enumeration over budget: %d %s exceeds limit %d" % (count, kind, limit)
        )


def count_adapted(tree, model):
    """Exact number of adapted strategies, as a Python int (no overflow)."""
    memo = {}

    def sub(t, prefix):
        # strategies on the subtree below one depth-t node with this prefix
        if t == tree.T:
            return 1
        key = (t, prefix)
        n = memo.get(key)
        if n is None:
            b = tree.branching(t)
            n = 0
            for a in model.feasible_actions(t, prefix):
                n += sub(t + 1, prefix + (a,)) ** b
            memo[key] = n
        return n

    return sub(0, ())


def enumerate_adapted(tree, model):
    """All adapted strategies as per-depth action rows, deterministic order.

    A strategy is ((a_node)_{node at depth 0}, ..., (a_node)_{depth T-1});
    feasibility of an action depends only on the actions taken along the
    path to the node, i.e. on the node's prefix.
    """

    def rec(t, prefixes):
        if t == tree.T:
            yield ()
            return
        choices = [tuple(model.feasible_actions(t, p)) for p in prefixes]
        b = tree.branching(t)
        for combo in itertools.product(*choices):
            child_prefixes = [prefixes[i] + (combo[i],)
                              for i in range(len(prefixes)) for _ in range(b)]
            for rest in rec(t + 1, child_prefixes):
                yield (combo,) + rest

    return rec(0, [()])


def strategy_key(strategy):
    """Tie-break key over whole strategies: per-node action keys in
    (depth, node) order, compared lexicographically."""
    return tuple(action_key(a) for row in strategy for a in row)


def _strategy_on_path(tree, strategy, leaf):
    nodes = tree.nodes_on_path(leaf)
    return tuple(strategy[t][nodes[t]] for t in range(tree.T))


def _check_budgets(tree, model, kernels, budget):
    if budget is None:
        budget = EnumerationBudget()
    n_strat = count_adapted(tree, model)
    if n_strat > budget.max_strategies:
        raise BudgetError("strategies", n_strat, budget.max_strategies)
    n_sel = kernels.n_selections()
    if n_sel > budget.max_selections:
        raise BudgetError("selections", n_sel, budget.max_selections)


def _sparse_selections(kernels):
    out = []
    for sel in enumerate_selections(kernels):
        probs = sel.leaf_probabilities()
        out.append([(leaf, p) for leaf, p in enumerate(probs) if p != 0.0])
    return out


def _worst_case(leaf_values, sparse):
    worst = None
    for support in sparse:
        acc = 0.0
        for leaf, p in support:
            v = leaf_values[leaf]
            if v == NEG_INF:
                acc = NEG_INF
                break
            acc += p * v
        if worst is None or acc < worst:
            worst = acc
    return worst


def supinf_bruteforce(tree, kernels, model, budget=None):
    """sup over adapted strategies of the min over product measures.

    Returns (value, strategy); value ties within 1e-12 break to the
    smallest per-node (norm, lex) action keys in (depth, node) order.
    """
    _check_budgets(tree, model, kernels, budget)
    sparse = _sparse_selections(kernels)
    best = None
    tied = []
    for strategy in enumerate_adapted(tree, model):
        leaf_values = [model.value(tree.path(tree.T, leaf),
                                   _strategy_on_path(tree, strategy, leaf))
                       for leaf in range(tree.n_leaves)]
        worst = _worst_case(leaf_values, sparse)
        if best is None or _better(worst, best):
            best = worst
            tied = [(k, s, w) for k, s, w in tied if _within_tie(w, best)]
        if _within_tie(worst, best):
            tied.append((strategy_key(strategy), strategy, worst))
    key, winner, w = min(tied, key=lambda item: item[0])
    return best, winner


def _better(a, b):
    if b == NEG_INF:
        return a != NEG_INF
    return a != NEG_INF and a > b


def _within_tie(w, best):
    if best == NEG_INF or w == NEG_INF:
        return w == best
    return w >= best - 1e-12


def worst_case_of_strategy(tree, kernels, model, strategy):
    """min over product measures for one fixed adapted strategy."""
    sparse = _sparse_selections(kernels)
    leaf_values = [model.value(tree.path(tree.T, leaf),
                               _strategy_on_path(tree, strategy, leaf))
                   for leaf in range(tree.n_leaves)]
    return _worst_case(leaf_values, sparse)


def stopping_bruteforce(tree, kernels, model, budget=None):
    """Robust optimal stopping by direct enumeration of adapted stopping
    strategies, reading rewards straight off the payoff table."""
    _check_budgets(tree, model, kernels, budget)
    sparse = _sparse_selections(kernels)
    G = model.payoffs
    best = None
    tied = []
    for strategy in enumerate_adapted(tree, model):
        leaf_values = []
        for leaf in range(tree.n_leaves):
            nodes = tree.nodes_on_path(leaf)
            bits = [int(strategy[t][nodes[t]][0]) for t in range(tree.T)]
            tau = stopping_time_of_bits(bits)
            leaf_values.append(G[tau][nodes[tau]])
        worst = _worst_case(leaf_values, sparse)
        if best is None or _better(worst, best):
            best = worst
            tied = [(k, s, w) for k, s, w in tied if _within_tie(w, best)]
        if _within_tie(worst, best):
            tied.append((strategy_key(strategy), strategy, worst))
    key, winner, w = min(tied, key=lambda item: item[0])
    return best, winner
