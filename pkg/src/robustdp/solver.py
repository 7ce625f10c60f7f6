"""Worst-case backward induction, policy extraction and policy evaluation.

The value recursion alternates an exact min over the node's kernel
vectors with an exact max over the feasible actions; states are keyed by
(depth, node, action prefix).  Arithmetic is plain sequential float in
fixed child order, so results are bit-identical across runs.
"""

from dataclasses import dataclass, field

from .extreal import NEG_INF
from .integrand import action_key
from .lattice import enumerate_selections, expectation

TIE_TOL = 1e-12
VALUE_TOL = 1e-9


class InfeasibleProblem(Exception):
    """Root value is -inf: the zero-strategy integrability check fails."""


class ConsistencyError(Exception):
    """Two routes to the same quantity disagreed beyond tolerance."""


def feasible_prefixes(model):
    """Per depth, every feasible action prefix, in deterministic order."""
    prefixes = [[()]]
    for t in range(model.T):
        nxt = []
        for p in prefixes[t]:
            for a in model.feasible_actions(t, p):
                nxt.append(p + (a,))
        prefixes.append(nxt)
    return prefixes


@dataclass
class ValueField:
    tree: object
    model: object
    prefixes: list
    psi: dict = field(default_factory=dict)
    phi: dict = field(default_factory=dict)

    def psi_at(self, t, node, prefix):
        return self.psi.get((t, node, prefix), NEG_INF)

    def phi_at(self, t, node, prefix, a):
        return self.phi.get((t, node, prefix, a), NEG_INF)


@dataclass
class PolicyTable:
    tree: object
    model: object
    actions: dict  # (t, node, prefix) -> chosen action
    root_value: float

    def tree_strategy(self):
        """On-policy action per (depth, node), prefixes resolved by walking
        the policy down from the root."""
        tree = self.tree
        out = []
        prefix_of = [()]
        for t in range(tree.T):
            row = []
            nxt = []
            for node in range(tree.n_nodes(t)):
                prefix = prefix_of[node]
                a = self.actions.get((t, node, prefix))
                if a is None:
                    # value -inf here (probability zero under every selection);
                    # any feasible action will do, pick the tie-break minimum
                    a = min(self.model.feasible_actions(t, prefix), key=action_key)
                row.append(a)
                for _ in range(tree.branching(t)):
                    nxt.append(prefix + (a,))
            out.append(tuple(row))
            prefix_of = nxt
        return tuple(out)


def strategy_along_path(tree, tree_strategy, leaf):
    nodes = tree.nodes_on_path(leaf)
    return tuple(tree_strategy[t][nodes[t]] for t in range(tree.T))


def backward_induct(tree, kernels, model):
    """Solve the worst-case recursion; returns (root value, ValueField)."""
    prefixes = feasible_prefixes(model)
    fld = ValueField(tree, model, prefixes)
    psi, phi = fld.psi, fld.phi
    T = tree.T
    for leaf in range(tree.n_leaves):
        path = tree.path(T, leaf)
        for full in prefixes[T]:
            psi[(T, leaf, full)] = model.value(path, full)
    for t in range(T - 1, -1, -1):
        for node in range(tree.n_nodes(t)):
            children = [tree.child(t, node, j) for j in range(tree.branching(t))]
            vecs = kernels.at(t, node)
            for prefix in prefixes[t]:
                best = NEG_INF
                for a in model.feasible_actions(t, prefix):
                    ext = prefix + (a,)
                    child_vals = [psi[(t + 1, c, ext)] for c in children]
                    v = min(expectation(child_vals, vec) for vec in vecs)
                    phi[(t, node, prefix, a)] = v
                    if v > best:
                        best = v
                psi[(t, node, prefix)] = best
    root = psi[(0, 0, ())]
    if root == NEG_INF:
        raise InfeasibleProblem("worst-case root value is -inf")
    if root > model.upper_bound + VALUE_TOL:
        raise ConsistencyError(
            "root value %r exceeds the declared upper bound %r" % (root, model.upper_bound)
        )
    return root, fld


def extract_policy(fld):
    """Argmax selection at every state with finite value.

    Ties (within 1e-12) break to the smallest Euclidean norm, then
    lexicographic -- the same rule the brute-force oracle applies.
    """
    model = fld.model
    tree = fld.tree
    actions = {}
    for t in range(tree.T):
        for node in range(tree.n_nodes(t)):
            for prefix in fld.prefixes[t]:
                best = fld.psi[(t, node, prefix)]
                if best == NEG_INF:
                    continue
                tied = [a for a in model.feasible_actions(t, prefix)
                        if fld.phi[(t, node, prefix, a)] >= best - TIE_TOL]
                actions[(t, node, prefix)] = min(tied, key=action_key)
    return PolicyTable(tree, model, actions, fld.psi[(0, 0, ())])


def _prefix_from(tree, pinned, t, node):
    """Action prefix of a node read off already-pinned ancestors."""
    chain = []
    s, m = t, node
    while s > 0:
        m, _ = tree.parent(s, m)
        s -= 1
        chain.append(m)
    chain.reverse()  # ancestors root..parent
    return tuple(pinned[(s, m)] for s, m in enumerate(chain))


def _constrained_value(tree, kernels, model, pinned):
    """Recursion value with some (depth, node) cells pinned to an action."""
    memo = {}

    def val(t, node, prefix):
        if t == tree.T:
            return model.value(tree.path(tree.T, node), prefix)
        key = (t, node, prefix)
        v = memo.get(key)
        if v is not None:
            return v
        if (t, node) in pinned:
            acts = (pinned[(t, node)],)
        else:
            acts = model.feasible_actions(t, prefix)
        children = [tree.child(t, node, j) for j in range(tree.branching(t))]
        vecs = kernels.at(t, node)
        best = NEG_INF
        for a in acts:
            ext = prefix + (a,)
            child_vals = [val(t + 1, c, ext) for c in children]
            w = min(expectation(child_vals, vec) for vec in vecs)
            if w > best:
                best = w
        memo[key] = best
        return best

    return val(0, 0, ())


def lexmin_strategy(tree, kernels, model, root_value, tie_tol=TIE_TOL):
    """Lexicographically minimal optimal strategy under the shared order.

    Walks the cells in (depth, node) order and pins, at each, the
    smallest-key action that still admits a completion whose worst-case
    value stays within tie_tol of the root value.  This is exactly the
    minimum of the optimal-strategy set under per-cell action keys
    compared in (depth, node) order -- the brute-force tie-break.
    """
    pinned = {}
    for t in range(tree.T):
        for node in range(tree.n_nodes(t)):
            prefix = _prefix_from(tree, pinned, t, node)
            chosen = None
            for a in sorted(model.feasible_actions(t, prefix), key=action_key):
                pinned[(t, node)] = a
                if _constrained_value(tree, kernels, model, pinned) >= root_value - tie_tol:
                    chosen = a
                    break
            if chosen is None:
                raise ConsistencyError(
                    "no action at (%d, %d) completes to the root value" % (t, node)
                )
    return tuple(
        tuple(pinned[(t, node)] for node in range(tree.n_nodes(t)))
        for t in range(tree.T)
    )


def pinned_worst_case(tree, kernels, leaf_values):
    """Backward inf-only recursion for fixed per-leaf terminal values."""
    vals = list(leaf_values)
    for t in range(tree.T - 1, -1, -1):
        nxt = []
        for node in range(tree.n_nodes(t)):
            children = [vals[tree.child(t, node, j)] for j in range(tree.branching(t))]
            nxt.append(min(expectation(children, vec) for vec in kernels.at(t, node)))
        vals = nxt
    return vals[0]


def evaluate_policy(tree, kernels, model, policy, max_enum=10 ** 6):
    """Worst-case value of a fixed policy, computed two ways.

    The pinned-action backward recursion is always run; when the number of
    kernel selections is small enough, the explicit min over enumerated
    product measures is computed as well and the two must agree to 1e-9.
    """
    strat = policy.tree_strategy()
    leaf_values = []
    for leaf in range(tree.n_leaves):
        path = tree.path(tree.T, leaf)
        leaf_values.append(model.value(path, strategy_along_path(tree, strat, leaf)))
    pinned = pinned_worst_case(tree, kernels, leaf_values)
    if kernels.n_selections() <= max_enum:
        worst = None
        for sel in enumerate_selections(kernels):
            e = expectation(leaf_values, sel.leaf_probabilities())
            if worst is None or e < worst:
                worst = e
        if pinned == NEG_INF or worst == NEG_INF:
            agree = pinned == worst
        else:
            agree = abs(pinned - worst) <= VALUE_TOL
        if not agree:
            raise ConsistencyError(
                "policy value mismatch: pinned recursion %r vs enumeration %r"
                % (pinned, worst)
            )
    return pinned


def solve(tree, kernels, model):
    """backward_induct + extract_policy + evaluate_policy in one call."""
    root, fld = backward_induct(tree, kernels, model)
    policy = extract_policy(fld)
    value = evaluate_policy(tree, kernels, model, policy)
    if not (value == NEG_INF or abs(value - root) <= VALUE_TOL):
        raise ConsistencyError(
            "policy value %r does not reproduce root value %r" % (value, root)
        )
    return root, fld, policy
