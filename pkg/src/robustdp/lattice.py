"""Finite scenario lattices and per-node ambiguity kernels.

A ScenarioTree is the product of per-period outcome lists; nodes are
addressed by (depth, id) with ids lexicographic in the outcome path.
An AmbiguityKernel attaches to every interior node a finite list of
probability vectors over that node's children; gluing one choice per node
yields a KernelSelection, i.e. a single product measure on the leaves.
"""

import itertools

from .extreal import NEG_INF

PROB_TOL = 1e-12


class ConfigurationError(ValueError):
    """Malformed tree / kernel / model input."""


class ScenarioTree:

    def __init__(self, stages):
        if not stages:
            raise ConfigurationError("scenario tree needs at least one stage")
        norm = []
        dim = None
        for t, stage in enumerate(stages):
            if not stage:
                raise ConfigurationError("stage %d has no outcomes" % t)
            outs = []
            for o in stage:
                if isinstance(o, (list, tuple)):
                    outs.append(tuple(float(c) for c in o))
                else:
                    outs.append((float(o),))
            d = len(outs[0])
            if any(len(o) != d for o in outs):
                raise ConfigurationError("stage %d mixes outcome dimensions" % t)
            if dim is None:
                dim = d
            elif d != dim:
                raise ConfigurationError("stage %d outcome dimension differs from stage 0" % t)
            if len(set(outs)) != len(outs):
                raise ConfigurationError("stage %d contains duplicate outcomes" % t)
            norm.append(tuple(outs))
        self.stages = tuple(norm)
        self.T = len(self.stages)
        self.outcome_dim = dim
        self._counts = [1]
        for stage in self.stages:
            self._counts.append(self._counts[-1] * len(stage))
        self._digit_maps = [
            {o: j for j, o in enumerate(stage)} for stage in self.stages
        ]

    def n_nodes(self, t):
        return self._counts[t]

    @property
    def n_leaves(self):
        return self._counts[self.T]

    def branching(self, t):
        """Number of children of a depth-t node (t < T)."""
        return len(self.stages[t])

    def child(self, t, node, j):
        return node * len(self.stages[t]) + j

    def parent(self, t, node):
        """(parent id, branch index) of a depth-t node, t >= 1."""
        return divmod(node, len(self.stages[t - 1]))

    def digits(self, t, node):
        """Outcome indices along the path to a depth-t node, root first."""
        out = []
        for s in range(t - 1, -1, -1):
            node, j = divmod(node, len(self.stages[s]))
            out.append(j)
        out.reverse()
        return tuple(out)

    def node_id(self, digits):
        node = 0
        for s, j in enumerate(digits):
            node = node * len(self.stages[s]) + j
        return node

    def path(self, t, node):
        """Outcome vectors along the path to a depth-t node."""
        return tuple(self.stages[s][j] for s, j in enumerate(self.digits(t, node)))

    def leaf_of_path(self, path):
        if len(path) != self.T:
            raise ConfigurationError("path length %d != horizon %d" % (len(path), self.T))
        return self.node_id(tuple(self._digit_maps[s][o] for s, o in enumerate(path)))

    def nodes_on_path(self, leaf):
        """Node ids visited by a leaf's path, depth 0 through T."""
        digits = self.digits(self.T, leaf)
        ids = [0]
        for s, j in enumerate(digits):
            ids.append(ids[-1] * len(self.stages[s]) + j)
        return ids


def build_tree(stages):
    return ScenarioTree(stages)


def expectation(values, probs):
    """Sum p_i * v_i in fixed index order.

    Children with zero weight are skipped; -inf under positive weight
    absorbs the whole sum.
    """
    if len(values) != len(probs):
        raise ConfigurationError(
            "expectation: %d values vs %d probabilities" % (len(values), len(probs))
        )
    total = 0.0
    for v, p in zip(values, probs):
        if p == 0.0:
            continue
        if v == NEG_INF:
            return NEG_INF
        total += p * v
    return total


class AmbiguityKernel:
    """Per interior node, a nonempty finite list of one-step laws."""

    def __init__(self, tree, vectors):
        self.tree = tree
        if len(vectors) != tree.T:
            raise ConfigurationError(
                "kernel spec covers %d depths, tree has %d" % (len(vectors), tree.T)
            )
        store = []
        for t in range(tree.T):
            per_depth = vectors[t]
            if len(per_depth) != tree.n_nodes(t):
                raise ConfigurationError(
                    "depth %d: %d kernel lists for %d nodes" % (t, len(per_depth), tree.n_nodes(t))
                )
            b = tree.branching(t)
            depth_store = []
            for node, vecs in enumerate(per_depth):
                if not vecs:
                    raise ConfigurationError("node (%d,%d) has an empty kernel list" % (t, node))
                clean = []
                for vec in vecs:
                    clean.append(self._validate_vector(vec, b, t, node))
                depth_store.append(tuple(clean))
            store.append(tuple(depth_store))
        self._vectors = tuple(store)
        self._reachable = self._compute_reachable()

    @staticmethod
    def _validate_vector(vec, b, t, node):
        if len(vec) != b:
            raise ConfigurationError(
                "node (%d,%d): probability vector of length %d, expected %d"
                % (t, node, len(vec), b)
            )
        entries = []
        for p in vec:
            p = float(p)
            if p < 0.0:
                if p < -PROB_TOL:
                    raise ConfigurationError(
                        "node (%d,%d): negative probability %r" % (t, node, p)
                    )
                p = 0.0
            entries.append(p)
        s = sum(entries)
        if abs(s - 1.0) > PROB_TOL:
            raise ConfigurationError(
                "node (%d,%d): probabilities sum to %r, beyond tolerance" % (t, node, s)
            )
        if s != 1.0:
            entries = [p / s for p in entries]
        return tuple(entries)

    def at(self, t, node):
        return self._vectors[t][node]

    def node_keys(self):
        """(depth, node) for every interior node, in deterministic order."""
        for t in range(self.tree.T):
            for node in range(self.tree.n_nodes(t)):
                yield (t, node)

    def n_selections(self):
        n = 1
        for t, node in self.node_keys():
            n *= len(self.at(t, node))
        return n

    def _compute_reachable(self):
        tree = self.tree
        reach = [[True]]
        for t in range(tree.T):
            nxt = [False] * tree.n_nodes(t + 1)
            for node in range(tree.n_nodes(t)):
                if not reach[t][node]:
                    continue
                for j in range(tree.branching(t)):
                    if any(vec[j] > 0.0 for vec in self.at(t, node)):
                        nxt[tree.child(t, node, j)] = True
            reach.append(nxt)
        return reach

    def reachable(self, t, node):
        """Whether the node has positive probability under some selection."""
        return self._reachable[t][node]

    def reachable_leaves(self):
        return [i for i in range(self.tree.n_leaves) if self._reachable[self.tree.T][i]]


class KernelSelection:
    """One chosen probability vector per interior node."""

    def __init__(self, kernel, choices):
        self.kernel = kernel
        self.choices = choices  # {(t, node): index into the node's list}

    def vector(self, t, node):
        return self.kernel.at(t, node)[self.choices[(t, node)]]

    def leaf_probabilities(self):
        """Probability of each leaf under this product measure, leaf order."""
        tree = self.kernel.tree
        probs = []
        for leaf in range(tree.n_leaves):
            digits = tree.digits(tree.T, leaf)
            p = 1.0
            node = 0
            for t, j in enumerate(digits):
                p *= self.vector(t, node)[j]
                if p == 0.0:
                    break
                node = tree.child(t, node, j)
            probs.append(p)
        return probs


def enumerate_selections(kernel):
    """Every KernelSelection exactly once, deterministic order."""
    keys = list(kernel.node_keys())
    ranges = [range(len(kernel.at(t, node))) for t, node in keys]
    for combo in itertools.product(*ranges):
        yield KernelSelection(kernel, dict(zip(keys, combo)))
