"""Shared helpers: randomized instance generators and independent references.

All generators take an explicit random.Random so failures reproduce from
the seed.  The classical DP reference is deliberately written from
scratch (plain prefix recursion, no kernel machinery) so it shares no
code with the solver under test.
"""

import random

from robustdp import (AmbiguityKernel, FrictionlessIntegerModel, StoppingModel,
                      build_tree, count_adapted, make_utility)
from robustdp.extreal import NEG_INF


def random_prob_vector(rng, b):
    xs = [rng.uniform(0.05, 1.0) for _ in range(b)]
    s = sum(xs)
    return [x / s for x in xs]


def random_stage(rng, b):
    outs = set()
    while len(outs) < b:
        outs.add(round(rng.uniform(0.3, 2.0), 3))
    return sorted(outs)


def random_tree(rng, T, branchings=None):
    if branchings is None:
        branchings = [rng.choice((2, 3)) for _ in range(T)]
    return build_tree([random_stage(rng, b) for b in branchings])


def random_kernels(rng, tree, max_selections=40):
    vectors = [[[random_prob_vector(rng, tree.branching(t))]
                for _ in range(tree.n_nodes(t))] for t in range(tree.T)]
    n_sel = 1
    nodes = [(t, node) for t in range(tree.T) for node in range(tree.n_nodes(t))]
    rng.shuffle(nodes)
    for t, node in nodes:
        for _ in range(rng.choice((0, 0, 1, 2))):
            cur = len(vectors[t][node])
            if n_sel // cur * (cur + 1) > max_selections:
                break
            vectors[t][node].append(random_prob_vector(rng, tree.branching(t)))
            n_sel = n_sel // cur * (cur + 1)
    return AmbiguityKernel(tree, vectors)


def random_frictionless_instance(rng, work_cap=400_000):
    """(tree, kernels, model) sized so brute force stays cheap."""
    while True:
        T = rng.choice((1, 1, 2, 2, 3))
        if T == 3:
            branchings = [2, 2, 2]
            window = 1
        else:
            branchings = [rng.choice((2, 3)) for _ in range(T)]
            window = rng.choice((1, 2))
        tree = random_tree(rng, T, branchings)
        kernels = random_kernels(rng, tree)
        model = FrictionlessIntegerModel(
            tree, round(rng.uniform(0.5, 1.5), 3), make_utility("exp"),
            rng.uniform(0.5, 1.5), window)
        work = count_adapted(tree, model) * kernels.n_selections() * tree.n_leaves
        if work <= work_cap:
            return tree, kernels, model


def random_stopping_instance(rng, work_cap=400_000):
    while True:
        T = rng.choice((1, 2, 2, 3))
        tree = random_tree(rng, T)
        kernels = random_kernels(rng, tree)
        payoffs = [[round(rng.uniform(0.0, 2.0), 3) for _ in range(tree.n_nodes(t))]
                   for t in range(T + 1)]
        model = StoppingModel(tree, payoffs)
        work = count_adapted(tree, model) * kernels.n_selections() * tree.n_leaves
        if work <= work_cap:
            return tree, kernels, model


def singleton_kernels(rng, tree):
    vectors = [[[random_prob_vector(rng, tree.branching(t))]
                for _ in range(tree.n_nodes(t))] for t in range(tree.T)]
    return AmbiguityKernel(tree, vectors)


def enlarged_kernels(rng, kernels):
    """Same tree, every node keeps its vectors plus possibly extra ones."""
    tree = kernels.tree
    vectors = []
    for t in range(tree.T):
        row = []
        for node in range(tree.n_nodes(t)):
            vecs = [list(v) for v in kernels.at(t, node)]
            if rng.random() < 0.6:
                vecs.append(random_prob_vector(rng, tree.branching(t)))
            row.append(vecs)
        vectors.append(row)
    return AmbiguityKernel(tree, vectors)


def classical_dp(tree, prob_vectors, model):
    """Single-prior reference: plain max-expectation prefix recursion.

    prob_vectors[t][node] is the one transition law of each node.
    """
    def go(t, node, prefix):
        if t == tree.T:
            return model.value(tree.path(tree.T, node), prefix)
        best = NEG_INF
        for a in model.feasible_actions(t, prefix):
            vec = prob_vectors[t][node]
            acc = 0.0
            dead = False
            for j in range(tree.branching(t)):
                p = vec[j]
                if p == 0.0:
                    continue
                v = go(t + 1, tree.child(t, node, j), prefix + (a,))
                if v == NEG_INF:
                    dead = True
                    break
                acc += p * v
            if dead:
                continue
            if acc > best:
                best = acc
        return best

    return go(0, 0, ())
