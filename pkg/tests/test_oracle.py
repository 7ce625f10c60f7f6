import random

import pytest

from robustdp import (BudgetError, EnumerationBudget, StoppingModel,
                      build_tree, count_adapted, enumerate_adapted, solve,
                      stopping_bruteforce, supinf_bruteforce)

from conftest import (random_frictionless_instance, random_kernels,
                      random_stopping_instance)


def test_count_matches_enumeration():
    rng = random.Random(11)
    for _ in range(5):
        tree, kernels, model = random_frictionless_instance(rng, work_cap=50_000)
        strategies = list(enumerate_adapted(tree, model))
        assert len(strategies) == count_adapted(tree, model)
        assert len(set(strategies)) == len(strategies)


def test_stopping_count_t2_binary():
    tree = build_tree([[1.0, 2.0], [1.0, 2.0]])
    model = StoppingModel(tree, [[0.0], [0.0, 0.0], [0.0] * 4])
    assert count_adapted(tree, model) == 5


def test_budget_errors_carry_exact_counts():
    rng = random.Random(12)
    tree, kernels, model = random_frictionless_instance(rng)
    n = count_adapted(tree, model)
    with pytest.raises(BudgetError) as err:
        supinf_bruteforce(tree, kernels, model,
                          EnumerationBudget(max_strategies=n - 1))
    assert err.value.kind == "strategies" and err.value.count == n
    with pytest.raises(BudgetError) as err:
        supinf_bruteforce(tree, kernels, model,
                          EnumerationBudget(max_selections=0))
    assert err.value.kind == "selections"
    assert err.value.count == kernels.n_selections()


def test_oracle_agrees_with_solver():
    rng = random.Random(13)
    for _ in range(5):
        tree, kernels, model = random_frictionless_instance(rng, work_cap=50_000)
        root, fld, policy = solve(tree, kernels, model)
        value, strategy = supinf_bruteforce(tree, kernels, model)
        assert abs(value - root) <= 1e-9


def test_stopping_bruteforce_agrees_with_solver():
    rng = random.Random(14)
    for _ in range(5):
        tree, kernels, model = random_stopping_instance(rng, work_cap=50_000)
        root, fld, policy = solve(tree, kernels, model)
        value, strategy = stopping_bruteforce(tree, kernels, model)
        assert abs(value - root) <= 1e-9
        # the winning strategy is a valid decreasing 0/1 process per path
        for leaf in range(tree.n_leaves):
            nodes = tree.nodes_on_path(leaf)
            bits = [int(strategy[t][nodes[t]][0]) for t in range(tree.T)]
            assert all(b in (0, 1) for b in bits)
            assert all(b1 >= b2 for b1, b2 in zip(bits, bits[1:]))
