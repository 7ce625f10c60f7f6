import math
import random

import pytest

from robustdp import (AmbiguityKernel, ConfigurationError,
                      FrictionlessIntegerModel, LiquidationModel,
                      RochSonerModel, SemiStaticModel, StoppingModel,
                      bits_of_stopping_time, build_model, build_tree,
                      make_utility, solve, stopping_time_of_bits)
from robustdp.extreal import NEG_INF

U = make_utility("exp")


def _binomial():
    tree = build_tree([[1.5, 0.5]])
    kernels = AmbiguityKernel(tree, [[[[0.3, 0.7], [0.7, 0.3]]]])
    model = FrictionlessIntegerModel(tree, 1.0, U, 1.0, 3)
    return tree, kernels, model


def test_frictionless_values_and_window():
    tree, kernels, model = _binomial()
    up, down = tree.path(1, 0), tree.path(1, 1)
    assert model.value(up, ((2.0,),)) == pytest.approx(1.0 - math.exp(-2.0))
    assert model.value(down, ((2.0,),)) == pytest.approx(1.0 - math.exp(0.0))
    assert model.value(up, ((4.0,),)) == NEG_INF  # outside the window
    assert model.value(up, ((0.5,),)) == NEG_INF  # not an integer point


def test_frictionless_binomial_worst_cases():
    tree, kernels, model = _binomial()
    root, fld, policy = solve(tree, kernels, model)
    assert root == pytest.approx(1.0 - math.exp(-1.0))
    assert policy.tree_strategy() == (((0.0,),),)
    # hand check: worst case of h = 1 and h = -1
    u_up, u_dn = U(1.5), U(0.5)
    h1 = min(0.3 * u_up + 0.7 * u_dn, 0.7 * u_up + 0.3 * u_dn)
    assert fld.phi[(0, 0, (), (1.0,))] == pytest.approx(h1)
    assert h1 < root


def test_semi_static_folds_claims_into_period_zero():
    tree = build_tree([[1.5, 0.5]])
    f = [[0.2, -0.1]]  # one claim, payoff per leaf
    model = SemiStaticModel(tree, 1.0, U, 1.0, 1, f, 1)
    assert model.d == 2
    up = tree.path(1, 0)
    # h=1 stock, g=1 claim on the up leaf: wealth = 1 + 0.5 + 0.2
    assert model.value(up, ((1.0, 1.0),)) == pytest.approx(U(1.7))
    dn = tree.path(1, 1)
    assert model.value(dn, ((1.0, 1.0),)) == pytest.approx(U(1.0 - 0.5 - 0.1))
    # claim coordinate is pinned to zero after period 0
    tree2 = build_tree([[1.5, 0.5], [1.2, 0.8]])
    model2 = SemiStaticModel(tree2, 1.0, U, 1.0, 1, [[0.1, 0.0, 0.2, -0.1]], 1)
    acts1 = model2.feasible_actions(1, (((0.0, 0.0)),))
    assert all(a[1] == 0.0 for a in acts1)


def test_stopping_model_and_bits():
    assert stopping_time_of_bits([1, 1, 0]) == 2
    assert stopping_time_of_bits([1, 1, 1]) == 3
    assert stopping_time_of_bits([0, 0, 0]) == 0
    assert bits_of_stopping_time(2, 3) == (1, 1, 0)
    with pytest.raises(ConfigurationError):
        bits_of_stopping_time(4, 3)

    tree = build_tree([[1.0, 2.0]])
    kernels = AmbiguityKernel(tree, [[[[0.3, 0.7], [0.7, 0.3]]]])
    model = StoppingModel(tree, [[1.0], [2.0, 0.0]])
    root, fld, policy = solve(tree, kernels, model)
    # stopping now yields 1; continuing is worth min(.3,.7)*2 = 0.6
    assert root == pytest.approx(1.0)
    assert policy.actions[(0, 0, ())] == (0.0,)

    model2 = StoppingModel(tree, [[0.5], [2.0, 0.0]])
    root2, _, policy2 = solve(tree, kernels, model2)
    assert root2 == pytest.approx(0.6)
    assert policy2.actions[(0, 0, ())] == (1.0,)

    # increasing 0/1 processes are off-domain
    path = tree.path(1, 0)
    m3 = StoppingModel(build_tree([[1.0, 2.0], [1.0, 2.0]]),
                       [[0.5], [1.0, 1.0], [1.0, 1.0, 1.0, 1.0]])
    p2 = m3.tree.path(2, 0)
    assert m3.value(p2, ((0.0,), (1.0,))) == NEG_INF
    assert m3.value(p2, ((0.5,), (0.0,))) == NEG_INF


def test_liquidation_feasibility_and_value():
    tree = build_tree([[1.2, 0.9], [1.3, 0.8]])
    model = LiquidationModel(tree, 2, 1.0, U, 1.0)
    assert model.feasible_actions(0, ()) == ((0.0,), (1.0,), (2.0,))
    # last trading date forces full liquidation
    assert model.feasible_actions(1, ((1.0,),)) == ((0.0,),)
    path = tree.path(2, 0)  # up, up
    # hold 1 share over the first period only: gain = 1*(1.2-1.0)
    assert model.value(path, ((1.0,), (0.0,))) == pytest.approx(U(1.2))
    # holdings cannot increase
    assert model.value(path, ((1.0,), (2.0,))) == NEG_INF
    assert model.value(path, ((2.0,), (1.0,))) == NEG_INF  # ends unliquidated


def _forward_impact(kappa, m, s0, prices, holdings, h_init):
    """Test-local forward simulation of the resilient-impact recursion."""
    ell = 0.0
    v = 0.0
    ells = []
    prev_s = s0
    prev_h = h_init
    for t, h in enumerate(holdings):
        ell_next = (1.0 - kappa) * ell + 2.0 * m[t + 1] * (h - prev_h)
        v += h * (prices[t] - prev_s)
        v -= kappa * ell * h
        v -= (m[t + 1] - m[t]) * h * h
        ells.append(ell_next)
        ell = ell_next
        prev_s = prices[t]
        prev_h = h
    return ells, v


def test_roch_soner_hand_values():
    tree = build_tree([[1.2, 0.9], [1.3, 0.8]])
    depth = [[1.0], [1.0, 1.0], [1.0] * 4]
    model = RochSonerModel(tree, 0.5, depth, 1.0, U, 2)
    path = tree.path(2, 0)
    ells, v = _forward_impact(0.5, [1.0, 1.0, 1.0], 1.0,
                              [p[0] for p in path], [1, 0], 0)
    assert ells == [2.0, -1.0]
    assert v == pytest.approx(1.2 - 1.0)  # impact terms vanish with h1 = 0 here
    assert model.value(path, ((1.0,), (0.0,))) == U(v)


def test_roch_soner_matches_forward_sim():
    rng = random.Random(99)
    tree = build_tree([[1.2, 0.9], [1.3, 0.8]])
    depth = [[rng.uniform(0.5, 2.0) for _ in range(tree.n_nodes(t))]
             for t in range(3)]
    model = RochSonerModel(tree, 0.3, depth, 1.0, U, 3)
    for _ in range(200):
        leaf = rng.randrange(tree.n_leaves)
        path = tree.path(2, leaf)
        hs = [rng.randint(-3, 3) for _ in range(2)]
        nodes = tree.nodes_on_path(leaf)
        m = [depth[t][nodes[t]] for t in range(3)]
        _, v = _forward_impact(0.3, m, 1.0, [p[0] for p in path], hs, 0)
        got = model.value(path, tuple((float(h),) for h in hs))
        assert got == U(v)


def test_build_model_dispatch_and_rejection():
    tree = build_tree([[1.5, 0.5]])
    m = build_model(tree, {"type": "frictionless", "s0": 1.0, "x0": 1.0,
                           "window": 2})
    assert m.model_tag == "frictionless"
    with pytest.raises(ConfigurationError):
        build_model(tree, {"type": "nope"})
    with pytest.raises(ConfigurationError):
        build_model(tree, {"type": "frictionless", "s0": 1.0, "x0": 1.0})
    with pytest.raises(ConfigurationError):
        build_model(tree, {"type": "frictionless", "s0": 1.0, "x0": 1.0,
                           "window": 2, "extra": True})
    with pytest.raises(ConfigurationError):
        StoppingModel(tree, [[NEG_INF], [NEG_INF, NEG_INF]])
