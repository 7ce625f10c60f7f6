import math

import pytest

from robustdp import (GridConditionViolation, GridDomain, StoppingModel,
                      action_key, build_tree, check_grid_condition, flatten,
                      horizon_numeric, make_utility, unflatten)
from robustdp.extreal import NEG_INF
from robustdp.integrand import NotStabilizedError


def test_grid_condition_basics():
    spacing = check_grid_condition([[(0.0,), (1.0,), (3.0,)]])
    assert spacing == [1.0]
    # duplicates collapse instead of producing a zero gap
    spacing = check_grid_condition([[(0.0,), (0.0,), (2.0,)]])
    assert spacing == [2.0]
    # single distinct point: spacing is +inf
    assert check_grid_condition([[(0.0,), (0.0,)]]) == [math.inf]
    with pytest.raises(GridConditionViolation):
        check_grid_condition([[(0.0,), (1e-13,)]])
    with pytest.raises(GridConditionViolation):
        check_grid_condition([[(0.0,), (1.0,)]], declared_spacing=[0.5])
    check_grid_condition([[(0.0,), (1.0,)]], declared_spacing=[1.0])


def test_grid_domain_requires_zero():
    GridDomain([[(0.0,), (1.0,)]])
    with pytest.raises(GridConditionViolation):
        GridDomain([[(1.0,), (2.0,)]])


def test_flatten_roundtrip_and_key_order():
    strat = ((1.0, 2.0), (-1.0, 0.0))
    assert unflatten(flatten(strat), 2) == strat
    # smallest norm first, lexicographic among equal norms
    acts = [(1.0,), (-1.0,), (0.0,), (2.0,)]
    assert sorted(acts, key=action_key) == [(0.0,), (-1.0,), (1.0,), (2.0,)]


def test_utilities():
    u = make_utility("exp")
    assert u(0.0) == 0.0
    assert u(1.0) == pytest.approx(1.0 - math.exp(-1.0))
    assert u(-1000.0) == NEG_INF
    assert u.upper_bound == 1.0

    lg = make_utility({"name": "capped_log", "cap": 2.0})
    assert lg(0.0) == NEG_INF and lg(-1.0) == NEG_INF
    assert lg(math.e ** 3) == 2.0

    pw = make_utility({"name": "capped_power", "cap": 5.0, "exponent": 0.5})
    assert pw(4.0) == 2.0 and pw(1e9) == 5.0
    with pytest.raises(ValueError):
        make_utility({"name": "capped_power", "cap": 5.0, "exponent": 1.5})
    with pytest.raises(ValueError):
        make_utility({"name": "exp", "bogus": 1})
    with pytest.raises(ValueError):
        make_utility("nope")


def _tiny_stopping():
    tree = build_tree([[1.0, 2.0]])
    return tree, StoppingModel(tree, [[0.5], [1.5, 0.25]])


def test_horizon_numeric_bounded_model():
    tree, model = _tiny_stopping()
    path = tree.path(1, 0)
    assert horizon_numeric(model, path, (0.0,)) == 0.0
    assert horizon_numeric(model, path, (1.0,)) == NEG_INF
    assert horizon_numeric(model, path, (-2.0,)) == NEG_INF


def test_horizon_numeric_not_stabilized():
    tree, model = _tiny_stopping()
    path = tree.path(1, 0)
    # a schedule too short to see two agreeing values
    with pytest.raises(NotStabilizedError):
        horizon_numeric(model, path, (0.0,), schedule=(16, 32))
