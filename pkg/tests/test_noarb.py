import random

import pytest

from robustdp import (AmbiguityKernel, FrictionlessIntegerModel, StoppingModel,
                      build_tree, enumerate_selections, global_na_check,
                      horizon_dp_check, local_cone, make_utility, na_report,
                      per_measure_scan)

U = make_utility("exp")


def _binomial():
    tree = build_tree([[1.5, 0.5]])
    kernels = AmbiguityKernel(tree, [[[[0.3, 0.7], [0.7, 0.3]]]])
    model = FrictionlessIntegerModel(tree, 1.0, U, 1.0, 2)
    return tree, kernels, model


def test_na_holds_on_binomial():
    tree, kernels, model = _binomial()
    rep = global_na_check(tree, kernels, model)
    assert rep.na_holds is True and rep.witness is None
    dp = horizon_dp_check(tree, kernels, model)
    assert dp.na_holds is True
    assert na_report(tree, kernels, model).na_holds is True


def test_na_fails_with_redundant_asset():
    tree = build_tree([[[1.5, 1.5], [0.5, 0.5]]])
    kernels = AmbiguityKernel(tree, [[[[0.5, 0.5]]]])
    model = FrictionlessIntegerModel(tree, (1.0, 1.0), U, 1.0, 1)
    rep = global_na_check(tree, kernels, model)
    assert rep.na_holds is False
    flat = rep.witness[0][0]
    assert flat in ((1.0, -1.0), (-1.0, 1.0))
    assert horizon_dp_check(tree, kernels, model).na_holds is False


def test_per_measure_scan_dirac():
    tree = build_tree([[0.4, 1.8]])
    vectors = [[[[1.0, 0.0], [0.0, 1.0]]]]
    kernels = AmbiguityKernel(tree, vectors)
    model = FrictionlessIntegerModel(tree, 1.0, U, 1.0, 2)
    sels = list(enumerate_selections(kernels))
    signs = []
    for sel in sels:
        hits = per_measure_scan(tree, model, sel)
        assert hits
        signs.append(hits[0][0][0][0])
    # short under the falling Dirac, long under the rising one
    assert signs[0] < 0.0 < signs[1]
    # yet the robust market admits no arbitrage
    assert global_na_check(tree, kernels, model).na_holds is True


def test_local_cone_exact_and_surrogate():
    tree, kernels, model = _binomial()
    label, members = local_cone(tree, kernels, model, 0, 0)
    assert label == "exact"
    cone = sorted(h for h, ok in members if ok)
    assert cone == [(0.0,)]

    # one-sided Dirac kernel: every nonnegative holding is in the cone
    up_only = AmbiguityKernel(tree, [[[[1.0, 0.0]]]])
    label, members = local_cone(tree, up_only, model, 0, 0)
    cone = sorted(h for h, ok in members if ok)
    assert cone == [(0.0,), (1.0,), (2.0,)]

    stop_tree = build_tree([[1.0, 2.0]])
    stop_kern = AmbiguityKernel(stop_tree, [[[[0.5, 0.5]]]])
    stop = StoppingModel(stop_tree, [[0.5], [1.0, 0.25]])
    label, members = local_cone(stop_tree, stop_kern, stop, 0, 0)
    assert label == "surrogate"
    assert ((0.0,), True) in members
    assert ((1.0,), False) in members


def test_dp_check_agrees_on_random_instances():
    from conftest import random_frictionless_instance
    rng = random.Random(21)
    for _ in range(5):
        tree, kernels, model = random_frictionless_instance(rng, work_cap=50_000)
        rep = na_report(tree, kernels, model)
        assert rep.na_holds in (True, False)
