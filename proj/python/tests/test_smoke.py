import math

import pytest

import paracube


def test_rule_point_counts():
    assert paracube.build_rule(5).f_eval == 93
    assert paracube.build_rule(8).f_eval == 401
    assert paracube.build_rule(5).degree == [7, 5, 3, 3, 3]


def test_plan_examples():
    assert paracube.make_plan(32, 2)["g"] == 4
    p = paracube.make_plan(1e8, 8)
    assert (p["g"], p["m"], p["p"]) == (9, 43046721, 2)


def test_pagani_registry_f5():
    ref, method, _ = paracube.reference("f5", 5)
    assert method == "separable-analytic"
    r = paracube.pagani("f5", 5, rel_tol=1e-3, workers=1)
    assert r.converged
    assert abs(r.estimate - ref) <= r.errorest


def test_pagani_python_callable():
    r = paracube.pagani(lambda x: x[0] * x[1], 2, rel_tol=1e-6, workers=2)
    assert r.converged
    assert r.estimate == pytest.approx(0.25, rel=1e-10)


def test_mcubes_deterministic():
    a = paracube.mcubes("sum", 5, n=1e5, iterations=3, seed=7, workers=1)
    b = paracube.mcubes("sum", 5, n=1e5, iterations=3, seed=7, workers=2)
    assert a.estimate == b.estimate
    assert abs(a.estimate - 2.5) <= 4 * a.errorest


def test_mcubes_callable():
    r = paracube.mcubes(lambda x: math.exp(-x[0]), 1, n=1e4, iterations=3, seed=3)
    assert abs(r.estimate - (1 - math.exp(-1))) <= 4 * r.errorest


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        paracube.pagani("nope", 3)
    with pytest.raises(ValueError):
        paracube.build_rule(13)
    with pytest.raises(ValueError):
        paracube.make_plan(4, 2)
