import itertools
import random

import pytest

from gops import IpModel, Limits, emit_lp, solve_branch_and_bound
from gops.errors import InstanceError


def exhaustive_optimum(model):
    """Objective over all 2^n assignments; None when infeasible."""
    n = len(model.variables)
    best = None
    for bits in itertools.product((0, 1), repeat=n):
        ok = True
        for c in model.constraints:
            lhs = sum(co * bits[i] for i, co in c.coeffs)
            if c.sense == "<=" and lhs > c.rhs:
                ok = False
                break
            if c.sense == ">=" and lhs < c.rhs:
                ok = False
                break
        if not ok:
            continue
        value = model.constant + sum(co * bits[i] for i, co in model.objective.items())
        if best is None:
            best = value
        elif model.sense == "max":
            best = max(best, value)
        else:
            best = min(best, value)
    return best


def random_model(rng, n_vars=None):
    n = n_vars if n_vars is not None else rng.randint(1, 10)
    model = IpModel(sense=rng.choice(("min", "max")))
    for i in range(n):
        v = model.add_variable(f"x{i}")
        if rng.random() < 0.8:
            model.objective[v] = rng.randint(-5, 5)
    model.constant = rng.randint(-3, 3)
    for j in range(rng.randint(0, 5)):
        coeffs = {i: rng.randint(-4, 4) for i in rng.sample(range(n), rng.randint(1, n))}
        coeffs = {i: c for i, c in coeffs.items() if c}
        if not coeffs:
            continue
        model.add_constraint(coeffs, rng.choice(("<=", ">=")), rng.randint(-4, 6), f"c{j}")
    return model


def test_unconstrained_max_all_ones():
    model = IpModel(sense="max")
    for i in range(3):
        v = model.add_variable(f"x{i}")
        model.objective[v] = 1.0
    result = solve_branch_and_bound(model)
    assert result.status == "optimal"
    assert result.objective_value == 3.0
    assert result.values == {"x0": 1, "x1": 1, "x2": 1}


def test_contradictory_bounds_infeasible():
    model = IpModel(sense="min")
    v = model.add_variable("x1")
    model.add_constraint({v: 1.0}, ">=", 1.0, "ge")
    model.add_constraint({v: 1.0}, "<=", 0.0, "le")
    assert solve_branch_and_bound(model).status == "infeasible"


def test_empty_model():
    model = IpModel(sense="max", constant=7.0)
    result = solve_branch_and_bound(model)
    assert result.status == "optimal"
    assert result.objective_value == 7.0
    assert result.values == {}


def test_matches_exhaustive_enumeration():
    rng = random.Random(2024)
    for _ in range(120):
        model = random_model(rng, n_vars=rng.randint(1, 11))
        got = solve_branch_and_bound(model)
        expected = exhaustive_optimum(model)
        if expected is None:
            assert got.status == "infeasible"
        else:
            assert got.status == "optimal"
            assert got.objective_value == expected


def test_bound_pruning_changes_nothing():
    rng = random.Random(99)
    for _ in range(100):
        model = random_model(rng, n_vars=rng.randint(1, 8))
        fast = solve_branch_and_bound(model, use_bound=True)
        slow = solve_branch_and_bound(model, use_bound=False)
        assert fast.status == slow.status
        assert fast.objective_value == slow.objective_value
        assert fast.values == slow.values


def test_ties_break_to_lexicographically_smallest():
    # max x0 + x1 subject to x0 + x1 <= 1: optima are 01 and 10; lex-min is 01
    model = IpModel(sense="max")
    a = model.add_variable("x0")
    b = model.add_variable("x1")
    model.objective[a] = 1.0
    model.objective[b] = 1.0
    model.add_constraint({a: 1.0, b: 1.0}, "<=", 1.0, "pack")
    result = solve_branch_and_bound(model)
    assert result.values == {"x0": 0, "x1": 1}

    # flat objective: lex-min feasible assignment is all zeros
    flat = IpModel(sense="max")
    for i in range(4):
        flat.add_variable(f"x{i}")
    result = solve_branch_and_bound(flat)
    assert result.values == {f"x{i}": 0 for i in range(4)}


def test_node_limit_reached():
    model = IpModel(sense="max")
    for i in range(12):
        v = model.add_variable(f"x{i}")
        model.objective[v] = 1.0
    result = solve_branch_and_bound(model, limits=Limits(max_nodes=5))
    assert result.status == "limit_reached"


def test_validate_rejects_bad_models():
    model = IpModel(sense="max")
    model.add_variable("x")
    model.add_variable("x")
    with pytest.raises(InstanceError):
        model.validate()
    model2 = IpModel(sense="sideways")
    with pytest.raises(InstanceError):
        model2.validate()
    model3 = IpModel(sense="min")
    model3.add_variable("x")
    model3.add_constraint({3: 1.0}, "<=", 1.0, "c")
    with pytest.raises(InstanceError):
        model3.validate()


EMPTY_LP = """\\ binary integer program
Minimize
 obj: 0
Subject To
Binary
End
"""


def test_emit_lp_empty_golden():
    assert emit_lp(IpModel(sense="min")) == EMPTY_LP


SMALL_LP = """\\ binary integer program
Maximize
 obj: 2 X_a_0_0 + Y_g_1_0 + 0.5
Subject To
 cover_g_1_0: X_a_0_0 - Y_g_1_0 >= 0
 card: X_a_0_0 + X_a_1_0 <= 1
 budget: 0.25 X_a_0_0 + 0.75 X_a_1_0 <= 1.5
Binary
 X_a_0_0
 X_a_1_0
 Y_g_1_0
End
"""


def test_emit_lp_small_golden_and_deterministic():
    model = IpModel(sense="max", constant=0.5)
    x0 = model.add_variable("X_a_0_0")
    x1 = model.add_variable("X_a_1_0")
    y = model.add_variable("Y_g_1_0")
    model.objective[x0] = 2.0
    model.objective[y] = 1.0
    model.add_constraint({x0: 1.0, y: -1.0}, ">=", 0.0, "cover_g_1_0")
    model.add_constraint({x0: 1.0, x1: 1.0}, "<=", 1.0, "card")
    model.add_constraint({x0: 0.25, x1: 0.75}, "<=", 1.5, "budget")
    text = emit_lp(model)
    assert text == SMALL_LP
    assert emit_lp(model) == text


TWO_POINT_LP = """\\ binary integer program
Maximize
 obj: Y_g_0_0 + Y_g_1_0
Subject To
 cover_g_0_0: X_mk_0_0 - Y_g_0_0 >= 0
 cover_g_1_0: - Y_g_1_0 >= 0
 card: X_mk_0_0 + X_mk_1_0 <= 1
 budget: 0.5 X_mk_0_0 + 0.5 X_mk_1_0 <= 1
Binary
 X_mk_0_0
 X_mk_1_0
 Y_g_0_0
 Y_g_1_0
End
"""


def test_emit_lp_two_point_one_action_golden():
    # hand-checked: linking rows (selection sum >= indicator, unproducible
    # atom forced to zero), cardinality and budget packing rows
    from gops import (ActionRule, BenefitModel, BmgopInstance, CostModel,
                      GridMap, GroundAtom, Point, build_bmgop_ip)
    inst = BmgopInstance(
        grid=GridMap(1, 0), predicates=("g",), s0=frozenset(),
        actions=(ActionRule(name="mk", explicit_effects={
            Point(0, 0): frozenset({GroundAtom("g", Point(0, 0))})}),),
        cost_model=CostModel(default_cost=0.5),
        benefit_model=BenefitModel(per_predicate={"g": 1.0}),
        ics=(), k=1, budget=1.0)
    assert emit_lp(build_bmgop_ip(inst)) == TWO_POINT_LP


def test_matches_exhaustive_on_larger_models():
    # spot checks at the 15-variable edge of the exhaustive-comparison claim
    rng = random.Random(31)
    for _ in range(2):
        model = random_model(rng, n_vars=15)
        got = solve_branch_and_bound(model)
        expected = exhaustive_optimum(model)
        if expected is None:
            assert got.status == "infeasible"
        else:
            assert got.objective_value == expected


def test_emit_lp_sanitizes_names():
    model = IpModel(sense="min")
    v = model.add_variable("X a@(0,0)")
    model.objective[v] = 1.0
    text = emit_lp(model)
    assert "X_a__0_0_" in text
    assert "@" not in text.replace("\\", "")
