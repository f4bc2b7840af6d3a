import math

import numpy as np
import pytest

from gridhorizon.builder import build
from gridhorizon.instance import (CableType, CandidateCorridor, ConventionalGenerator,
                                  EconomicParams, ExistingCable, Node, PlanningInstance)
from gridhorizon.milp import fix, relax
from gridhorizon.oracle import (OracleError, count_combinations, enumerate as oracle,
                                vertex_enumeration)
from gridhorizon.plan import extract_plan
from gridhorizon.reference import reference_instance
from gridhorizon.scenarios import truncate, with_candidates, with_maintenance, with_replaceable, with_types
from gridhorizon.simplex import OPTIMAL, solve_lp
from gridhorizon.suite import small_instance
from gridhorizon.verify import verify

import helpers


def two_corridors(demand3=60.0):
    """Node 3 is served by an expensive local unit unless a corridor is built."""
    nodes = (Node("1", ((0.0,), (0.0,))), Node("2", ((10.0,), (10.0,))),
             Node("3", ((demand3 * 0.5,), (demand3,))))
    gens = (ConventionalGenerator("G1", "1", (500.0,), 10.0),
            ConventionalGenerator("G3", "3", (40.0,), 40.0))
    return PlanningInstance(
        nodes=nodes, generators=gens, plants=(),
        existing_cables=(ExistingCable("1", "2", 200.0, 0.0005, 10, (0.0, 0.0), False),),
        candidate_corridors=(CandidateCorridor("1", "3", 0.0005), CandidateCorridor("2", "3", 0.0005)),
        cable_types=(CableType("big", 100.0, 1500.0, 30),),
        economics=EconomicParams(0.05, 0.1, 0), horizon_years=2, slack_node="1", name="two-corridors")


def test_two_corridor_enumeration():
    inst = two_corridors()
    model, cat = build(inst)
    assert len(cat.decision_vars()) == 4
    assert count_combinations(cat, model) == 9
    res = oracle(model, cat)
    # building nothing leaves year-2 demand at node 3 above the local unit
    assert res.combinations_evaluated == 9 and res.combinations_feasible == 8
    assert res.feasible
    s = helpers.solve(inst)
    assert res.objective == pytest.approx(s.report.incumbent_objective, rel=1e-6)
    plan = extract_plan(res.assignment, cat, inst)
    assert verify(inst, plan).ok
    assert plan.fingerprint() == s.plan.fingerprint()


def _spot(inst, chosen):
    model, cat = build(inst)
    assign = {vid: int(key in chosen) for key, vid in cat.y.items()}
    sol = solve_lp(relax(fix(model, assign)))
    return sol.objective if sol.status == OPTIMAL else math.inf


@pytest.mark.parametrize("chosen", [{("1", "3", "big", 1)}, {("2", "3", "big", 2)},
                                    {("1", "3", "big", 2), ("2", "3", "big", 1)}])
def test_oracle_beats_spot_plans(chosen):
    inst = two_corridors()
    model, cat = build(inst)
    assert oracle(model, cat).objective <= _spot(inst, chosen) + 1e-9


def test_all_combinations_infeasible():
    inst = two_corridors(demand3=400.0)
    model, cat = build(inst)
    res = oracle(model, cat)
    assert res.status == "infeasible" and res.combinations_feasible == 0
    assert res.combinations_evaluated == 9
    assert helpers.solve(inst).report.status == "infeasible"


def test_limit():
    model, cat = build(two_corridors())
    with pytest.raises(OracleError, match="exceed"):
        oracle(model, cat, limit=3)


def test_parallel_enumeration_same_result():
    inst = small_instance(7002)
    model, cat = build(inst)
    a, b = oracle(model, cat), oracle(model, cat, workers=4)
    assert a.objective == b.objective
    assert np.array_equal(a.assignment, b.assignment)


@pytest.mark.parametrize("seed", [7004, 7013, 7014, 7015, 7019, 7022])
def test_same_plan_as_bnb(seed):
    s = helpers.small(seed)
    res = oracle(s.model, s.catalog)
    assert res.objective == pytest.approx(s.report.incumbent_objective, rel=1e-6)
    assert extract_plan(res.assignment, s.catalog, s.instance).fingerprint() == s.plan.fingerprint()


@pytest.mark.parametrize("maint,labels", [(1000.0, []), (5000.0, ["2-4 restructure big Y1"])])
def test_truncated_reference(maint, labels):
    inst = with_types(with_candidates(with_replaceable(truncate(reference_instance(), 4), ["2-4"]),
                                      ["4-7"]), ["big"])
    inst = with_maintenance(inst, "2-4", 1.0, [maint] * 4)
    s = helpers.solve(inst)
    res = oracle(s.model, s.catalog)
    # 2-4 and 4-7 each: build in one of 4 years or never
    assert res.combinations_evaluated == 25
    assert res.objective == pytest.approx(s.report.incumbent_objective, rel=1e-6)
    assert s.labels() == labels


def test_vertex_enumeration_small():
    # min -x - y s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 5
    res = vertex_enumeration([-1, -1], [[1, 2], [3, 1]], [-np.inf, -np.inf], [4, 6], [0, 0], [5, 5])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-2.8)
    assert np.allclose(res.x, [1.6, 1.2])
    assert res.vertices >= 4


def test_vertex_enumeration_infeasible_and_unbounded_columns():
    res = vertex_enumeration([1, 1], [[1, 1]], [5], [np.inf], [0, 0], [1, 1])
    assert res.status == "infeasible"
    with pytest.raises(OracleError, match="finite column bounds"):
        vertex_enumeration([1], [[1]], [0], [1], [0], [np.inf])
