import math
import re
from dataclasses import replace

import numpy as np
import pytest

from gridhorizon import bnb
from gridhorizon.builder import build, complete_directions
from gridhorizon.plan import DISMANTLE, RESTRUCTURE, PlanError, extract_plan
from gridhorizon.scenarios import dismantle_study, learning_study, with_replaceable

import helpers

LEARNING_0 = 25406.6896699621
LEARNING_1 = 25379.72277326242


def dispatch_only():
    inst = with_replaceable(learning_study(0.0), [])
    cables = tuple(replace(c, capacity=300.0) if c.arc in {("2", "4"), ("4", "6"), ("6", "8"), ("8", "9"), ("7", "8")}
                   else c for c in inst.existing_cables)
    return inst.replace(existing_cables=cables)


def test_gap_formula():
    assert bnb.gap_of(110.0, 100.0) == pytest.approx(10 / 110)
    assert bnb.gap_of(0.5, 0.0) == 0.5
    assert bnb.gap_of(math.inf, 3.0) == math.inf


def test_dispatch_only_one_node():
    s = helpers.solve(dispatch_only())
    assert s.report.status == bnb.STATUS_OPTIMAL
    assert s.report.nodes_explored == 1
    assert s.plan.decisions == []
    assert s.verdict.ok


def test_infeasible_demand():
    inst = learning_study(0.0)
    nodes = tuple(replace(n, demand=tuple((v[0] * 50,) for v in n.demand)) if n.id == "8" else n
                  for n in inst.nodes)
    s = helpers.solve(inst.replace(nodes=nodes))
    assert s.report.status == bnb.STATUS_INFEASIBLE
    assert s.plan is None and not s.report.has_solution


@pytest.mark.parametrize("L,expected", [(0.0, LEARNING_0), (0.01, LEARNING_1)])
def test_learning_study_optimum(L, expected):
    s = helpers.study("learning", L)
    r = s.report
    assert r.status == bnb.STATUS_OPTIMAL
    assert r.incumbent_objective == pytest.approx(expected, rel=1e-6)
    assert r.best_bound <= r.incumbent_objective + 1e-9 * abs(r.incumbent_objective)
    assert r.gap <= 1e-6
    x = r.assignment
    assert max(min(abs(x[v]), abs(1 - x[v])) for v in s.model.binaries()) <= 1e-6
    assert s.model.violations(x, tol=1e-6) == []


def test_parallel_matches_deterministic():
    inst = learning_study(0.01)
    det = helpers.study("learning", 0.01)
    par = helpers.solve(inst, bnb.BnbParams(deterministic=False, workers=3))
    assert par.report.incumbent_objective == pytest.approx(det.report.incumbent_objective, rel=1e-9)
    assert par.plan.fingerprint() == det.plan.fingerprint()


def test_deterministic_runs_repeat():
    a = helpers.solve(learning_study(0.01))
    b = helpers.study("learning", 0.01)
    assert a.report.nodes_explored == b.report.nodes_explored
    assert a.plan.fingerprint() == b.plan.fingerprint()


def test_bound_monotone_and_progress_lines():
    lines = []
    model, cat = build(learning_study(0.01))
    bnb.solve(model, bnb.BnbParams(log_interval=1),
              completion=lambda x: complete_directions(cat, x), progress=lines.append)
    pat = re.compile(r"^node=(\d+) bound=(\S+) incumbent=(\S+) gap=(\S+)$")
    bounds = []
    for line in lines:
        m = pat.match(line)
        assert m, line
        bounds.append(float(m.group(2)))
    assert len(bounds) > 10
    assert all(b2 >= b1 - 1e-9 for b1, b2 in zip(bounds, bounds[1:]))


def test_node_limit_reports_limit_status():
    model, cat = build(learning_study(0.01))
    r = bnb.solve(model, bnb.BnbParams(node_limit=3), completion=lambda x: complete_directions(cat, x))
    assert r.status in (bnb.STATUS_FEASIBLE, bnb.STATUS_LIMIT)
    assert r.nodes_explored <= 4
    if r.has_solution:
        assert r.best_bound <= r.incumbent_objective


def test_incumbent_sequence_improves():
    r = helpers.study("learning", 0.01).report
    objs = [i.objective for i in r.incumbents]
    assert objs and all(b <= a + 1e-6 for a, b in zip(objs, objs[1:]))
    assert objs[-1] == r.incumbent_objective


def test_accept_hook_can_veto():
    model, cat = build(learning_study(0.0))
    seen = []

    def never(x):
        seen.append(1)
        return False

    r = bnb.solve(model, bnb.BnbParams(node_limit=200), completion=lambda x: complete_directions(cat, x),
                  accept=never)
    assert seen and not r.has_solution and len(r.rejected) == len(seen)


# -- plan extraction ----------------------------------------------------------------------------


def _assignment(inst, chosen):
    model, cat = build(inst)
    x = np.zeros(model.num_vars)
    for key in chosen:
        x[(cat.k if key in cat.k else cat.y)[key]] = 1.0
    return x, cat


def test_extract_restructure_in_service_year():
    inst = learning_study(0.0)
    x, cat = _assignment(inst, [("2", "4", "big", 1)])
    plan = extract_plan(x, cat, inst)
    [d] = plan.decisions
    assert (d.arc, d.kind, d.cable_type, d.decision_year, d.in_service_year) == \
        (("2", "4"), RESTRUCTURE, "big", 1, 4)


def test_extract_empty_and_dismantle():
    inst = dismantle_study(0.05)
    x, cat = _assignment(inst, [])
    assert extract_plan(x, cat, inst).decisions == []
    x, cat = _assignment(inst, [("2", "4", "dismantle", 2)])
    [d] = extract_plan(x, cat, inst).decisions
    assert d.kind == DISMANTLE and d.label() == "2-4 dismantle dismantle Y2"


def test_extract_rejects_fractional():
    inst = learning_study(0.0)
    x, cat = _assignment(inst, [])
    x[cat.k["2", "4", "big", 3]] = 0.4
    with pytest.raises(PlanError, match="fractional"):
        extract_plan(x, cat, inst)
