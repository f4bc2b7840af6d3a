import math

import pytest

from gridhorizon.builder import build
from gridhorizon.lpformat import LpParseError, parse_lp, write_lp
from gridhorizon.milp import BINARY, CONTINUOUS, EQ, GE, LE, MilpModel, ModelError, fix, relax
from gridhorizon.scenarios import learning_study
from gridhorizon.simplex import INFEASIBLE, OPTIMAL, solve_lp


def tiny():
    m = MilpModel(name="tiny")
    x = m.add_variable("x", BINARY, objective_coeff=-1.0)
    y = m.add_variable("y", BINARY, objective_coeff=-2.0)
    z = m.add_variable("z", CONTINUOUS, 0.0, 4.0, 0.5)
    m.add_constraint([(x, 1.0), (y, 1.0)], LE, 1.0, tag="eq15")
    m.add_constraint([(z, 1.0), (y, -3.0)], GE, 0.0, tag="eq13")
    return m


def test_variable_ids_and_bounds():
    m = tiny()
    assert [v.id for v in m.variables] == [0, 1, 2]
    assert (m.variables[0].lower, m.variables[0].upper) == (0.0, 1.0)
    big = MilpModel()
    ids = [big.add_variable(f"v{k}") for k in range(10_000)]
    assert ids == list(range(10_000))


def test_variable_errors():
    m = tiny()
    with pytest.raises(ModelError, match="duplicate"):
        m.add_variable("x")
    with pytest.raises(ModelError, match="lower"):
        m.add_variable("w", lower=2.0, upper=1.0)
    with pytest.raises(ModelError):
        m.add_variable("b", BINARY, upper=2.0)


def test_constraint_errors():
    m = tiny()
    with pytest.raises(ModelError, match="undeclared"):
        m.add_constraint([(7, 1.0)], LE, 1.0)
    with pytest.raises(ModelError, match="duplicate term"):
        m.add_constraint([(0, 1.0), (0, 2.0)], LE, 1.0)
    cid = m.add_constraint([(0, 1.0), (1, 1.0)], LE, 1.0, tag="eq18")
    assert m.constraints[cid].tag == "eq18"


@pytest.mark.parametrize("rhs,status", [(-1.0, OPTIMAL), (1.0, INFEASIBLE)])
def test_empty_row(rhs, status):
    m = MilpModel()
    m.add_variable("x", upper=1.0, objective_coeff=1.0)
    m.add_constraint([], GE, rhs)
    assert solve_lp(relax(m)).status == status


def test_relax():
    m = tiny()
    r = relax(m)
    assert r.binaries() == [] and m.binaries() == [0, 1]
    assert [(v.lower, v.upper) for v in r.variables] == [(v.lower, v.upper) for v in m.variables]
    assert [v.kind for v in relax(r).variables] == [v.kind for v in r.variables]
    cont = MilpModel()
    cont.add_variable("a", upper=3.0)
    assert [v.kind for v in relax(cont).variables] == [CONTINUOUS]


def test_fix():
    m = tiny()
    f = fix(m, {1: 1})
    assert (f.variables[1].lower, f.variables[1].upper) == (1.0, 1.0)
    assert m.variables[1].upper == 1.0 and m.variables[1].lower == 0.0
    pinned = relax(f).variables[1]
    assert pinned.kind == CONTINUOUS and pinned.lower == pinned.upper == 1.0
    with pytest.raises(ModelError, match="non-binary"):
        fix(m, {2: 1})
    with pytest.raises(ModelError, match="conflicts"):
        fix(fix(m, {0: 0}), {0: 1})


def test_relaxation_bounds_milp():
    m = tiny()
    lp = solve_lp(relax(m))
    assert lp.objective <= -2.0 + 1.5 + 1e-9


def test_violations():
    m = tiny()
    assert m.violations([0, 1, 3.0]) == []
    bad = dict(m.violations([1, 1, 0.0]))
    assert set(bad) == {0, 1}
    assert -1 in dict(m.violations([0.5, 0, 0]))


def test_lp_round_trip_tiny():
    m = tiny()
    text = write_lp(m)
    assert "\\ tag: eq15" in text
    back = parse_lp(text)
    assert write_lp(back) == text
    assert [c.tag for c in back.constraints] == ["eq15", "eq13"]
    assert back.binaries() == [0, 1]


def test_lp_round_trip_study_model():
    model, _ = build(learning_study(0.01))
    text = write_lp(model)
    back = parse_lp(text)
    assert back.num_vars == model.num_vars and back.num_rows == model.num_rows
    for a, b in zip(model.constraints, back.constraints):
        assert (a.name, a.sense, a.tag) == (b.name, b.sense, b.tag)
        assert math.isclose(a.rhs, b.rhs, rel_tol=0, abs_tol=0)
        assert sorted(a.terms) == sorted(b.terms)
    assert back.big_m_registry == model.big_m_registry
    assert write_lp(back) == text


def test_lp_parse_errors():
    with pytest.raises(LpParseError, match="line 4"):
        parse_lp("Minimize\n obj: x\nSubject To\n c1: x ? 1\nEnd\n")
    with pytest.raises(LpParseError, match="line 4"):
        parse_lp("Minimize\n obj: x\nSubject To\n c1: x + y\nEnd\n")
    with pytest.raises(LpParseError, match="before any section"):
        parse_lp("x + y <= 1\n")


def test_big_m_registry_covers_tags():
    model, _ = build(learning_study(0.0))
    for tag in ("eq9", "eq10", "eq12"):
        assert tag in model.big_m_registry and model.big_m_registry[tag] > 0
    assert set(model.tag_counts()) >= {"eq6", "eq11", "eq12", "eq13", "eq15", "eq16", "eq19", "eq20"}
    assert all(c.tag for c in model.constraints)
    assert {c.sense for c in model.constraints} <= {LE, GE, EQ}
