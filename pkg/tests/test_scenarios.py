import json
from dataclasses import replace

import pytest

from gridhorizon.cli import main
from gridhorizon.instance import load_instance, save_instance
from gridhorizon.plan import InvestmentPlan
from gridhorizon.render import RenderError, plan_dot, render
from gridhorizon.scenarios import learning_study
from gridhorizon.suite import small_instance
from gridhorizon.sweep import (LEARNING, SweepError, SweepSpec, apply, base_instance,
                               detect_threshold, describe, fingerprint, load_spec, run_sweep,
                               spec_to_dict)

import helpers


# -- sweeps ------------------------------------------------------------------------------


def test_fingerprint_is_order_free():
    plan = helpers.study("learning", 0.01).plan
    shuffled = replace(plan, decisions=list(reversed(plan.decisions)))
    assert fingerprint(shuffled) == fingerprint(plan)
    assert fingerprint(plan) == (("2-4", "restructure", "big", 3), ("4-6", "restructure", "big", 1),
                                 ("6-8", "restructure", "big", 2))
    assert describe(fingerprint(plan)).startswith("restructure 4-6 big Y1")
    assert describe(()) == "(no decisions)" and describe(None) == "(no plan)"


@pytest.mark.parametrize("kw,msg", [
    (dict(parameter="interest", grid=[0.1]), "unknown sweep parameter"),
    (dict(parameter=LEARNING), "non-empty grid"),
    (dict(parameter=LEARNING, grid=[0.2, 0.1]), "sorted"),
    (dict(parameter=LEARNING, range=(0.2, 0.1)), "lo < hi"),
    (dict(parameter="maintenance", grid=[1.0]), "needs an arc"),
])
def test_spec_validation(kw, msg):
    with pytest.raises(SweepError, match=msg):
        SweepSpec(**kw)


def test_spec_file_round_trip(tmp_path):
    spec = SweepSpec(LEARNING, grid=[0.0, 0.01], range=(0.0, 0.02), base="learning", width=0.01)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec_to_dict(spec)))
    assert load_spec(path) == spec
    path.write_text("{\n  nope")
    with pytest.raises(SweepError, match="line 2"):
        load_spec(path)


def test_apply_sets_the_parameter():
    base = base_instance({"study": "maintenance", "args": {"learning": 0.0}})
    assert apply(SweepSpec(LEARNING, grid=[0.1]), base, 0.07).economics.learning_coefficient == 0.07
    spec = SweepSpec("maintenance", grid=[1.0], arc="2-4")
    before = base.cable(("2", "4")).maintenance_cost
    after = apply(spec, base, 0.5).cable(("2", "4")).maintenance_cost
    assert after == pytest.approx([0.5 * m for m in before])
    with pytest.raises(SweepError, match="cannot resolve"):
        base_instance("no-such-study")


def test_no_flip_is_reported():
    spec = SweepSpec(LEARNING, range=(0.02, 0.05), base="learning", width=0.01)
    with pytest.raises(SweepError, match="no flip"):
        detect_threshold(spec)


def test_learning_flip_interval():
    spec = SweepSpec(LEARNING, range=(0.0, 0.01), base="learning", width=0.0025)
    ts = detect_threshold(spec)
    # the stagger forms in two steps: 2-4 slips to Y2 first, then the full Y1/Y2/Y3 pattern
    assert len(ts) == 2
    assert all(0.0 <= t.lo < t.hi <= 0.01 and t.width <= 0.0025 + 1e-12 for t in ts)
    assert ts[0].after == ts[1].before
    assert len({e[3] for e in ts[0].before}) == 1 and len({e[3] for e in ts[-1].after}) == 3


@pytest.fixture(scope="module")
def five_points():
    return run_sweep(SweepSpec(LEARNING, grid=[0.0, 0.01, 0.02, 0.03, 0.04], base="learning",
                               width=1.0))


def test_sweep_points_and_csv(five_points):
    res = five_points
    assert [p.value for p in res.points] == [0.0, 0.01, 0.02, 0.03, 0.04]
    assert all(p.solved and p.verified for p in res.points)
    assert res.monotone("decreasing") == []
    text = render(res, "csv")
    assert sum(1 for line in text.splitlines() if line.startswith("point,")) == 5
    assert render(res, "csv") == text
    assert "0.01" in render(res, "text")


# -- rendering ---------------------------------------------------------------------------


def test_dot_labels_and_styles():
    s = helpers.study("learning", 0.01)
    dot = render(s.plan, "dot", s.instance)
    line = next(ln for ln in dot.splitlines() if '"2" -> "4"' in ln)
    assert 'label="Y3"' in line and 'color="red"' in line and 'style="bold"' in line
    assert render(s.plan, "dot", s.instance) == dot


def test_empty_plan_renders_base_network():
    inst = learning_study(0.0)
    empty = InvestmentPlan(inst.name, 3, [])
    dot = plan_dot(empty, inst)
    edges = [ln for ln in dot.splitlines() if "->" in ln]
    assert len(edges) == len(inst.existing_cables)
    assert all('color="gray40"' in e for e in edges)


def test_plan_csv_totals():
    s = helpers.study("maintenance", 0.01)
    rows = render(s.plan, "csv", s.instance).splitlines()
    assert rows[0].startswith("row,year,arc")
    total = [r for r in rows if r.startswith("cost,all,") and r.endswith(tuple("0123456789"))
             and ",total," in r]
    assert total and float(total[0].split(",")[-1]) == pytest.approx(s.plan.objective, rel=1e-6)


def test_unknown_format():
    with pytest.raises(RenderError, match="unknown format"):
        render(helpers.study("learning", 0.01).plan, "svg")


# -- command line ----------------------------------------------------------------------------


def test_cli_reference_emit(tmp_path, capsys):
    path = tmp_path / "ref.json"
    assert main(["reference", "--emit", str(path)]) == 0
    assert load_instance(path).name == "reference-9-node"
    assert main(["reference", "--emit", str(tmp_path / "l.json"), "--study", "learning"]) == 0


def test_cli_solve_verify_and_tamper(tmp_path, capsys):
    inst_path = tmp_path / "inst.json"
    save_instance(learning_study(0.01), inst_path)
    out = tmp_path / "run"
    assert main(["solve", str(inst_path), "--out", str(out), "--dump-lp"]) == 0
    for name in ("model.lp", "report.json", "plan.json", "plan.dot", "plan.csv", "plan.txt"):
        assert (out / name).exists(), name
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "optimal" and report["verification"]["ok"]
    assert main(["verify", str(inst_path), str(out / "plan.json")]) == 0
    data = json.loads((out / "plan.json").read_text())
    data["objective"] += 10.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["verify", str(inst_path), str(bad)]) == 4
    assert "cost" in capsys.readouterr().out


def test_cli_oracle(tmp_path, capsys):
    path = tmp_path / "small.json"
    save_instance(small_instance(7002), path)
    assert main(["oracle", str(path), "--out", str(tmp_path / "p.json")]) == 0
    assert (tmp_path / "p.json").exists()
    assert main(["oracle", "reference"]) == 3


def test_cli_invalid_instance(tmp_path, capsys):
    path = tmp_path / "inst.json"
    save_instance(learning_study(0.0), path)
    data = json.loads(path.read_text())
    data["economics"]["r"] = -0.5
    path.write_text(json.dumps(data))
    assert main(["solve", str(path)]) == 4
    assert main(["solve", str(tmp_path / "missing.json")]) == 4


def test_cli_infeasible(tmp_path, capsys):
    inst = learning_study(0.0)
    nodes = tuple(replace(n, demand=tuple((v[0] * 50,) for v in n.demand)) if n.id == "8" else n
                  for n in inst.nodes)
    path = tmp_path / "inf.json"
    save_instance(inst.replace(nodes=nodes), path)
    assert main(["solve", str(path)]) == 2


def test_cli_limits(capsys):
    assert main(["solve", "learning", "--node-limit", "2"]) == 3
    assert main(["solve", "reference", "--time-limit", "1"]) == 3


def test_cli_sweep(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(spec_to_dict(SweepSpec(LEARNING, grid=[0.0, 0.01], base="learning",
                                                      width=1.0))))
    assert main(["sweep", str(spec), "--out", str(tmp_path / "sw")]) == 0
    data = json.loads((tmp_path / "sw" / "sweep.json").read_text())
    assert len(data["points"]) == 2
    spec.write_text(json.dumps({"schema": "gridhorizon-sweep/1", "parameter": "nope", "grid": [1]}))
    assert main(["sweep", str(spec)]) == 4
