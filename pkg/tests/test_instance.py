import json

import pytest

from gridhorizon.instance import (ERROR, WARNING, CandidateCorridor, InstanceParseError,
                                  InstanceValidationError, dumps_instance, load_instance,
                                  loads_instance, save_instance, validate)
from gridhorizon.reference import reference_instance
from gridhorizon.scenarios import STUDIES


@pytest.fixture(scope="module")
def ref():
    return reference_instance()


def errors(inst):
    return [d for d in validate(inst) if d.severity == ERROR]


def test_reference_shape(ref):
    assert len(ref.nodes) == 9
    assert ref.horizon_years == 10
    assert ref.economics.construction_time == 3
    assert validate(ref) == []
    assert {c.arc for c in ref.candidate_corridors} >= {("4", "7"), ("2", "6")}
    assert {c.arc for c in ref.existing_cables if c.replaceable} == {("2", "4"), ("4", "6"), ("6", "8")}
    assert ref.slack_node == "1"


def test_node5_demand_crosses_local_capacity_in_year6(ref):
    local = sum(g.capacity[0] for g in ref.generators if g.node == "5")
    local += sum(w.capacity * w.availability[0] for w in ref.plants if w.node == "5")
    assert ref.demand("5", 1, 6) > local
    assert all(ref.demand("5", 1, a) <= local for a in range(1, 6))


def test_node8_demand_crosses_cable_capacity_in_year6(ref):
    cap = sum(c.capacity for c in ref.existing_cables if "8" in c.arc)
    assert ref.demand("8", 1, 6) > cap
    assert all(ref.demand("8", 1, a) <= cap for a in range(1, 6))


def test_node9_never_exceeds_incident_cables(ref):
    cap = sum(c.capacity for c in ref.existing_cables if "9" in c.arc)
    assert all(ref.demand("9", 1, a) <= cap for a in ref.years)


def test_studies_validate():
    for name, make in STUDIES.items():
        assert errors(make()) == [], name


def test_round_trip(tmp_path, ref):
    path = tmp_path / "ref.json"
    save_instance(ref, path)
    back = load_instance(path)
    assert back == ref
    assert dumps_instance(back) == dumps_instance(ref)


def test_corridor_duplicating_cable(ref):
    bad = ref.replace(candidate_corridors=ref.candidate_corridors + (CandidateCorridor("2", "4", 0.001),))
    errs = errors(bad)
    assert len(errs) == 1
    assert "2-4" in errs[0].render() and "duplicates an existing cable" in errs[0].render()


def test_no_nodes(ref):
    errs = errors(ref.replace(nodes=(), generators=(), plants=(), existing_cables=(),
                              candidate_corridors=(), slack_node="1"))
    assert any(d.message == "no nodes" for d in errs)


def test_maintenance_on_fixed_cable_rejected(ref):
    from dataclasses import replace
    cables = list(ref.existing_cables)
    cables[0] = replace(cables[0], maintenance_cost=(1.0,) * 10)
    errs = errors(ref.replace(existing_cables=tuple(cables)))
    assert errs and "never be charged" in errs[0].message


def test_disconnected_demand_warning(ref):
    cables = tuple(c for c in ref.existing_cables if c.arc != ("8", "9"))
    diags = validate(ref.replace(existing_cables=cables))
    assert [d.severity for d in diags] == [WARNING]
    assert "disconnected demand" in diags[0].render()
    assert diags[0].render().startswith("WARNING node 9:")


def test_diagnostics_order_stable(ref):
    from dataclasses import replace
    bad = ref.replace(economics=replace(ref.economics, interest_rate=1.5, learning_coefficient=-1))
    assert [d.render() for d in validate(bad)] == [d.render() for d in validate(bad)]
    assert len(validate(bad)) == 2


def test_parse_error_has_context(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"schema": "gridhorizon-instance/1",\n "nodes": [}\n')
    with pytest.raises(InstanceParseError, match="line 2"):
        load_instance(path)


def test_field_error_names_path(ref):
    data = json.loads(dumps_instance(ref))
    del data["existing_cables"][0]["E_bar"]
    with pytest.raises(InstanceParseError, match="E_bar"):
        loads_instance(json.dumps(data))


def test_wrong_schema(ref):
    data = json.loads(dumps_instance(ref))
    data["schema"] = "other/2"
    with pytest.raises(InstanceParseError):
        loads_instance(json.dumps(data))


def test_invalid_instance_raises_on_load(ref):
    data = json.loads(dumps_instance(ref))
    data["economics"]["r"] = 2.0
    with pytest.raises(InstanceValidationError) as info:
        loads_instance(json.dumps(data))
    assert any("interest_rate" in d.message for d in info.value.diagnostics)
