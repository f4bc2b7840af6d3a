"""Instance transforms used by the studies and sweeps.

Each function returns a new instance; inputs are never modified.
"""
from __future__ import annotations

from dataclasses import replace

from .instance import PlanningInstance
from .reference import maintenance_profile, reference_instance

CORRIDOR = (("2", "4"), ("4", "6"), ("6", "8"))


def _arc(arc) -> tuple[str, str]:
    if isinstance(arc, str):
        i, j = arc.split("-")
        return (i, j)
    return tuple(arc)


def with_learning(inst: PlanningInstance, value: float) -> PlanningInstance:
    return inst.replace(economics=replace(inst.economics, learning_coefficient=float(value)))


def with_construction_time(inst: PlanningInstance, years: int) -> PlanningInstance:
    return inst.replace(economics=replace(inst.economics, construction_time=int(years)))


def truncate(inst: PlanningInstance, years: int) -> PlanningInstance:
    """The first ``years`` years of ``inst``; construction time is capped to fit."""
    if not 1 <= years <= inst.horizon_years:
        raise ValueError(f"cannot truncate a {inst.horizon_years}-year horizon to {years}")
    nodes = tuple(replace(n, demand=n.demand[:years]) for n in inst.nodes)
    cables = tuple(replace(c, maintenance_cost=c.maintenance_cost[:years])
                   for c in inst.existing_cables)
    econ = replace(inst.economics, construction_time=min(inst.economics.construction_time, years - 1))
    return inst.replace(nodes=nodes, existing_cables=cables, economics=econ, horizon_years=years)


def with_maintenance(inst: PlanningInstance, arc, scale: float, profile=None) -> PlanningInstance:
    """Put a maintenance cost on ``arc`` and mark it replaceable."""
    arc = _arc(arc)
    values = tuple(profile) if profile is not None else maintenance_profile(scale)
    if len(values) != inst.horizon_years:
        raise ValueError("maintenance profile must cover every horizon year")
    cables = []
    found = False
    for c in inst.existing_cables:
        if c.arc == arc:
            c = replace(c, maintenance_cost=values, replaceable=True)
            found = True
        cables.append(c)
    if not found:
        raise KeyError(f"no existing cable {arc[0]}-{arc[1]}")
    return inst.replace(existing_cables=tuple(cables))


def scale_maintenance(inst: PlanningInstance, arc, scale: float) -> PlanningInstance:
    """Multiply the maintenance profile already on ``arc``."""
    arc = _arc(arc)
    base = inst.cable(arc).maintenance_cost
    return with_maintenance(inst, arc, 1.0, [scale * v for v in base])


def with_replaceable(inst: PlanningInstance, arcs) -> PlanningInstance:
    """Exactly the listed arcs are replaceable; others lose their maintenance."""
    keep = {_arc(a) for a in arcs}
    zero = (0.0,) * inst.horizon_years
    cables = tuple(
        replace(c, replaceable=True) if c.arc in keep
        else replace(c, replaceable=False, maintenance_cost=zero)
        for c in inst.existing_cables
    )
    return inst.replace(existing_cables=cables)


def with_candidates(inst: PlanningInstance, arcs, pool=None) -> PlanningInstance:
    """Keep only the listed candidate corridors (taken from ``pool`` if given)."""
    pool = pool if pool is not None else reference_instance().candidate_corridors
    want = [_arc(a) for a in arcs]
    by_arc = {c.arc: c for c in list(pool) + list(inst.candidate_corridors)}
    return inst.replace(candidate_corridors=tuple(by_arc[a] for a in want))


def with_types(inst: PlanningInstance, ids, pool=None) -> PlanningInstance:
    pool = pool if pool is not None else reference_instance().cable_types
    by_id = {c.id: c for c in list(pool) + list(inst.cable_types)}
    return inst.replace(cable_types=tuple(by_id[i] for i in ids))


def with_cost_ratio(inst: PlanningInstance, ratio: float) -> PlanningInstance:
    """Set the small cable's cost to ``ratio`` times the big cable's."""
    big = inst.cable_type("big")
    types = tuple(replace(c, cost=ratio * big.cost) if c.id == "small" else c
                  for c in inst.cable_types)
    return inst.replace(cable_types=types)


def with_dismantle_ratio(inst: PlanningInstance, ratio: float) -> PlanningInstance:
    """Set the dismantling cost to ``ratio`` times the small cable's cost."""
    small = inst.cable_type("small")
    types = tuple(replace(c, cost=ratio * small.cost) if c.is_dismantle else c
                  for c in inst.cable_types)
    return inst.replace(cable_types=types)


# -- the studies ------------------------------------------------------------


def learning_study(learning: float = 0.0) -> PlanningInstance:
    """Restructuring only: big cable type, no candidate corridors."""
    inst = reference_instance()
    inst = with_types(inst, ["big"])
    inst = with_candidates(inst, [])
    inst = with_replaceable(inst, CORRIDOR)
    return with_learning(inst, learning).replace(name="learning-study")


MAINTENANCE_SCALES = {"2-4": 2000.0, "4-6": 900.0}


def maintenance_study(learning: float = 0.01, scales=None) -> PlanningInstance:
    """Learning study with maintenance cost on some corridor cables.

    ``scales`` maps arc -> multiplier of :func:`maintenance_profile`; the
    default puts the heavier profile on 2-4 and a lighter one on 4-6.
    """
    scales = MAINTENANCE_SCALES if scales is None else scales
    inst = learning_study(learning)
    for arc, scale in scales.items():
        inst = with_maintenance(inst, arc, scale)
    return inst.replace(name="maintenance-study")


def cost_ratio_study(ratio: float = 0.6, learning: float = 0.01) -> PlanningInstance:
    """Restructuring the corridor against a new installation on 4-7."""
    inst = reference_instance()
    inst = with_types(inst, ["big", "small"])
    inst = with_candidates(inst, ["4-7"])
    inst = with_replaceable(inst, CORRIDOR)
    inst = with_cost_ratio(inst, ratio)
    return with_learning(inst, learning).replace(name="cost-ratio-study")


def dismantle_study(ratio: float = 0.05, learning: float = 0.01,
                    maintained=("2-4",), scale: float = 2000.0) -> PlanningInstance:
    """Restructuring, dismantling and installation on 2-6 with maintained cables.

    ``maintained`` is a list of arcs sharing ``scale``, or a mapping
    arc -> scale.
    """
    if not isinstance(maintained, dict):
        maintained = {a: scale for a in maintained}
    inst = reference_instance()
    inst = with_candidates(inst, ["2-6"])
    inst = with_replaceable(inst, CORRIDOR + tuple(_arc(a) for a in maintained))
    for arc, sc in maintained.items():
        inst = with_maintenance(inst, arc, sc)
    inst = with_dismantle_ratio(inst, ratio)
    return with_learning(inst, learning).replace(name="dismantle-study")


STUDIES = {
    "learning": learning_study,
    "maintenance": maintenance_study,
    "cost-ratio": cost_ratio_study,
    "dismantle": dismantle_study,
}
