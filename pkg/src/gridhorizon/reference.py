"""Built-in 9-node benchmark and the study variants derived from it.

All numbers are synthesized for this repository.  They are chosen so that

* node 1 hosts the large, cheap conventional generator (and is the slack);
* node 7 hosts a second cheap unit (G7), so a new 4-7 corridor is a real
  alternative to restructuring 2-4;
* node 5 has wind plus a small, expensive generator, and its demand exceeds
  that local capacity from year 6;
* node 8's demand exceeds the capacity of its connected cables from year 6;
* node 9 has a renewable plant and almost flat demand that never exceeds
  the capacity of its incident cables;
* the corridor 2-4, 4-6, 6-8 is undersized for the demand from year 6 on.

Units: power in MW, money in thousands, reactance in rad/MW so that the flow
on an arc is the angle difference divided by its reactance.
"""
from __future__ import annotations

from .instance import (
    CableType,
    CandidateCorridor,
    ConventionalGenerator,
    EconomicParams,
    ExistingCable,
    Node,
    PlanningInstance,
    RenewablePlant,
)

HORIZON = 10

# demand per node, years 1..10
DEMAND = {
    "1": [10] * HORIZON,
    "2": [20] * HORIZON,
    "3": [20] * HORIZON,
    "4": [0] * HORIZON,
    "5": [36, 38, 40, 42, 42, 57, 59, 61, 63, 65],
    "6": [0] * HORIZON,
    "7": [25] * HORIZON,
    "8": [48, 50, 52, 54, 54, 152, 156, 160, 164, 168],
    "9": [20, 20, 20, 21, 21, 21, 21, 22, 22, 22],
}

# (from, to, capacity, reactance, replaceable)
CABLES = [
    ("1", "2", 250.0, 0.001, False),
    ("1", "3", 250.0, 0.001, False),
    ("2", "4", 60.0, 0.0004, True),
    ("4", "6", 60.0, 0.0004, True),
    ("6", "8", 60.0, 0.0004, True),
    ("3", "5", 200.0, 0.0006, False),
    ("5", "7", 200.0, 0.0006, False),
    ("7", "8", 55.75, 0.003, False),
    ("8", "9", 30.0, 0.001, False),
]

CORRIDORS = [("4", "7"), ("2", "6")]

CORRIDOR_REACTANCE = 0.002
RESIDUAL_LIFE = 10
BIG_COST = 20000.0
BIG_CAPACITY = 120.0
SMALL_CAPACITY = 40.0
CABLE_LIFE = 40
INTEREST = 0.05


def maintenance_profile(scale: float = 1.0) -> tuple[float, ...]:
    """Increasing yearly maintenance cost, normalized to 1 in the last year."""
    return tuple(scale * (0.55 + 0.05 * a) for a in range(HORIZON))


def reference_instance() -> PlanningInstance:
    nodes = tuple(Node(nid, tuple((float(d),) for d in series)) for nid, series in DEMAND.items())
    generators = (
        ConventionalGenerator("G1", "1", (400.0,), 10.0),
        ConventionalGenerator("G4", "4", (1.0,), 12.0),
        ConventionalGenerator("G5", "5", (30.0,), 14.0),
        ConventionalGenerator("G7", "7", (150.0,), 10.0),
        ConventionalGenerator("G9", "9", (20.0,), 14.0),
    )
    plants = (
        RenewablePlant("W5", "5", 30.0, (0.5,)),
        RenewablePlant("W9", "9", 30.0, (0.6,)),
    )
    zero = (0.0,) * HORIZON
    cables = tuple(
        ExistingCable(i, j, cap, beta, RESIDUAL_LIFE, zero, repl)
        for i, j, cap, beta, repl in CABLES
    )
    corridors = tuple(CandidateCorridor(i, j, CORRIDOR_REACTANCE) for i, j in CORRIDORS)
    types = (
        CableType("big", BIG_CAPACITY, BIG_COST, CABLE_LIFE),
        CableType("small", SMALL_CAPACITY, 0.6 * BIG_COST, CABLE_LIFE),
        CableType("dismantle", 0.0, 0.05 * 0.6 * BIG_COST, CABLE_LIFE, is_dismantle=True),
    )
    return PlanningInstance(
        nodes=nodes,
        generators=generators,
        plants=plants,
        existing_cables=cables,
        candidate_corridors=corridors,
        cable_types=types,
        economics=EconomicParams(INTEREST, 0.0, 3),
        horizon_years=HORIZON,
        timesteps_per_year=1,
        slack_node="1",
        name="reference-9-node",
        notes="Synthesized 9-node benchmark; numbers are repository-defined.",
    )
