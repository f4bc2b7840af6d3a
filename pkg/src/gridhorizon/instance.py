"""Planning-instance types, JSON ingestion and structural validation.

Instance files are JSON documents tagged ``"schema": "gridhorizon-instance/1"``.
Field names follow the model's symbols in ASCII (``D``, ``G_cap``, ``E_bar``,
``E_maint``, ``N_bar`` ...).  Years are 1-based in the model and stored as
0-based list positions in the file.
"""
from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

SCHEMA = "gridhorizon-instance/1"
DEFAULT_ANGLE_BOUND = 0.5236

ERROR = "ERROR"
WARNING = "WARNING"


class InstanceParseError(ValueError):
    pass


class InstanceValidationError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.render() for d in diagnostics if d.severity == ERROR))


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    entity: str
    message: str

    def render(self) -> str:
        return f"{self.severity} {self.entity}: {self.message}"


@dataclass(frozen=True)
class Node:
    id: str
    demand: tuple[tuple[float, ...], ...]  # [year][timestep], MW


@dataclass(frozen=True)
class ConventionalGenerator:
    id: str
    node: str
    capacity: tuple[float, ...]  # per timestep, MW
    op_cost: float


@dataclass(frozen=True)
class RenewablePlant:
    id: str
    node: str
    capacity: float
    availability: tuple[float, ...]  # per timestep, fraction


@dataclass(frozen=True)
class ExistingCable:
    src: str
    dst: str
    capacity: float
    reactance: float
    residual_life: float
    maintenance_cost: tuple[float, ...]  # per year
    replaceable: bool = False

    @property
    def arc(self) -> tuple[str, str]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class CandidateCorridor:
    src: str
    dst: str
    reactance: float

    @property
    def arc(self) -> tuple[str, str]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class CableType:
    id: str
    capacity: float
    cost: float
    life: float
    is_dismantle: bool = False


@dataclass(frozen=True)
class EconomicParams:
    interest_rate: float
    learning_coefficient: float
    construction_time: int


@dataclass(frozen=True)
class PlanningInstance:
    nodes: tuple[Node, ...]
    generators: tuple[ConventionalGenerator, ...]
    plants: tuple[RenewablePlant, ...]
    existing_cables: tuple[ExistingCable, ...]
    candidate_corridors: tuple[CandidateCorridor, ...]
    cable_types: tuple[CableType, ...]
    economics: EconomicParams
    horizon_years: int
    timesteps_per_year: int = 1
    angle_bound: float = DEFAULT_ANGLE_BOUND
    slack_node: str | None = None
    name: str = "instance"
    notes: str = field(default="", compare=False)

    def __post_init__(self):
        if self.slack_node is None and self.generators:
            big = max(self.generators, key=lambda g: (max(g.capacity, default=0.0), -_order(g.id)))
            object.__setattr__(self, "slack_node", big.node)
        elif self.slack_node is None and self.nodes:
            object.__setattr__(self, "slack_node", self.nodes[0].id)

    @property
    def years(self) -> range:
        return range(1, self.horizon_years + 1)

    @property
    def timesteps(self) -> range:
        return range(1, self.timesteps_per_year + 1)

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def node(self, nid: str) -> Node:
        for n in self.nodes:
            if n.id == nid:
                return n
        raise KeyError(nid)

    def cable(self, arc) -> ExistingCable:
        for c in self.existing_cables:
            if c.arc == tuple(arc):
                return c
        raise KeyError(arc)

    def cable_type(self, cid: str) -> CableType:
        for c in self.cable_types:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def demand(self, nid: str, t: int, a: int) -> float:
        return self.node(nid).demand[a - 1][t - 1]

    def replace(self, **changes) -> "PlanningInstance":
        return replace(self, **changes)


def _order(s: str):
    try:
        return int(s)
    except ValueError:
        return 0


# -- validation ---------------------------------------------------------------


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def validate(instance: PlanningInstance) -> list[Diagnostic]:
    """All invariant violations of ``instance``, in a fixed order."""
    out: list[Diagnostic] = []

    def err(entity, msg):
        out.append(Diagnostic(ERROR, entity, msg))

    def warn(entity, msg):
        out.append(Diagnostic(WARNING, entity, msg))

    A, T = instance.horizon_years, instance.timesteps_per_year
    if not instance.nodes:
        err("instance", "no nodes")
    if A < 1:
        err("instance", f"horizon_years must be >= 1, got {A}")
    if T < 1:
        err("instance", f"timesteps_per_year must be >= 1, got {T}")
    if not (_finite(instance.angle_bound) and instance.angle_bound > 0):
        err("instance", f"angle_bound must be positive, got {instance.angle_bound}")

    ids = set()
    for n in instance.nodes:
        if n.id in ids:
            err(f"node {n.id}", "duplicate node id")
        ids.add(n.id)
        if len(n.demand) != A or any(len(row) != T for row in n.demand):
            err(f"node {n.id}", f"demand table must be {A} years x {T} timesteps")
            continue
        for a, row in enumerate(n.demand, 1):
            for t, v in enumerate(row, 1):
                if not (_finite(v) and v >= 0):
                    err(f"node {n.id}", f"demand at year {a} timestep {t} must be finite and >= 0")
    if instance.nodes and instance.slack_node not in ids:
        err("instance", f"slack node {instance.slack_node!r} is not a node")

    gids = set()
    for g in instance.generators:
        ent = f"generator {g.id}"
        if g.id in gids:
            err(ent, "duplicate generator id")
        gids.add(g.id)
        if g.node not in ids:
            err(ent, f"unknown node {g.node!r}")
        if len(g.capacity) != T:
            err(ent, f"capacity must list {T} timestep values")
        elif any(not (_finite(v) and v >= 0) for v in g.capacity):
            err(ent, "capacity must be >= 0")
        if not (_finite(g.op_cost) and g.op_cost >= 0):
            err(ent, "op_cost must be >= 0")

    wids = set()
    for w in instance.plants:
        ent = f"plant {w.id}"
        if w.id in wids:
            err(ent, "duplicate plant id")
        wids.add(w.id)
        if w.node not in ids:
            err(ent, f"unknown node {w.node!r}")
        if not (_finite(w.capacity) and w.capacity >= 0):
            err(ent, "capacity must be >= 0")
        if len(w.availability) != T:
            err(ent, f"availability must list {T} timestep values")
        elif any(not (_finite(v) and 0 <= v <= 1) for v in w.availability):
            err(ent, "availability must lie in [0, 1]")

    pairs = set()
    for c in instance.existing_cables:
        ent = f"cable {c.src}-{c.dst}"
        key = frozenset((c.src, c.dst))
        if c.src == c.dst:
            err(ent, "self loop")
        if key in pairs:
            err(ent, "duplicate cable on the same node pair")
        pairs.add(key)
        for nid in (c.src, c.dst):
            if nid not in ids:
                err(ent, f"unknown node {nid!r}")
        if not (_finite(c.capacity) and c.capacity > 0):
            err(ent, "capacity must be > 0")
        if not (_finite(c.reactance) and c.reactance > 0):
            err(ent, "reactance must be > 0")
        if not (_finite(c.residual_life) and c.residual_life >= 1):
            err(ent, "residual_life must be >= 1")
        if len(c.maintenance_cost) != A:
            err(ent, f"maintenance_cost must list {A} yearly values")
        elif any(not (_finite(v) and v >= 0) for v in c.maintenance_cost):
            err(ent, "maintenance_cost entries must be >= 0")
        elif not c.replaceable and any(v > 0 for v in c.maintenance_cost):
            err(ent, "maintenance cost on a non-replaceable cable would never be charged")

    cpairs = set()
    for k in instance.candidate_corridors:
        ent = f"corridor {k.src}-{k.dst}"
        key = frozenset((k.src, k.dst))
        if k.src == k.dst:
            err(ent, "self loop")
        if key in pairs:
            err(ent, "candidate corridor duplicates an existing cable")
        if key in cpairs:
            err(ent, "duplicate candidate corridor")
        cpairs.add(key)
        for nid in (k.src, k.dst):
            if nid not in ids:
                err(ent, f"unknown node {nid!r}")
        if not (_finite(k.reactance) and k.reactance > 0):
            err(ent, "reactance must be > 0")

    tids = set()
    for ct in instance.cable_types:
        ent = f"cable type {ct.id}"
        if ct.id in tids:
            err(ent, "duplicate cable type id")
        tids.add(ct.id)
        if ct.is_dismantle:
            if ct.capacity != 0:
                err(ent, "dismantle type must have zero capacity")
            if not (_finite(ct.cost) and ct.cost >= 0):
                err(ent, "dismantle cost must be >= 0")
            if not (_finite(ct.life) and ct.life >= 1):
                err(ent, "life must be >= 1")
        else:
            if not (_finite(ct.capacity) and ct.capacity > 0):
                err(ent, "capacity must be > 0")
            if not (_finite(ct.cost) and ct.cost > 0):
                err(ent, "cost must be > 0")
            if not (_finite(ct.life) and ct.life >= 1):
                err(ent, "life must be >= 1")

    e = instance.economics
    if not (_finite(e.interest_rate) and 0 <= e.interest_rate < 1):
        err("economics", "interest_rate must lie in [0, 1)")
    if not (_finite(e.learning_coefficient) and 0 <= e.learning_coefficient <= 1):
        err("economics", "learning_coefficient must lie in [0, 1]")
    if not (isinstance(e.construction_time, int) and 0 <= e.construction_time < max(A, 1)):
        err("economics", "construction_time must be an integer in [0, horizon_years)")

    if not any(d.severity == ERROR for d in out) and instance.nodes:
        adj: dict[str, set[str]] = {n: set() for n in ids}
        for c in instance.existing_cables:
            adj[c.src].add(c.dst)
            adj[c.dst].add(c.src)
        seen = {instance.slack_node}
        queue = deque([instance.slack_node])
        while queue:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        for n in instance.nodes:
            if n.id not in seen and any(v > 0 for row in n.demand for v in row):
                warn(f"node {n.id}", "disconnected demand: not reachable over existing cables")
    return out


def check(instance: PlanningInstance) -> PlanningInstance:
    """Raise :class:`InstanceValidationError` if ``instance`` has errors."""
    diags = validate(instance)
    if any(d.severity == ERROR for d in diags):
        raise InstanceValidationError(diags)
    return instance


# -- JSON ---------------------------------------------------------------------


def to_dict(instance: PlanningInstance) -> dict[str, Any]:
    e = instance.economics
    return {
        "schema": SCHEMA,
        "name": instance.name,
        "notes": instance.notes,
        "horizon_years": instance.horizon_years,
        "timesteps_per_year": instance.timesteps_per_year,
        "angle_bound": instance.angle_bound,
        "slack_node": instance.slack_node,
        "economics": {"r": e.interest_rate, "L": e.learning_coefficient, "Z": e.construction_time},
        "nodes": [{"id": n.id, "D": [list(r) for r in n.demand]} for n in instance.nodes],
        "generators": [
            {"id": g.id, "node": g.node, "G_cap": list(g.capacity), "G_op": g.op_cost}
            for g in instance.generators
        ],
        "plants": [
            {"id": w.id, "node": w.node, "W_cap": w.capacity, "W_pct": list(w.availability)}
            for w in instance.plants
        ],
        "existing_cables": [
            {"from": c.src, "to": c.dst, "E_bar": c.capacity, "beta": c.reactance,
             "N_life": float(c.residual_life), "E_maint": list(c.maintenance_cost), "X": c.replaceable}
            for c in instance.existing_cables
        ],
        "candidate_corridors": [
            {"from": k.src, "to": k.dst, "beta": k.reactance} for k in instance.candidate_corridors
        ],
        "cable_types": [
            {"id": t.id, "N_bar": t.capacity, "N_cost": t.cost, "N_life": float(t.life),
             "dismantle": t.is_dismantle}
            for t in instance.cable_types
        ],
    }


class _Reader:
    def __init__(self, data, path="$"):
        self.data = data
        self.path = path

    def get(self, key, kind=None, default=...):
        if not isinstance(self.data, dict):
            raise InstanceParseError(f"{self.path}: expected an object")
        if key not in self.data:
            if default is ...:
                raise InstanceParseError(f"{self.path}.{key}: missing field")
            return default
        val = self.data[key]
        where = f"{self.path}.{key}"
        if kind == "num":
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise InstanceParseError(f"{where}: expected a number, got {val!r}")
            return float(val)
        if kind == "int":
            if isinstance(val, bool) or not isinstance(val, int):
                raise InstanceParseError(f"{where}: expected an integer, got {val!r}")
            return val
        if kind == "str":
            if isinstance(val, (int, float)) and not isinstance(val, bool):
                return str(val)
            if not isinstance(val, str):
                raise InstanceParseError(f"{where}: expected a string, got {val!r}")
            return val
        if kind == "bool":
            if not isinstance(val, bool):
                raise InstanceParseError(f"{where}: expected true/false, got {val!r}")
            return val
        if kind == "nums":
            if not isinstance(val, list) or any(
                    isinstance(v, bool) or not isinstance(v, (int, float)) for v in val):
                raise InstanceParseError(f"{where}: expected a list of numbers")
            return tuple(float(v) for v in val)
        if kind == "list":
            if not isinstance(val, list):
                raise InstanceParseError(f"{where}: expected a list")
            return [_Reader(v, f"{where}[{i}]") for i, v in enumerate(val)]
        if kind == "obj":
            return _Reader(val, where)
        return val


def from_dict(data: dict[str, Any]) -> PlanningInstance:
    r = _Reader(data)
    schema = r.get("schema", "str")
    if schema != SCHEMA:
        raise InstanceParseError(f"$.schema: expected {SCHEMA!r}, got {schema!r}")
    econ = r.get("economics", "obj")
    nodes = []
    for nr in r.get("nodes", "list"):
        table = nr.get("D", "list")
        nodes.append(Node(nr.get("id", "str"), tuple(_nums(row) for row in table)))
    return PlanningInstance(
        nodes=tuple(nodes),
        generators=tuple(
            ConventionalGenerator(g.get("id", "str"), g.get("node", "str"),
                                  g.get("G_cap", "nums"), g.get("G_op", "num"))
            for g in r.get("generators", "list", [])
        ),
        plants=tuple(
            RenewablePlant(w.get("id", "str"), w.get("node", "str"),
                           w.get("W_cap", "num"), w.get("W_pct", "nums"))
            for w in r.get("plants", "list", [])
        ),
        existing_cables=tuple(
            ExistingCable(c.get("from", "str"), c.get("to", "str"), c.get("E_bar", "num"),
                          c.get("beta", "num"), c.get("N_life", "num"),
                          c.get("E_maint", "nums"), c.get("X", "bool", False))
            for c in r.get("existing_cables", "list", [])
        ),
        candidate_corridors=tuple(
            CandidateCorridor(k.get("from", "str"), k.get("to", "str"), k.get("beta", "num"))
            for k in r.get("candidate_corridors", "list", [])
        ),
        cable_types=tuple(
            CableType(t.get("id", "str"), t.get("N_bar", "num"), t.get("N_cost", "num"),
                      t.get("N_life", "num"), t.get("dismantle", "bool", False))
            for t in r.get("cable_types", "list", [])
        ),
        economics=EconomicParams(econ.get("r", "num"), econ.get("L", "num"), econ.get("Z", "int")),
        horizon_years=r.get("horizon_years", "int"),
        timesteps_per_year=r.get("timesteps_per_year", "int", 1),
        angle_bound=r.get("angle_bound", "num", DEFAULT_ANGLE_BOUND),
        slack_node=None if data.get("slack_node") is None else r.get("slack_node", "str"),
        name=r.get("name", "str", "instance"),
        notes=r.get("notes", "str", ""),
    )


def _nums(reader: _Reader) -> tuple[float, ...]:
    val = reader.data
    if not isinstance(val, list) or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in val):
        raise InstanceParseError(f"{reader.path}: expected a list of numbers")
    return tuple(float(v) for v in val)


def loads_instance(text: str, validate_: bool = True) -> PlanningInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    inst = from_dict(data)
    return check(inst) if validate_ else inst


def load_instance(path) -> PlanningInstance:
    """Read, parse and validate an instance file."""
    return loads_instance(Path(path).read_text())


def dumps_instance(instance: PlanningInstance) -> str:
    return json.dumps(to_dict(instance), indent=1) + "\n"


def save_instance(instance: PlanningInstance, path) -> None:
    Path(path).write_text(dumps_instance(instance))
