"""Investment plans: the decision schedule plus the dispatch that goes with it."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .builder import VariableCatalog, objective_breakdown
from .instance import PlanningInstance

PLAN_SCHEMA = "gridhorizon-plan/1"

INSTALL = "install"
RESTRUCTURE = "restructure"
DISMANTLE = "dismantle"
KINDS = (INSTALL, RESTRUCTURE, DISMANTLE)

BINARY_TOL = 1e-6


class PlanError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Decision:
    decision_year: int
    arc: tuple[str, str]
    kind: str
    cable_type: str
    in_service_year: int

    def label(self) -> str:
        return f"{self.arc[0]}-{self.arc[1]} {self.kind} {self.cable_type} Y{self.decision_year}"


@dataclass
class InvestmentPlan:
    """Decisions plus every operational quantity, keyed by model indices.

    ``flows`` holds directed flows ``(i, j, t, a)`` for both orientations of
    every arc; ``directions`` the orientation binaries ``(i, j, t, a)``.
    """

    instance_name: str
    construction_time: int
    decisions: list[Decision]
    generation: dict = field(default_factory=dict)      # (g, t, a)
    renewable: dict = field(default_factory=dict)       # (w, t, a)
    flows: dict = field(default_factory=dict)           # (i, j, t, a)
    directions: dict = field(default_factory=dict)      # (i, j, t, a)
    angles: dict = field(default_factory=dict)          # (n, t, a)
    maintenance: dict = field(default_factory=dict)     # (i, j, a)
    learning_install: dict = field(default_factory=dict)      # a -> kP
    learning_restructure: dict = field(default_factory=dict)  # a -> kR
    discount_install: dict = field(default_factory=dict)      # (i, j, c, a) -> qP
    discount_restructure: dict = field(default_factory=dict)  # (i, j, c, a) -> qR
    costs: dict = field(default_factory=dict)
    objective: float = 0.0
    discount_inside_crf: bool = True

    def by_year(self) -> dict[int, list[Decision]]:
        out: dict[int, list[Decision]] = {}
        for d in sorted(self.decisions):
            out.setdefault(d.decision_year, []).append(d)
        return out

    def fingerprint(self) -> tuple:
        from .sweep import fingerprint
        return fingerprint(self)


def extract_plan(report, catalog: VariableCatalog, instance: PlanningInstance | None = None
                 ) -> InvestmentPlan:
    """Turn a solved assignment into an :class:`InvestmentPlan`."""
    x = getattr(report, "assignment", report)
    if x is None:
        raise PlanError("report carries no assignment")
    x = np.asarray(x, dtype=float)
    inst = instance or catalog.instance
    Z = inst.economics.construction_time
    types = {c.id: c for c in inst.cable_types}

    def binary(vid, what):
        v = x[vid]
        if min(abs(v), abs(v - 1.0)) > BINARY_TOL:
            raise PlanError(f"fractional binary {what} = {v:.6g}")
        return v > 0.5

    decisions = []
    for (i, j, c, a), vid in catalog.y.items():
        if binary(vid, f"y[{i},{j},{c},{a}]"):
            decisions.append(Decision(a, (i, j), INSTALL, c, a + Z))
    for (i, j, c, a), vid in catalog.k.items():
        if binary(vid, f"k[{i},{j},{c},{a}]"):
            kind = DISMANTLE if types[c].is_dismantle else RESTRUCTURE
            decisions.append(Decision(a, (i, j), kind, c, a + Z))
    directions = {key: float(binary(vid, f"d{key}")) for key, vid in catalog.d.items()}

    def vals(mapping, strip_node=False):
        if strip_node:
            return {(k[0],) + tuple(k[2:]): float(x[v]) for k, v in mapping.items()}
        return {k: float(x[v]) for k, v in mapping.items()}

    costs = objective_breakdown(catalog, x)
    return InvestmentPlan(
        instance_name=inst.name,
        construction_time=Z,
        decisions=sorted(decisions),
        generation=vals(catalog.conv, strip_node=True),
        renewable=vals(catalog.ren, strip_node=True),
        flows=vals(catalog.p),
        directions=directions,
        angles=vals(catalog.theta),
        maintenance=vals(catalog.m),
        learning_install=vals(catalog.kP),
        learning_restructure=vals(catalog.kR),
        discount_install=vals(catalog.qP),
        discount_restructure=vals(catalog.qR),
        costs=costs,
        objective=costs["total"],
        discount_inside_crf=catalog.options.discount_inside_crf,
    )


# -- JSON ----------------------------------------------------------------------

_TABLES = ("generation", "renewable", "flows", "directions", "angles", "maintenance",
           "learning_install", "learning_restructure", "discount_install", "discount_restructure")


def _enc(key) -> str:
    key = key if isinstance(key, tuple) else (key,)
    return "|".join(str(k) for k in key)


def _dec_table(name: str, text: str):
    parts = text.split("|")
    if name in ("learning_install", "learning_restructure"):
        return int(parts[0])
    # trailing (t, a) or (a) entries are integers, leading ids are strings
    n_int = {"generation": 2, "renewable": 2, "flows": 2, "directions": 2, "angles": 2,
             "maintenance": 1, "discount_install": 1, "discount_restructure": 1}[name]
    head, tail = parts[:-n_int], parts[-n_int:]
    return tuple(head) + tuple(int(p) for p in tail)


def plan_to_dict(plan: InvestmentPlan) -> dict:
    out = {
        "schema": PLAN_SCHEMA,
        "instance": plan.instance_name,
        "construction_time": plan.construction_time,
        "objective": plan.objective,
        "discount_inside_crf": plan.discount_inside_crf,
        "costs": dict(plan.costs),
        "decisions": [
            {"arc": f"{d.arc[0]}-{d.arc[1]}", "kind": d.kind, "type": d.cable_type,
             "decided": d.decision_year, "in_service": d.in_service_year}
            for d in sorted(plan.decisions)
        ],
    }
    for name in _TABLES:
        out[name] = {_enc(k): v for k, v in getattr(plan, name).items()}
    return out


def plan_from_dict(data: dict) -> InvestmentPlan:
    if data.get("schema") != PLAN_SCHEMA:
        raise PlanError(f"expected schema {PLAN_SCHEMA!r}, got {data.get('schema')!r}")
    try:
        decisions = []
        for d in data["decisions"]:
            i, j = d["arc"].split("-")
            if d["kind"] not in KINDS:
                raise PlanError(f"unknown decision kind {d['kind']!r}")
            decisions.append(Decision(int(d["decided"]), (i, j), d["kind"], d["type"],
                                      int(d["in_service"])))
        tables = {name: {_dec_table(name, k): float(v) for k, v in data.get(name, {}).items()}
                  for name in _TABLES}
        return InvestmentPlan(
            instance_name=data["instance"],
            construction_time=int(data["construction_time"]),
            decisions=sorted(decisions),
            costs={k: float(v) for k, v in data["costs"].items()},
            objective=float(data["objective"]),
            discount_inside_crf=bool(data.get("discount_inside_crf", True)),
            **tables,
        )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, PlanError):
            raise
        raise PlanError(f"malformed plan document: {exc}") from exc


def save_plan(plan: InvestmentPlan, path) -> None:
    Path(path).write_text(json.dumps(plan_to_dict(plan), indent=1, sort_keys=True) + "\n")


def load_plan(path) -> InvestmentPlan:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return plan_from_dict(data)
