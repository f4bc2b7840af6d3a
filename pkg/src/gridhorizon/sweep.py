"""One-parameter sweeps over the studies and flip-threshold detection.

A sweep solves the base instance at each grid value of one parameter and
compares the resulting decision schedules (fingerprints).  Wherever two
neighbouring values disagree, the interval between them is bisected until it
is narrower than ``width``; the result is reported as an interval.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import bnb
from .builder import build, complete_directions
from .instance import PlanningInstance, load_instance
from .plan import InvestmentPlan, extract_plan
from .reference import maintenance_profile, reference_instance
from .scenarios import (STUDIES, with_cost_ratio, with_dismantle_ratio, with_learning,
                        with_maintenance)
from .verify import verify

SWEEP_SCHEMA = "gridhorizon-sweep/1"

LEARNING = "learning"
MAINTENANCE = "maintenance"
COST_RATIO = "cost-ratio"
DISMANTLE_RATIO = "dismantle-ratio"
PARAMETERS = (LEARNING, MAINTENANCE, COST_RATIO, DISMANTLE_RATIO)

DEFAULT_WIDTH = 0.005


class SweepError(ValueError):
    pass


def fingerprint(plan: InvestmentPlan) -> tuple:
    """Canonical decision schedule: sorted ``(arc, kind, type, year)`` tuples."""
    return tuple(sorted((f"{d.arc[0]}-{d.arc[1]}", d.kind, d.cable_type, d.decision_year)
                        for d in plan.decisions))


def describe(fp) -> str:
    if fp is None:
        return "(no plan)"
    if not fp:
        return "(no decisions)"
    return "; ".join(f"{kind} {arc} {ctype} Y{year}" for arc, kind, ctype, year in
                     sorted(fp, key=lambda e: (e[3], e[0])))


@dataclass
class SweepSpec:
    parameter: str
    grid: list[float] = field(default_factory=list)
    range: tuple[float, float] | None = None
    base: object = "reference"          # study name, {"study":..., "args":...}, path or instance
    arc: str | None = None              # maintenance sweeps only
    width: float = DEFAULT_WIDTH
    gap: float = 1e-6
    time_limit: float | None = None
    node_limit: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise SweepError(f"unknown sweep parameter {self.parameter!r}")
        self.grid = [float(g) for g in self.grid]
        if self.range is not None:
            lo, hi = (float(v) for v in self.range)
            if not lo < hi:
                raise SweepError("bisection range must have lo < hi")
            self.range = (lo, hi)
        if not self.grid and self.range is None:
            raise SweepError("sweep needs a non-empty grid or a bisection range")
        if self.grid != sorted(self.grid):
            raise SweepError("sweep grid must be sorted")
        if self.parameter == MAINTENANCE and not self.arc:
            raise SweepError("a maintenance sweep needs an arc")
        if self.width <= 0:
            raise SweepError("threshold width must be positive")

    def values(self) -> list[float]:
        vals = list(self.grid)
        if self.range is not None:
            vals = sorted(set(vals) | set(self.range))
        return vals


@dataclass
class SweepPoint:
    value: float
    fingerprint: tuple | None
    objective: float
    status: str
    verified: bool | None = None
    plan: InvestmentPlan | None = field(default=None, repr=False, compare=False)
    wall_time: float = 0.0
    nodes: int = 0

    @property
    def solved(self) -> bool:
        return self.status == bnb.STATUS_OPTIMAL


@dataclass
class Threshold:
    lo: float
    hi: float
    before: tuple
    after: tuple

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass
class SweepResult:
    spec: SweepSpec
    points: list[SweepPoint]
    thresholds: list[Threshold]
    suppressed: list[tuple[float, float]] = field(default_factory=list)

    def objectives(self) -> list[tuple[float, float]]:
        return [(p.value, p.objective) for p in self.points if p.solved]

    def monotone(self, direction: str, slack: float = 1e-8) -> list[tuple[float, float]]:
        """Adjacent solved pairs breaking ``non-increasing``/``non-decreasing`` order."""
        pts = self.objectives()
        bad = []
        for (v0, o0), (v1, o1) in zip(pts, pts[1:]):
            tol = slack * max(1.0, abs(o0), abs(o1))
            if direction == "non-increasing" and o1 > o0 + tol:
                bad.append((v0, v1))
            if direction == "non-decreasing" and o1 < o0 - tol:
                bad.append((v0, v1))
        return bad


# -- instances ---------------------------------------------------------------------


def base_instance(base) -> PlanningInstance:
    if isinstance(base, PlanningInstance):
        return base
    if isinstance(base, dict):
        study = base.get("study")
        if study not in STUDIES:
            raise SweepError(f"unknown study {study!r}")
        return STUDIES[study](**base.get("args", {}))
    if base == "reference":
        return reference_instance()
    if base in STUDIES:
        return STUDIES[base]()
    path = Path(str(base))
    if path.exists():
        return load_instance(path)
    raise SweepError(f"cannot resolve sweep base {base!r}")


def apply(spec: SweepSpec, base: PlanningInstance, value: float) -> PlanningInstance:
    """``base`` with the swept parameter set to ``value``.

    For maintenance the value multiplies the arc's maintenance profile in the
    base instance, or the reference profile if the base arc has none.
    """
    if spec.parameter == LEARNING:
        return with_learning(base, value)
    if spec.parameter == COST_RATIO:
        return with_cost_ratio(base, value)
    if spec.parameter == DISMANTLE_RATIO:
        return with_dismantle_ratio(base, value)
    arc = tuple(spec.arc.split("-"))
    profile = base.cable(arc).maintenance_cost
    if not any(profile):
        profile = maintenance_profile(1.0)
    return with_maintenance(base, arc, 1.0, [value * m for m in profile])


# -- solving ---------------------------------------------------------------------------


def solve_instance(instance: PlanningInstance, params: bnb.BnbParams | None = None):
    """Build, solve with every incumbent verified, and extract the plan.

    Returns ``(report, plan_or_None, verdict_or_None)``.
    """
    model, cat = build(instance)

    def accept(x):
        return verify(instance, extract_plan(x, cat, instance))

    report = bnb.solve(model, params or bnb.BnbParams(),
                       completion=lambda x: complete_directions(cat, x), accept=accept)
    if not report.has_solution:
        return report, None, None
    plan = extract_plan(report, cat, instance)
    verdict = verify(instance, plan)
    report.verification = verdict
    return report, plan, verdict


def _solve_point(spec: SweepSpec, base: PlanningInstance, value: float) -> SweepPoint:
    params = bnb.BnbParams(gap_tol=spec.gap, time_limit=spec.time_limit,
                           node_limit=spec.node_limit)
    inst = apply(spec, base, value)
    report, plan, verdict = solve_instance(inst, params)
    fp = fingerprint(plan) if plan is not None else None
    return SweepPoint(value, fp, report.incumbent_objective, report.status,
                      None if verdict is None else verdict.ok, plan, report.wall_time,
                      report.nodes_explored)


class _Runner:
    def __init__(self, spec: SweepSpec):
        self.spec = spec
        self.base = base_instance(spec.base)
        self.cache: dict[float, SweepPoint] = {}

    def point(self, value: float) -> SweepPoint:
        value = float(value)
        if value not in self.cache:
            self.cache[value] = _solve_point(self.spec, self.base, value)
        return self.cache[value]

    def many(self, values):
        todo = [v for v in values if float(v) not in self.cache]
        if self.spec.workers > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self.spec.workers) as pool:
                for v, p in zip(todo, pool.map(lambda v: _solve_point(self.spec, self.base, v), todo)):
                    self.cache[float(v)] = p
        return [self.point(v) for v in values]

    def refine(self, lo: SweepPoint, hi: SweepPoint, out: list, suppressed: list):
        if not (lo.solved and hi.solved):
            suppressed.append((lo.value, hi.value))
            return
        if lo.fingerprint == hi.fingerprint:
            return
        if hi.value - lo.value <= self.spec.width * (1 + 1e-9):
            out.append(Threshold(lo.value, hi.value, lo.fingerprint, hi.fingerprint))
            return
        mid = self.point(_midpoint(lo.value, hi.value))
        self.refine(lo, mid, out, suppressed)
        self.refine(mid, hi, out, suppressed)


def _midpoint(lo: float, hi: float) -> float:
    # rounded so cached values and reports stay readable
    mid = 0.5 * (lo + hi)
    r = round(mid, 10)
    return r if lo < r < hi else mid


def run_sweep(spec: SweepSpec) -> SweepResult:
    runner = _Runner(spec)
    grid = runner.many(spec.values())
    thresholds, suppressed = [], []
    for lo, hi in zip(grid, grid[1:]):
        runner.refine(lo, hi, thresholds, suppressed)
    points = [runner.cache[v] for v in sorted(runner.cache)]
    return SweepResult(spec, points, thresholds, suppressed)


def detect_threshold(spec: SweepSpec) -> list[Threshold]:
    """Bisect ``spec.range`` down to ``spec.width``.

    More than one interval in the result means the flip is not monotone in
    the parameter.
    """
    if spec.range is None:
        raise SweepError("threshold detection needs a bisection range")
    runner = _Runner(spec)
    lo, hi = runner.many(list(spec.range))
    for p in (lo, hi):
        if not p.solved:
            raise SweepError(f"endpoint {p.value} not solved to optimality ({p.status})")
    if lo.fingerprint == hi.fingerprint:
        raise SweepError("no flip: endpoint fingerprints are identical")
    out, suppressed = [], []
    runner.refine(lo, hi, out, suppressed)
    if suppressed:
        raise SweepError(f"points in {suppressed} were not solved to optimality")
    return out


# -- spec files ----------------------------------------------------------------------------


def spec_to_dict(spec: SweepSpec) -> dict:
    out = {"schema": SWEEP_SCHEMA, "parameter": spec.parameter, "grid": list(spec.grid),
           "base": spec.base if not isinstance(spec.base, PlanningInstance) else spec.base.name,
           "width": spec.width, "gap": spec.gap}
    if spec.range is not None:
        out["range"] = list(spec.range)
    for key in ("arc", "time_limit", "node_limit"):
        if getattr(spec, key) is not None:
            out[key] = getattr(spec, key)
    if spec.workers != 1:
        out["workers"] = spec.workers
    return out


def spec_from_dict(data: dict, relative_to: Path | None = None) -> SweepSpec:
    if data.get("schema") != SWEEP_SCHEMA:
        raise SweepError(f"expected schema {SWEEP_SCHEMA!r}, got {data.get('schema')!r}")
    base = data.get("base", "reference")
    if isinstance(base, str) and base not in STUDIES and base != "reference" and relative_to:
        cand = relative_to / base
        if cand.exists():
            base = str(cand)
    try:
        return SweepSpec(
            parameter=data["parameter"], grid=data.get("grid", []),
            range=tuple(data["range"]) if data.get("range") is not None else None,
            base=base, arc=data.get("arc"), width=float(data.get("width", DEFAULT_WIDTH)),
            gap=float(data.get("gap", 1e-6)), time_limit=data.get("time_limit"),
            node_limit=data.get("node_limit"), workers=int(data.get("workers", 1)))
    except (KeyError, TypeError) as exc:
        raise SweepError(f"malformed sweep spec: {exc}") from exc


def load_spec(path) -> SweepSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SweepError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return spec_from_dict(data, path.parent)


def result_to_dict(result: SweepResult) -> dict:
    def num(x):
        return x if math.isfinite(x) else None
    return {
        "spec": spec_to_dict(result.spec),
        "points": [{"value": p.value, "status": p.status, "objective": num(p.objective),
                    "verified": p.verified,
                    "fingerprint": [list(e) for e in p.fingerprint] if p.fingerprint is not None else None}
                   for p in result.points],
        "thresholds": [{"interval": [t.lo, t.hi], "before": [list(e) for e in t.before],
                        "after": [list(e) for e in t.after]} for t in result.thresholds],
        "suppressed": [list(s) for s in result.suppressed],
    }
