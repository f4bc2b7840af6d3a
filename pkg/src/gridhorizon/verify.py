"""Independent re-check of an investment plan against its instance.

Nothing here reads the built model.  Every rule is re-derived from the
instance data and the plan's decision list: which cable sits on each arc in
each year, what the DC relation requires, what maintenance and learning
discounts should be, and what the costs add up to.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .instance import PlanningInstance
from .plan import DISMANTLE, INSTALL, RESTRUCTURE, InvestmentPlan

IN_SERVICE = "in-service"
CONSTRUCTION = "construction"
ABSENT = "absent"


@dataclass(frozen=True)
class Violation:
    check: str
    indices: tuple
    magnitude: float

    def render(self) -> str:
        idx = ",".join(str(i) for i in self.indices)
        return f"{self.check} ({idx}) by {self.magnitude:.6g}"


@dataclass
class Verdict:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def checks(self) -> set[str]:
        return {v.check for v in self.violations}

    def render(self) -> str:
        if self.ok:
            return "OK no violations"
        lines = [f"FAIL {len(self.violations)} violation(s)"]
        lines += ["  " + v.render() for v in self.violations]
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "violations": [{"check": v.check, "indices": list(v.indices),
                                "magnitude": v.magnitude} for v in self.violations]}


def annuity(rate: float, life: float) -> float:
    # written out again on purpose; the builder has its own copy
    if rate == 0:
        return 1.0 / life
    growth = (1.0 + rate) ** life
    return rate * growth / (growth - 1.0)


def cable_states(instance: PlanningInstance, plan: InvestmentPlan) -> dict:
    """``(arc, year) -> (state, capacity)`` implied by the decision list."""
    Z = instance.economics.construction_time
    types = {c.id: c for c in instance.cable_types}
    first = {}
    for d in sorted(plan.decisions):
        first.setdefault(d.arc, d)
    out = {}
    for a in instance.years:
        for cab in instance.existing_cables:
            d = first.get(cab.arc) if cab.replaceable else None
            if d is None or a < d.decision_year:
                out[cab.arc, a] = (IN_SERVICE, cab.capacity)
            elif a < d.decision_year + Z:
                out[cab.arc, a] = (CONSTRUCTION, 0.0)
            else:
                cap = types[d.cable_type].capacity if d.cable_type in types else 0.0
                out[cab.arc, a] = (IN_SERVICE if cap > 0 else ABSENT, cap)
        for cor in instance.candidate_corridors:
            d = first.get(cor.arc)
            if d is None or a < d.decision_year:
                out[cor.arc, a] = (ABSENT, 0.0)
            elif a < d.decision_year + Z:
                out[cor.arc, a] = (CONSTRUCTION, 0.0)
            else:
                cap = types[d.cable_type].capacity if d.cable_type in types else 0.0
                out[cor.arc, a] = (IN_SERVICE if cap > 0 else ABSENT, cap)
    return out


def verify(instance: PlanningInstance, plan: InvestmentPlan, tol: float = 1e-6) -> Verdict:
    v = Verdict()

    def bad(check, indices, amount):
        v.violations.append(Violation(check, tuple(indices), float(amount)))

    inst = instance
    years, steps = list(inst.years), list(inst.timesteps)
    Z = inst.economics.construction_time
    L = inst.economics.learning_coefficient
    types = {c.id: c for c in inst.cable_types}
    existing = {c.arc: c for c in inst.existing_cables}
    corridors = {k.arc: k for k in inst.candidate_corridors}
    arcs = list(existing) + list(corridors)

    # -- completeness -------------------------------------------------------
    missing = []
    for a in years:
        for t in steps:
            missing += [("gen", g.id, t, a) for g in inst.generators
                        if (g.id, t, a) not in plan.generation]
            missing += [("ren", w.id, t, a) for w in inst.plants
                        if (w.id, t, a) not in plan.renewable]
            missing += [("theta", n.id, t, a) for n in inst.nodes if (n.id, t, a) not in plan.angles]
            for i, j in arcs:
                missing += [("p", x, y, t, a) for x, y in ((i, j), (j, i))
                            if (x, y, t, a) not in plan.flows]
    if missing:
        bad("incomplete", missing[0], len(missing))
        return v

    # -- decisions ------------------------------------------------------------
    per_arc: dict = {}
    for d in plan.decisions:
        per_arc.setdefault(d.arc, []).append(d)
        ctype = types.get(d.cable_type)
        where = (d.arc[0], d.arc[1], d.cable_type, d.decision_year)
        if ctype is None or d.decision_year not in inst.years:
            bad("decision", where, 1.0)
            continue
        if d.in_service_year != d.decision_year + Z:
            bad("decision", where, abs(d.in_service_year - d.decision_year - Z))
        if d.kind == INSTALL:
            ok = d.arc in corridors and not ctype.is_dismantle
        elif d.kind == RESTRUCTURE:
            ok = d.arc in existing and existing[d.arc].replaceable and not ctype.is_dismantle
        elif d.kind == DISMANTLE:
            ok = d.arc in existing and existing[d.arc].replaceable and ctype.is_dismantle
        else:
            ok = False
        if not ok:
            bad("decision", where, 1.0)
    for arc, ds in sorted(per_arc.items()):
        if len(ds) > 1:
            bad("single-choice", arc, len(ds) - 1)

    states = cable_states(inst, plan)

    # -- generators (eq6, eq7) -----------------------------------------------
    for g in inst.generators:
        for a in years:
            for t in steps:
                f = plan.generation[g.id, t, a]
                over = max(f - g.capacity[t - 1], -f)
                if over > tol:
                    bad("generator-cap", (g.id, t, a), over)
    for w in inst.plants:
        for a in years:
            for t in steps:
                f = plan.renewable[w.id, t, a]
                over = max(f - w.capacity * w.availability[t - 1], -f)
                if over > tol:
                    bad("renewable-cap", (w.id, t, a), over)

    # -- flows: capacity, outage, direction, DC relation ----------------------
    ab = inst.angle_bound
    for a in years:
        for t in steps:
            th = {n.id: plan.angles[n.id, t, a] for n in inst.nodes}
            for nid, val in th.items():
                if abs(val) > ab + tol:
                    bad("angle-bound", (nid, t, a), abs(val) - ab)
            if abs(th.get(inst.slack_node, 0.0)) > tol:
                bad("slack-angle", (inst.slack_node, t, a), abs(th[inst.slack_node]))
            for (i, j) in arcs:
                fwd, bwd = plan.flows[i, j, t, a], plan.flows[j, i, t, a]
                state, cap = states[(i, j), a]
                for x, y, f in ((i, j, fwd), (j, i, bwd)):
                    if f < -tol:
                        bad("negative-flow", (x, y, t, a), -f)
                    if f > cap + tol:
                        name = "construction-outage" if state == CONSTRUCTION else "capacity"
                        bad(name, (i, j, a) if name == "construction-outage" else (x, y, t, a),
                            f - cap)
                if fwd > tol and bwd > tol:
                    bad("direction", (i, j, t, a), min(fwd, bwd))
                d = plan.directions.get((i, j, t, a))
                if d is not None and ((d > 0.5 and bwd > tol) or (d < 0.5 and fwd > tol)):
                    bad("direction", (i, j, t, a), bwd if d > 0.5 else fwd)
                if state == IN_SERVICE:
                    beta = existing[i, j].reactance if (i, j) in existing else corridors[i, j].reactance
                    want = (th[i] - th[j]) / beta
                    gap = abs((fwd - bwd) - want)
                    if gap > tol * max(1.0, abs(want)):
                        bad("dc-flow", (i, j, t, a), gap)

    # -- nodal balance (eq11) --------------------------------------------------
    for a in years:
        for t in steps:
            for n in inst.nodes:
                supply = sum(plan.generation[g.id, t, a] for g in inst.generators if g.node == n.id)
                supply += sum(plan.renewable[w.id, t, a] for w in inst.plants if w.node == n.id)
                for (i, j) in arcs:
                    if n.id == i:
                        supply += plan.flows[j, i, t, a] - plan.flows[i, j, t, a]
                    elif n.id == j:
                        supply += plan.flows[i, j, t, a] - plan.flows[j, i, t, a]
                short = inst.demand(n.id, t, a) - supply
                if short > tol:
                    bad("balance", (n.id, t, a), short)

    # -- maintenance switching (eq16) ----------------------------------------------
    for cab in inst.existing_cables:
        if not cab.replaceable:
            continue
        ds = per_arc.get(cab.arc, [])
        start = min((d.decision_year for d in ds), default=None)
        for a in years:
            want = 0.0 if start is not None and a >= start else cab.maintenance_cost[a - 1]
            got = plan.maintenance.get((cab.arc[0], cab.arc[1], a))
            if got is None:
                bad("maintenance", (cab.arc[0], cab.arc[1], a), abs(want))
            elif abs(got - want) > tol * max(1.0, abs(want)):
                bad("maintenance", (cab.arc[0], cab.arc[1], a), abs(got - want))

    # -- learning discounts (eq19-eq26 semantics) ---------------------------------------
    builds = {INSTALL: [], RESTRUCTURE: []}
    for d in plan.decisions:
        if d.kind in builds:
            builds[d.kind].append(d)
    for kind, table in ((INSTALL, plan.discount_install), (RESTRUCTURE, plan.discount_restructure)):
        chosen = {(d.arc[0], d.arc[1], d.cable_type, d.decision_year) for d in builds[kind]}
        prior = {a: sum(1 for d in builds[kind] if d.decision_year < a) for a in years}
        for key, q in table.items():
            i, j, c, a = key
            cost = types[c].cost if c in types else 0.0
            if key in chosen:
                want = cost * min(L * prior[a], 1.0)
            else:
                want = 0.0
            if q > cost + tol * max(1.0, cost):
                bad("learning", key, q - cost)
            elif abs(q - want) > tol * max(1.0, cost):
                bad("learning", key, abs(q - want))
        counts = plan.learning_install if kind == INSTALL else plan.learning_restructure
        for a, val in counts.items():
            cap = min(L * prior.get(a, 0), 1.0)
            if val > cap + tol or val < -tol:
                bad("learning", (kind, a), max(val - cap, -val))

    # -- cost re-summation ------------------------------------------------------------
    r = inst.economics.interest_rate
    F = {c.id: annuity(r, c.life) for c in inst.cable_types}
    qf = (lambda c: F[c]) if plan.discount_inside_crf else (lambda c: 1.0)
    op_cost = {g.id: g.op_cost for g in inst.generators}
    operational = sum(op_cost[g] * f for (g, t, a), f in plan.generation.items())
    install = sum(F[d.cable_type] * types[d.cable_type].cost
                  for d in plan.decisions if d.kind == INSTALL and d.cable_type in types)
    install -= sum(qf(k[2]) * q for k, q in plan.discount_install.items() if k[2] in F)
    restructure = sum(F[d.cable_type] * types[d.cable_type].cost
                      for d in plan.decisions if d.kind != INSTALL and d.cable_type in types)
    restructure -= sum(qf(k[2]) * q for k, q in plan.discount_restructure.items() if k[2] in F)
    maintenance = sum(annuity(r, existing[i, j].residual_life) * val
                      for (i, j, a), val in plan.maintenance.items() if (i, j) in existing)
    recomputed = {"operational": operational, "install": install, "restructure": restructure,
                  "maintenance": maintenance,
                  "total": operational + install + restructure + maintenance}
    for name, val in recomputed.items():
        got = plan.objective if name == "total" else plan.costs.get(name)
        if got is None or abs(got - val) > tol * max(1.0, abs(val)):
            bad("cost", (name,), abs((got or 0.0) - val))
    return v
