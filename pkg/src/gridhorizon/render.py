"""Plan and sweep reports as Graphviz DOT, CSV or a plain-text timeline.

All output is byte-deterministic: rows and edges are emitted in sorted order
and numbers are formatted with a fixed precision.
"""
from __future__ import annotations

import csv
import io

from .builder import cost_factors
from .instance import PlanningInstance
from .plan import DISMANTLE, INSTALL, RESTRUCTURE, InvestmentPlan
from .sweep import SweepResult, describe

FORMATS = ("dot", "csv", "text")

# edge attributes per decision kind; dismantling is a blue dotted line
STYLE = {
    RESTRUCTURE: 'color="red", style="bold"',
    INSTALL: 'color="darkgreen", style="dashed"',
    DISMANTLE: 'color="blue", style="dotted"',
}
BASE_STYLE = 'color="gray40"'


class RenderError(ValueError):
    pass


def _num(x: float) -> str:
    return f"{x:.6f}"


def _natural(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def _arc_key(arc):
    return (_natural(arc[0]), _natural(arc[1]))


def render(obj, fmt: str, instance: PlanningInstance | None = None) -> str:
    if fmt not in FORMATS:
        raise RenderError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    if isinstance(obj, SweepResult):
        return {"dot": _sweep_dot, "csv": _sweep_csv, "text": _sweep_text}[fmt](obj, instance)
    if isinstance(obj, InvestmentPlan):
        return {"dot": plan_dot, "csv": plan_csv, "text": plan_text}[fmt](obj, instance)
    raise RenderError(f"cannot render {type(obj).__name__}")


# -- plans ----------------------------------------------------------------------------


def plan_dot(plan: InvestmentPlan, instance: PlanningInstance | None = None,
             name: str | None = None) -> str:
    lines = [f'digraph "{name or plan.instance_name}" {{', "  edge [dir=none];"]
    decided = {}
    for d in sorted(plan.decisions):
        decided.setdefault(d.arc, d)
    nodes = set()
    base = []
    if instance is not None:
        nodes |= set(instance.node_ids())
        base = [c.arc for c in instance.existing_cables]
    nodes |= {n for d in plan.decisions for n in d.arc}
    for n in sorted(nodes, key=_natural):
        lines.append(f'  "{n}";')
    for arc in sorted(set(base) | set(decided), key=_arc_key):
        d = decided.get(arc)
        if d is None:
            lines.append(f'  "{arc[0]}" -> "{arc[1]}" [{BASE_STYLE}];')
        else:
            lines.append(f'  "{arc[0]}" -> "{arc[1]}" [label="Y{d.decision_year}", '
                         f'tooltip="{d.kind} {d.cable_type}", {STYLE[d.kind]}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def yearly_costs(plan: InvestmentPlan, instance: PlanningInstance) -> dict[int, dict[str, float]]:
    """Per-year split of the cost components; sums to ``plan.costs``."""
    f = cost_factors(instance)
    types = {c.id: c for c in instance.cable_types}
    op = {g.id: g.op_cost for g in instance.generators}
    qf = (lambda c: f.cable[c]) if plan.discount_inside_crf else (lambda c: 1.0)
    out = {a: {"operational": 0.0, "install": 0.0, "restructure": 0.0, "maintenance": 0.0}
           for a in instance.years}
    for (g, t, a), v in plan.generation.items():
        out[a]["operational"] += op[g] * v
    for d in plan.decisions:
        part = "install" if d.kind == INSTALL else "restructure"
        out[d.decision_year][part] += f.cable[d.cable_type] * types[d.cable_type].cost
    for part, table in (("install", plan.discount_install), ("restructure", plan.discount_restructure)):
        for (i, j, c, a), q in table.items():
            out[a][part] -= qf(c) * q
    for (i, j, a), m in plan.maintenance.items():
        out[a]["maintenance"] += f.existing[i, j] * m
    return out


def plan_csv(plan: InvestmentPlan, instance: PlanningInstance | None = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "year", "arc", "kind", "type", "in_service", "component", "value"])
    for d in sorted(plan.decisions):
        w.writerow(["decision", d.decision_year, f"{d.arc[0]}-{d.arc[1]}", d.kind, d.cable_type,
                    d.in_service_year, "", ""])
    if instance is not None:
        for a, parts in sorted(yearly_costs(plan, instance).items()):
            for comp in ("operational", "install", "restructure", "maintenance"):
                w.writerow(["cost", a, "", "", "", "", comp, _num(parts[comp])])
    for comp in ("operational", "install", "restructure", "maintenance", "total"):
        w.writerow(["cost", "all", "", "", "", "", comp, _num(plan.costs.get(comp, 0.0))])
    return buf.getvalue()


def plan_text(plan: InvestmentPlan, instance: PlanningInstance | None = None) -> str:
    lines = [f"plan for {plan.instance_name}  (construction time {plan.construction_time} years)"]
    years = list(instance.years) if instance is not None else sorted(plan.by_year())
    schedule = plan.by_year()
    if not plan.decisions:
        lines.append("  no investment decisions")
    for a in years:
        for d in schedule.get(a, []):
            lines.append(f"  Y{a:<3d} {d.kind:<12s} {d.arc[0]}-{d.arc[1]:<5s} {d.cable_type:<10s}"
                         f" in service Y{d.in_service_year}")
    lines.append("costs")
    for comp in ("operational", "install", "restructure", "maintenance", "total"):
        lines.append(f"  {comp:<12s} {plan.costs.get(comp, 0.0):14.3f}")
    return "\n".join(lines) + "\n"


# -- sweeps ---------------------------------------------------------------------------


def _fp_text(fp) -> str:
    if fp is None:
        return ""
    return ";".join(f"{arc} {kind} {ctype} Y{year}" for arc, kind, ctype, year in fp)


def _sweep_csv(result: SweepResult, instance=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "parameter", "value", "status", "objective", "verified", "fingerprint"])
    p = result.spec.parameter
    for pt in result.points:
        w.writerow(["point", p, repr(pt.value), pt.status, _num(pt.objective),
                    "" if pt.verified is None else str(pt.verified).lower(), _fp_text(pt.fingerprint)])
    for t in result.thresholds:
        w.writerow(["threshold", p, f"{t.lo!r}..{t.hi!r}", "", "", "",
                    f"{_fp_text(t.before)} => {_fp_text(t.after)}"])
    return buf.getvalue()


def _sweep_text(result: SweepResult, instance=None) -> str:
    p = result.spec.parameter
    lines = [f"sweep over {p}"]
    for pt in result.points:
        flag = "" if pt.solved else f"  [{pt.status}]"
        lines.append(f"  {p}={pt.value:<10.6g} objective={pt.objective:<14.3f} "
                     f"{describe(pt.fingerprint)}{flag}")
    if result.thresholds:
        lines.append("thresholds")
    for t in result.thresholds:
        lines.append(f"  {p} in ({t.lo:.6g}, {t.hi:.6g}]: {describe(t.before)}  ->  {describe(t.after)}")
    for lo, hi in result.suppressed:
        lines.append(f"  detection suppressed across ({lo:.6g}, {hi:.6g})")
    return "\n".join(lines) + "\n"


def _sweep_dot(result: SweepResult, instance=None) -> str:
    parts = []
    for pt in result.points:
        if pt.plan is not None:
            parts.append(plan_dot(pt.plan, instance, f"{result.spec.parameter}={pt.value!r}"))
    return "".join(parts)
