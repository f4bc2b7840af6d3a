"""Translate a :class:`PlanningInstance` into a :class:`MilpModel`.

Every row is tagged with the model equation it implements (``eq6`` ...
``eq26``).  Conventions used throughout:

* years ``a`` and timesteps ``t`` are 1-based;
* each undirected arc ``(i, j)`` (its orientation as listed in the instance)
  has two non-negative directed flows ``p[i, j, t, a]`` and ``p[j, i, t, a]``
  and one direction binary ``d[i, j, t, a]``;
* a decision taken in year ``a`` puts the arc out of service for years
  ``a .. a+Z-1`` and brings the new cable into service from year ``a+Z``;
* maintenance of a replaced cable stops from the decision year onward.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .instance import PlanningInstance, check
from .milp import BINARY, EQ, GE, LE, MilpModel

DEFAULT_MAX_VARIABLES = 250_000


class BuildError(ValueError):
    pass


def crf(rate: float, life: float) -> float:
    """Capital recovery factor ``r (1+r)^n / ((1+r)^n - 1)``.

    Integer lifetimes are evaluated in exact rational arithmetic and rounded
    once, so e.g. ``crf(0.10, 1) == 1.1``.  ``rate == 0`` returns the
    straight-line limit ``1 / life``.
    """
    if life is None or not life >= 1:
        raise ValueError(f"life must be >= 1 year, got {life}")
    if not rate >= 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    if rate == 0:
        return 1.0 / life
    if float(life).is_integer():
        r = Fraction(rate)
        g = (1 + r) ** int(life)
        return float(r * g / (g - 1))
    growth = math.expm1(life * math.log1p(rate))
    return rate * (growth + 1.0) / growth


@dataclass
class CostFactors:
    cable: dict[str, float]
    existing: dict[tuple[str, str], float]


def cost_factors(instance: PlanningInstance) -> CostFactors:
    r = instance.economics.interest_rate
    return CostFactors(
        cable={c.id: crf(r, c.life) for c in instance.cable_types},
        existing={c.arc: crf(r, c.residual_life)
                  for c in instance.existing_cables if c.replaceable},
    )


@dataclass
class BuildOptions:
    discount_inside_crf: bool = True
    max_variables: int = DEFAULT_MAX_VARIABLES


@dataclass
class VariableCatalog:
    """Index tuple -> variable id, one map per model symbol."""

    instance: PlanningInstance
    factors: CostFactors
    options: BuildOptions
    conv: dict = field(default_factory=dict)     # (g, i, t, a)
    ren: dict = field(default_factory=dict)      # (w, i, t, a)
    p: dict = field(default_factory=dict)        # (i, j, t, a), directed
    d: dict = field(default_factory=dict)        # (i, j, t, a), arc orientation
    y: dict = field(default_factory=dict)        # (i, j, c, a)
    k: dict = field(default_factory=dict)        # (i, j, c, a)
    m: dict = field(default_factory=dict)        # (i, j, a)
    kP: dict = field(default_factory=dict)       # a
    kR: dict = field(default_factory=dict)       # a
    qP: dict = field(default_factory=dict)       # (i, j, c, a)
    qR: dict = field(default_factory=dict)       # (i, j, c, a)
    theta: dict = field(default_factory=dict)    # (i, t, a)
    arcs: list = field(default_factory=list)     # every undirected arc, orientation kept

    SYMBOLS = ("conv", "ren", "p", "d", "y", "k", "m", "kP", "kR", "qP", "qR", "theta")

    def decision_vars(self) -> list[int]:
        return list(self.y.values()) + list(self.k.values())

    def decision_groups(self) -> dict[tuple[str, str], list[tuple[int, tuple]]]:
        """Per-arc lists of ``(var id, (kind, type, year))`` single-choice options."""
        groups: dict = {}
        for (i, j, c, a), vid in self.y.items():
            groups.setdefault((i, j), []).append((vid, ("install", c, a)))
        for (i, j, c, a), vid in self.k.items():
            groups.setdefault((i, j), []).append((vid, ("replace", c, a)))
        return groups

    def coverage(self) -> dict[str, int]:
        return {s: len(getattr(self, s)) for s in self.SYMBOLS}


_NAME_SAFE = re.compile(r"[^A-Za-z0-9_.]")


def _nm(*parts) -> str:
    return "_".join(_NAME_SAFE.sub("_", str(p)) for p in parts)


def _natural(s: str):
    return (0, int(s), "") if s.isdigit() else (1, 0, s)


def _estimate_size(inst: PlanningInstance) -> int:
    A, T = inst.horizon_years, inst.timesteps_per_year
    arcs = len(inst.existing_cables) + len(inst.candidate_corridors)
    nrep = sum(c.replaceable for c in inst.existing_cables)
    nc = len(inst.cable_types)
    return (A * T * (len(inst.generators) + len(inst.plants) + 3 * arcs + len(inst.nodes))
            + 2 * A * nc * (nrep + len(inst.candidate_corridors)) + A * (nrep + 2))


def build(instance: PlanningInstance, options: BuildOptions | None = None):
    """Return ``(model, catalog)`` for a validated instance."""
    options = options or BuildOptions()
    inst = check(instance)
    size = _estimate_size(inst)
    if size > options.max_variables:
        raise BuildError(
            f"index overflow: about {size} variables exceeds the limit {options.max_variables}")

    A, T = inst.horizon_years, inst.timesteps_per_year
    Z = inst.economics.construction_time
    L = inst.economics.learning_coefficient
    years = list(inst.years)
    steps = list(inst.timesteps)
    factors = cost_factors(inst)
    model = MilpModel(name=_nm(inst.name))
    cat = VariableCatalog(inst, factors, options)
    types = list(inst.cable_types)
    build_types = [c for c in types if not c.is_dismantle]
    tindex = {c.id: n for n, c in enumerate(types)}

    fixed_arcs = [c for c in inst.existing_cables if not c.replaceable]
    repl_arcs = [c for c in inst.existing_cables if c.replaceable]
    cands = list(inst.candidate_corridors)
    cat.arcs = [c.arc for c in inst.existing_cables] + [k.arc for k in cands]

    big_cap = max((c.capacity for c in types), default=0.0)
    big_exist = max((c.capacity for c in inst.existing_cables), default=0.0)
    m_flow = big_cap + big_exist
    m_learn = max((c.cost for c in types), default=0.0)
    ab = inst.angle_bound
    for tag in ("eq9", "eq10", "eq14"):
        model.register_big_m(tag, m_flow)
    for tag in ("eq21", "eq22", "eq23", "eq24", "eq25", "eq26"):
        model.register_big_m(tag, m_learn)
    betas = [c.reactance for c in repl_arcs] + [k.reactance for k in cands]
    if betas:
        model.register_big_m("eq12", max(2 * ab / b + m_flow for b in betas))

    q_coef = (lambda c: -factors.cable[c]) if options.discount_inside_crf else (lambda c: -1.0)

    # -- variables ---------------------------------------------------------
    for a in years:
        for t in steps:
            for g in inst.generators:
                cat.conv[g.id, g.node, t, a] = model.add_variable(
                    _nm("fconv", g.id, g.node, t, a), lower=0.0, objective_coeff=g.op_cost)
            for w in inst.plants:
                cat.ren[w.id, w.node, t, a] = model.add_variable(_nm("fren", w.id, w.node, t, a))
            for n in inst.nodes:
                lo, hi = (0.0, 0.0) if n.id == inst.slack_node else (-ab, ab)
                cat.theta[n.id, t, a] = model.add_variable(_nm("theta", n.id, t, a), lower=lo, upper=hi)
            for (i, j) in cat.arcs:
                cat.p[i, j, t, a] = model.add_variable(_nm("p", i, j, t, a))
                cat.p[j, i, t, a] = model.add_variable(_nm("p", j, i, t, a))
                cat.d[i, j, t, a] = model.add_variable(
                    _nm("d", i, j, t, a), kind=BINARY, branch=False,
                    branch_key=(a, t, _natural(i), _natural(j)))

    for kk in cands:
        i, j = kk.arc
        for c in types:
            for a in years:
                key = (i, j, c.id, a)
                upper = 0.0 if c.is_dismantle else 1.0
                cat.y[key] = model.add_variable(
                    _nm("y", i, j, c.id, a), kind=BINARY, upper=upper,
                    objective_coeff=factors.cable[c.id] * c.cost,
                    branch_key=(a, _natural(i), _natural(j), tindex[c.id]))
                cat.qP[key] = model.add_variable(
                    _nm("qP", i, j, c.id, a), upper=0.0 if c.is_dismantle else math.inf,
                    objective_coeff=q_coef(c.id))
    for cb in repl_arcs:
        i, j = cb.arc
        for c in types:
            for a in years:
                key = (i, j, c.id, a)
                cat.k[key] = model.add_variable(
                    _nm("k", i, j, c.id, a), kind=BINARY,
                    objective_coeff=factors.cable[c.id] * c.cost,
                    branch_key=(a, _natural(i), _natural(j), tindex[c.id]))
                cat.qR[key] = model.add_variable(
                    _nm("qR", i, j, c.id, a), upper=0.0 if c.is_dismantle else math.inf,
                    objective_coeff=q_coef(c.id))
        for a in years:
            cat.m[i, j, a] = model.add_variable(
                _nm("m", i, j, a), objective_coeff=factors.existing[cb.arc])
    for a in years:
        cat.kP[a] = model.add_variable(_nm("kP", a), upper=1.0)
        cat.kR[a] = model.add_variable(_nm("kR", a), upper=1.0)

    add = model.add_constraint
    gens_at = {n.id: [g for g in inst.generators if g.node == n.id] for n in inst.nodes}
    plants_at = {n.id: [w for w in inst.plants if w.node == n.id] for n in inst.nodes}
    arcs_at = {n.id: [arc for arc in cat.arcs if n.id in arc] for n in inst.nodes}
    gen_by_id = {g.id: g for g in inst.generators}
    plant_by_id = {w.id: w for w in inst.plants}

    # -- generators (eq6, eq7) -------------------------------------------------
    for (g, i, t, a), vid in cat.conv.items():
        gen = gen_by_id[g]
        add([(vid, 1.0)], LE, gen.capacity[t - 1], "eq6", _nm("gcap", g, t, a))
    for (w, i, t, a), vid in cat.ren.items():
        pl = plant_by_id[w]
        add([(vid, 1.0)], LE, pl.capacity * pl.availability[t - 1], "eq7", _nm("wcap", w, t, a))

    def window(arc, lo_year, hi_year, which, only_build=False, only_dismantle=False):
        """Decision variables of ``arc`` decided in years [lo_year, hi_year]."""
        src = cat.k if which == "k" else cat.y
        out = []
        for c in types:
            if only_build and c.is_dismantle:
                continue
            if only_dismantle and not c.is_dismantle:
                continue
            for a1 in range(max(1, lo_year), min(A, hi_year) + 1):
                out.append((src[arc[0], arc[1], c.id, a1], c))
        return out

    for a in years:
        for t in steps:
            # -- eq8: existing, not replaceable ----------------------------------
            for cb in fixed_arcs:
                i, j = cb.arc
                add([(cat.p[i, j, t, a], 1.0)], LE, cb.capacity, "eq8", _nm("cap", i, j, t, a))
                add([(cat.p[j, i, t, a], 1.0)], LE, cb.capacity, "eq8", _nm("cap", j, i, t, a))
            # -- eq9, eq10: one flow direction per arc ---------------------------------
            for (i, j) in cat.arcs:
                dv = cat.d[i, j, t, a]
                add([(cat.p[i, j, t, a], 1.0), (dv, -m_flow)], LE, 0.0, "eq9",
                    _nm("dir", i, j, t, a))
                add([(cat.p[j, i, t, a], 1.0), (dv, m_flow)], LE, m_flow, "eq10",
                    _nm("dir", j, i, t, a))
            # -- eq11: nodal balance --------------------------------------------------
            for n in inst.nodes:
                terms = [(cat.conv[g.id, g.node, t, a], 1.0) for g in gens_at[n.id]]
                terms += [(cat.ren[w.id, w.node, t, a], 1.0) for w in plants_at[n.id]]
                for (i, j) in arcs_at[n.id]:
                    u, v = (i, j) if n.id == i else (j, i)
                    terms += [(cat.p[u, v, t, a], -1.0), (cat.p[v, u, t, a], 1.0)]
                add(terms, GE, n.demand[a - 1][t - 1], "eq11", _nm("bal", n.id, t, a))
            # -- eq12: DC relation ----------------------------------------------------
            for cb in fixed_arcs:
                i, j = cb.arc
                b = cb.reactance
                add([(cat.p[i, j, t, a], 1.0), (cat.p[j, i, t, a], -1.0),
                     (cat.theta[i, t, a], -1.0 / b), (cat.theta[j, t, a], 1.0 / b)],
                    EQ, 0.0, "eq12", _nm("dc", i, j, t, a))
            for cb in repl_arcs:
                i, j = cb.arc
                b = cb.reactance
                mt = 2 * ab / b + m_flow
                flow = [(cat.p[i, j, t, a], 1.0), (cat.p[j, i, t, a], -1.0),
                        (cat.theta[i, t, a], -1.0 / b), (cat.theta[j, t, a], 1.0 / b)]
                # out of service: under construction, or dismantled and past its window
                off = [v for v, _ in window(cb.arc, a - Z + 1, a, "k")]
                off += [v for v, _ in window(cb.arc, 1, a - Z, "k", only_dismantle=True)]
                add(flow + [(v, -mt) for v in off], LE, 0.0, "eq12", _nm("dcu", i, j, t, a))
                add(flow + [(v, mt) for v in off], GE, 0.0, "eq12", _nm("dcl", i, j, t, a))
            for kk in cands:
                i, j = kk.arc
                b = kk.reactance
                mt = 2 * ab / b + m_flow
                flow = [(cat.p[i, j, t, a], 1.0), (cat.p[j, i, t, a], -1.0),
                        (cat.theta[i, t, a], -1.0 / b), (cat.theta[j, t, a], 1.0 / b)]
                on = [v for v, _ in window(kk.arc, 1, a - Z, "y", only_build=True)]
                add(flow + [(v, mt) for v in on], LE, mt, "eq12", _nm("dcu", i, j, t, a))
                add(flow + [(v, -mt) for v in on], GE, -mt, "eq12", _nm("dcl", i, j, t, a))
            # -- eq13, eq14: replaceable arcs ---------------------------------------------
            for cb in repl_arcs:
                i, j = cb.arc
                done = window(cb.arc, 1, a - Z, "k")
                swap = [(v, cb.capacity - c.capacity) for v, c in done if cb.capacity != c.capacity]
                for u, v in ((i, j), (j, i)):
                    add([(cat.p[u, v, t, a], 1.0)] + swap, LE, cb.capacity, "eq13",
                        _nm("rcap", u, v, t, a))
                if Z >= 1:
                    building = window(cb.arc, a - Z + 1, a, "k")
                    add([(cat.p[i, j, t, a], 1.0), (cat.p[j, i, t, a], 1.0)]
                        + [(v, m_flow) for v, _ in building], LE, m_flow, "eq14",
                        _nm("outage", i, j, t, a))
            # -- eq17: candidate corridors -----------------------------------------------
            for kk in cands:
                i, j = kk.arc
                built = window(kk.arc, 1, a - Z, "y", only_build=True)
                for u, v in ((i, j), (j, i)):
                    add([(cat.p[u, v, t, a], 1.0)] + [(x, -c.capacity) for x, c in built],
                        LE, 0.0, "eq17", _nm("pcap", u, v, t, a))

    # -- eq15, eq16 ---------------------------------------------------------------------
    for cb in repl_arcs:
        i, j = cb.arc
        add([(v, 1.0) for v, _ in window(cb.arc, 1, A, "k")], LE, 1.0, "eq15", _nm("once", i, j))
    for cb in repl_arcs:
        i, j = cb.arc
        for a in years:
            em = cb.maintenance_cost[a - 1]
            terms = [(cat.m[i, j, a], 1.0)]
            if em != 0:
                terms += [(v, em) for v, _ in window(cb.arc, 1, a, "k")]
            add(terms, EQ, em, "eq16", _nm("maint", i, j, a))
    # -- eq18 -----------------------------------------------------------------------------
    for kk in cands:
        i, j = kk.arc
        add([(v, 1.0) for v, _ in window(kk.arc, 1, A, "y", only_build=True)], LE, 1.0, "eq18",
            _nm("once", i, j))

    # -- eq19 - eq26: learning ---------------------------------------------------------------
    for a in years:
        prior_y = [cat.y[i, j, c.id, a1] for (i, j) in (k.arc for k in cands)
                   for c in build_types for a1 in range(1, a)]
        prior_k = [cat.k[i, j, c.id, a1] for (i, j) in (k.arc for k in repl_arcs)
                   for c in build_types for a1 in range(1, a)]
        add([(cat.kP[a], 1.0)] + ([(v, -L) for v in prior_y] if L else []), LE, 0.0, "eq19",
            _nm("learnP", a))
        add([(cat.kR[a], 1.0)] + ([(v, -L) for v in prior_k] if L else []), LE, 0.0, "eq20",
            _nm("learnR", a))
    for kk in cands:
        i, j = kk.arc
        for c in types:
            for a in years:
                key = (i, j, c.id, a)
                q, yv = cat.qP[key], cat.y[key]
                if not c.is_dismantle:
                    add([(q, 1.0), (cat.kP[a], -c.cost), (yv, -m_learn)], GE, -m_learn, "eq21",
                        _nm("qPlo", *key))
                    add([(q, 1.0), (cat.kP[a], -c.cost), (yv, m_learn)], LE, m_learn, "eq22",
                        _nm("qPhi", *key))
                add([(q, 1.0), (yv, -m_learn)], LE, 0.0, "eq25", _nm("qPon", *key))
    for cb in repl_arcs:
        i, j = cb.arc
        for c in types:
            for a in years:
                key = (i, j, c.id, a)
                q, kv = cat.qR[key], cat.k[key]
                if not c.is_dismantle:
                    add([(q, 1.0), (cat.kR[a], -c.cost), (kv, -m_learn)], GE, -m_learn, "eq23",
                        _nm("qRlo", *key))
                    add([(q, 1.0), (cat.kR[a], -c.cost), (kv, m_learn)], LE, m_learn, "eq24",
                        _nm("qRhi", *key))
                add([(q, 1.0), (kv, -m_learn)], LE, 0.0, "eq26", _nm("qRon", *key))
    return model, cat


# -- assignment post-processing ----------------------------------------------------------


def complete_directions(catalog: VariableCatalog, x) -> np.ndarray:
    """Cancel circulating flow on every arc and set its direction binary.

    Replacing ``(p_ij, p_ji)`` by ``(max(net, 0), max(-net, 0))`` keeps every
    nodal balance and DC row unchanged, only lowers the capacity and outage
    rows' activity, and makes ``d`` integral, so an LP point that is integral
    on the investment binaries becomes integral everywhere at equal cost.
    """
    x = np.array(x, dtype=float, copy=True)
    for (i, j, t, a), dv in catalog.d.items():
        fwd, bwd = catalog.p[i, j, t, a], catalog.p[j, i, t, a]
        net = x[fwd] - x[bwd]
        x[fwd] = max(net, 0.0)
        x[bwd] = max(-net, 0.0)
        x[dv] = 1.0 if net >= 0 else 0.0
    return x


def objective_breakdown(catalog: VariableCatalog, assignment) -> dict[str, float]:
    """Split the objective at ``assignment`` into its four cost components."""
    inst = catalog.instance
    x = np.asarray(assignment, dtype=float)
    top = max((max(getattr(catalog, s).values(), default=-1) for s in catalog.SYMBOLS), default=-1)
    if x.ndim != 1 or x.size <= top:
        raise ValueError("assignment does not cover every model variable")
    get = (lambda v: float(x[v]))
    f = catalog.factors
    qf = (lambda c: f.cable[c]) if catalog.options.discount_inside_crf else (lambda c: 1.0)
    gen_cost = {g.id: g.op_cost for g in inst.generators}
    cost = {c.id: c.cost for c in inst.cable_types}
    operational = sum(gen_cost[g] * get(v) for (g, i, t, a), v in catalog.conv.items())
    install = sum(f.cable[c] * cost[c] * get(v) for (i, j, c, a), v in catalog.y.items())
    install -= sum(qf(c) * get(v) for (i, j, c, a), v in catalog.qP.items())
    restructure = sum(f.cable[c] * cost[c] * get(v) for (i, j, c, a), v in catalog.k.items())
    restructure -= sum(qf(c) * get(v) for (i, j, c, a), v in catalog.qR.items())
    maintenance = sum(f.existing[i, j] * get(v) for (i, j, a), v in catalog.m.items())
    return {
        "operational": operational,
        "install": install,
        "restructure": restructure,
        "maintenance": maintenance,
        "total": operational + install + restructure + maintenance,
    }


def audit(model: MilpModel, catalog: VariableCatalog) -> list[str]:
    """Self-check that every symbol and parameter of the instance made it in."""
    inst = catalog.instance
    issues = []
    A, T = inst.horizon_years, inst.timesteps_per_year
    arcs = len(catalog.arcs)
    nrep = sum(c.replaceable for c in inst.existing_cables)
    ncand = len(inst.candidate_corridors)
    ntypes = len(inst.cable_types)
    expected = {
        "conv": len(inst.generators) * A * T,
        "ren": len(inst.plants) * A * T,
        "p": 2 * arcs * A * T,
        "d": arcs * A * T,
        "y": ncand * ntypes * A,
        "k": nrep * ntypes * A,
        "m": nrep * A,
        "kP": A,
        "kR": A,
        "qP": ncand * ntypes * A,
        "qR": nrep * ntypes * A,
        "theta": len(inst.nodes) * A * T,
    }
    for sym, n in catalog.coverage().items():
        if n != expected[sym]:
            issues.append(f"symbol {sym}: {n} variables, expected {expected[sym]}")
    seen_ids = set()
    for sym in catalog.SYMBOLS:
        for vid in getattr(catalog, sym).values():
            if vid in seen_ids:
                issues.append(f"variable id {vid} mapped twice")
            seen_ids.add(vid)
    if len(seen_ids) != model.num_vars:
        issues.append(f"{model.num_vars - len(seen_ids)} model variables outside the catalog")

    counts = model.tag_counts()
    Z = inst.economics.construction_time
    nfixed = len(inst.existing_cables) - nrep
    want_rows = {
        "eq6": len(inst.generators) * A * T,
        "eq7": len(inst.plants) * A * T,
        "eq8": 2 * nfixed * A * T,
        "eq9": arcs * A * T,
        "eq10": arcs * A * T,
        "eq11": len(inst.nodes) * A * T,
        "eq12": (nfixed + 2 * (nrep + ncand)) * A * T,
        "eq13": 2 * nrep * A * T,
        "eq14": nrep * A * T if Z >= 1 else 0,
        "eq15": nrep,
        "eq16": nrep * A,
        "eq17": 2 * ncand * A * T,
        "eq18": ncand,
        "eq19": A,
        "eq20": A,
    }
    for tag, n in want_rows.items():
        if counts.get(tag, 0) != n:
            issues.append(f"{tag}: {counts.get(tag, 0)} rows, expected {n}")

    # parameters reach coefficients / right-hand sides
    rhs = {}
    for c in model.constraints:
        rhs.setdefault(c.tag, []).append(c)
    for n in inst.nodes:
        for a in inst.years:
            for t in inst.timesteps:
                row = next(r for r in rhs.get("eq11", []) if r.name == _nm("bal", n.id, t, a))
                if row.rhs != n.demand[a - 1][t - 1]:
                    issues.append(f"demand of node {n.id} year {a} not on its balance row")
    for cb in inst.existing_cables:
        if cb.replaceable:
            for a in inst.years:
                row = next(r for r in rhs["eq16"] if r.name == _nm("maint", cb.src, cb.dst, a))
                if row.rhs != cb.maintenance_cost[a - 1]:
                    issues.append(f"maintenance of {cb.src}-{cb.dst} year {a} not on eq16")
    for key, vid in list(catalog.y.items()) + list(catalog.k.items()):
        ct = inst.cable_type(key[2])
        want = catalog.factors.cable[ct.id] * ct.cost
        if not math.isclose(model.variables[vid].objective_coeff, want, rel_tol=1e-12, abs_tol=0):
            issues.append(f"cost of {model.variables[vid].name} not annualized cable cost")
    L = inst.economics.learning_coefficient
    if L > 0:
        for tag in ("eq19", "eq20"):
            for r in rhs.get(tag, []):
                if any(a not in (1.0, -L) for _, a in r.terms):
                    issues.append(f"{tag} row {r.name} does not carry the learning coefficient")
    for tag in ("eq9", "eq10", "eq14", "eq21", "eq22", "eq23", "eq24", "eq25", "eq26", "eq12"):
        if counts.get(tag) and tag not in model.big_m_registry:
            issues.append(f"{tag} uses a big-M missing from the registry")
    return issues
