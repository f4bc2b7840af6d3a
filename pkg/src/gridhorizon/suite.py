"""Seeded generator of small planning instances for oracle cross-checks.

Every instance has 2-4 nodes besides the slack, 3-5 years, one or two cable
types and at most ``max_slots`` investment binaries, so the oracle can
enumerate it exhaustively.
"""
from __future__ import annotations

from math import comb

import numpy as np

from .instance import (CableType, CandidateCorridor, ConventionalGenerator, EconomicParams,
                       ExistingCable, Node, PlanningInstance, RenewablePlant, validate, ERROR)

MAX_SLOTS = 12

_TYPE_SETS = (("big",), ("big", "small"), ("big", "dismantle"))


def _types(names, rng, life):
    big = float(rng.uniform(500.0, 3000.0))
    pool = {
        "big": CableType("big", 100.0, big, life),
        "small": CableType("small", 40.0, round(0.6 * big, 6), life),
        "dismantle": CableType("dismantle", 0.0, round(0.05 * big, 6), life, is_dismantle=True),
    }
    return tuple(pool[n] for n in names)


def slots(instance: PlanningInstance) -> int:
    """Investment binaries: (arc, type, year) triples the builder will create."""
    builds = sum(1 for c in instance.cable_types if not c.is_dismantle)
    every = len(instance.cable_types)
    repl = sum(1 for c in instance.existing_cables if c.replaceable)
    return instance.horizon_years * (repl * every + len(instance.candidate_corridors) * builds)


def small_instance(seed: int, max_slots: int = MAX_SLOTS) -> PlanningInstance:
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 5))
    years = int(rng.integers(3, 6))
    steps = int(rng.integers(1, 3))
    ids = [str(n) for n in range(1, k + 2)]

    edges = []
    for pos in range(1, len(ids)):
        edges.append((ids[int(rng.integers(0, pos))], ids[pos]))
    if k >= 3 and rng.random() < 0.5:
        a, b = sorted(rng.choice(len(ids), 2, replace=False))
        if (ids[a], ids[b]) not in edges:
            edges.append((ids[a], ids[b]))
    absent = [(ids[a], ids[b]) for a in range(len(ids)) for b in range(a + 1, len(ids))
              if (ids[a], ids[b]) not in edges and (ids[b], ids[a]) not in edges]

    names = _TYPE_SETS[int(rng.integers(0, len(_TYPE_SETS)))]
    life = float(rng.choice([20, 30, 40]))
    types = _types(names, rng, life)
    per_repl = years * len(types)
    per_corr = years * sum(1 for t in types if not t.is_dismantle)

    # pick decision arcs until the slot budget is spent
    order = [("repl", e) for e in edges] + [("corr", e) for e in absent]
    rng.shuffle(order)
    replaceable, corridors, used = set(), [], 0
    for kind, e in order:
        need = per_repl if kind == "repl" else per_corr
        if used + need > max_slots:
            continue
        used += need
        if kind == "repl":
            replaceable.add(e)
        else:
            corridors.append(e)
        if rng.random() < 0.4:
            break
    if not used:
        e = edges[-1]
        replaceable.add(e)

    # replaceable arcs are tight, the rest roomy; local backup generation
    # below keeps most instances feasible through construction outages
    cables = []
    for e in edges:
        cap = float(rng.uniform(30.0, 60.0)) if e in replaceable else 200.0
        beta = float(rng.uniform(0.0002, 0.0006))
        maint = (0.0,) * years
        if e in replaceable and rng.random() < 0.6:
            scale = float(rng.uniform(20.0, 400.0))
            maint = tuple(round(scale * (1 + 0.1 * a), 6) for a in range(years))
        cables.append(ExistingCable(e[0], e[1], round(cap, 3), round(beta, 6),
                                    float(rng.integers(5, 20)), maint, e in replaceable))

    nodes = []
    for nid in ids:
        if nid == "1":
            base = [float(rng.uniform(0.0, 10.0))] * steps
            growth = 0.0
        else:
            base = list(rng.uniform(10.0, 35.0, size=steps))
            growth = float(rng.uniform(0.0, 12.0))
        table = tuple(tuple(round(b + growth * a, 4) for b in base) for a in range(years))
        nodes.append(Node(nid, table))

    gens = [ConventionalGenerator("G1", "1", (500.0,) * steps, 10.0)]
    peak = {n.id: max(max(row) for row in n.demand) for n in nodes}
    for nid in ids[1:]:
        if rng.random() < 0.8:
            cap = tuple(float(round(peak[nid] * c, 3)) for c in rng.uniform(0.6, 1.1, size=steps))
            gens.append(ConventionalGenerator(f"G{nid}", nid, cap, float(round(rng.uniform(14, 30), 3))))
    plants = []
    if rng.random() < 0.5:
        nid = ids[int(rng.integers(1, len(ids)))]
        avail = tuple(float(round(v, 3)) for v in rng.uniform(0.2, 0.9, size=steps))
        plants.append(RenewablePlant(f"W{nid}", nid, float(round(rng.uniform(10, 30), 3)), avail))

    econ = EconomicParams(float(rng.choice([0.0, 0.05, 0.08])),
                          float(rng.choice([0.0, 0.1, 0.3])),
                          int(rng.integers(0, min(3, years))))
    inst = PlanningInstance(
        nodes=tuple(nodes), generators=tuple(gens), plants=tuple(plants),
        existing_cables=tuple(cables),
        candidate_corridors=tuple(CandidateCorridor(i, j, float(round(rng.uniform(0.0002, 0.0006), 6)))
                                  for i, j in corridors),
        cable_types=types, economics=econ, horizon_years=years, timesteps_per_year=steps,
        slack_node="1", name=f"small-{seed}")
    errors = [d for d in validate(inst) if d.severity == ERROR]
    if errors:
        raise AssertionError(f"generator produced an invalid instance: {errors[0].render()}")
    return inst


def small_suite(count: int = 24, seed: int = 7, max_slots: int = MAX_SLOTS) -> list[PlanningInstance]:
    return [small_instance(seed * 1000 + k, max_slots) for k in range(count)]


def random_lp(rng: np.random.Generator, n_max: int = 10, m_max: int = 15):
    """A random feasible, bounded LP ``(c, A, row_lo, row_hi, col_lo, col_hi)``.

    Feasibility comes from building the rows around a random interior point.
    Sizes stay small enough for vertex enumeration.
    """
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    # keep C(2m + 2n, n) manageable for the enumeration oracle
    while n > 2 and comb(2 * m + 2 * n, n) > 400_000:
        n -= 1
    x0 = rng.uniform(-2.0, 2.0, size=n)
    A = rng.integers(-4, 5, size=(m, n)).astype(float)
    A[rng.random((m, n)) < 0.3] = 0.0
    ax = A @ x0
    kind = rng.integers(0, 4, size=m)          # 0: <=, 1: >=, 2: ranged, 3: equality
    slack_lo = rng.uniform(0.0, 3.0, size=m)
    slack_hi = rng.uniform(0.0, 3.0, size=m)
    row_lo = np.where((kind == 1) | (kind == 2), ax - slack_lo, -np.inf)
    row_hi = np.where((kind == 0) | (kind == 2), ax + slack_hi, np.inf)
    eq = kind == 3
    row_lo[eq] = row_hi[eq] = ax[eq]
    col_lo = np.minimum(x0, 0.0) - rng.uniform(0.5, 4.0, size=n)
    col_hi = np.maximum(x0, 0.0) + rng.uniform(0.5, 4.0, size=n)
    c = rng.integers(-5, 6, size=n).astype(float)
    return c, A, row_lo, row_hi, col_lo, col_hi

