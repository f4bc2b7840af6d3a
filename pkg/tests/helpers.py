"""Shared solving helpers; results are cached for the whole test session."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gridhorizon import bnb
from gridhorizon.builder import build, complete_directions
from gridhorizon.plan import extract_plan
from gridhorizon.scenarios import STUDIES
from gridhorizon.verify import verify

# every incumbent the solver accepted in this session, with its verdict
INCUMBENT_LOG: list = []
# every solve that returned a plan
SOLVED: list = []


@dataclass
class Solved:
    instance: object
    model: object
    catalog: object
    report: object
    plan: object
    verdict: object

    @property
    def decisions(self):
        return [] if self.plan is None else self.plan.decisions

    def labels(self):
        return [d.label() for d in self.decisions]

    def year(self, arc: str, kind: str | None = None):
        i, j = arc.split("-")
        for d in self.decisions:
            if d.arc == (i, j) and (kind is None or d.kind == kind):
                return d.decision_year
        return None


def solve(instance, params: bnb.BnbParams | None = None) -> Solved:
    model, cat = build(instance)

    def accept(x):
        verdict = verify(instance, extract_plan(x, cat, instance))
        INCUMBENT_LOG.append((instance.name, verdict))
        return verdict

    report = bnb.solve(model, params or bnb.BnbParams(),
                       completion=lambda x: complete_directions(cat, x), accept=accept)
    plan = verdict = None
    if report.has_solution:
        plan = extract_plan(report, cat, instance)
        verdict = verify(instance, plan)
    out = Solved(instance, model, cat, report, plan, verdict)
    if plan is not None:
        SOLVED.append(out)
    return out


@lru_cache(maxsize=None)
def study(name: str, *args, **kw) -> Solved:
    """Solve a built-in study; ``maintained``/``scales`` may be given as item tuples."""
    for key in ("maintained", "scales"):
        if isinstance(kw.get(key), tuple) and kw[key] and isinstance(kw[key][0], tuple):
            kw[key] = dict(kw[key])
    return solve(STUDIES[name](*args, **kw))


@lru_cache(maxsize=None)
def small(seed: int) -> Solved:
    from gridhorizon.suite import small_instance
    return solve(small_instance(seed))
