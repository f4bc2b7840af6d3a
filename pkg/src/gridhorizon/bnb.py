"""Branch-and-bound over the binary variables of a MilpModel.

Nodes are LP relaxations solved by :class:`~gridhorizon.simplex.LpEngine`;
a child starts from its parent's basis, so most nodes need only a few dual
simplex pivots.  Selection is best-bound with depth-first plunging.

Ties among optimal plans are resolved canonically: an integral point
replaces the incumbent when it is cheaper by more than ``tie_tol`` (relative),
or equally cheap and lexicographically smaller in :func:`solution_key`.
Nodes are kept while their bound can still reach such a point, so the result
does not depend on the order nodes were explored in.
"""
from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .milp import BINARY, MilpModel, relax
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, IterationLimit, LpEngine, NumericalError

log = logging.getLogger(__name__)

INT_TOL = 1e-6

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_INFEASIBLE = "infeasible"
STATUS_LIMIT = "limit"


class SolverError(RuntimeError):
    pass


@dataclass
class BnbParams:
    gap_tol: float = 1e-6
    node_limit: int | None = None
    time_limit: float | None = None
    deterministic: bool = True
    workers: int = 2
    log_interval: int = 0          # nodes between progress lines; 0 = off
    tie_tol: float = 1e-9          # relative; objective differences below this are ties
    canonical: bool = True         # explore ties so the reported plan is canonical


@dataclass
class Incumbent:
    node: int
    objective: float
    values: np.ndarray = field(repr=False)


@dataclass
class SolveReport:
    status: str
    incumbent_objective: float
    best_bound: float
    gap: float
    nodes_explored: int
    wall_time: float
    assignment: np.ndarray | None = field(default=None, repr=False)
    lp_iterations: int = 0
    incumbents: list[Incumbent] = field(default_factory=list, repr=False)
    rejected: list[tuple[int, object]] = field(default_factory=list, repr=False)
    verification: object = None

    @property
    def has_solution(self) -> bool:
        return self.assignment is not None


def gap_of(incumbent: float, bound: float) -> float:
    if not math.isfinite(incumbent):
        return math.inf
    return max(0.0, (incumbent - bound) / max(1.0, abs(incumbent)))


def _key(v) -> tuple:
    return (v.branch_key, v.id) if v.branch_key else ((), v.id)


def solution_key(model: MilpModel, x, which=None) -> tuple:
    """Canonical tie-break key: sorted branch keys of the binaries set to 1."""
    ids = which if which is not None else [v.id for v in model.variables
                                           if v.kind == BINARY and v.branch]
    return tuple(sorted(_key(model.variables[i]) for i in ids if x[i] > 0.5))


@dataclass(order=True)
class _Node:
    bound: float
    depth: int
    seq: int
    fixes: tuple = field(compare=False)          # ((var id, value), ...)
    basis: tuple | None = field(compare=False, default=None)


class _Search:
    def __init__(self, model, params, completion, accept):
        self.model = model
        self.p = params
        self.completion = completion
        self.accept = accept
        A, c, rlo, rhi, lo, hi = relax(model).arrays()
        self.arrays = (A, c, rlo, rhi, lo, hi)
        self.lo0, self.hi0 = lo, hi
        self.c = c
        bins = [v for v in model.variables if v.kind == BINARY]
        self.branchable = [v.id for v in bins if v.branch or completion is None]
        self.branch_ids = np.array(self.branchable, dtype=int)
        self.others = [v.id for v in bins if not (v.branch or completion is None)]
        self.order = {v.id: _key(v) for v in bins}
        self.decision_ids = [v.id for v in bins if v.branch]
        self.seq = itertools.count()
        self.inc_obj = math.inf
        self.inc_x = None
        self.inc_key = None
        self.incumbents: list[Incumbent] = []
        self.rejected = []
        self.nodes = 0
        self.iterations = 0
        self.global_bound = -math.inf

    def engine(self):
        A, c, rlo, rhi, lo, hi = self.arrays
        return LpEngine(A, c, rlo, rhi, lo, hi)

    # -- node evaluation ---------------------------------------------------

    def evaluate(self, eng: LpEngine, node: _Node, warm_from=None):
        lo, hi = self.lo0.copy(), self.hi0.copy()
        for vid, val in node.fixes:
            lo[vid] = hi[vid] = val
        eng.set_col_bounds(lo, hi)
        basis = warm_from if warm_from is not None else node.basis
        if basis is not None:
            eng.restore(basis)
        try:
            sol = eng.solve(warm=basis is not None)
        except (IterationLimit, NumericalError):
            log.debug("warm solve failed at node %d; retrying cold", node.seq)
            sol = eng.solve(warm=False)
        return sol, eng.snapshot()

    # -- incumbent handling ------------------------------------------------

    def tie_abs(self, ref):
        return self.p.tie_tol * max(1.0, abs(ref))

    def cutoff(self):
        if self.inc_x is None:
            return math.inf
        if self.p.canonical:
            return self.inc_obj + self.tie_abs(self.inc_obj)
        return self.inc_obj - self.p.gap_tol * max(1.0, abs(self.inc_obj))

    def pruned(self, bound):
        if self.inc_x is None:
            return False
        if self.p.canonical:
            return bound > self.cutoff()
        return bound >= self.cutoff()

    def offer(self, x, node_no):
        x = np.array(x, dtype=float)
        b = self.branchable
        x[b] = np.round(x[b])
        if self.completion is not None:
            x = self.completion(x)
        if any(min(abs(x[i]), abs(x[i] - 1.0)) > INT_TOL for i in self.others):
            raise SolverError("completion hook left fractional binaries")
        obj = float(self.c @ x)
        key = solution_key(self.model, x, self.decision_ids)
        if self.inc_x is not None:
            tie = self.tie_abs(min(obj, self.inc_obj))
            better = obj < self.inc_obj - tie or (abs(obj - self.inc_obj) <= tie and key < self.inc_key)
            if not better:
                return False
        bad = self.model.violations(x, tol=1e-6)
        if bad:
            self.rejected.append((node_no, ("model-rows", bad[:5])))
            log.warning("node %d: rounded point violates %d rows; not accepted", node_no, len(bad))
            return False
        if self.accept is not None:
            verdict = self.accept(x)
            if not _accepted(verdict):
                self.rejected.append((node_no, verdict))
                log.warning("node %d: incumbent rejected by acceptance check", node_no)
                return False
        self.inc_obj, self.inc_x, self.inc_key = obj, x, key
        self.incumbents.append(Incumbent(node_no, obj, x))
        return True

    # -- branching ---------------------------------------------------------

    def pick(self, x):
        """Most fractional branching binary; ties go to the smallest branch key."""
        ids = self.branch_ids
        frac = np.minimum(x[ids], 1.0 - x[ids])
        top = frac.max(initial=0.0)
        if top <= INT_TOL:
            return None
        near = ids[frac >= top - 1e-9]
        return int(min(near, key=lambda i: self.order[i]))


def _accepted(verdict) -> bool:
    if isinstance(verdict, bool):
        return verdict
    ok = getattr(verdict, "ok", None)
    if ok is not None:
        return bool(ok)
    return not verdict


def solve(model: MilpModel, params: BnbParams | None = None,
          completion: Callable | None = None, accept: Callable | None = None,
          progress: Callable[[str], None] | None = None) -> SolveReport:
    """Minimize ``model`` over its binaries.

    ``completion(x)`` may repair binaries declared with ``branch=False`` once
    every branching binary is integral; ``accept(x)`` is called on each
    candidate incumbent and may veto it (a bool, a list of problems, or an
    object with an ``ok`` attribute).
    """
    params = params or BnbParams()
    t0 = time.perf_counter()
    s = _Search(model, params, completion, accept)
    emit = progress or (lambda line: log.info(line))

    def line():
        g = gap_of(s.inc_obj, s.global_bound)
        return f"node={s.nodes} bound={s.global_bound:.6f} incumbent={s.inc_obj:.6f} gap={g:.3e}"

    def out_of_budget():
        if params.node_limit is not None and s.nodes >= params.node_limit:
            return True
        return params.time_limit is not None and time.perf_counter() - t0 > params.time_limit

    heap: list[_Node] = []
    root = _Node(-math.inf, 0, next(s.seq), ())
    eng = s.engine()
    limited = False

    def process(node, sol, snap):
        """Handle a solved node; return the child to dive into, if any."""
        s.nodes += 1
        s.iterations += sol.iterations
        if params.log_interval and s.nodes % params.log_interval == 0:
            emit(line())
        if sol.status == INFEASIBLE:
            return None
        if sol.status == UNBOUNDED:
            raise SolverError("LP relaxation is unbounded")
        bound = max(sol.objective, node.bound)
        if s.pruned(bound):
            return None
        x = sol.values
        vid = s.pick(x)
        if vid is None:
            s.offer(x, s.nodes)
            return None
        up_first = x[vid] >= 0.5
        kids = []
        for val in ((1.0, 0.0) if up_first else (0.0, 1.0)):
            kids.append(_Node(bound, node.depth + 1, next(s.seq), node.fixes + ((vid, val),), snap))
        heapq.heappush(heap, kids[1])
        return kids[0]

    sol, snap = s.evaluate(eng, root)
    if sol.status == INFEASIBLE:
        s.nodes = 1
        return SolveReport(STATUS_INFEASIBLE, math.inf, math.inf, math.inf, 1,
                           time.perf_counter() - t0, None, sol.iterations)
    s.global_bound = sol.objective
    dive = process(root, sol, snap)

    pool = None
    engines = None
    if not params.deterministic and params.workers > 1:
        pool = ThreadPoolExecutor(max_workers=params.workers)
        engines = [s.engine() for _ in range(params.workers)]

    try:
        while dive is not None or heap:
            if out_of_budget():
                limited = True
                break
            if dive is not None:
                # plunge: the child reuses the basis the engine already holds
                if s.pruned(dive.bound):
                    dive = None
                    continue
                sol, snap = s.evaluate(eng, dive, warm_from=dive.basis)
                dive = process(dive, sol, snap)
                continue
            node = heapq.heappop(heap)
            if s.pruned(node.bound):
                continue
            s.global_bound = max(s.global_bound, node.bound)
            if pool is None:
                sol, snap = s.evaluate(eng, node)
                dive = process(node, sol, snap)
                continue
            # parallel: evaluate a batch, then process results in heap order
            batch = [node]
            while heap and len(batch) < params.workers:
                nxt = heapq.heappop(heap)
                if not s.pruned(nxt.bound):
                    batch.append(nxt)
            results = list(pool.map(lambda pair: s.evaluate(pair[0], pair[1]),
                                    zip(engines, batch)))
            for nd, (sol, snap) in zip(batch, results):
                child = process(nd, sol, snap)
                if child is not None:
                    heapq.heappush(heap, child)
    finally:
        if pool is not None:
            pool.shutdown()

    open_bounds = [n.bound for n in heap]
    if dive is not None:
        open_bounds.append(dive.bound)
    if limited and open_bounds:
        bound = min(open_bounds)
    else:
        bound = s.inc_obj if s.inc_x is not None else math.inf
    bound = max(min(bound, s.inc_obj), s.global_bound) if s.inc_x is not None else bound
    s.global_bound = bound if math.isfinite(bound) else s.global_bound
    wall = time.perf_counter() - t0
    if params.log_interval:
        emit(line())

    if s.inc_x is None:
        status = STATUS_LIMIT if limited else STATUS_INFEASIBLE
        return SolveReport(status, math.inf, s.global_bound, math.inf, s.nodes, wall, None,
                           s.iterations, s.incumbents, s.rejected)
    gap = gap_of(s.inc_obj, s.global_bound)
    status = STATUS_OPTIMAL if (not limited or gap <= params.gap_tol) else STATUS_FEASIBLE
    return SolveReport(status, s.inc_obj, s.global_bound, gap, s.nodes, wall, s.inc_x,
                       s.iterations, s.incumbents, s.rejected)
