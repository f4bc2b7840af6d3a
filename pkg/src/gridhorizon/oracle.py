"""Brute-force reference solvers used to certify the real ones.

``enumerate`` walks every admissible combination of investment decisions and
solves the remaining LP with HiGHS (through scipy), which shares no code
with :mod:`gridhorizon.simplex`.  ``vertex_enumeration`` solves a small LP by
listing every basic solution of its constraint system.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .bnb import solution_key
from .builder import VariableCatalog, complete_directions
from .milp import MilpModel, relax

DEFAULT_LIMIT = 20
TIE_TOL = 1e-9


class OracleError(ValueError):
    pass


@dataclass
class OracleResult:
    status: str                      # "optimal" or "infeasible"
    objective: float
    assignment: np.ndarray | None = field(repr=False)
    combinations_evaluated: int
    combinations_feasible: int

    @property
    def feasible(self) -> bool:
        return self.status == "optimal"


def option_sets(catalog: VariableCatalog, model: MilpModel) -> list[list[int | None]]:
    """Per-arc admissible choices: nothing, or exactly one open decision binary."""
    out = []
    groups = catalog.decision_groups()
    for arc in sorted(groups):
        opts = [vid for vid, _ in groups[arc] if model.variables[vid].upper > 0.5]
        out.append([None] + opts)
    return out


def count_combinations(catalog: VariableCatalog, model: MilpModel) -> int:
    return math.prod(len(o) for o in option_sets(catalog, model))


def _residual_lp(arrays, fixed_lo, fixed_hi):
    A, c, rlo, rhi = arrays
    fin_hi, fin_lo = np.isfinite(rhi), np.isfinite(rlo)
    eq = fin_hi & fin_lo & (rlo == rhi)
    ub_hi = fin_hi & ~eq
    ub_lo = fin_lo & ~eq
    A_ub = sp.vstack([A[ub_hi], -A[ub_lo]]).tocsr()
    b_ub = np.concatenate([rhi[ub_hi], -rlo[ub_lo]])
    bounds = np.column_stack([fixed_lo, np.where(np.isinf(fixed_hi), np.nan, fixed_hi)])
    bounds = [(lo, None if np.isnan(hi) else hi) for lo, hi in bounds]
    res = linprog(c, A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if b_ub.size else None,
                  A_eq=A[eq] if eq.any() else None, b_eq=rhi[eq] if eq.any() else None,
                  bounds=bounds, method="highs")
    if res.status == 0:
        return float(res.fun), res.x
    if res.status == 2:
        return None, None
    raise OracleError(f"residual LP failed: {res.message}")


def enumerate(model: MilpModel, catalog: VariableCatalog, limit: int = DEFAULT_LIMIT,
              workers: int = 1) -> OracleResult:
    """Exact optimum over all investment decisions of ``model``.

    Direction binaries are left continuous in the residual LP; any LP optimum
    is turned into an integral one of equal cost by cancelling circulating
    flow (:func:`complete_directions`).
    """
    decisions = catalog.decision_vars()
    open_ = [vid for vid in decisions if model.variables[vid].upper > 0.5]
    if len(open_) > limit:
        raise OracleError(f"{len(open_)} decision binaries exceed the oracle limit {limit}")
    A, c, rlo, rhi, lo, hi = relax(model).arrays()
    arrays = (A, c, rlo, rhi)
    sets = option_sets(catalog, model)

    def run(choice):
        flo, fhi = lo.copy(), hi.copy()
        flo[decisions] = 0.0
        fhi[decisions] = 0.0
        for vid in choice:
            if vid is not None:
                flo[vid] = fhi[vid] = 1.0
        obj, x = _residual_lp(arrays, flo, fhi)
        if x is None:
            return None
        x = complete_directions(catalog, x)
        return float(c @ x), x

    combos = list(itertools.product(*sets))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, combos))
    else:
        results = [run(ch) for ch in combos]

    best = None
    feasible = 0
    for res in results:
        if res is None:
            continue
        feasible += 1
        obj, x = res
        key = solution_key(model, x, decisions)
        if best is None:
            best = (obj, key, x)
            continue
        tie = TIE_TOL * max(1.0, abs(min(obj, best[0])))
        if obj < best[0] - tie or (abs(obj - best[0]) <= tie and key < best[1]):
            best = (obj, key, x)
    if best is None:
        return OracleResult("infeasible", math.inf, None, len(combos), 0)
    return OracleResult("optimal", best[0], best[2], len(combos), feasible)


# -- small LPs -------------------------------------------------------------------


@dataclass
class VertexResult:
    status: str            # "optimal" or "infeasible"
    objective: float
    x: np.ndarray | None
    vertices: int


def vertex_enumeration(c, A, row_lo, row_hi, col_lo, col_hi, tol: float = 1e-9,
                       batch: int = 20000) -> VertexResult:
    """Minimize ``c x`` over a bounded polytope by listing its vertices.

    Every finite bound is a hyperplane; each choice of ``n`` linearly
    independent hyperplanes gives a candidate point, kept when it satisfies
    all bounds.  The polytope must be bounded (finite column bounds).
    """
    c = np.asarray(c, float)
    A = np.asarray(A, float).reshape(-1, c.size)
    n = c.size
    planes, rhs = [], []
    for i in range(A.shape[0]):
        for b in (row_lo[i], row_hi[i]):
            if np.isfinite(b):
                planes.append(A[i])
                rhs.append(b)
    eye = np.eye(n)
    for j in range(n):
        if not (np.isfinite(col_lo[j]) and np.isfinite(col_hi[j])):
            raise OracleError("vertex enumeration needs finite column bounds")
        planes += [eye[j], eye[j]]
        rhs += [col_lo[j], col_hi[j]]
    H = np.array(planes)
    h = np.array(rhs)
    best_obj, best_x, count = math.inf, None, 0
    rlo = np.asarray(row_lo, float)
    rhi = np.asarray(row_hi, float)
    clo = np.asarray(col_lo, float)
    chi = np.asarray(col_hi, float)
    it = combinations(range(len(H)), n)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        idx = np.array(chunk)
        M = H[idx]
        good = np.abs(np.linalg.det(M)) > 1e-10
        if not good.any():
            continue
        X = np.linalg.solve(M[good], h[idx[good]][..., None])[..., 0]
        Ax = X @ A.T
        scale = 1.0 + np.abs(Ax)
        ok = np.all(Ax >= rlo - tol * scale, axis=1) & np.all(Ax <= rhi + tol * scale, axis=1)
        ok &= np.all(X >= clo - tol * (1 + np.abs(X)), axis=1)
        ok &= np.all(X <= chi + tol * (1 + np.abs(X)), axis=1)
        if not ok.any():
            continue
        vals = X[ok] @ c
        count += int(ok.sum())
        k = int(np.argmin(vals))
        if vals[k] < best_obj:
            best_obj, best_x = float(vals[k]), X[ok][k]
    if best_x is None:
        return VertexResult("infeasible", math.inf, None, 0)
    return VertexResult("optimal", best_obj, best_x, count)
