import math

import numpy as np
import pytest
from scipy.optimize import linprog

from gridhorizon.builder import build
from gridhorizon.milp import relax
from gridhorizon.scenarios import learning_study
from gridhorizon.simplex import (INFEASIBLE, OPTIMAL, UNBOUNDED, IterationLimit, LpEngine,
                                 dual_bound)
from gridhorizon.suite import random_lp

INF = np.inf


def lp(c, A, rlo, rhi, lo, hi, **kw):
    return LpEngine(np.array(A, float), np.array(c, float), np.array(rlo, float),
                    np.array(rhi, float), np.array(lo, float), np.array(hi, float), **kw)


def test_textbook_max():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    sol = lp([-3, -5], [[1, 0], [0, 2], [3, 2]], [-INF] * 3, [4, 12, 18], [0, 0], [INF, INF]).solve()
    assert sol.status == OPTIMAL
    assert math.isclose(sol.objective, -36.0, rel_tol=1e-12)
    assert np.allclose(sol.values, [2, 6])


def test_equality_and_ranges():
    sol = lp([1, 1], [[1, 1], [1, -1]], [3, -1], [3, 1], [0, 0], [5, 5]).solve()
    assert sol.status == OPTIMAL and math.isclose(sol.objective, 3.0)


def test_free_variables():
    sol = lp([1, -1], [[1, 1], [1, -1]], [-INF, -2], [4, INF], [-INF, -INF], [INF, INF]).solve()
    assert sol.status == OPTIMAL and math.isclose(sol.objective, -2.0)


def test_infeasible():
    sol = lp([1, 1], [[1, 1]], [5], [INF], [0, 0], [1, 1]).solve()
    assert sol.status == INFEASIBLE


def test_unbounded_with_ray():
    sol = lp([-1, 0], [[1, -1]], [-INF], [1], [0, 0], [INF, INF]).solve()
    assert sol.status == UNBOUNDED
    assert sol.ray[0] > 0


def test_degenerate_cycling_example():
    # Beale's cycling example; Dantzig pricing alone may cycle here
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    sol = lp(c, A, [-INF] * 3, [0, 0, 1], [0] * 4, [INF] * 4).solve()
    assert sol.status == OPTIMAL and math.isclose(sol.objective, -0.05, rel_tol=1e-9)


def test_iteration_limit_is_per_solve():
    eng = lp([-3, -5], [[1, 0], [0, 2], [3, 2]], [-INF] * 3, [4, 12, 18], [0, 0], [INF, INF],
             max_iter=5)
    for _ in range(10):
        assert eng.solve().status == OPTIMAL
    tight = lp([-3, -5], [[1, 0], [0, 2], [3, 2]], [-INF] * 3, [4, 12, 18], [0, 0], [INF, INF],
               max_iter=1)
    with pytest.raises(IterationLimit):
        tight.solve()


def test_warm_start_matches_cold():
    model, _ = build(learning_study(0.01))
    A, c, rlo, rhi, lo, hi = relax(model).arrays()
    eng = LpEngine(A, c, rlo, rhi, lo, hi)
    root = eng.solve()
    snap = eng.snapshot()
    rng = np.random.default_rng(3)
    bins = model.binaries()
    for vid in rng.choice(bins, size=6, replace=False):
        lo2, hi2 = lo.copy(), hi.copy()
        hi2[vid] = 0.0
        eng.set_col_bounds(lo2, hi2)
        eng.restore(snap)
        warm = eng.solve(warm=True)
        cold = LpEngine(A, c, rlo, rhi, lo2, hi2).solve()
        assert warm.status == cold.status
        if cold.status == OPTIMAL:
            assert math.isclose(warm.objective, cold.objective, rel_tol=1e-9)
            assert warm.objective >= root.objective - 1e-7


def _highs(c, A, rlo, rhi, lo, hi):
    A_ub = np.vstack([A[np.isfinite(rhi)], -A[np.isfinite(rlo)]])
    b_ub = np.concatenate([rhi[np.isfinite(rhi)], -rlo[np.isfinite(rlo)]])
    return linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=list(zip(lo, hi)), method="highs")


@pytest.mark.parametrize("seed", range(30))
def test_random_lp_against_highs(seed):
    rng = np.random.default_rng(1000 + seed)
    c, A, rlo, rhi, lo, hi = random_lp(rng)
    sol = LpEngine(A, c, rlo, rhi, lo, hi).solve()
    ref = _highs(c, A, rlo, rhi, lo, hi)
    assert ref.status == 0 and sol.status == OPTIMAL
    assert math.isclose(sol.objective, ref.fun, rel_tol=1e-7, abs_tol=1e-7)
    db = dual_bound(A, c, rlo, rhi, lo, hi, sol.dual_values)
    assert abs(db - sol.objective) <= 1e-6 * max(1.0, abs(sol.objective))


def test_dual_bound_is_a_lower_bound_for_any_multipliers():
    rng = np.random.default_rng(5)
    c, A, rlo, rhi, lo, hi = random_lp(rng)
    opt = LpEngine(A, c, rlo, rhi, lo, hi).solve().objective
    for _ in range(20):
        y = rng.normal(size=A.shape[0])
        assert dual_bound(A, c, rlo, rhi, lo, hi, y) <= opt + 1e-9


def test_study_root_relaxation_matches_highs():
    model, _ = build(learning_study(0.01))
    A, c, rlo, rhi, lo, hi = relax(model).arrays()
    ours = LpEngine(A, c, rlo, rhi, lo, hi).solve()
    eq = np.isfinite(rlo) & np.isfinite(rhi) & (rlo == rhi)
    ub, lb = np.isfinite(rhi) & ~eq, np.isfinite(rlo) & ~eq
    import scipy.sparse as sp
    ref = linprog(c, A_ub=sp.vstack([A[ub], -A[lb]]), b_ub=np.concatenate([rhi[ub], -rlo[lb]]),
                  A_eq=A[eq], b_eq=rhi[eq], bounds=list(zip(lo, [None if h == INF else h for h in hi])),
                  method="highs")
    assert math.isclose(ours.objective, ref.fun, rel_tol=1e-8)


def test_singular_basis_is_repaired():
    # columns 0 and 1 are parallel, so a basis holding both is singular
    A = [[1, 2, 0], [1, 2, 1], [0, 0, 1]]
    args = ([1, 1, 1], A, [2, 3, 1], [INF, INF, INF], [0, 0, 0], [5, 5, 5])
    cold = lp(*args).solve()
    eng = lp(*args)
    eng.basis = np.array([0, 1, eng.n + 2])
    eng.state[:] = 1
    eng.state[eng.basis] = 0
    warm = eng.solve(warm=True)
    assert eng.repaired == 1
    assert warm.status == cold.status == OPTIMAL
    assert math.isclose(warm.objective, cold.objective, rel_tol=1e-12)
