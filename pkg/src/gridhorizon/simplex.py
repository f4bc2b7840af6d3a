"""Bounded-variable revised simplex.

Rows are written ``row_lo <= A x <= row_hi``; internally every row gets a
logical variable ``r = A x`` so the working system is ``[A  -I] (x, r) = 0``
with simple bounds on every column.  The basis is kept as a sparse LU
factorization plus an eta file, refactorized every ``refactor_every`` pivots.

Two pivoting loops share that machinery:

* primal simplex with a composite phase 1 (minimize the sum of bound
  violations of basic variables, then the true objective), Dantzig pricing
  and a switch to Bland's rule once no progress was made for ``3 * rows``
  consecutive iterations;
* dual simplex, used when a warm-started basis is dual feasible but primal
  infeasible, which is the typical state after a branch-and-bound bound
  change.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import qr
from scipy.sparse.linalg import splu

from .milp import BINARY, MilpModel

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_BASIC, _LOWER, _UPPER, _FREE = 0, 1, 2, 3
_PIVOT_TOL = 1e-9


class NumericalError(RuntimeError):
    """The basis could not be refactorized even after restarts."""


class IterationLimit(RuntimeError):
    pass


@dataclass
class LpSolution:
    status: str
    objective: float
    values: np.ndarray
    dual_values: np.ndarray
    iterations: int
    reduced_costs: np.ndarray = field(default=None, repr=False)
    ray: np.ndarray | None = field(default=None, repr=False)


class LpEngine:
    """Owns one LP and its basis; bounds may be changed between solves.

    One engine serves one solve at a time.  ``snapshot``/``restore`` move a
    basis between solves so branch-and-bound children can warm start from
    their parent.
    """

    def __init__(self, A, c, row_lo, row_hi, col_lo, col_hi,
                 feas_tol=1e-7, opt_tol=1e-7, refactor_every=64, max_iter=None):
        A = sp.csc_matrix(A, dtype=float)
        m, n = A.shape
        self.m, self.n = m, n
        self.K = sp.hstack([A, -sp.identity(m, format="csc")], format="csc")
        self.KT = self.K.T.tocsr()
        self.cost = np.concatenate([np.asarray(c, float), np.zeros(m)])
        self.lo = np.concatenate([np.asarray(col_lo, float), np.asarray(row_lo, float)])
        self.hi = np.concatenate([np.asarray(col_hi, float), np.asarray(row_hi, float)])
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.refactor_every = refactor_every
        self.max_iter = max_iter or 50 * (m + n) + 1000
        self.iterations = 0
        self.pivots = 0
        self.repaired = 0
        self._slack_basis()

    @classmethod
    def from_model(cls, model: MilpModel, **kw):
        A, c, rlo, rhi, lo, hi = model.arrays()
        return cls(A, c, rlo, rhi, lo, hi, **kw)

    # -- bounds and basis state --------------------------------------------

    def set_col_bounds(self, lo, hi):
        self.lo[: self.n] = lo
        self.hi[: self.n] = hi

    def col_bounds(self):
        return self.lo[: self.n].copy(), self.hi[: self.n].copy()

    def snapshot(self):
        return self.basis.copy(), self.state.copy()

    def restore(self, snap):
        self.basis = snap[0].copy()
        self.state = snap[1].copy()
        self.lu = None

    def _slack_basis(self):
        N = self.n + self.m
        self.basis = np.arange(self.n, N)
        self.state = np.full(N, _LOWER, dtype=np.int8)
        self.state[self.basis] = _BASIC
        self.lu = None

    def _place_nonbasic(self):
        """Put every nonbasic column on a finite bound consistent with its state."""
        nb = self.state != _BASIC
        lo, hi = self.lo, self.hi
        finite_lo = np.isfinite(lo)
        finite_hi = np.isfinite(hi)
        st = self.state
        want_lo = nb & (st == _LOWER)
        want_hi = nb & (st == _UPPER)
        fix = want_lo & ~finite_lo
        st[fix & finite_hi] = _UPPER
        st[fix & ~finite_hi] = _FREE
        fix = want_hi & ~finite_hi
        st[fix & finite_lo] = _LOWER
        st[fix & ~finite_lo] = _FREE
        free = nb & (st == _FREE)
        st[free & finite_lo] = _LOWER
        st[free & ~finite_lo & finite_hi] = _UPPER
        x = np.zeros(self.n + self.m)
        x[st == _LOWER] = lo[st == _LOWER]
        x[st == _UPPER] = hi[st == _UPPER]
        self.x = x

    # -- factorization -------------------------------------------------------

    def _factor(self):
        try:
            self.lu = self._lu()
        except RuntimeError:
            self._repair()
            try:
                self.lu = self._lu()
            except RuntimeError as exc:
                raise NumericalError(str(exc)) from exc
        self.etas = []
        xn = self.x.copy()
        xn[self.basis] = 0.0
        self.x[self.basis] = self.lu.solve(-(self.K @ xn))

    def _lu(self):
        return splu(sp.csc_matrix(self.K[:, self.basis]), permc_spec="COLAMD",
                    options={"SymmetricMode": False})

    def _repair(self):
        """Swap linearly dependent basic columns for logicals of uncovered rows."""
        B = self.K[:, self.basis].toarray()
        _, R, perm = qr(B, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > 1e-9 * max(diag[0], 1.0)))
        keep, drop = perm[:rank], perm[rank:]
        Q, _ = qr(B[:, keep], mode="full")
        _, _, rows = qr(Q[:, rank:].T, mode="economic", pivoting=True)
        for pos, row in zip(drop, rows[: len(drop)]):
            out = self.basis[pos]
            self.state[out] = _LOWER
            self.basis[pos] = self.n + row
            self.state[self.n + row] = _BASIC
        self._place_nonbasic()
        self.repaired += 1
        log.debug("repaired singular basis: %d columns replaced", len(drop))

    def _ftran(self, v):
        w = self.lu.solve(v)
        for r, u in self.etas:
            wr = w[r]
            if wr != 0.0:
                w += u * wr
        return w

    def _btran(self, v):
        v = v.copy()
        for r, u in reversed(self.etas):
            v[r] += u @ v
        return self.lu.solve(v, trans="T")

    def _column(self, j):
        K = self.K
        v = np.zeros(self.m)
        s, e = K.indptr[j], K.indptr[j + 1]
        v[K.indices[s:e]] = K.data[s:e]
        return v

    def _pivot(self, r, q, alpha):
        u = -alpha / alpha[r]
        u[r] = 1.0 / alpha[r] - 1.0
        self.etas.append((r, u))
        self.basis[r] = q
        self.state[q] = _BASIC
        self.pivots += 1
        if len(self.etas) >= self.refactor_every:
            self._factor()

    # -- helpers ---------------------------------------------------------------

    def _tol(self, bound):
        return self.feas_tol * (1.0 + np.abs(np.where(np.isfinite(bound), bound, 0.0)))

    def _infeasibility(self):
        xb = self.x[self.basis]
        lo, hi = self.lo[self.basis], self.hi[self.basis]
        below = xb < lo - self._tol(lo)
        above = xb > hi + self._tol(hi)
        return below, above

    def _reduced_costs(self, cb):
        y = self._btran(cb)
        d = self.cost_phase - self.KT @ y
        return y, d

    def _eligible(self, d):
        st = self.state
        movable = self.lo < self.hi
        up = (st == _LOWER) & (d < -self.opt_tol) & movable
        down = (st == _UPPER) & (d > self.opt_tol) & movable
        free = (st == _FREE) & (np.abs(d) > self.opt_tol)
        return up | free & (d < 0), down | free & (d > 0)

    # -- public entry -------------------------------------------------------------

    def solve(self, warm=False) -> LpSolution:
        """Solve from the current basis (slack basis unless ``restore`` was used)."""
        if self.m == 0:
            return self._solve_unconstrained()
        restarts = 0
        # the iteration counter is cumulative over the engine's life
        self._iter_cap = self.iterations + self.max_iter
        while True:
            try:
                if not warm:
                    self._slack_basis()
                self._place_nonbasic()
                self._factor()
                return self._run()
            except NumericalError:
                restarts += 1
                log.debug("basis refactorization failed; restart %d", restarts)
                if restarts > 2:
                    raise
                warm = False

    def _solve_unconstrained(self) -> LpSolution:
        c, lo, hi = self.cost, self.lo, self.hi
        x = np.where(c > 0, lo, np.where(c < 0, hi, np.where(np.isfinite(lo), lo,
                                                            np.where(np.isfinite(hi), hi, 0.0))))
        if not np.all(np.isfinite(x)):
            ray = np.where(np.isfinite(x), 0.0, -np.sign(c))
            return LpSolution(UNBOUNDED, -np.inf, x, np.zeros(0), 0, ray=ray)
        if np.any(lo > hi):
            return LpSolution(INFEASIBLE, np.inf, x, np.zeros(0), 0)
        return LpSolution(OPTIMAL, float(c @ x), x, np.zeros(0), 0, c.copy())

    def _run(self) -> LpSolution:
        start_iter = self.iterations
        repaired = self.repaired
        if self._dual_feasible_start():
            status = self._dual_loop()
            # a basis repair can break dual feasibility; let the primal loop decide then
            if status == INFEASIBLE and self.repaired == repaired:
                return self._result(INFEASIBLE, start_iter)
        status, ray = self._primal_loop()
        return self._result(status, start_iter, ray)

    def _result(self, status, start_iter, ray=None):
        iters = self.iterations - start_iter
        n = self.n
        x = self.x[:n].copy()
        if status == OPTIMAL:
            self.cost_phase = self.cost
            y, d = self._reduced_costs(self.cost[self.basis])
            obj = float(self.cost[:n] @ x)
            return LpSolution(OPTIMAL, obj, x, y, iters, d[:n].copy())
        if status == UNBOUNDED:
            return LpSolution(UNBOUNDED, -np.inf, x, np.zeros(self.m), iters, ray=ray)
        return LpSolution(INFEASIBLE, np.inf, x, np.zeros(self.m), iters)

    # -- primal --------------------------------------------------------------------

    def _primal_loop(self):
        m = self.m
        bland = False
        stall = 0
        last_obj = np.inf
        last_phase = None
        while True:
            if self.iterations >= self._iter_cap:
                raise IterationLimit(f"simplex iteration limit {self.max_iter} reached")
            below, above = self._infeasibility()
            phase = 1 if (below.any() or above.any()) else 2
            if phase == 1:
                cb = np.zeros(m)
                cb[below] = -1.0
                cb[above] = 1.0
                self.cost_phase = np.zeros(self.n + m)
                self.cost_phase[self.basis] = cb
                xb = self.x[self.basis]
                obj = float(np.sum(self.lo[self.basis][below] - xb[below])
                            + np.sum(xb[above] - self.hi[self.basis][above]))
            else:
                self.cost_phase = self.cost
                cb = self.cost[self.basis]
                obj = float(self.cost @ self.x)
            if phase != last_phase:
                stall, last_obj, last_phase = 0, np.inf, phase
            if obj < last_obj - 1e-12 * (1.0 + abs(obj)):
                stall = 0
                last_obj = obj
            else:
                stall += 1
                if stall >= 3 * m and not bland:
                    log.debug("no progress for %d iterations; switching to Bland's rule", stall)
                    bland = True
            y, d = self._reduced_costs(cb)
            up, down = self._eligible(d)
            cand = np.flatnonzero(up | down)
            if cand.size == 0:
                if self.etas:
                    self._factor()
                    continue
                if phase == 1:
                    return INFEASIBLE, None
                return OPTIMAL, None
            q = int(cand[0]) if bland else int(cand[np.argmax(np.abs(d[cand]))])
            sigma = 1.0 if up[q] else -1.0
            alpha = self._ftran(self._column(q))
            r, t, bound_side = self._primal_ratio(alpha, sigma, q, bland, phase)
            if r is None and t is None:
                if phase == 1:
                    # Cannot happen in exact arithmetic; refresh and retry.
                    self._factor()
                    self.iterations += 1
                    continue
                ray = np.zeros(self.n + m)
                ray[q] = sigma
                ray[self.basis] = -sigma * alpha
                return UNBOUNDED, ray[: self.n]
            self.iterations += 1
            self.x[q] += sigma * t
            self.x[self.basis] -= sigma * t * alpha
            if r is None:
                self.state[q] = _UPPER if sigma > 0 else _LOWER
                self.x[q] = self.hi[q] if sigma > 0 else self.lo[q]
                continue
            leave = self.basis[r]
            if bound_side == _LOWER:
                self.x[leave] = self.lo[leave]
            else:
                self.x[leave] = self.hi[leave]
            self.state[leave] = bound_side
            self._pivot(r, q, alpha)

    def _primal_ratio(self, alpha, sigma, q, bland, phase):
        g = -sigma * alpha
        basis = self.basis
        xb = self.x[basis]
        lo, hi = self.lo[basis], self.hi[basis]
        tlo, thi = self._tol(lo), self._tol(hi)
        limit = np.full(self.m, np.inf)
        side = np.zeros(self.m, dtype=np.int8)
        dec = g < -_PIVOT_TOL
        inc = g > _PIVOT_TOL
        below = xb < lo - tlo
        above = xb > hi + thi
        feas = ~below & ~above
        # decreasing basics
        sel = dec & above
        limit[sel] = (xb[sel] - hi[sel]) / -g[sel]
        side[sel] = _UPPER
        sel = dec & feas & np.isfinite(lo)
        limit[sel] = (xb[sel] - lo[sel]) / -g[sel]
        side[sel] = _LOWER
        # increasing basics
        sel = inc & below
        limit[sel] = (lo[sel] - xb[sel]) / g[sel]
        side[sel] = _LOWER
        sel = inc & feas & np.isfinite(hi)
        limit[sel] = (hi[sel] - xb[sel]) / g[sel]
        side[sel] = _UPPER
        np.maximum(limit, 0.0, out=limit)
        flip = self.hi[q] - self.lo[q]
        tmin = limit.min() if self.m else np.inf
        if not np.isfinite(tmin) and not np.isfinite(flip):
            return None, None, None
        if flip <= tmin:
            return None, float(flip), None
        ties = np.flatnonzero(limit <= tmin + 1e-12 * (1.0 + tmin))
        if bland:
            r = int(ties[np.argmin(basis[ties])])
        else:
            r = int(ties[np.argmax(np.abs(alpha[ties]))])
        return r, float(limit[r]), int(side[r])

    # -- dual ----------------------------------------------------------------------

    def _dual_feasible_start(self) -> bool:
        """Check (and repair boxed columns for) dual feasibility of the basis."""
        self.cost_phase = self.cost
        _, d = self._reduced_costs(self.cost[self.basis])
        st = self.state
        nb = st != _BASIC
        tol = self.opt_tol
        boxed = np.isfinite(self.lo) & np.isfinite(self.hi)
        wrong_lo = nb & (st == _LOWER) & (d < -tol)
        wrong_hi = nb & (st == _UPPER) & (d > tol)
        wrong_free = nb & (st == _FREE) & (np.abs(d) > tol)
        fixed = self.lo == self.hi
        bad = (wrong_lo | wrong_hi | wrong_free) & ~fixed
        if (bad & ~boxed).any():
            return False
        if bad.any():
            flip_up = bad & wrong_lo
            flip_dn = bad & wrong_hi
            st[flip_up] = _UPPER
            st[flip_dn] = _LOWER
            self._place_nonbasic()
            self._factor()
        below, above = self._infeasibility()
        return bool(below.any() or above.any())

    def _dual_loop(self):
        m = self.m
        bland = False
        stall = 0
        last_obj = -np.inf
        self.cost_phase = self.cost
        while True:
            if self.iterations >= self._iter_cap:
                raise IterationLimit(f"simplex iteration limit {self.max_iter} reached")
            below, above = self._infeasibility()
            if not (below.any() or above.any()):
                return OPTIMAL
            obj = float(self.cost @ self.x)
            if obj > last_obj + 1e-12 * (1.0 + abs(obj)):
                stall, last_obj = 0, obj
            else:
                stall += 1
                if stall >= 3 * m:
                    bland = True
            xb = self.x[self.basis]
            lo, hi = self.lo[self.basis], self.hi[self.basis]
            viol = np.where(below, lo - xb, 0.0) + np.where(above, xb - hi, 0.0)
            if bland:
                rows = np.flatnonzero(viol > 0)
                r = int(rows[np.argmin(self.basis[rows])])
            else:
                r = int(np.argmax(viol))
            go_up = bool(below[r])
            e = np.zeros(m)
            e[r] = 1.0
            rho = self._btran(e)
            arow = self.KT @ rho
            y, d = self._reduced_costs(self.cost[self.basis])
            st = self.state
            movable = (st != _BASIC) & (self.lo < self.hi)
            can_up = movable & ((st == _LOWER) | (st == _FREE))
            can_dn = movable & ((st == _UPPER) | (st == _FREE))
            if go_up:
                # x_r changes by -sigma*arow_j*t; need it to increase
                elig_up = can_up & (arow < -_PIVOT_TOL)
                elig_dn = can_dn & (arow > _PIVOT_TOL)
            else:
                elig_up = can_up & (arow > _PIVOT_TOL)
                elig_dn = can_dn & (arow < -_PIVOT_TOL)
            cand = np.flatnonzero(elig_up | elig_dn)
            if cand.size == 0:
                return INFEASIBLE
            ratios = np.abs(d[cand]) / np.abs(arow[cand])
            rmin = ratios.min()
            ties = cand[ratios <= rmin + 1e-12 * (1.0 + rmin)]
            if bland:
                q = int(ties.min())
            else:
                q = int(ties[np.argmax(np.abs(arow[ties]))])
            sigma = 1.0 if elig_up[q] else -1.0
            alpha = self._ftran(self._column(q))
            if abs(alpha[r]) < _PIVOT_TOL:
                self._factor()
                self.iterations += 1
                continue
            leave = self.basis[r]
            target = self.lo[leave] if go_up else self.hi[leave]
            t = (self.x[leave] - target) / (sigma * alpha[r])
            t = max(t, 0.0)
            self.iterations += 1
            self.x[q] += sigma * t
            self.x[self.basis] -= sigma * t * alpha
            self.x[leave] = target
            self.state[leave] = _LOWER if go_up else _UPPER
            self._pivot(r, q, alpha)


def solve_lp(model: MilpModel, **options) -> LpSolution:
    """Solve a continuous model (relax binaries first) from the slack basis."""
    if any(v.kind == BINARY for v in model.variables):
        raise ValueError("solve_lp needs a model without binaries; call relax() first")
    eng = LpEngine.from_model(model, **options)
    return eng.solve()


def dual_bound(A, c, row_lo, row_hi, col_lo, col_hi, duals, tol: float = 1e-9) -> float:
    """Lagrangian lower bound from row duals ``y``.

    With ``d = c - A^T y`` the bound is
    ``sum_j min(d_j lo_j, d_j hi_j) + sum_i min(y_i lo_i, y_i hi_i)``; at an
    optimal basis it equals the primal objective.  Multipliers below ``tol``
    are treated as zero so infinite bounds do not poison the sum.
    """
    A = sp.csr_matrix(A, dtype=float)
    y = np.asarray(duals, float)
    d = np.asarray(c, float) - A.T @ y

    def part(mult, lo, hi):
        lo, hi = np.asarray(lo, float), np.asarray(hi, float)
        mult = np.where(np.abs(mult) <= tol, 0.0, mult)
        pick = np.where(mult > 0, lo, hi)
        if np.any((mult != 0) & ~np.isfinite(pick)):
            return -np.inf
        return float(np.sum(np.where(mult != 0, mult * np.where(np.isfinite(pick), pick, 0.0), 0.0)))

    return part(d, col_lo, col_hi) + part(y, row_lo, row_hi)
