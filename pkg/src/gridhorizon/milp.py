"""Solver-agnostic mixed-integer linear program container.

Rows carry a ``tag`` naming the model family they belong to (for the planner
these are equation labels such as ``"eq13"``), so tests and audits can count
and inspect constraints per family.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

CONTINUOUS = "continuous"
BINARY = "binary"

LE = "<="
GE = ">="
EQ = "="

SENSES = (LE, GE, EQ)


class ModelError(ValueError):
    """Raised on malformed variables, rows or fixings."""


@dataclass
class Variable:
    id: int
    name: str
    kind: str = CONTINUOUS
    lower: float = 0.0
    upper: float = math.inf
    objective_coeff: float = 0.0
    # branch=False marks binaries whose integrality is restored by a
    # completion hook instead of branching (see bnb.solve).
    branch: bool = True
    branch_key: tuple = ()


@dataclass
class Constraint:
    id: int
    name: str
    terms: list[tuple[int, float]]
    sense: str
    rhs: float
    tag: str = ""


@dataclass
class MilpModel:
    variables: list[Variable] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective_sense: str = "minimize"
    big_m_registry: dict[str, float] = field(default_factory=dict)
    name: str = "model"

    def __post_init__(self):
        self._by_name = {v.name: v.id for v in self.variables}

    # -- construction -----------------------------------------------------

    def add_variable(
        self,
        name: str,
        kind: str = CONTINUOUS,
        lower: float = 0.0,
        upper: float = math.inf,
        objective_coeff: float = 0.0,
        branch: bool = True,
        branch_key: tuple = (),
    ) -> int:
        if name in self._by_name:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ModelError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            if upper == math.inf:
                upper = 1.0
            if lower < 0 or upper > 1:
                raise ModelError(f"binary {name!r} bounds must lie within [0, 1]")
        if not lower <= upper:
            raise ModelError(f"variable {name!r} has lower {lower} > upper {upper}")
        if math.isnan(objective_coeff) or math.isinf(objective_coeff):
            raise ModelError(f"variable {name!r} objective coefficient not finite")
        vid = len(self.variables)
        self.variables.append(
            Variable(vid, name, kind, float(lower), float(upper),
                     float(objective_coeff), branch, tuple(branch_key))
        )
        self._by_name[name] = vid
        return vid

    def add_constraint(
        self,
        terms: Iterable[tuple[int, float]],
        sense: str,
        rhs: float,
        tag: str = "",
        name: str | None = None,
    ) -> int:
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        terms = [(int(v), float(a)) for v, a in terms]
        seen = set()
        nvar = len(self.variables)
        for v, a in terms:
            if not 0 <= v < nvar:
                raise ModelError(f"row references undeclared variable id {v}")
            if v in seen:
                raise ModelError(f"duplicate term for variable id {v}")
            if not math.isfinite(a):
                raise ModelError(f"non-finite coefficient on variable id {v}")
            seen.add(v)
        if not math.isfinite(rhs):
            raise ModelError("non-finite right-hand side")
        cid = len(self.constraints)
        if name is None:
            name = f"r{cid}"
        self.constraints.append(Constraint(cid, name, terms, sense, float(rhs), tag))
        return cid

    def register_big_m(self, tag: str, value: float) -> None:
        self.big_m_registry[tag] = float(value)

    # -- queries ----------------------------------------------------------

    def var_id(self, name: str) -> int:
        return self._by_name[name]

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_rows(self) -> int:
        return len(self.constraints)

    def binaries(self) -> list[int]:
        return [v.id for v in self.variables if v.kind == BINARY]

    def rows_tagged(self, tag: str) -> list[Constraint]:
        return [c for c in self.constraints if c.tag == tag]

    def tag_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for c in self.constraints:
            out[c.tag] = out.get(c.tag, 0) + 1
        return out

    def copy(self) -> "MilpModel":
        m = MilpModel(
            variables=[copy.copy(v) for v in self.variables],
            constraints=self.constraints,  # rows are never mutated after build
            objective_sense=self.objective_sense,
            big_m_registry=dict(self.big_m_registry),
            name=self.name,
        )
        return m

    # -- dense/sparse views used by the solvers ---------------------------

    def arrays(self):
        """Return ``(A, c, row_lo, row_hi, col_lo, col_hi)``.

        ``A`` is a CSR matrix; row bounds encode the sense so every row reads
        ``row_lo <= A x <= row_hi``.
        """
        rows, cols, vals = [], [], []
        m = len(self.constraints)
        row_lo = np.full(m, -np.inf)
        row_hi = np.full(m, np.inf)
        for c in self.constraints:
            for v, a in c.terms:
                if a != 0.0:
                    rows.append(c.id)
                    cols.append(v)
                    vals.append(a)
            if c.sense in (GE, EQ):
                row_lo[c.id] = c.rhs
            if c.sense in (LE, EQ):
                row_hi[c.id] = c.rhs
        n = len(self.variables)
        A = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
        c = np.array([v.objective_coeff for v in self.variables], dtype=float)
        lo = np.array([v.lower for v in self.variables], dtype=float)
        hi = np.array([v.upper for v in self.variables], dtype=float)
        return A, c, row_lo, row_hi, lo, hi

    def objective_value(self, x) -> float:
        return float(sum(v.objective_coeff * x[v.id] for v in self.variables))

    def violations(self, x, tol: float = 1e-6) -> list[tuple[int, float]]:
        """Rows and bounds violated by ``x`` beyond ``tol`` (scaled by row size).

        Returns ``(index, amount)`` pairs; bound violations use negative
        indices ``-(var_id + 1)``.
        """
        out = []
        for c in self.constraints:
            act = sum(a * x[v] for v, a in c.terms)
            scale = max(1.0, abs(c.rhs))
            if c.sense == LE:
                viol = act - c.rhs
            elif c.sense == GE:
                viol = c.rhs - act
            else:
                viol = abs(act - c.rhs)
            if viol > tol * scale:
                out.append((c.id, viol))
        for v in self.variables:
            val = x[v.id]
            viol = max(v.lower - val, val - v.upper, 0.0)
            if v.kind == BINARY:
                viol = max(viol, min(abs(val), abs(val - 1.0)))
            if viol > tol:
                out.append((-(v.id + 1), viol))
        return out


def relax(model: MilpModel) -> MilpModel:
    """Copy of ``model`` with every binary re-kinded continuous on its bounds."""
    out = model.copy()
    for v in out.variables:
        if v.kind == BINARY:
            v.kind = CONTINUOUS
    return out


def fix(model: MilpModel, assignments: Mapping[int, float]) -> MilpModel:
    """Copy of ``model`` with the given binaries pinned to 0 or 1."""
    out = model.copy()
    for vid, val in assignments.items():
        v = out.variables[vid]
        if v.kind != BINARY:
            raise ModelError(f"cannot fix non-binary variable {v.name!r}")
        if val not in (0, 1):
            raise ModelError(f"binary {v.name!r} can only be fixed to 0 or 1, got {val}")
        if not v.lower <= val <= v.upper:
            raise ModelError(
                f"fixing {v.name!r} to {val} conflicts with bounds [{v.lower}, {v.upper}]"
            )
        v.lower = v.upper = float(val)
    return out
