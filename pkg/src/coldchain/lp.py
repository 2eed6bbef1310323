"""Sparse mixed-integer linear program container.

Every model minimises ``c @ x + constant`` subject to linear rows
``terms . x  (<=|=|>=)  rhs`` and per-variable bounds.  Variables are either
continuous or binary.  The container is deliberately dumb: builders append to
it, solvers read it through :meth:`MilpModel.to_arrays`.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

CONTINUOUS = "continuous"
BINARY = "binary"
LE, EQ, GE = "<=", "=", ">="
SENSES = (LE, EQ, GE)
INF = math.inf


class ModelError(ValueError):
    """Raised on malformed model construction (bad names, ids, bounds)."""


@dataclass
class VarDef:
    id: int
    name: str
    lower: float = 0.0
    upper: float = INF
    kind: str = CONTINUOUS
    # higher value is branched on first when fractionality ties
    branch_priority: int = 0


@dataclass
class LinRow:
    id: int
    name: str
    terms: dict[int, float]
    sense: str
    rhs: float

    def activity(self, x: Sequence[float] | np.ndarray) -> float:
        return math.fsum(coef * x[j] for j, coef in self.terms.items())

    def slack(self, x: Sequence[float] | np.ndarray) -> float:
        """Signed slack; negative means the row is violated."""
        act = self.activity(x)
        if self.sense == LE:
            return self.rhs - act
        if self.sense == GE:
            return act - self.rhs
        return -abs(act - self.rhs)


@dataclass
class Evaluation:
    objective: float
    row_violations: list[tuple[str, float]] = field(default_factory=list)
    bound_violations: list[tuple[str, float]] = field(default_factory=list)
    integrality_violations: list[tuple[str, float]] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return not (self.row_violations or self.bound_violations or self.integrality_violations)


def _merge_terms(terms: Iterable[tuple[int, float]]) -> dict[int, float]:
    merged: dict[int, float] = {}
    for j, coef in terms:
        merged[j] = merged.get(j, 0.0) + float(coef)
    return {j: c for j, c in merged.items() if c != 0.0}


class MilpModel:
    """Minimisation MILP with sparse rows.  See module docstring."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[VarDef] = []
        self.rows: list[LinRow] = []
        self.objective: dict[int, float] = {}
        self.objective_constant = 0.0
        self._var_names: dict[str, int] = {}
        self._row_names: dict[str, int] = {}
        self._frozen = False

    # -- construction -------------------------------------------------------

    def _check_mutable(self) -> None:
        if self._frozen:
            raise ModelError("model is frozen")

    def add_variable(
        self,
        name: str,
        lower: float = 0.0,
        upper: float = INF,
        kind: str = CONTINUOUS,
        branch_priority: int = 0,
    ) -> int:
        self._check_mutable()
        if name in self._var_names:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ModelError(f"unknown variable kind {kind!r}")
        lower, upper = float(lower), float(upper)
        if kind == BINARY:
            lower, upper = max(lower, 0.0), min(upper, 1.0)
        if lower > upper:
            raise ModelError(f"variable {name!r}: lower {lower} > upper {upper}")
        vid = len(self.variables)
        self.variables.append(VarDef(vid, name, lower, upper, kind, branch_priority))
        self._var_names[name] = vid
        return vid

    def add_constraint(
        self, name: str, terms: Iterable[tuple[int, float]], sense: str, rhs: float
    ) -> int:
        self._check_mutable()
        if name in self._row_names:
            raise ModelError(f"duplicate row name {name!r}")
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        merged = _merge_terms(terms)
        n = len(self.variables)
        for j, coef in merged.items():
            if not 0 <= j < n:
                raise ModelError(f"row {name!r} references unknown variable id {j}")
            if not math.isfinite(coef):
                raise ModelError(f"row {name!r}: non-finite coefficient on {j}")
        rid = len(self.rows)
        self.rows.append(LinRow(rid, name, merged, sense, float(rhs)))
        self._row_names[name] = rid
        return rid

    def set_objective(self, terms: Iterable[tuple[int, float]], constant: float = 0.0) -> None:
        self._check_mutable()
        merged = _merge_terms(terms)
        for j in merged:
            if not 0 <= j < len(self.variables):
                raise ModelError(f"objective references unknown variable id {j}")
        self.objective = merged
        self.objective_constant = float(constant)

    def add_objective_terms(self, terms: Iterable[tuple[int, float]]) -> None:
        self._check_mutable()
        self.set_objective(list(self.objective.items()) + list(terms), self.objective_constant)

    def replace_row(self, rid: int, terms: Iterable[tuple[int, float]], sense: str, rhs: float) -> None:
        self._check_mutable()
        old = self.rows[rid]
        merged = _merge_terms(terms)
        for j in merged:
            if not 0 <= j < len(self.variables):
                raise ModelError(f"row {old.name!r} references unknown variable id {j}")
        if sense not in SENSES:
            raise ModelError(f"unknown sense {sense!r}")
        self.rows[rid] = LinRow(rid, old.name, merged, sense, float(rhs))

    def freeze(self) -> "MilpModel":
        self._frozen = True
        return self

    def copy(self) -> "MilpModel":
        dup = copy.deepcopy(self)
        dup._frozen = False
        return dup

    # -- lookup -------------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def var_id(self, name: str) -> int:
        return self._var_names[name]

    def row_id(self, name: str) -> int:
        return self._row_names[name]

    def binary_ids(self) -> list[int]:
        return [v.id for v in self.variables if v.kind == BINARY]

    # -- numeric views ------------------------------------------------------

    def to_arrays(self):
        """Return ``(c, A, row_lo, row_hi, lb, ub, is_binary)``.

        ``A`` is CSR with one row per model row; ``row_lo <= A x <= row_hi``.
        """
        n, m = self.n_vars, self.n_rows
        c = np.zeros(n)
        for j, coef in self.objective.items():
            c[j] = coef
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        row_lo = np.empty(m)
        row_hi = np.empty(m)
        for r in self.rows:
            for j, coef in r.terms.items():
                indices.append(j)
                data.append(coef)
            indptr.append(len(indices))
            row_lo[r.id] = r.rhs if r.sense in (EQ, GE) else -INF
            row_hi[r.id] = r.rhs if r.sense in (EQ, LE) else INF
        A = sp.csr_matrix((data, indices, indptr), shape=(m, n))
        lb = np.array([v.lower for v in self.variables], dtype=float)
        ub = np.array([v.upper for v in self.variables], dtype=float)
        is_bin = np.array([v.kind == BINARY for v in self.variables], dtype=bool)
        return c, A, row_lo, row_hi, lb, ub, is_bin

    def objective_value(self, x: Sequence[float] | np.ndarray) -> float:
        return math.fsum(coef * x[j] for j, coef in self.objective.items()) + self.objective_constant


def evaluate(
    model: MilpModel,
    assignment: Mapping[int, float] | Sequence[float] | np.ndarray,
    tol: float = 1e-6,
) -> Evaluation:
    """Check an assignment against every row, bound and integrality requirement.

    Violations are reported as ``(name, signed_slack)`` with negative slack.
    """
    n = model.n_vars
    if isinstance(assignment, Mapping):
        missing = [j for j in range(n) if j not in assignment]
        if missing:
            raise ModelError(f"assignment missing {len(missing)} variables, e.g. id {missing[0]}")
        x = np.array([float(assignment[j]) for j in range(n)])
    else:
        x = np.asarray(assignment, dtype=float)
        if x.shape != (n,):
            raise ModelError(f"assignment has shape {x.shape}, expected ({n},)")

    ev = Evaluation(objective=model.objective_value(x))
    for r in model.rows:
        s = r.slack(x)
        if s < -tol:
            ev.row_violations.append((r.name, s))
    for v in model.variables:
        xv = x[v.id]
        if xv < v.lower - tol:
            ev.bound_violations.append((v.name, xv - v.lower))
        elif xv > v.upper + tol:
            ev.bound_violations.append((v.name, v.upper - xv))
        if v.kind == BINARY:
            frac = abs(xv - round(xv))
            if frac > tol:
                ev.integrality_violations.append((v.name, -frac))
    return ev
