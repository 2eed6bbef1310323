"""Bertsimas-Sim robust counterparts.

A row ``sum_j a_j x_j <= b`` whose coefficients lie in ``[a_j - ah_j, a_j + ah_j]``
and where at most ``gamma`` of them deviate (fractionally for the last one)
is replaced by its dualized form

    sum_j a_j x_j + z * gamma + sum_j p_j <= b
    z + p_j >= ah_j * y_j,   -y_j <= x_j <= y_j,   z, p, y >= 0

For variables with a nonnegative lower bound ``y_j`` is ``x_j`` itself.
Right-hand-side uncertainty ``b in [b - bh, b + bh]`` is the same device with
``b`` moved to the left as the coefficient of a variable fixed at one, so the
dual row is ``z + p_b >= bh`` with a constant on the right.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .builder import VariableIndex, build_deterministic
from .lp import EQ, GE, LE, ModelError, MilpModel
from .model_data import Instance

log = logging.getLogger("coldchain.robust")


@dataclass
class UncertainRowSpec:
    """Uncertain entries of one row: ``entries`` holds ``(var id, deviation)``;
    nominal coefficients are taken from the row itself.  ``rhs_deviation`` is
    the half-width of the right-hand side interval, if uncertain."""

    row: int
    entries: Sequence[tuple[int, float]] = ()
    gamma: float = 0.0
    rhs_deviation: float | None = None

    @property
    def size(self) -> int:
        return len(self.entries) + (self.rhs_deviation is not None)

    def validate(self, model: MilpModel) -> None:
        if not 0 <= self.row < model.n_rows:
            raise ModelError(f"unknown row id {self.row}")
        for j, dev in self.entries:
            if not 0 <= j < model.n_vars:
                raise ModelError(f"unknown variable id {j}")
            if not dev >= 0:
                raise ModelError(f"negative deviation {dev} on variable {j}")
        if self.rhs_deviation is not None and not self.rhs_deviation >= 0:
            raise ModelError(f"negative rhs deviation {self.rhs_deviation}")
        if not 0 <= self.gamma <= self.size:
            raise ModelError(f"gamma {self.gamma} outside [0, {self.size}]")


@dataclass
class RobustVars:
    z: int
    p: dict[object, int]  # var id (or "rhs") -> dual id
    y: dict[int, int] = field(default_factory=dict)  # var id -> |x| proxy, only when lb < 0


def _abs_proxy(model: MilpModel, j: int, cache: dict[int, int]) -> int:
    """Variable standing for |x_j|: x_j itself when it cannot go negative."""
    if model.variables[j].lower >= 0:
        return j
    if j not in cache:
        y = model.add_variable(f"absy[{model.variables[j].name}]", 0.0)
        model.add_constraint(f"absy_hi[{model.variables[j].name}]", [(j, 1.0), (y, -1.0)], LE, 0.0)
        model.add_constraint(f"absy_lo[{model.variables[j].name}]", [(j, -1.0), (y, -1.0)], LE, 0.0)
        cache[j] = y
    return cache[j]


def robustify_row(model: MilpModel, spec: UncertainRowSpec, z_name: str | None = None,
                  p_names: dict[object, str] | None = None) -> RobustVars:
    """Replace row ``spec.row`` by its dualized robust form, in place.

    ``>=`` rows are handled by negation; equality rows cannot be protected
    this way and raise.  Names of the new duals default to ``rob_z[row]`` and
    ``rob_p[row,var]``.
    """
    spec.validate(model)
    row = model.rows[spec.row]
    if row.sense == EQ:
        raise ModelError(f"row {row.name!r} is an equality; robust form needs an inequality")
    sign = -1.0 if row.sense == GE else 1.0
    terms = {j: sign * c for j, c in row.terms.items()}
    rhs = sign * row.rhs
    p_names = p_names or {}

    z = model.add_variable(z_name or f"rob_z[{row.name}]", 0.0)
    out = RobustVars(z=z, p={})
    cache: dict[int, int] = {}
    for j, dev in spec.entries:
        p = model.add_variable(p_names.get(j, f"rob_p[{row.name},{model.variables[j].name}]"), 0.0)
        out.p[j] = p
        y = _abs_proxy(model, j, cache)
        if y != j:
            out.y[j] = y
        model.add_constraint(f"{model.variables[p].name}:dual", [(z, 1.0), (p, 1.0), (y, -float(dev))], GE, 0.0)
    if spec.rhs_deviation is not None:
        p = model.add_variable(p_names.get("rhs", f"rob_p[{row.name},rhs]"), 0.0)
        out.p["rhs"] = p
        model.add_constraint(f"{model.variables[p].name}:dual", [(z, 1.0), (p, 1.0)], GE,
                             float(spec.rhs_deviation))

    new_terms = list(terms.items()) + [(z, float(spec.gamma))] + [(p, 1.0) for p in out.p.values()]
    model.replace_row(spec.row, new_terms, LE, rhs)
    return out


def robustify_objective(model: MilpModel, entries: Sequence[tuple[int, float]], gamma0: float) -> RobustVars | None:
    """Protect the objective against at most ``gamma0`` cost deviations."""
    if not entries:
        return None
    for j, dev in entries:
        if not 0 <= j < model.n_vars:
            raise ModelError(f"unknown variable id {j}")
        if not dev >= 0:
            raise ModelError(f"negative cost deviation {dev} on variable {j}")
    if not 0 <= gamma0 <= len(entries):
        raise ModelError(f"gamma {gamma0} outside [0, {len(entries)}]")
    z = model.add_variable("rob_z[obj]", 0.0)
    out = RobustVars(z=z, p={})
    cache: dict[int, int] = {}
    added = [(z, float(gamma0))]
    for j, dev in entries:
        p = model.add_variable(f"rob_p[obj,{model.variables[j].name}]", 0.0)
        out.p[j] = p
        y = _abs_proxy(model, j, cache)
        if y != j:
            out.y[j] = y
        model.add_constraint(f"rob_p[obj,{model.variables[j].name}]:dual",
                             [(z, 1.0), (p, 1.0), (y, -float(dev))], GE, 0.0)
        added.append((p, 1.0))
    model.add_objective_terms(added)
    return out


@dataclass
class RobustConfig:
    """Uncertainty on max orders and budgets.

    Explicit deviation arrays win; otherwise deviations are
    ``deviation_fraction`` times the nominal values.
    """

    gamma: float = 1.0
    deviation_fraction: float = 0.1
    maxorder_deviation: np.ndarray | None = None  # (I, V)
    budget_deviation: np.ndarray | None = None  # (I,)

    def __post_init__(self):
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be a finite value >= 0, got {self.gamma}")
        if not self.deviation_fraction >= 0:
            raise ValueError(f"deviation_fraction must be >= 0, got {self.deviation_fraction}")
        for name in ("maxorder_deviation", "budget_deviation"):
            val = getattr(self, name)
            if val is not None:
                arr = np.asarray(val, dtype=float)
                if np.any(~(arr >= 0)):
                    raise ValueError(f"{name} must be >= 0")
                setattr(self, name, arr)

    def deviations(self, inst: Instance) -> tuple[np.ndarray, np.ndarray]:
        I, V = inst.dims.n_suppliers, inst.dims.n_vaccines
        if self.maxorder_deviation is not None:
            mh = self.maxorder_deviation
            if mh.shape != (I, V):
                raise ValueError(f"maxorder_deviation has shape {mh.shape}, expected {(I, V)}")
        else:
            mh = self.deviation_fraction * np.array([s.max_order for s in inst.suppliers], dtype=float)
        if self.budget_deviation is not None:
            bh = self.budget_deviation
            if bh.shape != (I,):
                raise ValueError(f"budget_deviation has shape {bh.shape}, expected {(I,)}")
        else:
            bh = self.deviation_fraction * np.array([s.budget for s in inst.suppliers], dtype=float)
        return mh, bh

    def to_dict(self) -> dict:
        doc: dict = {"gamma": self.gamma, "deviation_fraction": self.deviation_fraction}
        if self.maxorder_deviation is not None:
            doc["maxorder_deviation"] = self.maxorder_deviation.tolist()
        if self.budget_deviation is not None:
            doc["budget_deviation"] = self.budget_deviation.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "RobustConfig":
        unknown = set(doc) - {"gamma", "deviation_fraction", "maxorder_deviation", "budget_deviation"}
        if unknown:
            raise ValueError(f"robust: unknown keys {sorted(unknown)}")
        return cls(**doc)


def effective_gamma(gamma: float) -> float:
    """Per-row budget used by :func:`build_robust`: every protected row has a
    single uncertain entry, so budgets above one are clamped."""
    if gamma > 1.0:
        log.warning("gamma %g exceeds the per-row maximum of 1; clamped to 1", gamma)
        return 1.0
    return float(gamma)


def build_robust(inst: Instance, cfg: RobustConfig) -> tuple[MilpModel, VariableIndex]:
    """Deterministic model with max-order and budget rows made robust.

    Adds duals ``r1[i,v,t], H1[i,v,t]`` for the max-order rows and
    ``r2[i], H2[i]`` for the budget rows.
    """
    mh, bh = cfg.deviations(inst)
    gamma = effective_gamma(cfg.gamma)
    model, index = build_deterministic(inst)
    I, J, K, V, A, T = inst.dims.shape
    r1 = np.empty((I, V, T), dtype=np.int64)
    H1 = np.empty((I, V, T), dtype=np.int64)
    r2 = np.empty(I, dtype=np.int64)
    H2 = np.empty(I, dtype=np.int64)
    for i in range(I):
        for v in range(V):
            for t in range(T):
                lab = f"{i},{v},{t}"
                spec = UncertainRowSpec(model.row_id(f"maxord[{lab}]"), (), gamma, float(mh[i, v]))
                rv = robustify_row(model, spec, z_name=f"r1[{lab}]", p_names={"rhs": f"H1[{lab}]"})
                r1[i, v, t], H1[i, v, t] = rv.z, rv.p["rhs"]
        spec = UncertainRowSpec(model.row_id(f"budget[{i}]"), (), gamma, float(bh[i]))
        rv = robustify_row(model, spec, z_name=f"r2[{i}]", p_names={"rhs": f"H2[{i}]"})
        r2[i], H2[i] = rv.z, rv.p["rhs"]
    index.arrays.update(r1=r1, H1=H1, r2=r2, H2=H2)
    return model, index
