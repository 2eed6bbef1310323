"""Solution checks: generic row/bound/integrality feasibility plus
vaccine-network structure recomputed from the flows themselves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..lp import MilpModel, evaluate


@dataclass(frozen=True)
class Violation:
    check: str  # "row", "bound", "integrality", "priority", "equity", ...
    item: str
    amount: float  # signed slack, negative when violated


@dataclass
class ValidationReport:
    objective: float
    violations: list[Violation] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.violations

    def by_check(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.violations:
            out[v.check] = out.get(v.check, 0) + 1
        return out

    def summary(self) -> str:
        if self.clean:
            return "clean"
        return ", ".join(f"{k}: {n}" for k, n in sorted(self.by_check().items()))


def _as_vector(model: MilpModel, solution) -> np.ndarray:
    x = getattr(solution, "x", solution)
    if x is None:
        raise ValueError("solution carries no point")
    if isinstance(x, dict):
        return np.array([float(x[j]) for j in range(model.n_vars)])
    return np.asarray(x, dtype=float)


def check_solution(model: MilpModel, solution, tol: float = 1e-6, index=None, inst=None) -> ValidationReport:
    """Validate ``solution`` (a Solution, array or id->value mapping).

    With ``index`` and ``inst`` supplied, the network-specific properties are
    checked as well, using the flow variables rather than the model's own
    bookkeeping variables wherever possible.
    """
    x = _as_vector(model, solution)
    ev = evaluate(model, x, tol)
    rep = ValidationReport(ev.objective)
    rep.violations += [Violation("row", n, s) for n, s in ev.row_violations]
    rep.violations += [Violation("bound", n, s) for n, s in ev.bound_violations]
    rep.violations += [Violation("integrality", n, s) for n, s in ev.integrality_violations]
    if index is not None and inst is not None:
        rep.violations += _domain_checks(x, index, inst, tol)
    return rep


def _flag(out: list, check: str, slack: np.ndarray, tol: float, fmt) -> None:
    for idx in zip(*np.nonzero(slack < -tol)):
        out.append(Violation(check, fmt(*idx), float(slack[idx])))


def _domain_checks(x: np.ndarray, index, inst, tol: float) -> list[Violation]:
    from ..builder import dc_window, order_window  # local import keeps solver free of model code

    out: list[Violation] = []
    I, J, K, V, A, T = inst.dims.shape
    X, Y, W = x[index["X"]], x[index["Y"]], x[index["W"]]
    u, back = x[index["u"]], x[index["back"]]
    inv, invd = x[index["inv"]], x[index["invd"]]
    d = inst.demand.demand

    # priority prefix: an age group may only be active if every older one is
    _flag(out, "priority", u[:-1, :] - u[1:, :], tol, lambda a, t: f"u[{a + 1},{t}] > u[{a},{t}]")

    # demand chaining and backlog, from W
    delivered = W.sum(axis=0)  # (K, V, T)
    q = d.copy()
    q[:, :, 1:] += back[:, :, :-1]
    _flag(out, "backlog", q - delivered, tol, lambda k, v, t: f"deliveries exceed demand at vc {k} v {v} t {t}")
    _flag(out, "chaining", -np.abs(back - (q - delivered)), tol, lambda k, v, t: f"back[{k},{v},{t}]")

    omega = np.array([[[inst.demand.floor(k, v, t) for t in range(T)] for v in range(V)] for k in range(K)])
    _flag(out, "service_floor", delivered - omega * q, tol, lambda k, v, t: f"vc {k} v {v} t {t}")

    # equity between DC-level satisfied fractions
    pop = inst.dc_population
    frac = np.zeros((J, V, T))
    for j in range(J):
        frac[j] = delivered[inst.network.members(j)].sum(axis=0) / pop[j]
    xi = inst.demand.equity_tolerance
    for j in range(J):
        for j2 in range(J):
            if j != j2:
                _flag(out, "equity", xi - (frac[j] - frac[j2]), tol, lambda v, t, j=j, j2=j2: f"dc {j} vs {j2} v {v} t {t}")

    # inventories recomputed from the windows
    inv_re = np.zeros((I, V, T))
    invd_re = np.zeros((J, V, T))
    for v, vac in enumerate(inst.vaccines):
        for t in range(T):
            for i, s in enumerate(inst.suppliers):
                win = list(order_window(t, vac.shelf_life, s.lead_time))
                inv_re[i, v, t] = X[i, v, win].sum() - Y[i, :, v, : t + 1].sum()
            win = list(dc_window(t, vac.shelf_life))
            invd_re[:, v, t] = Y[:, :, v, win].sum(axis=(0, 2)) - W[:, :, v, win].sum(axis=(1, 2))
    _flag(out, "inventory", inv_re, tol, lambda i, v, t: f"supplier {i} v {v} t {t}")
    _flag(out, "inventory", invd_re, tol, lambda j, v, t: f"dc {j} v {v} t {t}")
    _flag(out, "inventory", -np.abs(inv - inv_re), tol, lambda i, v, t: f"inv[{i},{v},{t}] mismatch")
    _flag(out, "inventory", -np.abs(invd - invd_re), tol, lambda j, v, t: f"invd[{j},{v},{t}] mismatch")

    # capacities
    cap = np.array([s.capacity for s in inst.suppliers], dtype=float)
    _flag(out, "capacity", cap[:, None] - inv_re.sum(axis=1), tol, lambda i, t: f"supplier {i} t {t}")
    net_total = X.sum(axis=(1, 2)) - Y.sum(axis=(1, 2, 3))
    _flag(out, "capacity", cap - net_total, tol, lambda i: f"supplier {i} horizon")
    dcap = np.asarray(inst.network.dc_capacity, dtype=float)
    _flag(out, "capacity", dcap[:, None] - invd_re.sum(axis=1), tol, lambda j, t: f"dc {j} t {t}")
    maxord = np.array([s.max_order for s in inst.suppliers], dtype=float)
    _flag(out, "capacity", maxord[:, :, None] - X, tol, lambda i, v, t: f"max order {i} v {v} t {t}")
    price = np.array([s.price for s in inst.suppliers], dtype=float)
    budget = np.array([s.budget for s in inst.suppliers], dtype=float)
    spent = np.einsum("ivt,iv->i", X, price)
    _flag(out, "budget", budget - spent, tol * np.maximum(1.0, budget), lambda i: f"supplier {i}")
    return out
