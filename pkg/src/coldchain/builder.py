"""Deterministic vaccine-network MILP.

Rows are named ``<family>[idx,...]`` with 0-based indices; the families are

    maxord, budget, cap_total, ship_window, inv_def, cap_period, invd_def,
    dc_cap, demand_carry, backlog, delivered, service_floor, dc_demand,
    dc_delivered, equity, age_target, age_priority, link_s2d, link_d2v

Inventory windows use 1-based period numbers ``p = t + 1``: supplier stock at
period p counts orders placed in ``[max(1, p - shelf), p - lead]`` minus all
shipments up to p; DC stock counts receipts and dispatches over
``[max(1, p - shelf), p]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .lp import BINARY, EQ, GE, LE, MilpModel
from .model_data import Instance, deprivation_intensity, validate_instance

# Branching priority: shipment indicators before age-priority binaries.
INDICATOR_PRIORITY = 2
AGE_PRIORITY = 1


class InvalidInstanceError(ValueError):
    pass


@dataclass
class VariableIndex:
    """Maps each model variable family to an integer array of variable ids.

    ``index["W"][j, k, v, t]`` is the id of W_jkvt, and so on.
    """

    arrays: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, key: str) -> np.ndarray:
        return self.arrays[key]

    def __contains__(self, key: str) -> bool:
        return key in self.arrays

    def families(self) -> list[str]:
        return list(self.arrays)

    def values(self, key: str, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[self.arrays[key]]

    def all_ids(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays.values()])


def big_m(inst: Instance) -> float:
    """Total horizon demand: a generic bound on any single arc-period flow."""
    return float(inst.demand.demand.sum())


def arc_bounds(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Per-arc linking constants ``(M_s2d[i, v, t], M_d2v[k, v, t])``.

    Both are valid for every feasible point, not just optimal ones:
    deliveries to a center never exceed its cumulative demand (backlog is
    nonnegative), and a supplier cannot ship more than it could have ordered
    inside the shelf-life window or paid for.  Each is capped by
    :func:`big_m`.
    """
    I, J, K, V, A, T = inst.dims.shape
    M = big_m(inst)
    m_d2v = np.minimum(np.cumsum(inst.demand.demand, axis=2), M)
    m_s2d = np.zeros((I, V, T))
    for i, s in enumerate(inst.suppliers):
        for v, vac in enumerate(inst.vaccines):
            afford = s.budget / s.price[v] if s.price[v] > 0 else np.inf
            for t in range(T):
                win = order_window(t, vac.shelf_life, s.lead_time)
                m_s2d[i, v, t] = min(len(win) * s.max_order[v], afford, M)
    return m_s2d, m_d2v


def order_window(t: int, shelf: int, lead: int) -> range:
    """0-based order periods whose stock is usable for shipping in period t."""
    p = t + 1
    lo = max(1, p - shelf)
    hi = p - lead
    return range(lo - 1, hi) if hi >= lo else range(0)


def dc_window(t: int, shelf: int) -> range:
    p = t + 1
    return range(max(1, p - shelf) - 1, p)


def _add_family(model: MilpModel, name: str, shape: tuple[int, ...], kind: str = "continuous",
                upper: float = np.inf, priority: int = 0) -> np.ndarray:
    ids = np.empty(shape, dtype=np.int64)
    for idx in itertools.product(*(range(s) for s in shape)):
        label = f"{name}[{','.join(map(str, idx))}]"
        ids[idx] = model.add_variable(label, 0.0, upper, kind, priority)
    return ids


def build_deterministic(inst: Instance) -> tuple[MilpModel, VariableIndex]:
    problems = validate_instance(inst)
    if problems:
        raise InvalidInstanceError("; ".join(problems[:5]))

    I, J, K, V, A, T = inst.dims.shape
    sup, net, dem = inst.suppliers, inst.network, inst.demand
    d = dem.demand
    theta1, theta2, theta3 = inst.weights.theta
    m_s2d, m_d2v = arc_bounds(inst)
    members = [net.members(j) for j in range(J)]
    pop = inst.dc_population

    m = MilpModel(inst.name)
    idx = VariableIndex()
    ix = idx.arrays
    ix["X"] = _add_family(m, "X", (I, V, T))
    ix["Y"] = _add_family(m, "Y", (I, J, V, T))
    ix["W"] = _add_family(m, "W", (J, K, V, T))
    ix["u"] = _add_family(m, "u", (A, T), BINARY, 1.0, AGE_PRIORITY)
    ix["back"] = _add_family(m, "back", (K, V, T))
    ix["q"] = _add_family(m, "q", (K, V, T))
    ix["qsat"] = _add_family(m, "qsat", (K, V, T))
    ix["inv"] = _add_family(m, "inv", (I, V, T))
    ix["invd"] = _add_family(m, "invd", (J, V, T))
    ix["Q"] = _add_family(m, "Q", (J, V, T))
    ix["Qsat"] = _add_family(m, "Qsat", (J, V, T))
    ix["yb"] = _add_family(m, "yb", (I, J, T), BINARY, 1.0, INDICATOR_PRIORITY)
    ix["wb"] = _add_family(m, "wb", (J, K, T), BINARY, 1.0, INDICATOR_PRIORITY)
    X, Y, W, u = ix["X"], ix["Y"], ix["W"], ix["u"]
    back, q, qsat = ix["back"], ix["q"], ix["qsat"]
    inv, invd, Q, Qsat, yb, wb = ix["inv"], ix["invd"], ix["Q"], ix["Qsat"], ix["yb"], ix["wb"]

    # objective: theta-weighted holding, transport and deprivation
    obj: list[tuple[int, float]] = []
    for v, vac in enumerate(inst.vaccines):
        h = theta1 * vac.holding_cost
        obj += [(int(inv[i, v, t]), h) for i in range(I) for t in range(T)]
        obj += [(int(invd[j, v, t]), h) for j in range(J) for t in range(T)]
    for i, j, t in itertools.product(range(I), range(J), range(T)):
        obj.append((int(yb[i, j, t]), theta2 * net.fixed_cost_s2d[i, j]))
        obj += [(int(Y[i, j, v, t]), theta2 * net.var_cost_s2d[i, j, v]) for v in range(V)]
    for j, k, t in itertools.product(range(J), range(K), range(T)):
        obj.append((int(wb[j, k, t]), theta2 * net.fixed_cost_d2v[j, k]))
        obj += [(int(W[j, k, v, t]), theta2 * net.var_cost_d2v[j, k, v]) for v in range(V)]
    for t in range(T):
        r = theta3 * deprivation_intensity(t + 1, inst.weights.deprivation_slope)
        for k, v in itertools.product(range(K), range(V)):
            obj += [(int(q[k, v, t]), r), (int(qsat[k, v, t]), -r)]
    m.set_objective(obj)

    for i, s in enumerate(sup):
        for v, t in itertools.product(range(V), range(T)):
            m.add_constraint(f"maxord[{i},{v},{t}]", [(int(X[i, v, t]), 1.0)], LE, s.max_order[v])
        m.add_constraint(
            f"budget[{i}]",
            [(int(X[i, v, t]), s.price[v]) for v in range(V) for t in range(T)],
            LE, s.budget,
        )
        m.add_constraint(
            f"cap_total[{i}]",
            [(int(X[i, v, t]), 1.0) for v in range(V) for t in range(T)]
            + [(int(Y[i, j, v, t]), -1.0) for j in range(J) for v in range(V) for t in range(T)],
            LE, s.capacity,
        )
        for v, vac in enumerate(inst.vaccines):
            for t in range(T):
                win = order_window(t, vac.shelf_life, s.lead_time)
                for j in range(J):
                    m.add_constraint(
                        f"ship_window[{i},{j},{v},{t}]",
                        [(int(Y[i, j, v, t]), 1.0)] + [(int(X[i, v, tt]), -1.0) for tt in win],
                        LE, 0.0,
                    )
                m.add_constraint(
                    f"inv_def[{i},{v},{t}]",
                    [(int(inv[i, v, t]), 1.0)]
                    + [(int(X[i, v, tt]), -1.0) for tt in win]
                    + [(int(Y[i, j, v, tt]), 1.0) for j in range(J) for tt in range(t + 1)],
                    EQ, 0.0,
                )
        for t in range(T):
            m.add_constraint(f"cap_period[{i},{t}]", [(int(inv[i, v, t]), 1.0) for v in range(V)],
                             LE, s.capacity)

    for j in range(J):
        for v, vac in enumerate(inst.vaccines):
            for t in range(T):
                win = dc_window(t, vac.shelf_life)
                m.add_constraint(
                    f"invd_def[{j},{v},{t}]",
                    [(int(invd[j, v, t]), 1.0)]
                    + [(int(Y[i, j, v, tt]), -1.0) for i in range(I) for tt in win]
                    + [(int(W[j, k, v, tt]), 1.0) for k in range(K) for tt in win],
                    EQ, 0.0,
                )
        for t in range(T):
            m.add_constraint(f"dc_cap[{j},{t}]", [(int(invd[j, v, t]), 1.0) for v in range(V)],
                             LE, net.dc_capacity[j])

    for k, v, t in itertools.product(range(K), range(V), range(T)):
        carry = [(int(back[k, v, t - 1]), -1.0)] if t > 0 else []
        m.add_constraint(f"demand_carry[{k},{v},{t}]", [(int(q[k, v, t]), 1.0)] + carry, EQ, d[k, v, t])
        deliveries = [(int(W[j, k, v, t]), 1.0) for j in range(J)]
        m.add_constraint(f"backlog[{k},{v},{t}]",
                         [(int(back[k, v, t]), 1.0), (int(q[k, v, t]), -1.0)] + deliveries, EQ, 0.0)
        m.add_constraint(f"delivered[{k},{v},{t}]",
                         [(int(qsat[k, v, t]), 1.0)] + [(w, -1.0) for w, _ in deliveries], EQ, 0.0)
        m.add_constraint(f"service_floor[{k},{v},{t}]",
                         deliveries + [(int(q[k, v, t]), -dem.floor(k, v, t))], GE, 0.0)

    for j, v, t in itertools.product(range(J), range(V), range(T)):
        m.add_constraint(f"dc_demand[{j},{v},{t}]",
                         [(int(Q[j, v, t]), 1.0)] + [(int(q[k, v, t]), -1.0) for k in members[j]], EQ, 0.0)
        m.add_constraint(f"dc_delivered[{j},{v},{t}]",
                         [(int(Qsat[j, v, t]), 1.0)] + [(int(qsat[k, v, t]), -1.0) for k in members[j]],
                         EQ, 0.0)

    xi = dem.equity_tolerance
    for j, j2 in itertools.permutations(range(J), 2):
        for v, t in itertools.product(range(V), range(T)):
            m.add_constraint(
                f"equity[{j},{j2},{v},{t}]",
                [(int(Qsat[j, v, t]), 1.0 / pop[j]), (int(Qsat[j2, v, t]), -1.0 / pop[j2])],
                LE, xi,
            )

    for j, t in itertools.product(range(J), range(T)):
        m.add_constraint(
            f"age_target[{j},{t}]",
            [(int(q[k, v, t]), 1.0) for k in members[j] for v in range(V)]
            + [(int(u[a, t]), -float(dem.age_demand[j, a])) for a in range(A)],
            LE, 0.0,
        )
    for a, t in itertools.product(range(A - 1), range(T)):
        m.add_constraint(f"age_priority[{a},{t}]", [(int(u[a + 1, t]), 1.0), (int(u[a, t]), -1.0)], LE, 0.0)

    for i, j, v, t in itertools.product(range(I), range(J), range(V), range(T)):
        m.add_constraint(f"link_s2d[{i},{j},{v},{t}]", [(int(Y[i, j, v, t]), 1.0), (int(yb[i, j, t]), -m_s2d[i, v, t])],
                         LE, 0.0)
    for j, k, v, t in itertools.product(range(J), range(K), range(V), range(T)):
        m.add_constraint(f"link_d2v[{j},{k},{v},{t}]", [(int(W[j, k, v, t]), 1.0), (int(wb[j, k, t]), -m_d2v[k, v, t])],
                         LE, 0.0)
    return m, idx


@dataclass(frozen=True)
class Components:
    holding: float  # P1
    transport: float  # P2
    deprivation: float  # P3
    total: float  # Z

    def as_dict(self) -> dict[str, float]:
        return {"P1": self.holding, "P2": self.transport, "P3": self.deprivation, "Z": self.total}


def objective_components(inst: Instance, index: VariableIndex, x) -> Components:
    """Holding, transport and deprivation costs of an assignment, and their
    theta-weighted total."""
    x = np.asarray(x, dtype=float)
    net = inst.network
    T = inst.dims.n_periods
    h = np.array([vac.holding_cost for vac in inst.vaccines])
    try:
        inv, invd = x[index["inv"]], x[index["invd"]]
        Y, W, yb, wb = x[index["Y"]], x[index["W"]], x[index["yb"]], x[index["wb"]]
        q, qsat = x[index["q"]], x[index["qsat"]]
    except KeyError as exc:
        raise KeyError(f"solution lacks variable family {exc}") from exc
    p1 = float(np.einsum("ivt,v->", inv, h) + np.einsum("jvt,v->", invd, h))
    p2 = float(
        np.einsum("ijt,ij->", yb, net.fixed_cost_s2d)
        + np.einsum("ijvt,ijv->", Y, net.var_cost_s2d)
        + np.einsum("jkt,jk->", wb, net.fixed_cost_d2v)
        + np.einsum("jkvt,jkv->", W, net.var_cost_d2v)
    )
    rate = np.array([deprivation_intensity(t + 1, inst.weights.deprivation_slope) for t in range(T)])
    p3 = float(np.einsum("kvt,t->", q - qsat, rate))
    t1, t2, t3 = inst.weights.theta
    return Components(p1, p2, p3, t1 * p1 + t2 * p2 + t3 * p3)
