"""Independent reference implementations used by the tests.

Nothing here imports the package's solver; the oracles are deliberately
naive so that agreement means something.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from coldchain.lp import BINARY, EQ, GE, LE, MilpModel
from coldchain.model_data import (
    DemandParams,
    Dimensions,
    Instance,
    NetworkParams,
    SupplierParams,
    VaccineParams,
)


def tableau_simplex(c, A, b, max_iter=10_000):
    """Dense textbook simplex for ``min c x, A x <= b, x >= 0`` with ``b >= 0``.

    Uses Bland's rule throughout, so it is slow but cannot cycle.  Returns
    ``(status, x, objective)`` with status "optimal" or "unbounded".
    """
    c = np.asarray(c, float)
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    assert np.all(b >= 0), "oracle needs a feasible slack basis"
    m, n = A.shape
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = c
    basis = list(range(n, n + m))
    for _ in range(max_iter):
        enter = next((j for j in range(n + m) if T[m, j] < -1e-10), None)
        if enter is None:
            x = np.zeros(n + m)
            for r, j in enumerate(basis):
                x[j] = T[r, -1]
            return "optimal", x[:n], float(c @ x[:n])
        col = T[:m, enter]
        ratios = [(T[r, -1] / col[r], basis[r], r) for r in range(m) if col[r] > 1e-10]
        if not ratios:
            return "unbounded", None, -math.inf
        best = min(q for q, _, _ in ratios)
        # Bland: among ties, leave the lowest-index basic variable
        _, _, row = min((t for t in ratios if t[0] <= best + 1e-12), key=lambda t: t[1])
        T[row] /= T[row, enter]
        for r in range(m + 1):
            if r != row and T[r, enter] != 0:
                T[r] -= T[r, enter] * T[row]
        basis[row] = enter
    raise RuntimeError("tableau oracle iteration limit")


def random_lp(rng: np.random.Generator, m: int = 20, n: int = 20):
    """Feasible LP in oracle form; a final row bounds the sum of x."""
    A = rng.uniform(-1.0, 3.0, size=(m, n)).round(3)
    A[rng.random((m, n)) < 0.3] = 0.0
    b = rng.uniform(1.0, 20.0, size=m).round(3)
    c = rng.uniform(-5.0, 2.0, size=n).round(3)
    if rng.random() < 0.8:  # usually bounded
        A = np.vstack([A, np.ones(n)])
        b = np.append(b, 50.0)
    return c, A, b


def lp_model(c, A, b) -> MilpModel:
    m = MilpModel("oracle-lp")
    xs = [m.add_variable(f"x{j}") for j in range(len(c))]
    m.set_objective(zip(xs, c))
    for r, (row, rhs) in enumerate(zip(A, b)):
        m.add_constraint(f"r{r}", [(xs[j], a) for j, a in enumerate(row) if a], LE, rhs)
    return m


def random_tiny_milp(rng: np.random.Generator, max_binaries: int = 12, max_cont: int = 40) -> MilpModel:
    """Fixed-charge style MILP: continuous flows gated by binaries, mixed
    row senses, occasionally infeasible or with negative lower bounds."""
    nb = int(rng.integers(1, max_binaries + 1))
    nc = int(rng.integers(2, max_cont + 1))
    m = MilpModel("tiny")
    ys = [m.add_variable(f"y{i}", kind=BINARY) for i in range(nb)]
    xs = []
    for j in range(nc):
        lo = -float(rng.integers(0, 5)) if rng.random() < 0.15 else 0.0
        xs.append(m.add_variable(f"x{j}", lo, float(rng.integers(5, 30))))
    obj = [(x, float(rng.uniform(-3, 3))) for x in xs] + [(y, float(rng.uniform(0, 10))) for y in ys]
    m.set_objective(obj, float(rng.integers(-5, 5)))
    # each continuous variable hangs off one binary
    owner = rng.integers(0, nb, size=nc)
    for j, x in enumerate(xs):
        ub = m.variables[x].upper
        m.add_constraint(f"link{j}", [(x, 1.0), (ys[owner[j]], -ub)], LE, 0.0)
    for r in range(int(rng.integers(2, 8))):
        pick = rng.choice(nc, size=min(nc, int(rng.integers(2, 6))), replace=False)
        terms = [(xs[j], float(rng.integers(-3, 5))) for j in pick]
        sense = [LE, GE, EQ][int(rng.choice(3, p=[0.6, 0.3, 0.1]))]
        rhs = float(rng.integers(-2, 25))
        m.add_constraint(f"r{r}", terms, sense, rhs)
    if rng.random() < 0.5:
        m.add_constraint("card", [(y, 1.0) for y in ys], LE, float(rng.integers(1, nb + 1)))
    return m


def knapsack_enumeration(values, weights, capacity):
    best = -math.inf
    for pick in itertools.product((0, 1), repeat=len(values)):
        if np.dot(pick, weights) <= capacity:
            best = max(best, float(np.dot(pick, values)))
    return best


def hand_instance(
    *,
    demand,  # (K, V, T)
    lead=1,
    shelf=2,
    n_dcs=1,
    assignment=None,
    n_age_groups=2,
    budget=1e6,
    max_order=1e3,
    capacity=1e4,
    dc_capacity=1e4,
    price=1.0,
    holding=0.05,
    fixed=(10.0, 10.0),
    var=(0.5, 0.5),
    omega=0.3,
    xi=0.1,
    n_suppliers=1,
) -> Instance:
    """Small explicit instance built without the generator."""
    d = np.asarray(demand, float)
    K, V, T = d.shape
    J, I, A = n_dcs, n_suppliers, n_age_groups
    assignment = np.arange(K) % J if assignment is None else np.asarray(assignment)
    sup = tuple(SupplierParams(f"s{i}", lead, budget, capacity, (max_order,) * V, (price,) * V) for i in range(I))
    net = NetworkParams(
        dc_capacity=np.full(J, dc_capacity),
        var_cost_s2d=np.full((I, J, V), var[0]),
        fixed_cost_s2d=np.full((I, J), fixed[0]),
        var_cost_d2v=np.full((J, K, V), var[1]),
        fixed_cost_d2v=np.full((J, K), fixed[1]),
        assignment=assignment,
    )
    vac = tuple(VaccineParams(f"v{v}", holding, shelf) for v in range(V))
    age = np.zeros((J, A))
    for j in range(J):
        age[j] = max(d[assignment == j].sum(), 1.0) * 2 / A
    dem = DemandParams(d, age, service_floor=omega, equity_tolerance=xi)
    return Instance(Dimensions(I, J, K, V, T, A), sup, net, vac, dem, name="hand")
