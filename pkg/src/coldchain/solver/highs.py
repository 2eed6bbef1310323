"""HiGHS backend through :func:`scipy.optimize.milp`, for models too large for
the pure-Python engine."""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from ..lp import MilpModel
from .milp import FEASIBLE_GAP, LIMIT_HIT, Solution, SolveOptions, relative_gap
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, SolverFailure


def solve_highs(model: MilpModel, opts: SolveOptions) -> Solution:
    t0 = time.perf_counter()
    c, A, row_lo, row_hi, lb, ub, is_bin = model.to_arrays()
    hopts: dict = {"disp": False, "mip_rel_gap": opts.gap, "presolve": True}
    if opts.time_limit:
        hopts["time_limit"] = opts.time_limit
    if opts.node_limit:
        hopts["node_limit"] = opts.node_limit
    constraints = [LinearConstraint(A, row_lo, row_hi)] if model.n_rows else []
    res = milp(c, integrality=is_bin.astype(int), bounds=Bounds(lb, ub),
               constraints=constraints, options=hopts)
    wall = time.perf_counter() - t0
    const = model.objective_constant
    nodes = int(getattr(res, "mip_node_count", 0) or 0)

    if res.status == 2:
        return Solution(INFEASIBLE, None, math.inf, math.inf, math.inf, nodes, wall, "highs")
    if res.status == 3:
        return Solution(UNBOUNDED, None, -math.inf, -math.inf, math.inf, nodes, wall, "highs")
    if res.status == 4 and res.x is None:
        raise SolverFailure(f"HiGHS failed: {res.message}")
    if res.x is None:
        return Solution(LIMIT_HIT, None, math.inf, -math.inf, math.inf, nodes, wall, "highs")

    x = np.asarray(res.x, dtype=float)
    x[is_bin] = np.round(x[is_bin])
    x = np.clip(x, lb, ub)
    obj = float(model.objective_value(x))
    dual = getattr(res, "mip_dual_bound", None)
    bound = float(dual) + const if dual is not None and math.isfinite(dual) else obj
    bound = min(bound, obj)
    gap = relative_gap(obj, bound)
    if res.status == 0:
        status = OPTIMAL if gap <= max(opts.gap, 1e-9) else FEASIBLE_GAP
    else:
        status = LIMIT_HIT
    return Solution(status, x, obj, bound, gap, nodes, wall, "highs")
