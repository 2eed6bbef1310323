"""LP/MILP front end: native branch-and-bound, HiGHS backend, brute-force oracle."""

from __future__ import annotations

import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..lp import MilpModel
from .simplex import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, UNBOUNDED, LpEngine, SolverFailure

log = logging.getLogger("coldchain.solver")

FEASIBLE_GAP = "feasible-gap"
LIMIT_HIT = "limit-hit"
STATUSES = (OPTIMAL, FEASIBLE_GAP, INFEASIBLE, UNBOUNDED, LIMIT_HIT)

# "auto" hands models above these sizes to HiGHS
NATIVE_MAX_VARS = 600
NATIVE_MAX_BINARIES = 40


@dataclass
class SolveOptions:
    feas_tol: float = 1e-7
    int_tol: float = 1e-6
    gap: float = 1e-6
    node_limit: int = 0  # 0 = unlimited
    time_limit: float = 0.0  # seconds, 0 = unlimited
    branching: str = "most-fractional"  # or "first-index"
    node_order: str = "best-bound"  # or "depth-first"
    backend: str = "auto"  # "native", "highs" or "auto"
    degenerate_limit: int = 1000

    def __post_init__(self):
        if self.feas_tol <= 0 or self.int_tol <= 0 or self.gap < 0:
            raise ValueError("tolerances must be positive")
        if self.node_limit < 0 or self.time_limit < 0:
            raise ValueError("limits must be >= 0")
        if self.branching not in ("most-fractional", "first-index"):
            raise ValueError(f"unknown branching rule {self.branching!r}")
        if self.node_order not in ("best-bound", "depth-first"):
            raise ValueError(f"unknown node order {self.node_order!r}")
        if self.backend not in ("auto", "native", "highs"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class Solution:
    status: str
    x: np.ndarray | None
    objective: float
    bound: float
    gap: float
    nodes: int = 0
    wall_time: float = 0.0
    backend: str = "native"
    log_lines: list[str] = field(default_factory=list, repr=False)

    @property
    def has_point(self) -> bool:
        return self.x is not None

    @property
    def assignment(self) -> dict[int, float]:
        if self.x is None:
            return {}
        return {j: float(v) for j, v in enumerate(self.x)}

    def value(self, vid: int) -> float:
        return float(self.x[vid])


def relative_gap(incumbent: float, bound: float) -> float:
    if not math.isfinite(incumbent):
        return math.inf
    if not math.isfinite(bound):
        return math.inf
    return max(0.0, incumbent - bound) / max(1.0, abs(incumbent))


def _engine(model: MilpModel, opts: SolveOptions):
    c, A, row_lo, row_hi, lb, ub, is_bin = model.to_arrays()
    eng = LpEngine(c, A, row_lo, row_hi, feas_tol=opts.feas_tol, degenerate_limit=opts.degenerate_limit)
    return eng, lb, ub, is_bin


def solve_lp(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    """Solve the continuous relaxation (binaries relaxed to [0, 1])."""
    opts = options or SolveOptions()
    t0 = time.perf_counter()
    eng, lb, ub, _ = _engine(model, opts)
    res = eng.solve(lb, ub)
    const = model.objective_constant
    if res.status == OPTIMAL:
        obj = res.objective + const
        bound = res.bound + const
        return Solution(OPTIMAL, res.x, obj, bound, relative_gap(obj, bound), 0,
                        time.perf_counter() - t0)
    status = LIMIT_HIT if res.status == ITERATION_LIMIT else res.status
    obj = -math.inf if status == UNBOUNDED else math.inf
    return Solution(status, None, obj, -math.inf, math.inf, 0, time.perf_counter() - t0)


def _pick_backend(model: MilpModel, opts: SolveOptions) -> str:
    if opts.backend != "auto":
        return opts.backend
    if model.n_vars <= NATIVE_MAX_VARS and len(model.binary_ids()) <= NATIVE_MAX_BINARIES:
        return "native"
    return "highs"


def solve_milp(model: MilpModel, options: SolveOptions | None = None) -> Solution:
    opts = options or SolveOptions()
    backend = _pick_backend(model, opts)
    if backend == "highs":
        from .highs import solve_highs
        return solve_highs(model, opts)
    return _branch_and_bound(model, opts)


def _fractional(x: np.ndarray, bins: np.ndarray, int_tol: float) -> np.ndarray:
    frac = np.abs(x[bins] - np.round(x[bins]))
    return bins[frac > int_tol]


def _choose_branch(x, frac_ids, priority, rule) -> int:
    if rule == "first-index":
        return int(frac_ids[0])
    dist = np.abs(x[frac_ids] - 0.5)
    # most fractional, then higher branch priority, then lower id
    keys = [(round(float(d), 12), -int(priority[j]), int(j)) for d, j in zip(dist, frac_ids)]
    return min(keys)[2]


def _branch_and_bound(model: MilpModel, opts: SolveOptions) -> Solution:
    t0 = time.perf_counter()
    eng, lb0, ub0, is_bin = _engine(model, opts)
    bins = np.flatnonzero(is_bin)
    priority = np.array([v.branch_priority for v in model.variables])
    const = model.objective_constant
    lines: list[str] = []

    incumbent = math.inf
    best_x: np.ndarray | None = None
    seq = itertools.count()
    # node: (key, seq, depth, parent bound, fixings as tuple of (var, val))
    frontier: list = []

    def push(bound: float, depth: int, fix: tuple):
        key = bound if opts.node_order == "best-bound" else -depth
        heapq.heappush(frontier, (key, next(seq), depth, bound, fix))

    def bounds_for(fix):
        lb, ub = lb0.copy(), ub0.copy()
        for j, v in fix:
            lb[j] = ub[j] = v
        return lb, ub

    def try_incumbent(x, obj):
        nonlocal incumbent, best_x
        if obj < incumbent - 1e-12:
            incumbent = obj
            best_x = x.copy()

    def rounding_heuristic(x, fix):
        lb, ub = bounds_for(fix)
        r = np.round(x[bins])
        lb[bins] = r
        ub[bins] = r
        res = eng.solve(lb, ub)
        if res.status == OPTIMAL:
            try_incumbent(res.x, res.objective)

    push(-math.inf, 0, ())
    nodes = 0
    status = None
    global_bound = -math.inf
    root_unbounded = False
    while frontier:
        if opts.node_limit and nodes >= opts.node_limit:
            status = LIMIT_HIT
            break
        if opts.time_limit and time.perf_counter() - t0 > opts.time_limit:
            status = LIMIT_HIT
            break
        _, _, depth, pbound, fix = heapq.heappop(frontier)
        if pbound >= incumbent - opts.gap * max(1.0, abs(incumbent)) and math.isfinite(incumbent):
            continue
        lb, ub = bounds_for(fix)
        res = eng.solve(lb, ub)
        nodes += 1
        if res.status == UNBOUNDED:
            if nodes == 1:
                root_unbounded = True
                break
            continue
        if res.status == ITERATION_LIMIT:
            raise SolverFailure(f"LP iteration limit at node {nodes}")
        if res.status == OPTIMAL:
            obj = res.objective
            frac_ids = _fractional(res.x, bins, opts.int_tol)
            if frac_ids.size == 0:
                try_incumbent(res.x, obj)
            elif obj < incumbent - opts.gap * max(1.0, abs(incumbent)) or not math.isfinite(incumbent):
                if nodes == 1 or nodes % 10 == 0:
                    rounding_heuristic(res.x, fix)
                j = _choose_branch(res.x, frac_ids, priority, opts.branching)
                first, second = (1.0, 0.0) if res.x[j] >= 0.5 else (0.0, 1.0)
                for val in (second, first):  # popped first under depth-first
                    push(obj, depth + 1, fix + ((j, val),))
        open_bounds = [b for (_, _, _, b, _) in frontier]
        global_bound = min(open_bounds + [incumbent]) if open_bounds else incumbent
        gap = relative_gap(incumbent + const, global_bound + const)
        line = (f"node={nodes} depth={depth} bound={global_bound + const:.10g} "
                f"incumbent={incumbent + const:.10g} gap={gap:.3e}")
        lines.append(line)
        log.debug(line)
        if math.isfinite(incumbent) and gap <= opts.gap:
            break

    wall = time.perf_counter() - t0
    if root_unbounded:
        return Solution(UNBOUNDED, None, -math.inf, -math.inf, math.inf, nodes, wall, "native", lines)
    if best_x is None:
        st = status or INFEASIBLE
        return Solution(st, None, math.inf, global_bound + const if st == LIMIT_HIT else math.inf,
                        math.inf, nodes, wall, "native", lines)
    if status != LIMIT_HIT:
        global_bound = min([b for (_, _, _, b, _) in frontier] + [incumbent])
    obj = incumbent + const
    bound = min(global_bound, incumbent) + const
    gap = relative_gap(obj, bound)
    if status is None:
        status = OPTIMAL if gap <= opts.gap else FEASIBLE_GAP
    x = best_x.copy()
    x[bins] = np.round(x[bins])
    return Solution(status, x, obj, bound, gap, nodes, wall, "native", lines)


def brute_force_binaries(model: MilpModel, cap: int = 20, options: SolveOptions | None = None) -> Solution:
    """Enumerate every binary assignment and solve the remaining LP for each."""
    opts = options or SolveOptions()
    t0 = time.perf_counter()
    eng, lb0, ub0, is_bin = _engine(model, opts)
    bins = np.flatnonzero(is_bin)
    if len(bins) > cap:
        raise ValueError(f"{len(bins)} binaries exceed the enumeration cap {cap}")
    best = math.inf
    best_x = None
    count = 0
    for combo in itertools.product((0.0, 1.0), repeat=len(bins)):
        lb, ub = lb0.copy(), ub0.copy()
        vals = np.array(combo)
        if len(bins):
            if np.any(vals < lb0[bins]) or np.any(vals > ub0[bins]):
                continue
            lb[bins] = vals
            ub[bins] = vals
        res = eng.solve(lb, ub)
        count += 1
        if res.status == UNBOUNDED:
            return Solution(UNBOUNDED, None, -math.inf, -math.inf, math.inf, count,
                            time.perf_counter() - t0, "brute-force")
        if res.status == OPTIMAL and res.objective < best:
            best = res.objective
            best_x = res.x
    wall = time.perf_counter() - t0
    if best_x is None:
        return Solution(INFEASIBLE, None, math.inf, math.inf, math.inf, count, wall, "brute-force")
    obj = best + model.objective_constant
    return Solution(OPTIMAL, best_x, obj, obj, 0.0, count, wall, "brute-force")
