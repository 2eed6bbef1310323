"""Experiment harnesses: instance ladder, budget/max-order scenarios, budget
sweep and Gamma sweep, plus report emission.

Every harness returns a :class:`SensitivityReport`.  Qualitative properties
(trends, orderings) are recorded as boolean ``flags`` instead of raising, so a
run always produces its full table.  Passing a list as ``collect`` keeps every
:class:`SolvedCase` for later inspection.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .builder import Components, VariableIndex, build_deterministic, objective_components
from .lp import MilpModel
from .model_data import (
    GeneratorSettings,
    Instance,
    generate_instance,
    scale_budgets,
    scale_max_orders,
    with_service_floor,
)
from .robust import RobustConfig, build_robust
from .solver.milp import FEASIBLE_GAP, Solution, SolveOptions, solve_milp
from .solver.simplex import OPTIMAL

TREND_TOL = 1e-6
DIRECTIONS = ("increased", "unchanged", "decreased")
DEFAULT_SWEEP = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.40, 0.50)
# reporting order: budget direction major, max-order direction minor
SCENARIO_ORDER = [(b, m) for b in DIRECTIONS for m in DIRECTIONS if (b, m) != ("unchanged", "unchanged")]


@dataclass(frozen=True)
class PerturbationScenario:
    budget_direction: str
    maxorder_direction: str
    magnitude: float = 0.10

    def __post_init__(self):
        for d in (self.budget_direction, self.maxorder_direction):
            if d not in DIRECTIONS:
                raise ValueError(f"unknown direction {d!r}")
        if self.budget_direction == "unchanged" and self.maxorder_direction == "unchanged":
            raise ValueError("the all-unchanged scenario is the baseline, not a perturbation")
        if not 0 < self.magnitude < 1:
            raise ValueError(f"magnitude must lie in (0, 1), got {self.magnitude}")

    def _factor(self, direction: str) -> float:
        return {"increased": 1 + self.magnitude, "unchanged": 1.0, "decreased": 1 - self.magnitude}[direction]

    @property
    def label(self) -> str:
        return f"budget-{self.budget_direction}/orders-{self.maxorder_direction}"

    def apply(self, inst: Instance) -> Instance:
        out = scale_budgets(inst, self._factor(self.budget_direction))
        return scale_max_orders(out, self._factor(self.maxorder_direction))


def perturbation_scenarios(magnitude: float = 0.10) -> list[PerturbationScenario]:
    return [PerturbationScenario(b, m, magnitude) for b, m in SCENARIO_ORDER]


@dataclass
class ReportRow:
    label: str
    level: float | str
    status: str
    P1: float = math.nan
    P2: float = math.nan
    P3: float = math.nan
    Z: float = math.nan
    pct_change: float = math.nan
    wall_time: float = 0.0
    note: str = ""

    @property
    def solved(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE_GAP)


@dataclass
class SensitivityReport:
    kind: str
    rows: list[ReportRow] = field(default_factory=list)
    baseline: ReportRow | None = None
    flags: dict[str, bool] = field(default_factory=dict)

    def row(self, label: str) -> ReportRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


@dataclass
class SolvedCase:
    inst: Instance
    model: MilpModel
    index: VariableIndex
    solution: Solution
    components: Components | None


def solve_case(inst: Instance, robust: RobustConfig | None = None,
               options: SolveOptions | None = None) -> SolvedCase:
    """Build (deterministic, or robust when a config is given) and solve."""
    if robust is None:
        model, index = build_deterministic(inst)
    else:
        model, index = build_robust(inst, robust)
    sol = solve_milp(model, options)
    comp = objective_components(inst, index, sol.x) if sol.x is not None else None
    return SolvedCase(inst, model, index, sol, comp)


def _solve(inst, robust, options, collect):
    case = solve_case(inst, robust, options)
    if collect is not None:
        collect.append(case)
    return case


def _row(label: str, level, case: SolvedCase, note: str = "") -> ReportRow:
    sol, comp = case.solution, case.components
    if comp is None:
        return ReportRow(label, level, sol.status, wall_time=sol.wall_time, note=note)
    return ReportRow(label, level, sol.status, comp.holding, comp.transport, comp.deprivation,
                     comp.total, wall_time=sol.wall_time, note=note)


def _pct(rows: Sequence[ReportRow], base: ReportRow) -> None:
    for r in rows:
        if r.solved and base.solved and base.Z != 0:
            r.pct_change = 100.0 * (r.Z - base.Z) / abs(base.Z)


def _non_decreasing(vals: Sequence[float], tol: float = TREND_TOL) -> bool:
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))


def _non_increasing(vals: Sequence[float], tol: float = TREND_TOL) -> bool:
    return all(b <= a + tol for a, b in zip(vals, vals[1:]))


def growth_ratios(vals: Sequence[float]) -> list[float]:
    return [b / a if a > 0 else math.inf for a, b in zip(vals, vals[1:])]


# -- harnesses -----------------------------------------------------------------


def run_ladder_instances(cases: Sequence[tuple[str, Instance]], robust: RobustConfig | None = None,
                         options: SolveOptions | None = None, collect: list | None = None) -> SensitivityReport:
    rep = SensitivityReport("ladder")
    for label, inst in cases:
        rep.rows.append(_row(label, label, _solve(inst, robust, options, collect)))
    # time-limited rows with an incumbent still carry a usable decomposition
    ok = [r for r in rep.rows if math.isfinite(r.Z)]
    z = [r.Z for r in ok]
    p3 = [r.P3 for r in ok]
    ratios = growth_ratios(p3)
    rep.flags = {
        "all_solved": all(r.solved for r in rep.rows),
        "all_have_points": len(ok) == len(rep.rows),
        "z_non_decreasing": _non_decreasing(z),
        "p3_increasing": all(b > a for a, b in zip(p3, p3[1:])),
        "p3_growth_declining": _non_increasing(ratios),
    }
    return rep


def run_ladder(presets: Sequence[int], seed: int, robust: RobustConfig | None = None,
               options: SolveOptions | None = None,
               settings: GeneratorSettings | None = None, collect: list | None = None) -> SensitivityReport:
    """Solve one generated instance per preset, in the given order."""
    cases = [(f"preset-{p}", generate_instance(p, seed, settings)) for p in presets]
    return run_ladder_instances(cases, robust, options, collect)


def run_budget_order_sensitivity(inst: Instance, magnitude: float = 0.10,
                                 robust: RobustConfig | None = None,
                                 options: SolveOptions | None = None,
                                 collect: list | None = None) -> SensitivityReport:
    """The eight budget/max-order scenarios against the unperturbed solve.

    ``raised_max_lowered_min`` records whether Z is largest with both raised
    and smallest with both lowered.
    """
    scenarios = perturbation_scenarios(magnitude)
    rep = SensitivityReport("budget-order")
    rep.baseline = _row("baseline", 0.0, _solve(inst, robust, options, collect))
    for sc in scenarios:
        rep.rows.append(_row(sc.label, magnitude, _solve(sc.apply(inst), robust, options, collect)))
    _pct(rep.rows, rep.baseline)
    ok = [r for r in rep.rows if r.solved]
    holds = False
    if len(ok) == len(rep.rows):
        zs = [r.Z for r in rep.rows]
        first, last = zs[0], zs[-1]
        holds = all(first >= z - TREND_TOL for z in zs) and all(last <= z + TREND_TOL for z in zs)
    rep.flags = {"all_solved": len(ok) == len(rep.rows), "raised_max_lowered_min": holds}
    return rep


def run_budget_sweep(inst: Instance, fractions: Sequence[float] = DEFAULT_SWEEP,
                     robust: RobustConfig | None = None, options: SolveOptions | None = None,
                     relax_floor: bool = False, collect: list | None = None) -> SensitivityReport:
    """Cut every supplier budget by each fraction in turn.

    Infeasible levels are kept as flagged rows.  With ``relax_floor`` such a
    level is solved again with the service floor removed and the extra row is
    labelled ``omega=0``; relaxed rows never enter the trend flags.
    """
    for f in fractions:
        if not 0 <= f <= 1:
            raise ValueError(f"cut fraction {f} outside [0, 1]")
    rep = SensitivityReport("budget-sweep")
    rep.baseline = _row("baseline", 0.0, _solve(inst, robust, options, collect))
    relaxed = []
    for f in fractions:
        cut = scale_budgets(inst, 1.0 - f)
        row = _row(f"cut-{f:g}", f, _solve(cut, robust, options, collect))
        rep.rows.append(row)
        if relax_floor and not row.solved:
            relaxed.append(_row(f"cut-{f:g}", f, _solve(with_service_floor(cut, 0.0), robust, options, collect),
                                note="omega=0"))
    rep.rows += relaxed
    _pct(rep.rows, rep.baseline)
    main = [r for r in rep.rows if not r.note]
    all_ok = all(r.solved for r in main)
    rep.flags = {
        "all_solved": all_ok,
        "p2_non_increasing": all_ok and _non_increasing([r.P2 for r in main]),
        "p3_non_decreasing": all_ok and _non_decreasing([r.P3 for r in main]),
    }
    return rep


def gamma_sweep(inst: Instance, gammas: Sequence[float], deviation_fraction: float = 0.1,
                options: SolveOptions | None = None, collect: list | None = None) -> SensitivityReport:
    gammas = list(gammas)
    if any(g < 0 or g > 1 for g in gammas) or gammas != sorted(gammas):
        raise ValueError("gammas must be sorted ascending within [0, 1]")
    rep = SensitivityReport("gamma-sweep")
    for g in gammas:
        cfg = RobustConfig(gamma=g, deviation_fraction=deviation_fraction)
        rep.rows.append(_row(f"gamma-{g:g}", g, _solve(inst, cfg, options, collect)))
    ok = all(r.solved for r in rep.rows)
    rep.flags = {"all_solved": ok, "z_non_decreasing": ok and _non_decreasing([r.Z for r in rep.rows])}
    return rep


# -- output --------------------------------------------------------------------

COLUMNS = ["label", "level", "status", "P1", "P2", "P3", "Z", "pct_change", "note"]


def _cell(v) -> str:
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def _record(r: ReportRow, include_timing: bool) -> dict:
    cols = COLUMNS + (["wall_time"] if include_timing else [])
    return {c: getattr(r, c) for c in cols}


def report_records(report: SensitivityReport, include_timing: bool = False) -> list[dict]:
    """Data rows only; the baseline (if any) is kept apart from them."""
    return [_record(r, include_timing) for r in report.rows]


def render_csv(report: SensitivityReport, include_timing: bool = False) -> str:
    cols = COLUMNS + (["wall_time"] if include_timing else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for rec in report_records(report, include_timing):
        w.writerow([_cell(rec[c]) for c in cols])
    return buf.getvalue()


def render_json(report: SensitivityReport, include_timing: bool = False) -> str:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v

    doc = {
        "kind": report.kind,
        "flags": report.flags,
        "baseline": ({k: clean(v) for k, v in _record(report.baseline, include_timing).items()}
                     if report.baseline else None),
        "rows": [{k: clean(v) for k, v in rec.items()} for rec in report_records(report, include_timing)],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_plot_data(report: SensitivityReport) -> str:
    """Two-column (x, y) data: level or instance label against P3."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y"])
    for r in report.rows:
        if r.solved and not r.note:
            w.writerow([_cell(r.level), _cell(r.P3)])
    return buf.getvalue()


def emit_report(report: SensitivityReport, fmt: str, path: str | Path,
                include_timing: bool = False) -> tuple[Path, Path]:
    """Write the report and its ``<stem>.plot.csv`` companion; returns both paths.

    Wall time is left out unless asked for, so repeated runs are byte-identical.
    """
    path = Path(path)
    if fmt == "csv":
        text = render_csv(report, include_timing)
    elif fmt == "json":
        text = render_json(report, include_timing)
    else:
        raise ValueError(f"unknown report format {fmt!r}; expected 'csv' or 'json'")
    path.write_text(text)
    plot = path.with_name(path.stem + ".plot.csv")
    plot.write_text(render_plot_data(report))
    return path, plot
