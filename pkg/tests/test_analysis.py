import json

import numpy as np
import pytest
from oracles import hand_instance

from coldchain import analysis
from coldchain.analysis import (
    PerturbationScenario,
    SensitivityReport,
    emit_report,
    gamma_sweep,
    run_budget_order_sensitivity,
    run_budget_sweep,
    run_ladder_instances,
    perturbation_scenarios,
)
from coldchain.builder import build_deterministic
from coldchain.model_data import Dimensions, generate_instance, scale_budgets, scale_max_orders
from coldchain.solver.milp import solve_milp


def tiny(seed=0):
    return generate_instance(Dimensions(2, 1, 2, 1, 3, 3), seed)


def test_scenarios_follow_reference_order():
    labels = [(s.budget_direction, s.maxorder_direction) for s in perturbation_scenarios()]
    assert labels == [
        ("increased", "increased"), ("increased", "unchanged"), ("increased", "decreased"),
        ("unchanged", "increased"), ("unchanged", "decreased"),
        ("decreased", "increased"), ("decreased", "unchanged"), ("decreased", "decreased"),
    ]


def test_all_unchanged_and_zero_magnitude_rejected():
    with pytest.raises(ValueError):
        PerturbationScenario("unchanged", "unchanged")
    with pytest.raises(ValueError):
        PerturbationScenario("increased", "decreased", 0.0)


def test_scenario_application():
    inst = tiny()
    out = PerturbationScenario("decreased", "increased", 0.1).apply(inst)
    assert out.suppliers[0].budget == pytest.approx(0.9 * inst.suppliers[0].budget)
    assert out.suppliers[0].max_order[0] == pytest.approx(1.1 * inst.suppliers[0].max_order[0])


@pytest.fixture(scope="module")
def scenarios():
    return run_budget_order_sensitivity(tiny(3), 0.1)


def test_budget_order_report_shape(scenarios):
    assert len(scenarios.rows) == 8 and scenarios.baseline.solved
    assert scenarios.flags["all_solved"]
    base = scenarios.baseline.Z
    for r in scenarios.rows:
        assert r.pct_change == pytest.approx(100 * (r.Z - base) / abs(base))


def test_budget_order_extremes_follow_minimisation(scenarios):
    # more money and larger orders can only enlarge the feasible set
    zs = {r.label: r.Z for r in scenarios.rows}
    assert zs["budget-increased/orders-increased"] <= zs["budget-decreased/orders-decreased"] + 1e-6
    mid = zs["budget-increased/orders-unchanged"]
    assert zs["budget-increased/orders-increased"] - 1e-6 <= mid <= zs["budget-decreased/orders-decreased"] + 1e-6


def test_budget_sweep_zero_cut_equals_baseline():
    rep = run_budget_sweep(tiny(1), [0.0, 0.05])
    assert rep.rows[0].Z == pytest.approx(rep.baseline.Z, rel=1e-9)


def test_full_cut_is_flagged_infeasible_and_relaxed():
    rep = run_budget_sweep(tiny(1), [1.0], relax_floor=True)
    assert rep.rows[0].status == "infeasible" and not rep.flags["all_solved"]
    relaxed = [r for r in rep.rows if r.note == "omega=0"]
    assert len(relaxed) == 1 and relaxed[0].solved


def test_budget_sweep_p3_grows_on_binding_budget():
    inst = hand_instance(demand=[[[0, 10, 10]], [[0, 10, 10]]], budget=30.0, omega=0.0)
    rep = run_budget_sweep(inst, [0.05, 0.5])
    lo, hi = rep.rows
    assert hi.P3 >= lo.P3 - 1e-6 and hi.P2 <= lo.P2 + 1e-6


def test_gamma_sweep_monotone_and_zero_deviation_flat():
    inst = tiny(4)
    rep = gamma_sweep(inst, [0.0, 0.5, 1.0], 0.1)
    assert rep.flags["z_non_decreasing"]
    flat = gamma_sweep(inst, [0.0, 1.0], 0.0)
    assert flat.rows[0].Z == pytest.approx(flat.rows[1].Z, rel=1e-9)
    shifted = solve_milp(build_deterministic(scale_max_orders(scale_budgets(inst, 0.9), 0.9))[0])
    assert rep.rows[-1].Z == pytest.approx(shifted.objective, rel=1e-6)
    with pytest.raises(ValueError):
        gamma_sweep(inst, [1.0, 0.5])


def test_ladder_flags_and_zero_demand_row():
    zero = hand_instance(demand=np.zeros((1, 1, 2)))
    rep = run_ladder_instances([("zero", zero), ("small", tiny(0))])
    assert rep.rows[0].Z == pytest.approx(0) and rep.rows[0].P3 == 0
    assert rep.flags["z_non_decreasing"]
    single = run_ladder_instances([("one", tiny(0))])
    assert single.flags["z_non_decreasing"] and single.flags["p3_growth_declining"]


def test_empty_report_is_header_only(tmp_path):
    path, plot = emit_report(SensitivityReport("empty"), "csv", tmp_path / "r.csv")
    assert path.read_text() == ",".join(analysis.COLUMNS) + "\n"
    assert plot.read_text() == "x,y\n"


def test_scenario_report_lines(tmp_path, scenarios):
    path, plot = emit_report(scenarios, "csv", tmp_path / "t4.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 9 and lines[0].startswith("label,level,status")
    assert "wall_time" not in lines[0]
    assert len(plot.read_text().splitlines()) == 9


def test_json_report_and_timing_opt_in(tmp_path, scenarios):
    path, _ = emit_report(scenarios, "json", tmp_path / "t4.json", include_timing=True)
    doc = json.loads(path.read_text())
    assert doc["baseline"]["label"] == "baseline" and len(doc["rows"]) == 8
    assert "wall_time" in doc["rows"][0]
    with pytest.raises(ValueError):
        emit_report(scenarios, "xml", tmp_path / "t4.xml")


def test_rerun_is_byte_identical(tmp_path):
    a = run_budget_sweep(tiny(2), [0.1, 0.2])
    b = run_budget_sweep(tiny(2), [0.1, 0.2])
    emit_report(a, "csv", tmp_path / "a.csv")
    emit_report(b, "csv", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.plot.csv").read_bytes() == (tmp_path / "b.plot.csv").read_bytes()
