import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coldchain.builder import build_deterministic
from coldchain.lp import EQ, GE, LE, MilpModel, ModelError
from coldchain.model_data import Dimensions, generate_instance, scale_budgets, scale_max_orders
from coldchain.robust import (
    RobustConfig,
    UncertainRowSpec,
    build_robust,
    effective_gamma,
    robustify_objective,
    robustify_row,
)
from coldchain.solver.milp import solve_lp, solve_milp
from coldchain.solver.simplex import OPTIMAL


def one_var(bound=10.0, sense=LE, lower=0.0):
    m = MilpModel()
    x = m.add_variable("x", lower)
    m.set_objective([(x, -1.0 if sense == LE else 1.0)])
    r = m.add_constraint("c", [(x, 1.0)], sense, bound)
    return m, x, r


def test_zero_budget_is_nominal():
    m, x, r = one_var()
    robustify_row(m, UncertainRowSpec(r, [(x, 2.0)], 0.0))
    assert solve_lp(m).x[x] == pytest.approx(10)


@pytest.mark.parametrize("gamma,expected", [(1.0, 8.0), (0.5, 9.0)])
def test_uncertain_right_hand_side(gamma, expected):
    m, x, r = one_var()
    robustify_row(m, UncertainRowSpec(r, (), gamma, rhs_deviation=2.0))
    assert solve_lp(m).x[x] == pytest.approx(expected)


@pytest.mark.parametrize("gamma", [0.0, 0.25, 0.5, 1.0])
def test_uncertain_coefficient_matches_worst_case(gamma):
    # coefficient in [1 - 2, 1 + 2]; protection gamma * 2 * x
    m, x, r = one_var()
    robustify_row(m, UncertainRowSpec(r, [(x, 2.0)], gamma))
    assert solve_lp(m).x[x] == pytest.approx(10 / (1 + 2 * gamma))


def test_greater_equal_row_is_negated():
    m, x, r = one_var(3.0, GE)
    robustify_row(m, UncertainRowSpec(r, (), 1.0, rhs_deviation=1.0))
    assert solve_lp(m).x[x] == pytest.approx(4.0)


def test_free_variable_gets_absolute_value_proxy():
    m = MilpModel()
    x = m.add_variable("x", -10, 10)
    m.set_objective([(x, 1.0)])
    r = m.add_constraint("c", [(x, -1.0)], LE, 6)  # x >= -6
    rv = robustify_row(m, UncertainRowSpec(r, [(x, 1.0)], 1.0))
    assert x in rv.y
    # worst case coefficient -2 or 0: -2x <= 6 -> x >= -3
    assert solve_lp(m).x[x] == pytest.approx(-3.0)


def test_row_errors():
    m, x, r = one_var()
    with pytest.raises(ModelError):
        robustify_row(m, UncertainRowSpec(r, [(x, 1.0)], 1.5))
    with pytest.raises(ModelError):
        robustify_row(m, UncertainRowSpec(99, [(x, 1.0)], 0.5))
    with pytest.raises(ModelError):
        robustify_row(m, UncertainRowSpec(r, [(x, -1.0)], 0.5))
    e = m.add_constraint("e", [(x, 1.0)], EQ, 1.0)
    with pytest.raises(ModelError):
        robustify_row(m, UncertainRowSpec(e, [(x, 1.0)], 0.5))


def test_objective_examples():
    m, x, _ = one_var(3.0, GE)
    assert robustify_objective(m, [], 1.0) is None
    n_before = m.n_vars
    robustify_objective(m, [(x, 1.0)], 1.0)
    assert m.n_vars > n_before
    assert solve_lp(m).objective == pytest.approx(6.0)
    m, x, _ = one_var(3.0, GE)
    robustify_objective(m, [(x, 1.0)], 0.0)
    assert solve_lp(m).objective == pytest.approx(3.0)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 5))
def test_row_protection_monotone_in_gamma(g1, g2, dev):
    lo, hi = sorted((g1, g2))
    vals = []
    for g in (lo, hi):
        m, x, r = one_var()
        robustify_row(m, UncertainRowSpec(r, (), g, rhs_deviation=dev))
        vals.append(solve_lp(m).objective)
    assert vals[0] <= vals[1] + 1e-9


def test_uncertainty_free_row_is_unchanged():
    m, x, r = one_var()
    robustify_row(m, UncertainRowSpec(r, (), 0.0))
    assert solve_lp(m).objective == pytest.approx(-10)


def tiny(seed):
    return generate_instance(Dimensions(2, 1, 2, 1, 3, 3), seed)


def test_robust_index_shapes_and_duals():
    inst = tiny(0)
    model, ix = build_robust(inst, RobustConfig(gamma=1.0))
    assert ix["r1"].shape == ix["H1"].shape == (2, 1, 3)
    assert ix["r2"].shape == ix["H2"].shape == (2,)
    sol = solve_milp(model)
    mh = 0.1 * np.array([s.max_order for s in inst.suppliers])
    bh = 0.1 * np.array([s.budget for s in inst.suppliers])
    x = sol.x
    assert np.all(x[ix["r1"]] + x[ix["H1"]] >= mh[:, :, None] - 1e-7)
    assert np.all(x[ix["r2"]] + x[ix["H2"]] >= bh - 1e-7)


def test_robust_soyster_against_shrunk_nominals():
    inst = tiny(2)
    rob = solve_milp(build_robust(inst, RobustConfig(gamma=1.0, deviation_fraction=0.1))[0])
    det = solve_milp(build_deterministic(scale_max_orders(scale_budgets(inst, 0.9), 0.9))[0])
    assert rob.status == det.status == OPTIMAL
    assert rob.objective == pytest.approx(det.objective, rel=1e-6)


def test_zero_deviation_any_gamma_is_nominal():
    inst = tiny(1)
    det = solve_milp(build_deterministic(inst)[0]).objective
    rob = solve_milp(build_robust(inst, RobustConfig(gamma=1.0, deviation_fraction=0.0))[0]).objective
    assert rob == pytest.approx(det, rel=1e-6)


def test_explicit_deviation_arrays():
    inst = tiny(1)
    cfg = RobustConfig(gamma=1.0, maxorder_deviation=np.zeros((2, 1)), budget_deviation=np.zeros(2))
    det = solve_milp(build_deterministic(inst)[0]).objective
    assert solve_milp(build_robust(inst, cfg)[0]).objective == pytest.approx(det, rel=1e-6)
    with pytest.raises(ValueError, match="shape"):
        build_robust(inst, RobustConfig(maxorder_deviation=np.zeros(3)))


def test_config_validation_and_clamp(caplog):
    with pytest.raises(ValueError):
        RobustConfig(gamma=-1)
    with pytest.raises(ValueError):
        RobustConfig(budget_deviation=[-1.0, 0.0])
    with caplog.at_level("WARNING"):
        assert effective_gamma(2.5) == 1.0
    assert "clamped" in caplog.text
    assert RobustConfig.from_dict(RobustConfig(0.5, 0.2).to_dict()) == RobustConfig(0.5, 0.2)
