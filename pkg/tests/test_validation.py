import numpy as np
import pytest

from coldchain.builder import build_deterministic
from coldchain.model_data import Dimensions, generate_instance
from coldchain.solver.milp import solve_milp
from coldchain.solver.validation import check_solution


@pytest.fixture(scope="module")
def solved():
    inst = generate_instance(Dimensions(2, 2, 4, 1, 3, 3), 3)
    model, ix = build_deterministic(inst)
    sol = solve_milp(model)
    assert sol.status == "optimal"
    return inst, model, ix, sol


def test_optimum_is_clean(solved):
    inst, model, ix, sol = solved
    rep = check_solution(model, sol, 1e-6, ix, inst)
    assert rep.clean, rep.summary()


def test_priority_prefix_breach_is_flagged(solved):
    inst, model, ix, sol = solved
    x = sol.x.copy()
    x[ix["u"][:, 0]] = 0
    x[ix["u"][2, 0]] = 1  # a younger group active while group 1 is not
    rep = check_solution(model, x, 1e-6, ix, inst)
    assert any(v.check == "priority" and v.item == "u[2,0] > u[1,0]" for v in rep.violations)


def test_perturbation_lists_violations_with_slacks(solved):
    inst, model, ix, sol = solved
    x = sol.x.copy()
    busy = ix["W"].ravel()[np.argmax(sol.x[ix["W"]].ravel())]
    x[busy] += 1e-3
    rep = check_solution(model, x, 1e-6, ix, inst)
    assert not rep.clean
    rows = [v for v in rep.violations if v.check == "row"]
    assert rows and all(-2e-3 <= v.amount < -1e-6 for v in rows)


def test_generic_only_without_index(solved):
    inst, model, ix, sol = solved
    assert check_solution(model, sol.x).clean
    with pytest.raises(ValueError):
        check_solution(model, type("S", (), {"x": None})())
