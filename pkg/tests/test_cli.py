import json
import subprocess
import sys

import pytest

from coldchain.cli import main
from coldchain.model_data import Dimensions, generate_instance, load_instance, save_instance, validate_instance


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "tiny.json"
    save_instance(generate_instance(Dimensions(2, 1, 2, 1, 3, 3), 5), path)
    return path


def test_generate_preset(tmp_path):
    out = tmp_path / "inst.json"
    assert main(["generate", "--preset", "1", "--seed", "42", "-o", str(out)]) == 0
    assert validate_instance(load_instance(out)) == []


def test_solve_robust_writes_components(tmp_path, inst_file, capsys):
    sol = tmp_path / "sol.json"
    code = main(["solve", "--instance", str(inst_file), "--robust", "--gamma", "1.0",
                 "--deviation", "0.1", "-o", str(sol)])
    assert code == 0
    doc = json.loads(sol.read_text())
    assert doc["status"] == "optimal" and set(doc["components"]) == {"P1", "P2", "P3", "Z"}
    assert doc["components"]["Z"] == pytest.approx(doc["objective"], rel=1e-9)
    assert "wall_time" not in doc and doc["values"]
    assert capsys.readouterr().out.startswith("config: ")
    assert main(["validate", "--instance", str(inst_file), "--solution", str(sol)]) == 0


def test_gamma_clamped_with_warning(tmp_path, inst_file, capsys):
    code = main(["--json", "--out-dir", str(tmp_path), "solve", "--instance", str(inst_file), "--gamma", "2.5"])
    captured = capsys.readouterr()
    assert code == 0
    assert "clamped" in captured.err and captured.err.count("clamped") == 1
    assert json.loads(captured.out)["config"]["gamma"] == 1.0


def test_usage_errors_exit_2(tmp_path, inst_file, capsys):
    assert main(["solve"]) == 2
    assert main(["solve", "--instance", str(tmp_path / "missing.json")]) == 2
    assert main(["gamma-sweep", "--instance", str(inst_file), "--gammas", "1,0"]) == 2
    assert main(["ladder", "--presets", "99"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["validate", "--instance", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_infeasible_exits_1(tmp_path, inst_file):
    code = main(["--out-dir", str(tmp_path), "sensitivity", "--instance", str(inst_file),
                 "--study", "sweep", "--fractions", "1.0"])
    assert code == 1


def test_validate_flags_tampered_solution(tmp_path, inst_file):
    sol = tmp_path / "sol.json"
    assert main(["solve", "--instance", str(inst_file), "-o", str(sol)]) == 0
    before = inst_file.read_bytes()
    doc = json.loads(sol.read_text())
    doc["values"]["u[2,1]"] = 1.0
    doc["values"].pop("u[1,1]", None)
    sol.write_text(json.dumps(doc))
    assert main(["validate", "--instance", str(inst_file), "--solution", str(sol)]) == 1
    assert inst_file.read_bytes() == before


def test_env_var_sets_output_dir(tmp_path, inst_file, monkeypatch):
    monkeypatch.setenv("COLDCHAIN_OUT", str(tmp_path / "outs"))
    assert main(["gamma-sweep", "--instance", str(inst_file), "--gammas", "0,1"]) == 0
    assert (tmp_path / "outs" / "gamma_sweep.csv").exists()
    assert (tmp_path / "outs" / "gamma_sweep.plot.csv").exists()


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "i.json"
    res = subprocess.run([sys.executable, "-m", "coldchain.cli", "generate", "--dims", "3,1,2,1", "-o", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert load_instance(out).dims.n_vcs == 2
