"""Command-line front end.

    coldchain generate     --preset 1 --seed 42 -o inst.json
    coldchain solve        --instance inst.json [--robust --gamma 1 --deviation 0.1]
    coldchain sensitivity  --instance inst.json --study sweep
    coldchain gamma-sweep  --instance inst.json --gammas 0,0.5,1
    coldchain validate     --instance inst.json [--solution sol.json]
    coldchain ladder       --presets 1,2,3 --seed 42

Exit status: 0 success, 1 infeasible or limit-hit outcome (or a failed
check), 2 usage or input error.  ``COLDCHAIN_OUT`` sets the default output
directory.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis
from .builder import build_deterministic, objective_components
from .model_data import (
    Dimensions,
    InstanceFormatError,
    generate_instance,
    load_instance,
    read_document,
    save_instance,
    validate_instance,
)
from .robust import RobustConfig, build_robust, effective_gamma
from .solver.milp import FEASIBLE_GAP, SolveOptions, solve_milp
from .solver.simplex import OPTIMAL, SolverFailure
from .solver.validation import check_solution

OUT_ENV = "COLDCHAIN_OUT"
SOLUTION_SCHEMA = "coldchain-solution/1"
log = logging.getLogger("coldchain")


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--instance", type=Path, help="instance file")
    g.add_argument("--preset", type=int, help="preset size id (1-15), generated with --seed")
    p.add_argument("--seed", type=int, default=0)


def _add_solver(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["auto", "native", "highs"], default="auto")
    p.add_argument("--time-limit", type=float, default=0.0, help="seconds per solve, 0 = none")
    p.add_argument("--node-limit", type=int, default=0)
    p.add_argument("--gap", type=float, default=1e-6, help="relative MIP gap target")


def _add_robust(p: argparse.ArgumentParser) -> None:
    p.add_argument("--robust", action="store_true", help="solve the robust counterpart")
    p.add_argument("--gamma", type=float, help="budget of uncertainty (implies --robust)")
    p.add_argument("--deviation", type=float, help="deviation fraction (implies --robust)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coldchain", description="Robust vaccine distribution planning.")
    parser.add_argument("--json", action="store_true", help="structured output on stdout")
    parser.add_argument("--out-dir", type=Path, default=None,
                        help=f"default output directory (env {OUT_ENV}, else the current directory)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", type=int)
    g.add_argument("--dims", type=_ints, help="T,J,K,V (3 suppliers, 10 age groups)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("solve", help="solve one instance")
    _add_source(p)
    _add_robust(p)
    _add_solver(p)
    p.add_argument("-o", "--output", type=Path, help="solution file")
    p.add_argument("--timing", action="store_true", help="record wall time in the solution file")

    p = sub.add_parser("sensitivity", help="budget/max-order scenarios and budget sweep")
    _add_source(p)
    _add_robust(p)
    _add_solver(p)
    p.add_argument("--study", choices=["scenarios", "sweep", "both"], default="both",
                   help="8 budget/max-order scenarios, the budget-cut sweep, or both")
    p.add_argument("--magnitude", type=float, default=0.10)
    p.add_argument("--fractions", type=_floats, default=list(analysis.DEFAULT_SWEEP))
    p.add_argument("--relax-floor", action="store_true", help="re-solve infeasible cuts with omega = 0")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("gamma-sweep", help="objective against the budget of uncertainty")
    _add_source(p)
    _add_solver(p)
    p.add_argument("--gammas", type=_floats, default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--deviation", type=float, default=0.1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--timing", action="store_true")

    p = sub.add_parser("validate", help="check an instance, or a solution against it")
    _add_source(p)
    p.add_argument("--solution", type=Path)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("ladder", help="solve a sequence of presets")
    p.add_argument("--presets", type=_ints, default=[1, 2, 3])
    p.add_argument("--seed", type=int, default=0)
    _add_robust(p)
    _add_solver(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--timing", action="store_true")
    return parser


# -- helpers ---------------------------------------------------------------------


def _out_dir(args) -> Path:
    d = args.out_dir or Path(os.environ.get(OUT_ENV, "."))
    d.mkdir(parents=True, exist_ok=True)
    return d


def _load(args):
    if args.instance is not None:
        return load_instance(args.instance)
    return generate_instance(args.preset, args.seed)


def _robust_cfg(args, warn: bool = True) -> RobustConfig | None:
    if not (args.robust or args.gamma is not None or args.deviation is not None):
        return None
    gamma = 1.0 if args.gamma is None else args.gamma
    dev = 0.1 if args.deviation is None else args.deviation
    if gamma < 0 or dev < 0:
        raise UsageError("gamma and deviation must be >= 0")
    return RobustConfig(gamma=effective_gamma(gamma) if warn else min(gamma, 1.0), deviation_fraction=dev)


def _options(args) -> SolveOptions:
    try:
        return SolveOptions(gap=args.gap, time_limit=args.time_limit, node_limit=args.node_limit,
                            backend=args.backend)
    except ValueError as exc:
        raise UsageError(str(exc))


def _config_echo(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        cfg[k] = str(v) if isinstance(v, Path) else v
    if "gamma" in cfg or "deviation" in cfg:
        rc = _robust_cfg(args, warn=False) if args.command != "gamma-sweep" else None
        if rc is not None:
            cfg.update(robust=True, gamma=rc.gamma, deviation=rc.deviation_fraction)
    if cfg.get("out_dir") is None:
        cfg["out_dir"] = os.environ.get(OUT_ENV, ".")
    return cfg


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print("config: " + json.dumps(payload["config"], sort_keys=True, default=str))
        for line in lines:
            print(line)


def _exit_for(status: str) -> int:
    return 0 if status in (OPTIMAL, FEASIBLE_GAP) else 1


# -- subcommands -------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.dims is not None:
        if len(args.dims) != 4:
            raise UsageError("--dims needs four integers T,J,K,V")
        T, J, K, V = args.dims
        inst = generate_instance(Dimensions(3, J, K, V, T), args.seed)
    else:
        inst = generate_instance(args.preset, args.seed)
    out = args.output or _out_dir(args) / f"{inst.name}-seed{args.seed}.json"
    save_instance(inst, out)
    payload = {"config": _config_echo(args), "instance": str(out), "shape": list(inst.dims.shape)}
    _emit(args, payload, [f"wrote {out} (I,J,K,V,A,T = {inst.dims.shape})"])
    return 0


def solution_document(case: analysis.SolvedCase, robust: RobustConfig | None, config: dict,
                      timing: bool = False) -> dict:
    sol = case.solution
    doc = {
        "schema": SOLUTION_SCHEMA,
        "instance": case.inst.name,
        # output locations and display flags do not affect the result
        "config": {k: v for k, v in config.items() if k not in ("output", "out_dir", "json", "verbose")},
        "robust": robust.to_dict() if robust else None,
        "status": sol.status,
        "objective": sol.objective if sol.x is not None else None,
        "bound": sol.bound if sol.x is not None else None,
        "gap": sol.gap if sol.x is not None else None,
        "nodes": sol.nodes,
        "components": case.components.as_dict() if case.components else None,
        "values": {},
    }
    if sol.x is not None:
        doc["values"] = {v.name: float(sol.x[v.id]) for v in case.model.variables if abs(sol.x[v.id]) > 1e-12}
    if timing:
        doc["wall_time"] = sol.wall_time
    return doc


def cmd_solve(args) -> int:
    inst = _load(args)
    cfg = _robust_cfg(args)
    config = _config_echo(args)
    case = analysis.solve_case(inst, cfg, _options(args))
    doc = solution_document(case, cfg, config, args.timing)
    out = args.output or _out_dir(args) / f"{inst.name}.solution.json"
    Path(out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    lines = [f"status: {case.solution.status}"]
    if case.components:
        lines += [f"{k}: {v:.6f}" for k, v in case.components.as_dict().items()]
        lines.append(f"gap: {case.solution.gap:.3e}")
    lines.append(f"wrote {out}")
    payload = {k: doc[k] for k in ("config", "status", "objective", "bound", "gap", "components")}
    payload["solution"] = str(out)
    _emit(args, payload, lines)
    return _exit_for(case.solution.status)


def _write_report(args, rep: analysis.SensitivityReport, stem: str) -> tuple[Path, list[str]]:
    out = _out_dir(args) / f"{stem}.{args.format}"
    analysis.emit_report(rep, args.format, out, include_timing=args.timing)
    lines = [f"{stem}: " + ", ".join(f"{k}={v}" for k, v in rep.flags.items())]
    for r in ([rep.baseline] if rep.baseline else []) + rep.rows:
        extra = f" [{r.note}]" if r.note else ""
        lines.append(f"  {r.label:<36} {r.status:<12} P2={r.P2:.4f} P3={r.P3:.4f} Z={r.Z:.4f}{extra}")
    lines.append(f"  wrote {out}")
    return out, lines


def _report_ok(rep: analysis.SensitivityReport) -> bool:
    return all(r.solved for r in rep.rows if not r.note) and (rep.baseline is None or rep.baseline.solved)


def cmd_sensitivity(args) -> int:
    inst = _load(args)
    cfg = _robust_cfg(args)
    opts = _options(args)
    config = _config_echo(args)
    reports = {}
    if args.study in ("scenarios", "both"):
        if not 0 < args.magnitude < 1:
            raise UsageError("--magnitude must lie in (0, 1)")
        reports["scenarios"] = analysis.run_budget_order_sensitivity(inst, args.magnitude, cfg, opts)
    if args.study in ("sweep", "both"):
        if any(not 0 <= f <= 1 for f in args.fractions):
            raise UsageError("--fractions must lie in [0, 1]")
        reports["budget_sweep"] = analysis.run_budget_sweep(inst, args.fractions, cfg, opts, args.relax_floor)
    lines, files = [], {}
    for stem, rep in reports.items():
        out, more = _write_report(args, rep, stem)
        files[stem] = str(out)
        lines += more
    payload = {"config": config, "reports": files, "flags": {k: r.flags for k, r in reports.items()}}
    _emit(args, payload, lines)
    return 0 if all(_report_ok(r) for r in reports.values()) else 1


def cmd_gamma_sweep(args) -> int:
    inst = _load(args)
    if args.gammas != sorted(args.gammas) or any(not 0 <= g <= 1 for g in args.gammas):
        raise UsageError("--gammas must be ascending within [0, 1]")
    if args.deviation < 0:
        raise UsageError("--deviation must be >= 0")
    config = _config_echo(args)
    rep = analysis.gamma_sweep(inst, args.gammas, args.deviation, _options(args))
    out, lines = _write_report(args, rep, "gamma_sweep")
    _emit(args, {"config": config, "report": str(out), "flags": rep.flags}, lines)
    return 0 if _report_ok(rep) else 1


def cmd_ladder(args) -> int:
    if any(p not in range(1, 16) for p in args.presets):
        raise UsageError("--presets must be preset ids 1..15")
    config = _config_echo(args)
    rep = analysis.run_ladder(args.presets, args.seed, _robust_cfg(args), _options(args))
    out, lines = _write_report(args, rep, "ladder")
    _emit(args, {"config": config, "report": str(out), "flags": rep.flags}, lines)
    return 0 if _report_ok(rep) else 1


def cmd_validate(args) -> int:
    inst = _load(args)
    config = _config_echo(args)
    problems = validate_instance(inst)
    payload: dict = {"config": config, "instance_problems": problems}
    lines = [f"instance: {'ok' if not problems else '; '.join(problems)}"]
    ok = not problems
    if args.solution is not None and not problems:
        doc = read_document(args.solution)
        if doc.get("schema") != SOLUTION_SCHEMA:
            raise InstanceFormatError(f"{args.solution}: not a solution file (schema {doc.get('schema')!r})")
        robust = doc.get("robust")
        if robust:
            model, index = build_robust(inst, RobustConfig.from_dict(robust))
        else:
            model, index = build_deterministic(inst)
        values = doc.get("values") or {}
        unknown = [n for n in values if n not in model._var_names]
        if unknown:
            raise InstanceFormatError(f"{args.solution}: unknown variable {unknown[0]!r} for this instance")
        if doc.get("status") not in (OPTIMAL, FEASIBLE_GAP) or not values and doc.get("objective") is None:
            lines.append(f"solution: no point to check (status {doc.get('status')})")
            payload["solution_violations"] = None
            ok = False
        else:
            x = [0.0] * model.n_vars
            for name, val in values.items():
                x[model.var_id(name)] = float(val)
            rep = check_solution(model, x, args.tol, index, inst)
            comp = objective_components(inst, index, x)
            payload["solution_violations"] = [[v.check, v.item, v.amount] for v in rep.violations]
            payload["components"] = comp.as_dict()
            lines.append(f"solution: {rep.summary()}")
            lines += [f"  {v.check}: {v.item} ({v.amount:.3e})" for v in rep.violations[:20]]
            ok = rep.clean
    _emit(args, payload, lines)
    return 0 if ok else 1


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "sensitivity": cmd_sensitivity,
    "gamma-sweep": cmd_gamma_sweep,
    "validate": cmd_validate,
    "ladder": cmd_ladder,
}


def _setup_logging(verbose: bool) -> None:
    # own handler, so warnings reach stderr even when the root logger is configured elsewhere
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    for h in [h for h in log.handlers if getattr(h, "_cli", False)]:
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler._cli = True
    log.addHandler(handler)
    log.propagate = False


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"coldchain {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (InstanceFormatError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"coldchain {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except SolverFailure as exc:
        print(f"coldchain {args.command}: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
