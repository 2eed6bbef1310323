"""Free-format MPS dump and load for :class:`~coldchain.lp.MilpModel`.

Layout written by :func:`write_mps`::

    NAME          <model name>
    ROWS
     N  OBJ
     L  <row>          (E and G likewise)
    COLUMNS
        MARKER  'MARKER'  'INTORG'     (binaries are wrapped in INTORG/INTEND)
        <var>  OBJ <c>  <row> <a>      (one coefficient per line)
    RHS
        RHS  <row> <b>
        RHS  OBJ <-constant>           (objective constant, sign per convention)
    BOUNDS
     LO/UP/FX/FR/MI/PL/BV  BND  <var>  <value>
    ENDATA

Names must not contain whitespace.  Numbers are written with ``repr`` so a
dump/load round trip is exact.
"""

from __future__ import annotations

import math
from pathlib import Path

from .lp import BINARY, CONTINUOUS, EQ, GE, INF, LE, MilpModel

_SENSE_CODE = {LE: "L", EQ: "E", GE: "G"}
_CODE_SENSE = {v: k for k, v in _SENSE_CODE.items()}
OBJ = "OBJ"


class MpsError(ValueError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def write_mps(model: MilpModel, path: str | Path) -> None:
    lines = [f"NAME          {model.name}", "ROWS", f" N  {OBJ}"]
    for r in model.rows:
        lines.append(f" {_SENSE_CODE[r.sense]}  {r.name}")

    by_col: list[list[tuple[str, float]]] = [[] for _ in model.variables]
    for j, coef in sorted(model.objective.items()):
        by_col[j].append((OBJ, coef))
    for r in model.rows:
        for j, coef in r.terms.items():
            by_col[j].append((r.name, coef))

    lines.append("COLUMNS")
    in_int = False
    marker = 0
    for v in model.variables:
        is_bin = v.kind == BINARY
        if is_bin != in_int:
            tag = "INTORG" if is_bin else "INTEND"
            lines.append(f"    M{marker}  'MARKER'  '{tag}'")
            marker += 1
            in_int = is_bin
        entries = by_col[v.id]
        if not entries:
            # keep the column visible even when it has no coefficients
            entries = [(OBJ, 0.0)]
        for row_name, coef in entries:
            lines.append(f"    {v.name}  {row_name}  {_num(coef)}")
    if in_int:
        lines.append(f"    M{marker}  'MARKER'  'INTEND'")

    lines.append("RHS")
    for r in model.rows:
        if r.rhs != 0.0:
            lines.append(f"    RHS  {r.name}  {_num(r.rhs)}")
    if model.objective_constant != 0.0:
        lines.append(f"    RHS  {OBJ}  {_num(-model.objective_constant)}")

    lines.append("BOUNDS")
    for v in model.variables:
        lo, up = v.lower, v.upper
        if v.kind == BINARY and lo == 0.0 and up == 1.0:
            lines.append(f" BV BND  {v.name}")
            continue
        if lo == up:
            lines.append(f" FX BND  {v.name}  {_num(lo)}")
            continue
        if lo == -INF and up == INF:
            lines.append(f" FR BND  {v.name}")
            continue
        if lo == -INF:
            lines.append(f" MI BND  {v.name}")
        elif lo != 0.0:
            lines.append(f" LO BND  {v.name}  {_num(lo)}")
        if up != INF:
            lines.append(f" UP BND  {v.name}  {_num(up)}")
    lines.append("ENDATA")
    Path(path).write_text("\n".join(lines) + "\n")


def read_mps(path: str | Path) -> MilpModel:
    """Parse a file written by :func:`write_mps` (or any simple free MPS)."""
    section = None
    name = "model"
    row_sense: dict[str, str] = {}
    row_order: list[str] = []
    cols: dict[str, dict[str, float]] = {}
    col_kind: dict[str, str] = {}
    rhs: dict[str, float] = {}
    bounds: dict[str, list[float]] = {}
    in_int = False

    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        if not raw.strip() or raw.startswith("*"):
            continue
        tok = raw.split()
        if not raw[0].isspace():
            section = tok[0].upper()
            if section == "NAME":
                name = tok[1] if len(tok) > 1 else name
            elif section == "ENDATA":
                break
            elif section not in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES"):
                raise MpsError(f"line {lineno}: unknown section {tok[0]!r}")
            continue
        try:
            if section == "ROWS":
                code, rname = tok[0].upper(), tok[1]
                if code == "N":
                    continue
                row_sense[rname] = _CODE_SENSE[code]
                row_order.append(rname)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_int = tok[2] == "'INTORG'"
                    continue
                cname = tok[0]
                col = cols.setdefault(cname, {})
                col_kind.setdefault(cname, BINARY if in_int else CONTINUOUS)
                for k in range(1, len(tok) - 1, 2):
                    col[tok[k]] = col.get(tok[k], 0.0) + float(tok[k + 1])
            elif section == "RHS":
                for k in range(1, len(tok) - 1, 2):
                    rhs[tok[k]] = float(tok[k + 1])
            elif section == "BOUNDS":
                kind, cname = tok[0].upper(), tok[2]
                val = float(tok[3]) if len(tok) > 3 else math.nan
                b = bounds.setdefault(cname, [0.0, INF])
                if kind == "LO":
                    b[0] = val
                elif kind == "UP":
                    b[1] = val
                elif kind == "FX":
                    b[0] = b[1] = val
                elif kind == "FR":
                    b[0], b[1] = -INF, INF
                elif kind == "MI":
                    b[0] = -INF
                elif kind == "PL":
                    b[1] = INF
                elif kind == "BV":
                    b[0], b[1] = 0.0, 1.0
                    col_kind[cname] = BINARY
                else:
                    raise MpsError(f"line {lineno}: unknown bound type {kind!r}")
            elif section == "RANGES":
                raise MpsError(f"line {lineno}: RANGES section is not supported")
        except (IndexError, KeyError, ValueError) as exc:
            if isinstance(exc, MpsError):
                raise
            raise MpsError(f"line {lineno}: cannot parse {raw.strip()!r} ({exc})") from exc

    model = MilpModel(name)
    for cname, col in cols.items():
        kind = col_kind[cname]
        lo, up = bounds.get(cname, [0.0, 1.0 if kind == BINARY else INF])
        model.add_variable(cname, lo, up, kind)
    for rname in row_order:
        terms = [(model.var_id(c), col[rname]) for c, col in cols.items() if rname in col]
        model.add_constraint(rname, terms, row_sense[rname], rhs.get(rname, 0.0))
    model.set_objective(
        [(model.var_id(c), col[OBJ]) for c, col in cols.items() if OBJ in col],
        -rhs.get(OBJ, 0.0),
    )
    return model
