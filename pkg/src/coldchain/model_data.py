"""Planning instance for the three-echelon vaccine network.

Index conventions (0-based everywhere in code; period ``t`` is period number
``t + 1`` when it enters the deprivation rate):

    i  supplier          j  distribution center (DC)
    k  vaccination center (VC)
    v  vaccine type      a  age group (a = 0 is the OLDEST group)
    t  period

Array fields are numpy arrays laid out in the canonical (i, j, k, v, a, t)
order, e.g. ``var_cost_d2v[j, k, v]`` and ``age_demand[j, a]``.  Arrays are
made read-only on construction so instances can be shared freely.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

SCHEMA = "coldchain-instance/1"

# Preset experiment sizes: id -> (periods, DCs, VCs, vaccine types)
PRESETS: dict[int, tuple[int, int, int, int]] = {
    1: (5, 10, 20, 2),
    2: (5, 10, 30, 2),
    3: (10, 10, 40, 2),
    4: (10, 10, 40, 3),
    5: (15, 10, 40, 3),
    6: (20, 20, 50, 4),
    7: (20, 20, 50, 5),
    8: (25, 20, 50, 6),
    9: (25, 20, 60, 8),
    10: (30, 20, 60, 10),
    11: (35, 31, 70, 10),
    12: (40, 31, 80, 10),
    13: (45, 31, 85, 10),
    14: (50, 31, 90, 10),
    15: (100, 31, 100, 15),
}

# Case-study supplier data: name, budget ($), average maximum
# order (doses), inventory capacity (doses).
CASE_STUDY_SUPPLIERS = (
    ("IRCS", 250_000_000, 3_180_000, 3_000_000),
    ("Private sector", 400_000_000, 3_350_000, 2_500_000),
    ("IMHM", 700_000_000, 3_350_000, 3_500_000),
)


class InstanceFormatError(ValueError):
    """Instance file could not be parsed; the message names the field."""


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dimensions:
    n_suppliers: int
    n_dcs: int
    n_vcs: int
    n_vaccines: int
    n_periods: int
    n_age_groups: int = 10

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_suppliers, self.n_dcs, self.n_vcs, self.n_vaccines,
                self.n_age_groups, self.n_periods)


@dataclass(frozen=True)
class SupplierParams:
    name: str
    lead_time: int
    budget: float
    capacity: float
    max_order: tuple[float, ...]  # per vaccine type, per period
    price: tuple[float, ...]  # per vaccine type


@dataclass(frozen=True, eq=False)
class NetworkParams:
    dc_capacity: np.ndarray  # [j]
    var_cost_s2d: np.ndarray  # [i, j, v]
    fixed_cost_s2d: np.ndarray  # [i, j]
    var_cost_d2v: np.ndarray  # [j, k, v]
    fixed_cost_d2v: np.ndarray  # [j, k]
    assignment: np.ndarray  # [k] -> owning DC j

    def __post_init__(self):
        for f in dataclasses.fields(self):
            dtype = int if f.name == "assignment" else float
            object.__setattr__(self, f.name, _frozen(getattr(self, f.name), dtype))

    def members(self, j: int) -> np.ndarray:
        """Vaccination centers assigned to DC ``j``."""
        return np.flatnonzero(self.assignment == j)


@dataclass(frozen=True)
class VaccineParams:
    name: str
    holding_cost: float
    shelf_life: int


@dataclass(frozen=True, eq=False)
class DemandParams:
    demand: np.ndarray  # [k, v, t] doses
    age_demand: np.ndarray  # [j, a] persons
    service_floor: float = 0.3
    equity_tolerance: float = 0.1
    service_floor_override: np.ndarray | None = None  # [k, v, t]

    def __post_init__(self):
        object.__setattr__(self, "demand", _frozen(self.demand))
        object.__setattr__(self, "age_demand", _frozen(self.age_demand))
        if self.service_floor_override is not None:
            object.__setattr__(self, "service_floor_override", _frozen(self.service_floor_override))

    def floor(self, k: int, v: int, t: int) -> float:
        if self.service_floor_override is not None:
            return float(self.service_floor_override[k, v, t])
        return self.service_floor


@dataclass(frozen=True)
class ObjectiveWeights:
    holding: float = 0.3
    transport: float = 0.1
    deprivation: float = 0.6
    deprivation_slope: float = 3.0

    @property
    def theta(self) -> tuple[float, float, float]:
        return (self.holding, self.transport, self.deprivation)


@dataclass(frozen=True, eq=False)
class Instance:
    dims: Dimensions
    suppliers: tuple[SupplierParams, ...]
    network: NetworkParams
    vaccines: tuple[VaccineParams, ...]
    demand: DemandParams
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    seed: int | None = None
    name: str = "instance"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return instance_to_dict(self) == instance_to_dict(other)

    def __hash__(self) -> int:
        return hash(json.dumps(instance_to_dict(self), sort_keys=True))

    def replace(self, **changes) -> "Instance":
        return dataclasses.replace(self, **changes)

    @property
    def dc_population(self) -> np.ndarray:
        """Total targeted persons per DC, the divisor of the equity rows."""
        return self.demand.age_demand.sum(axis=1)


def deprivation_intensity(t: float, slope: float = 3.0) -> float:
    """Deprivation cost rate after ``t`` periods of delay: ``slope * t``."""
    if t < 0:
        raise ValueError(f"period must be >= 0, got {t}")
    return slope * t


def case_study_suppliers(n_vaccines: int = 1, lead_time: int = 1, price: float = 10.0) -> list[SupplierParams]:
    """The three case-study suppliers with their published budget, capacity and
    average maximum order (used for every vaccine type)."""
    return [
        SupplierParams(name, lead_time, float(budget), float(cap),
                       (float(max_order),) * n_vaccines, (float(price),) * n_vaccines)
        for name, budget, max_order, cap in CASE_STUDY_SUPPLIERS
    ]


# -- validation --------------------------------------------------------------


def validate_instance(inst: Instance) -> list[str]:
    """Return human-readable invariant violations; empty when the instance is sound."""
    out: list[str] = []
    d = inst.dims
    I, J, K, V, A, T = d.shape
    for fname, val in zip(("n_suppliers", "n_dcs", "n_vcs", "n_vaccines", "n_age_groups", "n_periods"),
                          (I, J, K, V, A, T)):
        if val < 1:
            out.append(f"dimensions.{fname} = {val} < 1")
    if out:
        return out

    if len(inst.suppliers) != I:
        out.append(f"suppliers: {len(inst.suppliers)} entries, dimensions say {I}")
    for i, s in enumerate(inst.suppliers):
        if not 0 <= s.lead_time < T:
            out.append(f"suppliers[{i}].lead_time = {s.lead_time} outside [0, {T})")
        for label, val in (("budget", s.budget), ("capacity", s.capacity)):
            if val < 0:
                out.append(f"suppliers[{i}].{label} = {val} < 0")
        for label, arr in (("max_order", s.max_order), ("price", s.price)):
            if len(arr) != V:
                out.append(f"suppliers[{i}].{label} has {len(arr)} entries, expected {V}")
            for v, val in enumerate(arr):
                if val < 0:
                    out.append(f"suppliers[{i}].{label}[{v}] = {val} < 0")

    net = inst.network
    shapes = {
        "dc_capacity": (J,), "var_cost_s2d": (I, J, V), "fixed_cost_s2d": (I, J),
        "var_cost_d2v": (J, K, V), "fixed_cost_d2v": (J, K), "assignment": (K,),
    }
    for fname, shape in shapes.items():
        arr = getattr(net, fname)
        if arr.shape != shape:
            out.append(f"network.{fname} has shape {arr.shape}, expected {shape}")
            continue
        if fname == "assignment":
            bad = np.flatnonzero((arr < 0) | (arr >= J))
            for k in bad:
                out.append(f"network.assignment[{k}] = {arr[k]} is not a DC index")
        else:
            for idx in np.argwhere(arr < 0):
                out.append(f"network.{fname}{list(map(int, idx))} = {arr[tuple(idx)]} < 0")

    if len(inst.vaccines) != V:
        out.append(f"vaccines: {len(inst.vaccines)} entries, dimensions say {V}")
    for v, vac in enumerate(inst.vaccines):
        if vac.holding_cost < 0:
            out.append(f"vaccines[{v}].holding_cost = {vac.holding_cost} < 0")
        if not 1 <= vac.shelf_life <= T:
            out.append(f"vaccines[{v}].shelf_life = {vac.shelf_life} outside [1, {T}]")

    dem = inst.demand
    if dem.demand.shape != (K, V, T):
        out.append(f"demand.demand has shape {dem.demand.shape}, expected {(K, V, T)}")
    else:
        for idx in np.argwhere(dem.demand < 0):
            out.append(f"demand.demand{list(map(int, idx))} < 0")
    if dem.age_demand.shape != (J, A):
        out.append(f"demand.age_demand has shape {dem.age_demand.shape}, expected {(J, A)}")
    else:
        for idx in np.argwhere(dem.age_demand < 0):
            out.append(f"demand.age_demand{list(map(int, idx))} < 0")
        for j, tot in enumerate(dem.age_demand.sum(axis=1)):
            if tot <= 0:
                out.append(f"zero total demand at dc {j} (demand.age_demand[{j}] sums to {tot})")
    if not 0 <= dem.service_floor <= 1:
        out.append(f"demand.service_floor = {dem.service_floor} outside [0, 1]")
    if not 0 <= dem.equity_tolerance <= 1:
        out.append(f"demand.equity_tolerance = {dem.equity_tolerance} outside [0, 1]")
    if dem.service_floor_override is not None:
        ov = dem.service_floor_override
        if ov.shape != (K, V, T):
            out.append(f"demand.service_floor_override has shape {ov.shape}, expected {(K, V, T)}")
        elif np.any((ov < 0) | (ov > 1)):
            out.append("demand.service_floor_override has entries outside [0, 1]")

    w = inst.weights
    theta = w.theta
    if any(x < 0 for x in theta):
        out.append(f"weights {theta} contain a negative entry")
    total = sum(theta)
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        out.append(f"weights sum {total:g} ≠ 1")
    if w.deprivation_slope < 0:
        out.append(f"weights.deprivation_slope = {w.deprivation_slope} < 0")
    return out


# -- perturbation helpers ------------------------------------------------------


def scale_budgets(inst: Instance, factor: float) -> Instance:
    sup = tuple(dataclasses.replace(s, budget=s.budget * factor) for s in inst.suppliers)
    return inst.replace(suppliers=sup)


def scale_max_orders(inst: Instance, factor: float) -> Instance:
    sup = tuple(dataclasses.replace(s, max_order=tuple(m * factor for m in s.max_order))
                for s in inst.suppliers)
    return inst.replace(suppliers=sup)


def with_service_floor(inst: Instance, omega: float) -> Instance:
    dem = dataclasses.replace(inst.demand, service_floor=omega, service_floor_override=None)
    return inst.replace(demand=dem)


# -- generator -----------------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSettings:
    """Magnitudes for random instances.  Coverage factors size the scaled
    case-study suppliers relative to the generated demand."""

    demand_range: tuple[int, int] = (50, 500)
    var_cost_range: tuple[float, float] = (0.1, 1.0)
    fixed_cost_range: tuple[float, float] = (100.0, 1000.0)
    holding_cost_range: tuple[float, float] = (0.01, 0.1)
    price_range: tuple[float, float] = (5.0, 20.0)
    lead_times: tuple[int, ...] = (1, 2)
    shelf_life_range: tuple[int, int] = (3, 6)
    budget_coverage: float = 1.0
    order_coverage: float = 1.5
    capacity_coverage: float = 1.5
    dc_capacity_coverage: float = 2.0
    service_floor: float = 0.3
    equity_tolerance: float = 0.1


def preset_dimensions(preset: int, n_suppliers: int = 3, n_age_groups: int = 10) -> Dimensions:
    if preset not in PRESETS:
        raise ValueError(f"unknown preset id {preset!r}; expected 1..{len(PRESETS)}")
    T, J, K, V = PRESETS[preset]
    return Dimensions(n_suppliers, J, K, V, T, n_age_groups)


def _round2(x: np.ndarray) -> np.ndarray:
    return np.round(x, 2)


def generate_instance(
    size: int | Dimensions,
    seed: int,
    settings: GeneratorSettings | None = None,
) -> Instance:
    """Random instance at a preset size or explicit dimensions.

    Pure function of ``(size, seed, settings)``.  Demand is zero in the first
    ``min(lead_time)`` periods because nothing ordered can reach a center
    before then.
    """
    st = settings or GeneratorSettings()
    if isinstance(size, Dimensions):
        dims = size
        name = f"custom-T{dims.n_periods}-J{dims.n_dcs}-K{dims.n_vcs}-V{dims.n_vaccines}"
    else:
        dims = preset_dimensions(int(size))
        name = f"preset-{int(size)}"
    I, J, K, V, A, T = dims.shape
    rng = np.random.default_rng(seed)

    lead = rng.choice(np.array(st.lead_times), size=I)
    lead = np.minimum(lead, T - 1)
    if I and lead.min() > min(st.lead_times):
        lead[rng.integers(I)] = min(st.lead_times)
    warmup = int(lead.min())

    lo_d, hi_d = st.demand_range
    demand = rng.integers(lo_d, hi_d + 1, size=(K, V, T)).astype(float)
    demand[:, :, :warmup] = 0.0

    assignment = np.arange(K) % J
    age_demand = np.zeros((J, A))
    for j in range(J):
        total = int(demand[assignment == j].sum())
        if total <= 0:
            total = A
        probs = rng.dirichlet(np.ones(A))
        age_demand[j] = rng.multinomial(total, probs)

    var_s2d = _round2(rng.uniform(*st.var_cost_range, size=(I, J, V)))
    fix_s2d = _round2(rng.uniform(*st.fixed_cost_range, size=(I, J)))
    var_d2v = _round2(rng.uniform(*st.var_cost_range, size=(J, K, V)))
    fix_d2v = _round2(rng.uniform(*st.fixed_cost_range, size=(J, K)))
    holding = np.round(rng.uniform(*st.holding_cost_range, size=V), 3)
    s_lo, s_hi = st.shelf_life_range
    s_hi = min(s_hi, T)
    s_lo = min(s_lo, s_hi)
    shelf = rng.integers(s_lo, s_hi + 1, size=V)
    price = _round2(rng.uniform(*st.price_range, size=(I, V)))

    # scale the case-study suppliers to this demand level
    base = CASE_STUDY_SUPPLIERS[:I] if I <= 3 else CASE_STUDY_SUPPLIERS * (I // 3 + 1)
    base = base[:I]
    bud_share = np.array([b[1] for b in base], dtype=float)
    ord_share = np.array([b[2] for b in base], dtype=float)
    cap_share = np.array([b[3] for b in base], dtype=float)
    bud_share /= bud_share.sum()
    ord_share /= ord_share.sum()
    cap_share /= cap_share.sum()
    per_period_v = demand.sum(axis=0)  # [v, t]
    peak_v = per_period_v.max(axis=1) if T else np.zeros(V)
    peak_total = per_period_v.sum(axis=0).max() if T else 0.0
    total = demand.sum()

    suppliers = []
    for i in range(I):
        budget = round(st.budget_coverage * total * bud_share[i] * float(price[i].mean()), 2)
        max_order = tuple(float(np.ceil(st.order_coverage * peak_v[v] * ord_share[i])) for v in range(V))
        capacity = float(np.ceil(st.capacity_coverage * peak_total * cap_share[i]))
        suppliers.append(SupplierParams(
            name=base[i][0] if I <= 3 else f"{base[i][0]}-{i}",
            lead_time=int(lead[i]),
            budget=float(budget),
            capacity=capacity,
            max_order=max_order,
            price=tuple(float(p) for p in price[i]),
        ))

    dc_load = np.array([per_period_v.sum(axis=0).max() * (np.sum(assignment == j) / max(K, 1))
                        for j in range(J)])
    dc_capacity = np.ceil(st.dc_capacity_coverage * np.maximum(dc_load, 1.0))

    network = NetworkParams(dc_capacity, var_s2d, fix_s2d, var_d2v, fix_d2v, assignment)
    vaccines = tuple(VaccineParams(f"vaccine-{v}", float(holding[v]), int(shelf[v])) for v in range(V))
    dem = DemandParams(demand, age_demand, st.service_floor, st.equity_tolerance)
    return Instance(dims, tuple(suppliers), network, vaccines, dem, ObjectiveWeights(), seed, name)


# -- serialisation ---------------------------------------------------------------


def _num(x: float) -> int | float:
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _nested(arr: np.ndarray) -> Any:
    if arr.ndim == 0:
        return _num(arr)
    return [_nested(a) for a in arr] if arr.ndim > 1 else [_num(a) for a in arr]


def instance_to_dict(inst: Instance) -> dict:
    d = inst.dims
    dem = inst.demand
    w = inst.weights
    return {
        "schema": SCHEMA,
        "name": inst.name,
        "seed": inst.seed,
        "dimensions": {
            "n_suppliers": d.n_suppliers, "n_dcs": d.n_dcs, "n_vcs": d.n_vcs,
            "n_vaccines": d.n_vaccines, "n_age_groups": d.n_age_groups, "n_periods": d.n_periods,
        },
        "suppliers": [
            {"name": s.name, "lead_time": s.lead_time, "budget": _num(s.budget),
             "capacity": _num(s.capacity), "max_order": [_num(m) for m in s.max_order],
             "price": [_num(p) for p in s.price]}
            for s in inst.suppliers
        ],
        "network": {
            "dc_capacity": _nested(inst.network.dc_capacity),
            "var_cost_s2d": _nested(inst.network.var_cost_s2d),
            "fixed_cost_s2d": _nested(inst.network.fixed_cost_s2d),
            "var_cost_d2v": _nested(inst.network.var_cost_d2v),
            "fixed_cost_d2v": _nested(inst.network.fixed_cost_d2v),
            "assignment": [int(x) for x in inst.network.assignment],
        },
        "vaccines": [
            {"name": v.name, "holding_cost": _num(v.holding_cost), "shelf_life": v.shelf_life}
            for v in inst.vaccines
        ],
        "demand": {
            "demand": _nested(dem.demand),
            "age_demand": _nested(dem.age_demand),
            "service_floor": _num(dem.service_floor),
            "equity_tolerance": _num(dem.equity_tolerance),
            "service_floor_override": None if dem.service_floor_override is None
            else _nested(dem.service_floor_override),
        },
        "weights": {
            "holding": _num(w.holding), "transport": _num(w.transport),
            "deprivation": _num(w.deprivation), "deprivation_slope": _num(w.deprivation_slope),
        },
    }


def dumps_structured(obj: Any, indent: int = 0) -> str:
    """JSON with nested objects indented and numeric arrays kept compact."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {dumps_structured(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        items = [f"{pad}  {dumps_structured(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, list) and obj and isinstance(obj[0], list):
        items = [f"{pad}  {json.dumps(v, separators=(',', ':'))}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj, separators=(",", ":"))


def save_instance(inst: Instance, path: str | Path, extra: dict | None = None) -> None:
    doc = instance_to_dict(inst)
    if extra:
        doc.update(extra)
    Path(path).write_text(dumps_structured(doc) + "\n")


class _Reader:
    def __init__(self, doc: dict):
        self.doc = doc

    @staticmethod
    def get(d: Any, key: str, path: str) -> Any:
        if not isinstance(d, dict):
            raise InstanceFormatError(f"{path}: expected an object")
        if key not in d:
            raise InstanceFormatError(f"{path}.{key}: missing field")
        return d[key]

    @staticmethod
    def array(val: Any, path: str, shape: tuple[int, ...], dtype=float) -> np.ndarray:
        try:
            arr = np.array(val, dtype=dtype)
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(f"{path}: not a numeric array ({exc})") from exc
        if arr.shape != shape:
            raise InstanceFormatError(f"{path}: shape {arr.shape}, expected {shape}")
        return arr

    @staticmethod
    def number(val: Any, path: str, kind=float):
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise InstanceFormatError(f"{path}: expected a number, got {val!r}")
        if kind is int and not float(val).is_integer():
            raise InstanceFormatError(f"{path}: expected an integer, got {val!r}")
        return kind(val)


def instance_from_dict(doc: dict) -> Instance:
    R = _Reader
    schema = doc.get("schema") if isinstance(doc, dict) else None
    if schema != SCHEMA:
        raise InstanceFormatError(f"schema: expected {SCHEMA!r}, got {schema!r}")
    dd = R.get(doc, "dimensions", "$")
    dims = Dimensions(
        n_suppliers=R.number(R.get(dd, "n_suppliers", "dimensions"), "dimensions.n_suppliers", int),
        n_dcs=R.number(R.get(dd, "n_dcs", "dimensions"), "dimensions.n_dcs", int),
        n_vcs=R.number(R.get(dd, "n_vcs", "dimensions"), "dimensions.n_vcs", int),
        n_vaccines=R.number(R.get(dd, "n_vaccines", "dimensions"), "dimensions.n_vaccines", int),
        n_periods=R.number(R.get(dd, "n_periods", "dimensions"), "dimensions.n_periods", int),
        n_age_groups=R.number(R.get(dd, "n_age_groups", "dimensions"), "dimensions.n_age_groups", int),
    )
    I, J, K, V, A, T = dims.shape

    sup_list = R.get(doc, "suppliers", "$")
    if not isinstance(sup_list, list):
        raise InstanceFormatError("suppliers: expected a list")
    suppliers = []
    for i, s in enumerate(sup_list):
        p = f"suppliers[{i}]"
        suppliers.append(SupplierParams(
            name=str(R.get(s, "name", p)),
            lead_time=R.number(R.get(s, "lead_time", p), f"{p}.lead_time", int),
            budget=R.number(R.get(s, "budget", p), f"{p}.budget"),
            capacity=R.number(R.get(s, "capacity", p), f"{p}.capacity"),
            max_order=tuple(R.array(R.get(s, "max_order", p), f"{p}.max_order", (V,)).tolist()),
            price=tuple(R.array(R.get(s, "price", p), f"{p}.price", (V,)).tolist()),
        ))

    nd = R.get(doc, "network", "$")
    network = NetworkParams(
        dc_capacity=R.array(R.get(nd, "dc_capacity", "network"), "network.dc_capacity", (J,)),
        var_cost_s2d=R.array(R.get(nd, "var_cost_s2d", "network"), "network.var_cost_s2d", (I, J, V)),
        fixed_cost_s2d=R.array(R.get(nd, "fixed_cost_s2d", "network"), "network.fixed_cost_s2d", (I, J)),
        var_cost_d2v=R.array(R.get(nd, "var_cost_d2v", "network"), "network.var_cost_d2v", (J, K, V)),
        fixed_cost_d2v=R.array(R.get(nd, "fixed_cost_d2v", "network"), "network.fixed_cost_d2v", (J, K)),
        assignment=R.array(R.get(nd, "assignment", "network"), "network.assignment", (K,), int),
    )

    vac_list = R.get(doc, "vaccines", "$")
    if not isinstance(vac_list, list):
        raise InstanceFormatError("vaccines: expected a list")
    vaccines = tuple(
        VaccineParams(
            name=str(R.get(v, "name", f"vaccines[{n}]")),
            holding_cost=R.number(R.get(v, "holding_cost", f"vaccines[{n}]"), f"vaccines[{n}].holding_cost"),
            shelf_life=R.number(R.get(v, "shelf_life", f"vaccines[{n}]"), f"vaccines[{n}].shelf_life", int),
        )
        for n, v in enumerate(vac_list)
    )

    dm = R.get(doc, "demand", "$")
    override = dm.get("service_floor_override") if isinstance(dm, dict) else None
    demand = DemandParams(
        demand=R.array(R.get(dm, "demand", "demand"), "demand.demand", (K, V, T)),
        age_demand=R.array(R.get(dm, "age_demand", "demand"), "demand.age_demand", (J, A)),
        service_floor=R.number(R.get(dm, "service_floor", "demand"), "demand.service_floor"),
        equity_tolerance=R.number(R.get(dm, "equity_tolerance", "demand"), "demand.equity_tolerance"),
        service_floor_override=None if override is None else
        R.array(override, "demand.service_floor_override", (K, V, T)),
    )

    wd = R.get(doc, "weights", "$")
    weights = ObjectiveWeights(
        holding=R.number(R.get(wd, "holding", "weights"), "weights.holding"),
        transport=R.number(R.get(wd, "transport", "weights"), "weights.transport"),
        deprivation=R.number(R.get(wd, "deprivation", "weights"), "weights.deprivation"),
        deprivation_slope=R.number(R.get(wd, "deprivation_slope", "weights"), "weights.deprivation_slope"),
    )
    seed = R.get(doc, "seed", "$")
    if seed is not None:
        seed = R.number(seed, "seed", int)
    return Instance(dims, tuple(suppliers), network, vaccines, demand, weights, seed,
                    str(doc.get("name", "instance")))


def read_document(path: str | Path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(read_document(path))


def total_demand(inst: Instance) -> float:
    return float(inst.demand.demand.sum())

