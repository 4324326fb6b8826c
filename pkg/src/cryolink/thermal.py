"""Fridge stages, material conductivities, conduction loads and stage budgets."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, TemperatureRangeError, ValidationError
from .quadrature import adaptive_simpson

LINK_KINDS = ("rf_coax", "sc_coax", "fiber", "dc_wire")

# Tighter than the nominal 1e-6 so split-path sums agree to ~1e-12.
QUAD_RTOL = 1e-9


@dataclass(frozen=True)
class Stage:
    name: str
    temperature: float  # K
    cooling_power: float  # W, math.inf for the room-temperature pseudo-stage


@dataclass(frozen=True)
class FridgeModel:
    """Ordered fridge stages, hottest first."""

    stages: tuple[Stage, ...]

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if len(stages) < 2:
            raise ValidationError("a fridge needs at least 2 stages", "fridge.stages")
        names = [s.name for s in stages]
        if len(set(names)) != len(names):
            raise ValidationError(f"duplicate stage names in {names}", "fridge.stages")
        for i, s in enumerate(stages):
            if not s.temperature > 0:
                raise ValidationError(f"temperature must be positive, got {s.temperature}", f"fridge.stages[{i}].temperature")
            if not s.cooling_power > 0:
                raise ValidationError(f"cooling power must be positive, got {s.cooling_power}", f"fridge.stages[{i}].cooling_power")
        for i, (hot, cold) in enumerate(zip(stages, stages[1:])):
            if not hot.temperature > cold.temperature:
                raise ValidationError(
                    f"stage temperatures must strictly decrease ({hot.name} {hot.temperature} K -> {cold.name} {cold.temperature} K)",
                    f"fridge.stages[{i + 1}].temperature",
                )

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.stages)

    def index(self, name: str) -> int:
        for i, s in enumerate(self.stages):
            if s.name == name:
                return i
        raise ValidationError(f"unknown stage {name!r}; known stages are {list(self.names)}")

    def stage(self, name: str) -> Stage:
        return self.stages[self.index(name)]

    def temperature(self, name: str) -> float:
        return self.stage(name).temperature

    def with_cooling_scaled(self, factor: float) -> "FridgeModel":
        return FridgeModel(tuple(Stage(s.name, s.temperature, s.cooling_power * factor) for s in self.stages))


def default_fridge() -> FridgeModel:
    """Bluefors XLD400-class stages behind a 300 K room-temperature pseudo-stage."""
    return FridgeModel(
        (
            Stage("RT", 300.0, math.inf),
            Stage("50K", 35.0, 30.0),
            Stage("4K", 2.85, 1.5),
            Stage("Still", 0.882, 40e-3),
            Stage("CP", 0.082, 200e-6),
            Stage("MXC", 0.006, 19e-6),
        )
    )


@dataclass(frozen=True)
class ConductivityModel:
    """Tabulated k(T), interpolated linearly in log(T)-log(k)."""

    material: str
    temperatures: tuple[float, ...]
    conductivities: tuple[float, ...]

    def __post_init__(self):
        T = np.asarray(self.temperatures, dtype=float)
        k = np.asarray(self.conductivities, dtype=float)
        where = f"materials.{self.material}"
        if T.shape != k.shape or T.ndim != 1:
            raise ValidationError("temperature and conductivity columns differ in length", where)
        if T.size < 4:
            raise ValidationError(f"need at least 4 points, got {T.size}", where)
        if np.any(np.diff(T) <= 0):
            raise ValidationError("temperatures must be strictly increasing", where)
        if T[0] > 1.0 or T[-1] < 300.0:
            raise ValidationError(f"table must span [1 K, 300 K], spans [{T[0]}, {T[-1]}] K", where)
        if np.any(k <= 0):
            raise ValidationError("conductivities must be positive", where)
        object.__setattr__(self, "temperatures", tuple(float(t) for t in T))
        object.__setattr__(self, "conductivities", tuple(float(c) for c in k))

    @property
    def t_min(self) -> float:
        return self.temperatures[0]

    @property
    def t_max(self) -> float:
        return self.temperatures[-1]


def conductivity_at(model: ConductivityModel, T):
    """Thermal conductivity in W/m/K; no extrapolation outside the table."""
    T_arr = np.asarray(T, dtype=float)
    if np.any(~(T_arr >= model.t_min)) or np.any(~(T_arr <= model.t_max)):
        raise TemperatureRangeError(
            f"{model.material}: T={T} K outside tabulated range [{model.t_min}, {model.t_max}] K"
        )
    Ts = np.asarray(model.temperatures)
    ks = np.asarray(model.conductivities)
    k = np.exp(np.interp(np.log(T_arr), np.log(Ts), np.log(ks)))
    # exp(log(k)) can be off by an ulp; table points return the stored value.
    idx = np.clip(np.searchsorted(Ts, T_arr), 0, Ts.size - 1)
    k = np.where(Ts[idx] == T_arr, ks[idx], k)
    return float(k) if k.ndim == 0 else k


def parse_material_table(text: str) -> dict[str, ConductivityModel]:
    """Parse CSV text with columns ``material,T_kelvin,k_W_per_mK``.

    Lines starting with ``#`` are comments.  Rows must be sorted by
    (material, T).
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.DictReader(io.StringIO("\n".join(lines)))
    expected = ["material", "T_kelvin", "k_W_per_mK"]
    if reader.fieldnames != expected:
        raise ValidationError(f"material table header must be {expected}, got {reader.fieldnames}", "materials")
    rows: dict[str, list[tuple[float, float]]] = {}
    last_key = None
    for lineno, row in enumerate(reader, start=2):
        try:
            key = (row["material"], float(row["T_kelvin"]))
            k = float(row["k_W_per_mK"])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad row {lineno}: {exc}", "materials") from None
        if last_key is not None and key <= last_key:
            raise ValidationError(f"rows must be sorted by (material, T); row {lineno} is out of order", "materials")
        last_key = key
        rows.setdefault(key[0], []).append((key[1], k))
    return {
        name: ConductivityModel(name, tuple(t for t, _ in pts), tuple(k for _, k in pts))
        for name, pts in rows.items()
    }


def load_materials(path: str | Path | None = None) -> dict[str, ConductivityModel]:
    """Load the bundled table, then overlay materials from ``path`` if given."""
    bundled = resources.files("cryolink").joinpath("data/conductivity.csv").read_text(encoding="utf-8")
    models = parse_material_table(bundled)
    if path is not None:
        models.update(parse_material_table(Path(path).read_text(encoding="utf-8")))
    return models


_DEFAULT_MATERIALS: dict[str, ConductivityModel] | None = None


def default_materials() -> dict[str, ConductivityModel]:
    global _DEFAULT_MATERIALS
    if _DEFAULT_MATERIALS is None:
        _DEFAULT_MATERIALS = load_materials()
    return _DEFAULT_MATERIALS


@dataclass(frozen=True)
class Layer:
    material: str
    cross_section: float  # m^2


@dataclass(frozen=True)
class ThermalLink:
    """A cable/fiber between two stages.

    ``fixed_load`` (W) replaces the conduction integral, for loads taken from
    measurements rather than conductivity data.
    """

    name: str
    kind: str
    hot: str
    cold: str
    length: float = 1.0  # m
    layers: tuple[Layer, ...] = ()
    fixed_load: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        where = f"links.{self.name}"
        if self.kind not in LINK_KINDS:
            raise ValidationError(f"kind must be one of {LINK_KINDS}, got {self.kind!r}", f"{where}.kind")
        if not self.length > 0:
            raise ValidationError(f"length must be positive, got {self.length}", f"{where}.length")
        if self.hot == self.cold:
            raise ValidationError("hot and cold endpoints are the same stage", where)
        for i, layer in enumerate(self.layers):
            if not layer.cross_section > 0:
                raise ValidationError(f"cross section must be positive, got {layer.cross_section}", f"{where}.layers[{i}].cross_section")
        if self.fixed_load is None and not self.layers:
            raise ValidationError("a link needs layers or a fixed_load", where)
        if self.fixed_load is not None and not self.fixed_load >= 0:
            raise ValidationError(f"fixed_load must be >= 0, got {self.fixed_load}", f"{where}.fixed_load")


# SMF-28: 125 um silica (core folded into cladding), polymer buffer to 250 um.
SMF28_CLADDING_DIAMETER = 125e-6
SMF28_BUFFER_DIAMETER = 250e-6


def smf28_layers(buffer_material: str = "ptfe") -> tuple[Layer, ...]:
    r_clad = SMF28_CLADDING_DIAMETER / 2
    r_buf = SMF28_BUFFER_DIAMETER / 2
    return (
        Layer("silica", math.pi * r_clad**2),
        Layer(buffer_material, math.pi * (r_buf**2 - r_clad**2)),
    )


def smf28_fiber(hot: str = "RT", cold: str = "4K", length: float = 1.0, name: str = "smf28", fixed_load: float | None = None) -> ThermalLink:
    return ThermalLink(name, "fiber", hot, cold, length, smf28_layers(), fixed_load)


@dataclass(frozen=True)
class ActiveComponent:
    name: str
    stage: str
    dissipation: float  # W
    duty_cycled: bool = False

    def __post_init__(self):
        if not self.dissipation >= 0:
            raise ValidationError(f"dissipation must be >= 0, got {self.dissipation}", f"actives.{self.name}.dissipation")


def conductivity_integral(model: ConductivityModel, t_lo: float, t_hi: float, rtol: float = QUAD_RTOL) -> float:
    """``integral k(T) dT`` from ``t_lo`` to ``t_hi`` (W/m).

    Integrated piecewise between table knots so every panel sees a smooth
    power law.
    """
    if t_hi < t_lo:
        return -conductivity_integral(model, t_hi, t_lo, rtol)
    if t_hi == t_lo:
        return 0.0
    conductivity_at(model, np.array([t_lo, t_hi]))  # range check
    knots = [t for t in model.temperatures if t_lo < t < t_hi]
    edges = [t_lo, *knots, t_hi]
    k = lambda T: conductivity_at(model, T)
    return sum(adaptive_simpson(k, a, b, rtol=rtol) for a, b in zip(edges, edges[1:]))


def conduction_load_between(
    layers: Sequence[Layer],
    length: float,
    t_cold: float,
    t_hot: float,
    materials: Mapping[str, ConductivityModel] | None = None,
    rtol: float = QUAD_RTOL,
) -> float:
    """Fourier-law heat flow in W: ``sum_layers (A/L) * integral k dT``."""
    if not length > 0:
        raise DomainError(f"length must be positive, got {length}")
    if t_hot < t_cold:
        raise DomainError(f"t_hot ({t_hot} K) is below t_cold ({t_cold} K)")
    materials = default_materials() if materials is None else materials
    total = 0.0
    for layer in layers:
        try:
            model = materials[layer.material]
        except KeyError:
            raise ValidationError(f"unknown material {layer.material!r}", "materials") from None
        total += layer.cross_section / length * conductivity_integral(model, t_cold, t_hot, rtol)
    return total


def _check_endpoints(link: ThermalLink, fridge: FridgeModel) -> tuple[int, int]:
    try:
        ih, ic = fridge.index(link.hot), fridge.index(link.cold)
    except ValidationError as exc:
        raise ValidationError(exc.message, f"links.{link.name}") from None
    if ih >= ic:
        raise ValidationError(f"hot endpoint {link.hot!r} is not above cold endpoint {link.cold!r}", f"links.{link.name}")
    return ih, ic


def conduction_load(
    link: ThermalLink,
    fridge: FridgeModel,
    materials: Mapping[str, ConductivityModel] | None = None,
    rtol: float = QUAD_RTOL,
) -> float:
    """Passive heat (W) a link conducts into its cold endpoint."""
    ih, ic = _check_endpoints(link, fridge)
    if link.fixed_load is not None:
        return link.fixed_load
    return conduction_load_between(
        link.layers, link.length, fridge.stages[ic].temperature, fridge.stages[ih].temperature, materials, rtol
    )


@dataclass(frozen=True)
class StageLoad:
    name: str
    temperature: float
    cooling_W: float
    passive_W: float
    active_W: float

    @property
    def total_W(self) -> float:
        return self.passive_W + self.active_W

    @property
    def headroom_ratio(self) -> float:
        """Cooling power over total load; ``inf`` when nothing loads the stage."""
        if self.total_W == 0:
            return math.inf
        return self.cooling_W / self.total_W


def stage_heat_report(
    fridge: FridgeModel,
    links: Iterable[ThermalLink] = (),
    actives: Iterable[ActiveComponent] = (),
    duty: float = 0.33,
    materials: Mapping[str, ConductivityModel] | None = None,
) -> list[StageLoad]:
    """Per-stage passive/active heat budget.

    Conduction is charged to each link's cold endpoint.  Only duty-cycled
    actives are scaled by ``duty``.
    """
    if not 0 < duty <= 1:
        raise DomainError(f"duty must be in (0, 1], got {duty}")
    passive = [0.0] * len(fridge.stages)
    active = [0.0] * len(fridge.stages)
    for link in links:
        _, ic = _check_endpoints(link, fridge)
        passive[ic] += conduction_load(link, fridge, materials)
    for comp in actives:
        try:
            i = fridge.index(comp.stage)
        except ValidationError as exc:
            raise ValidationError(exc.message, f"actives.{comp.name}.stage") from None
        active[i] += comp.dissipation * (duty if comp.duty_cycled else 1.0)
    return [
        StageLoad(s.name, s.temperature, s.cooling_power, passive[i], active[i])
        for i, s in enumerate(fridge.stages)
    ]
