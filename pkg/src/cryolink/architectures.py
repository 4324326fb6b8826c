"""Built-in XY-control architectures and their line-capacity metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .noise import NO_AMPLIFIER, CryoAmplifier, PhotonicFrontEnd
from .optimize import attenuator_dissipation
from .thermal import (
    ActiveComponent,
    ConductivityModel,
    FridgeModel,
    StageLoad,
    ThermalLink,
    smf28_layers,
    stage_heat_report,
)

BUILTIN_NAMES = ("conventional", "cryo_cmos", "deep_photonic", "proposed")
DEFAULT_SIGNAL_POWER = 1e-10  # W, -70 dBm at the qubit


@dataclass(frozen=True)
class Architecture:
    """One signal-delivery scenario, described per XY line.

    ``attenuation`` lists ``(stage, dB)`` pairs.  Their Joule heating is
    charged as duty-cycled load only when ``charge_attenuator_heat`` is set.
    ``provenance`` maps parameter keys (``links.<name>.fixed_load`` etc.) to
    where each value comes from.
    """

    name: str
    links: tuple[ThermalLink, ...] = ()
    actives: tuple[ActiveComponent, ...] = ()
    attenuation: tuple[tuple[str, float], ...] = ()
    front_end: PhotonicFrontEnd | None = None
    amplifier: CryoAmplifier | None = None
    signal_power: float = DEFAULT_SIGNAL_POWER
    charge_attenuator_heat: bool = False
    lines_share_factor: int = 1
    description: str = ""
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "actives", tuple(self.actives))
        object.__setattr__(self, "attenuation", tuple((str(s), float(d)) for s, d in self.attenuation))
        if self.lines_share_factor < 1:
            raise ValidationError(f"lines_share_factor must be >= 1, got {self.lines_share_factor}", f"architectures.{self.name}.lines_share_factor")
        if not self.signal_power >= 0:
            raise ValidationError("signal power must be >= 0", f"architectures.{self.name}.signal_power")
        for stage, db in self.attenuation:
            if db < 0:
                raise ValidationError(f"attenuation must be >= 0 dB, got {db}", f"architectures.{self.name}.attenuation.{stage}")

    def validate(self, fridge: FridgeModel) -> None:
        """Check every stage reference against ``fridge``."""
        known = set(fridge.names)
        where = f"architectures.{self.name}"
        for link in self.links:
            for end in (link.hot, link.cold):
                if end not in known:
                    raise ValidationError(f"unknown stage {end!r}", f"{where}.links.{link.name}")
            if fridge.index(link.hot) >= fridge.index(link.cold):
                raise ValidationError(f"hot endpoint {link.hot!r} is not above cold endpoint {link.cold!r}", f"{where}.links.{link.name}")
        for comp in self.actives:
            if comp.stage not in known:
                raise ValidationError(f"unknown stage {comp.stage!r}", f"{where}.actives.{comp.name}")
        for stage, _ in self.attenuation:
            if stage not in known:
                raise ValidationError(f"unknown stage {stage!r}", f"{where}.attenuation")

    def attenuator_components(self, fridge: FridgeModel) -> list[ActiveComponent]:
        """Attenuator Joule heating as duty-cycled components (full-duty values)."""
        if not self.attenuation:
            return []
        ordered = sorted(self.attenuation, key=lambda sd: fridge.index(sd[0]))
        diss = attenuator_dissipation(np.array([d for _, d in ordered]), self.signal_power, 1.0)
        return [
            ActiveComponent(f"attenuator_{stage}", stage, float(w), duty_cycled=True)
            for (stage, _), w in zip(ordered, diss)
        ]

    def per_line_actives(self, fridge: FridgeModel) -> list[ActiveComponent]:
        extra = self.attenuator_components(fridge) if self.charge_attenuator_heat else []
        return [*self.actives, *extra]


def numeric_parameters(arch: Architecture) -> list[str]:
    """Keys of every numeric parameter that needs a provenance entry."""
    keys = ["signal_power", "lines_share_factor"]
    for link in arch.links:
        if link.fixed_load is not None:
            keys.append(f"links.{link.name}.fixed_load")
        else:
            keys.append(f"links.{link.name}.length")
            keys.extend(f"links.{link.name}.layers.{layer.material}" for layer in link.layers)
    keys.extend(f"actives.{c.name}.dissipation" for c in arch.actives)
    keys.extend(f"attenuation.{stage}" for stage, _ in arch.attenuation)
    for section, obj in (("front_end", arch.front_end), ("amplifier", arch.amplifier)):
        if obj is not None:
            keys.extend(f"{section}.{f.name}" for f in fields(obj))
    return keys


def unexplained_parameters(arch: Architecture) -> list[str]:
    return [k for k in numeric_parameters(arch) if k not in arch.provenance]


_FRONT_END_SOURCES = {
    "front_end.mean_photocurrent": "operating point for -70 dBm at the qubit without amplifier or attenuators",
    "front_end.laser_rin_db": "high-quality laser RIN below -150 dB/Hz",
    "front_end.v_pi": "modulator example with v_pi = 2 V",
    "front_end.drive_temperature": "modulator driver at room temperature (300 K)",
    "front_end.drive_impedance": "50 ohm driver impedance",
    "front_end.pd_responsivity": "photodiode responsivity ~1 A/W",
    "front_end.pd_bandwidth": "cryogenic photodiodes exceed 10 GHz bandwidth",
    "front_end.carrier": "6 GHz XY carrier",
}
_NO_AMP_SOURCES = {
    "amplifier.noise_figure_db": "no amplifier: NF = 0 dB",
    "amplifier.transimpedance_gain": "no amplifier: A = 50 ohm",
    "amplifier.dissipation": "no amplifier: P_TIA = 0",
    "amplifier.ambient": "TIA reference temperature T0 = 4 K",
}
_COMMON = {
    "signal_power": "qubit drive power on the order of -70 dBm",
    "lines_share_factor": "one XY line per qubit",
}
_SC_COAX = {
    "links.sc_coax_cp.fixed_load": "NbTi-NbTi 0.034in SC coax into CP, ~0.06 uW per cable (proposed-approach heat table)",
    "links.sc_coax_mxc.fixed_load": "NbTi-NbTi 0.034in SC coax into MXC, ~0.004 uW per cable (proposed-approach heat table)",
}


def _sc_coax_links() -> tuple[ThermalLink, ...]:
    return (
        ThermalLink("sc_coax_cp", "sc_coax", "4K", "CP", fixed_load=0.06e-6),
        ThermalLink("sc_coax_mxc", "sc_coax", "CP", "MXC", fixed_load=0.004e-6),
    )


def _conventional() -> Architecture:
    return Architecture(
        name="conventional",
        description="room-temperature electronics, stainless coax to 4 K, SC coax below, 20 dB at 4K/CP/MXC",
        links=(ThermalLink("stainless_coax", "rf_coax", "RT", "4K", fixed_load=1e-3), *_sc_coax_links()),
        attenuation=(("4K", 20.0), ("CP", 20.0), ("MXC", 20.0)),
        provenance={
            **_COMMON,
            **_SC_COAX,
            "links.stainless_coax.fixed_load": "stainless RF coax, ~1 mW per cable at the 4 K stage",
            "attenuation.4K": "~20 dB per stage at 4K, CP and MXC",
            "attenuation.CP": "~20 dB per stage at 4K, CP and MXC",
            "attenuation.MXC": "~20 dB per stage at 4K, CP and MXC",
        },
    )


def _cryo_cmos() -> Architecture:
    return Architecture(
        name="cryo_cmos",
        description="4 K CMOS signal generation fed by a DC/digital loom, SC coax below 4 K",
        links=(ThermalLink("dc_loom", "dc_wire", "RT", "4K", fixed_load=10e-6), *_sc_coax_links()),
        actives=(ActiveComponent("cmos_controller", "4K", 2e-3, duty_cycled=True),),
        attenuation=(("CP", 20.0), ("MXC", 20.0)),
        provenance={
            **_COMMON,
            **_SC_COAX,
            "links.dc_loom.fixed_load": "DC/digital wiring two orders of magnitude below stainless coax (1 mW / 100)",
            "actives.cmos_controller.dissipation": "lowest reported cryo-CMOS power ~2 mW per qubit (28 nm)",
            "attenuation.CP": "excess CMOS noise needs >40 dB below 4 K; split 20 dB CP",
            "attenuation.MXC": "excess CMOS noise needs >40 dB below 4 K; split 20 dB MXC",
        },
    )


def _deep_photonic() -> Architecture:
    return Architecture(
        name="deep_photonic",
        description="fiber to a photodiode at the mixing chamber",
        links=(
            ThermalLink("fiber_4k", "fiber", "RT", "4K", fixed_load=5.6e-6),
            ThermalLink("fiber_cp", "fiber", "4K", "CP", fixed_load=3e-12),
            ThermalLink("fiber_mxc", "fiber", "CP", "MXC", fixed_load=3e-12),
        ),
        actives=(ActiveComponent("photodiode_mxc", "MXC", 1e-6, duty_cycled=True),),
        front_end=PhotonicFrontEnd(),
        provenance={
            **_COMMON,
            **_FRONT_END_SOURCES,
            "links.fiber_4k.fixed_load": "SMF-28 fiber RT to 4 K, ~5.6 uW",
            "links.fiber_cp.fixed_load": "assumed 3 pW passive load at CP",
            "links.fiber_mxc.fixed_load": "assumed 3 pW passive load at MXC",
            "actives.photodiode_mxc.dissipation": "optical-to-microwave conversion at MXC, ~1 uW",
        },
    )


def _proposed() -> Architecture:
    front = PhotonicFrontEnd()
    return Architecture(
        name="proposed",
        description="fiber to a 4 K photodiode, SC coax to the qubit, no amplifier or attenuators",
        links=(ThermalLink("fiber", "fiber", "RT", "4K", fixed_load=5.6e-6), *_sc_coax_links()),
        actives=(
            ActiveComponent("optical_power", "4K", front.optical_power, duty_cycled=True),
            ActiveComponent("tia", "4K", NO_AMPLIFIER.dissipation, duty_cycled=False),
        ),
        attenuation=(("CP", 0.0), ("MXC", 0.0)),
        front_end=front,
        amplifier=NO_AMPLIFIER,
        provenance={
            **_COMMON,
            **_FRONT_END_SOURCES,
            **_NO_AMP_SOURCES,
            **_SC_COAX,
            "links.fiber.fixed_load": "one fiber RT to 4 K, ~5.6 uW",
            "actives.optical_power.dissipation": "P_opt = I / PD_res = 1.4 uA / (1 A/W)",
            "actives.tia.dissipation": "P_TIA = 0 without amplifier",
            "attenuation.CP": "no attenuator: (A_CP - 1) A_MXC P_Q = 0",
            "attenuation.MXC": "no attenuator: (A_MXC - 1) P_Q = 0",
        },
    )


_BUILDERS = {
    "conventional": _conventional,
    "cryo_cmos": _cryo_cmos,
    "deep_photonic": _deep_photonic,
    "proposed": _proposed,
}


def builtin(name: str) -> Architecture:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValidationError(f"unknown architecture {name!r}; builtins are {list(BUILTIN_NAMES)}", "architecture") from None


def fiber_link_from_geometry(hot: str = "RT", cold: str = "4K", length: float = 1.0, name: str = "fiber") -> ThermalLink:
    """SMF-28 link whose load comes from the conduction integral instead of a fixed value."""
    return ThermalLink(name, "fiber", hot, cold, length, smf28_layers())


@dataclass(frozen=True)
class StageCapacity:
    name: str
    temperature: float
    cooling_W: float
    per_line_passive_W: float
    per_line_active_W: float

    @property
    def per_line_W(self) -> float:
        return self.per_line_passive_W + self.per_line_active_W

    @property
    def headroom_ratio(self) -> float:
        if self.per_line_W == 0:
            return math.inf
        return self.cooling_W / self.per_line_W

    @property
    def max_lines(self) -> float:
        """``floor(cooling / per-line load)``; ``inf`` for an unloaded stage."""
        h = self.headroom_ratio
        if math.isinf(h):
            return math.inf
        # Guard against 1499.9999999 from exact ratios such as 1.5 W / 1 mW.
        guarded = h * (1 + 1e-12)
        return math.inf if math.isinf(guarded) else math.floor(guarded)


@dataclass(frozen=True)
class PerQubitPower:
    """Per-qubit loads in 4 K-equivalent watts.

    Each stage's load is scaled by (reference cooling / stage cooling).
    ``limiting_*`` scale only the bottleneck stage's load.
    """

    active_W: float
    passive_W: float
    limiting_active_W: float
    limiting_passive_W: float
    reference_stage: str
    stage_loads: tuple[tuple[str, float, float], ...]  # (stage, active_W, passive_W), unscaled

    def stage(self, name: str) -> tuple[float, float]:
        for s, a, p in self.stage_loads:
            if s == name:
                return a, p
        raise KeyError(name)


@dataclass(frozen=True)
class CapacityReport:
    architecture: str
    duty: float
    stages: tuple[StageCapacity, ...]
    bottleneck: str | None
    max_lines: float
    per_qubit: PerQubitPower

    def stage(self, name: str) -> StageCapacity:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)


def per_line_loads(
    arch: Architecture,
    fridge: FridgeModel,
    duty: float = 0.33,
    materials: Mapping[str, ConductivityModel] | None = None,
) -> list[StageLoad]:
    """Heat load of a single XY line on every stage, RT included."""
    arch.validate(fridge)
    loads = stage_heat_report(fridge, arch.links, arch.per_line_actives(fridge), duty, materials)
    share = arch.lines_share_factor
    return [StageLoad(l.name, l.temperature, l.cooling_W, l.passive_W / share, l.active_W) for l in loads]


def capacity(
    arch: Architecture,
    fridge: FridgeModel,
    duty: float = 0.33,
    reference_stage: str = "4K",
    materials: Mapping[str, ConductivityModel] | None = None,
) -> CapacityReport:
    """Maximum XY lines per stage and overall; pseudo-stages with infinite cooling are omitted."""
    loads = per_line_loads(arch, fridge, duty, materials)
    stages = tuple(
        StageCapacity(l.name, l.temperature, l.cooling_W, l.passive_W, l.active_W)
        for l in loads
        if math.isfinite(l.cooling_W)
    )
    finite = [s for s in stages if math.isfinite(s.headroom_ratio)]
    if finite:
        # Lowest headroom wins; equal headroom goes to the colder stage.
        bottleneck = min(reversed(finite), key=lambda s: s.headroom_ratio)
        name, max_lines = bottleneck.name, bottleneck.max_lines
    else:
        name, max_lines = None, math.inf
    return CapacityReport(arch.name, duty, stages, name, max_lines, _per_qubit(loads, fridge, reference_stage, name))


def _per_qubit(loads: Sequence[StageLoad], fridge: FridgeModel, reference_stage: str, bottleneck: str | None) -> PerQubitPower:
    ref = fridge.stage(reference_stage).cooling_power
    active = passive = lim_a = lim_p = 0.0
    for l in loads:
        if not (l.active_W or l.passive_W):
            continue
        scale = ref / l.cooling_W
        active += l.active_W * scale
        passive += l.passive_W * scale
        if l.name == bottleneck:
            lim_a, lim_p = l.active_W * scale, l.passive_W * scale
    return PerQubitPower(
        active_W=active,
        passive_W=passive,
        limiting_active_W=lim_a,
        limiting_passive_W=lim_p,
        reference_stage=reference_stage,
        stage_loads=tuple((l.name, l.active_W, l.passive_W) for l in loads),
    )


def per_qubit_power(arch: Architecture, fridge: FridgeModel, duty: float = 1.0, reference_stage: str = "4K") -> PerQubitPower:
    """Active and passive power per qubit, normalized to ``reference_stage``."""
    return capacity(arch, fridge, duty, reference_stage).per_qubit


def compare(
    archs: Iterable[Architecture],
    fridge: FridgeModel,
    duty: float = 0.33,
    materials: Mapping[str, ConductivityModel] | None = None,
) -> list[CapacityReport]:
    """Capacity reports in the given order."""
    if not 0 < duty <= 1:
        raise DomainError(f"duty must be in (0, 1], got {duty}")
    return [capacity(a, fridge, duty, materials=materials) for a in archs]
