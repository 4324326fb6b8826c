"""Scenario files: TOML with unit-suffixed quantities, strict key checking.

A scenario bundles a fridge, optional material overrides, architectures and
the parameters of the report/sweep/optimize runs.  :func:`dump_scenario`
writes the canonical form; parsing that form and dumping again reproduces
it byte for byte.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .architectures import Architecture, builtin
from .errors import CryoLinkError, ValidationError
from .noise import CARRIER_6GHZ, NO_AMPLIFIER, CryoAmplifier, PhotonicFrontEnd
from .optimize import OBJECTIVES, NoiseTarget
from .physics import Frequency, PowerLevel
from .thermal import (
    LINK_KINDS,
    ActiveComponent,
    ConductivityModel,
    FridgeModel,
    Layer,
    Stage,
    ThermalLink,
    default_fridge,
    load_materials,
)
from .units import format_quantity, parse_quantity

DEFAULT_DUTY = 0.33


@dataclass(frozen=True)
class SweepSpec:
    nf_values: tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 3.0)
    photocurrent_min: float = 1e-7
    photocurrent_max: float = 1e-4
    points: int = 61
    signal_power: float = 1e-10


@dataclass(frozen=True)
class AttenuationSpec:
    source_temperature: float = 300.0
    stages: tuple[str, ...] = ("4K", "CP", "MXC")
    grid_step: float = 1.0
    signal_power: float = 1e-10
    objective: str = "balanced"
    max_total_db: float = 120.0


@dataclass(frozen=True)
class PhotocurrentSpec:
    signal_power: float = 1e-10


@dataclass(frozen=True)
class ReportSpec:
    architecture: str | None = None
    lines: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    fridge: FridgeModel = field(default_factory=default_fridge)
    architectures: tuple[Architecture, ...] = ()
    materials_file: str | None = None
    materials: Mapping[str, ConductivityModel] | None = None
    front_end: PhotonicFrontEnd | None = None
    amplifier: CryoAmplifier | None = None
    max_occupation: float = 1e-3
    max_current_asd: float = 2e-12
    frequency: Frequency = CARRIER_6GHZ
    duty: float = DEFAULT_DUTY
    report: ReportSpec = ReportSpec()
    sweep: SweepSpec = SweepSpec()
    attenuation: AttenuationSpec | None = AttenuationSpec()
    photocurrent: PhotocurrentSpec | None = PhotocurrentSpec()

    def occupation_target(self) -> NoiseTarget:
        return NoiseTarget.occupation(self.max_occupation, self.frequency)

    def current_target(self) -> NoiseTarget:
        return NoiseTarget.current(self.max_current_asd, self.frequency)

    def effective_front_end(self) -> PhotonicFrontEnd:
        """Top-level front end, else the first architecture's, else defaults."""
        if self.front_end is not None:
            return self.front_end
        for arch in self.architectures:
            if arch.front_end is not None:
                return arch.front_end
        return PhotonicFrontEnd()

    def effective_amplifier(self) -> CryoAmplifier:
        if self.amplifier is not None:
            return self.amplifier
        for arch in self.architectures:
            if arch.amplifier is not None:
                return arch.amplifier
        return NO_AMPLIFIER

    def architecture(self, name: str | None = None) -> Architecture:
        if not self.architectures:
            raise ValidationError("scenario defines no architectures", "architectures")
        if name is None:
            return self.architectures[0]
        for arch in self.architectures:
            if arch.name == name:
                return arch
        raise ValidationError(f"no architecture named {name!r}", "report.architecture")

    def digest(self) -> str:
        return hashlib.sha256(dump_scenario(self).encode("utf-8")).hexdigest()


# --- parsing helpers -------------------------------------------------------

_MISSING = object()


class _Reader:
    """Pops keys from a TOML table; leftover keys are reported as unknown."""

    def __init__(self, table: Any, path: str):
        if not isinstance(table, dict):
            raise ValidationError(f"expected a table, got {type(table).__name__}", path)
        self.table = dict(table)
        self.path = path

    def _key(self, key):
        return f"{self.path}.{key}" if self.path else key

    def raw(self, key, default=_MISSING):
        if key in self.table:
            return self.table.pop(key)
        if default is _MISSING:
            raise ValidationError("required key is missing", self._key(key))
        return default

    def quantity(self, key, dimension, default=_MISSING):
        value = self.raw(key, _MISSING if default is _MISSING else None)
        if value is None:
            return default
        return parse_quantity(value, dimension, self._key(key))

    def quantities(self, key, dimension, default=_MISSING):
        value = self.raw(key, _MISSING if default is _MISSING else None)
        if value is None:
            return default
        if not isinstance(value, list):
            raise ValidationError("expected a list of quantities", self._key(key))
        return tuple(parse_quantity(v, dimension, f"{self._key(key)}[{i}]") for i, v in enumerate(value))

    def string(self, key, default=_MISSING, choices=None):
        value = self.raw(key, default)
        if value is default and default is not _MISSING:
            return value
        if not isinstance(value, str):
            raise ValidationError(f"expected a string, got {value!r}", self._key(key))
        if choices is not None and value not in choices:
            raise ValidationError(f"must be one of {list(choices)}, got {value!r}", self._key(key))
        return value

    def strings(self, key, default=_MISSING):
        value = self.raw(key, default)
        if value is default and default is not _MISSING:
            return value
        if not (isinstance(value, list) and all(isinstance(v, str) for v in value)):
            raise ValidationError("expected a list of strings", self._key(key))
        return tuple(value)

    def boolean(self, key, default=_MISSING):
        value = self.raw(key, default)
        if not isinstance(value, bool):
            raise ValidationError(f"expected true/false, got {value!r}", self._key(key))
        return value

    def integer(self, key, default=_MISSING, minimum=None):
        value = self.raw(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"expected an integer, got {value!r}", self._key(key))
        if minimum is not None and value < minimum:
            raise ValidationError(f"must be >= {minimum}, got {value}", self._key(key))
        return value

    def fraction(self, key, default=_MISSING):
        """Dimensionless number (duty cycle, occupation)."""
        value = self.raw(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"expected a dimensionless number, got {value!r}", self._key(key))
        return float(value)

    def table_list(self, key):
        value = self.raw(key, [])
        if not isinstance(value, list):
            raise ValidationError("expected an array of tables", self._key(key))
        return [(v, f"{self._key(key)}[{i}]") for i, v in enumerate(value)]

    def sub(self, key):
        value = self.raw(key, None)
        return None if value is None else _Reader(value, self._key(key))

    def done(self):
        if self.table:
            unknown = sorted(self.table)[0]
            raise ValidationError("unknown key", self._key(unknown))


def _wrap(path, build):
    """Re-raise model-level errors with the key path attached."""
    try:
        return build()
    except ValidationError as exc:
        if exc.path is None:
            raise ValidationError(exc.message, path) from None
        raise
    except CryoLinkError as exc:
        raise ValidationError(str(exc), path) from None


def _parse_fridge(r: _Reader) -> FridgeModel:
    stages = []
    for table, path in r.table_list("stages"):
        s = _Reader(table, path)
        stage = Stage(
            s.string("name"),
            s.quantity("temperature", "temperature"),
            s.quantity("cooling_power", "power"),
        )
        s.done()
        stages.append(stage)
    r.done()
    return _wrap(r.path, lambda: FridgeModel(tuple(stages)))


def _parse_front_end(r: _Reader) -> PhotonicFrontEnd:
    d = PhotonicFrontEnd()
    kwargs = dict(
        mean_photocurrent=r.quantity("mean_photocurrent", "current", d.mean_photocurrent),
        laser_rin_db=r.quantity("laser_rin", "db_per_hz", d.laser_rin_db),
        v_pi=r.quantity("v_pi", "voltage", d.v_pi),
        drive_temperature=r.quantity("drive_temperature", "temperature", d.drive_temperature),
        drive_impedance=r.quantity("drive_impedance", "resistance", d.drive_impedance),
        pd_responsivity=r.quantity("pd_responsivity", "responsivity", d.pd_responsivity),
        pd_bandwidth=r.quantity("pd_bandwidth", "frequency", d.pd_bandwidth),
        carrier=Frequency.from_hz(r.quantity("carrier", "frequency", d.carrier.hz)),
    )
    r.done()
    return _wrap(r.path, lambda: PhotonicFrontEnd(**kwargs))


def _parse_amplifier(r: _Reader) -> CryoAmplifier:
    d = NO_AMPLIFIER
    kwargs = dict(
        noise_figure_db=r.quantity("noise_figure", "db", d.noise_figure_db),
        transimpedance_gain=r.quantity("transimpedance_gain", "resistance", d.transimpedance_gain),
        dissipation=r.quantity("dissipation", "power", d.dissipation),
        ambient=r.quantity("ambient", "temperature", d.ambient),
    )
    r.done()
    return _wrap(r.path, lambda: CryoAmplifier(**kwargs))


def _parse_link(r: _Reader) -> ThermalLink:
    name = r.string("name")
    kind = r.string("kind", choices=LINK_KINDS)
    hot, cold = r.string("hot"), r.string("cold")
    length = r.quantity("length", "length", 1.0)
    fixed = r.quantity("fixed_load", "power", None)
    layers = []
    for table, path in r.table_list("layers"):
        lr = _Reader(table, path)
        layers.append(Layer(lr.string("material"), lr.quantity("cross_section", "area")))
        lr.done()
    r.done()
    return _wrap(r.path, lambda: ThermalLink(name, kind, hot, cold, length, tuple(layers), fixed))


def _parse_architecture(r: _Reader) -> Architecture:
    name = r.string("name")
    description = r.string("description", "")
    signal_power = r.quantity("signal_power", "power", 1e-10)
    charge = r.boolean("charge_attenuator_heat", False)
    share = r.integer("lines_share_factor", 1, minimum=1)
    links = [_parse_link(_Reader(t, p)) for t, p in r.table_list("links")]
    actives = []
    for table, path in r.table_list("actives"):
        a = _Reader(table, path)
        comp_kwargs = dict(
            name=a.string("name"),
            stage=a.string("stage"),
            dissipation=a.quantity("dissipation", "power"),
            duty_cycled=a.boolean("duty_cycled", False),
        )
        a.done()
        actives.append(_wrap(path, lambda: ActiveComponent(**comp_kwargs)))
    att = r.sub("attenuation")
    attenuation = []
    if att is not None:
        for stage in list(att.table):
            attenuation.append((stage, att.quantity(stage, "db")))
    fe = r.sub("front_end")
    amp = r.sub("amplifier")
    prov = r.sub("provenance")
    provenance = {}
    if prov is not None:
        for key in list(prov.table):
            provenance[key] = prov.string(key)
    r.done()
    return _wrap(
        r.path,
        lambda: Architecture(
            name=name,
            links=tuple(links),
            actives=tuple(actives),
            attenuation=tuple(attenuation),
            front_end=_parse_front_end(fe) if fe else None,
            amplifier=_parse_amplifier(amp) if amp else None,
            signal_power=signal_power,
            charge_attenuator_heat=charge,
            lines_share_factor=share,
            description=description,
            provenance=provenance,
        ),
    )


def parse_scenario(data: Mapping[str, Any], base_dir: str | Path | None = None) -> ScenarioConfig:
    """Validate a decoded TOML document and build a :class:`ScenarioConfig`."""
    r = _Reader(data, "")
    duty = r.fraction("duty", DEFAULT_DUTY)
    if not 0 < duty <= 1:
        raise ValidationError(f"duty must be in (0, 1], got {duty}", "duty")
    freq_hz = r.quantity("frequency", "frequency", CARRIER_6GHZ.hz)
    fr = r.sub("fridge")
    fridge = _parse_fridge(fr) if fr else default_fridge()

    materials_file = None
    materials = None
    mr = r.sub("materials")
    if mr is not None:
        materials_file = mr.string("file")
        mr.done()
        mpath = Path(materials_file)
        if base_dir is not None and not mpath.is_absolute():
            mpath = Path(base_dir) / mpath
        if not mpath.exists():
            raise ValidationError(f"material file {str(mpath)!r} not found", "materials.file")
        materials = _wrap("materials.file", lambda: load_materials(mpath))

    archs = tuple(_parse_architecture(_Reader(t, p)) for t, p in r.table_list("architectures"))
    names = [a.name for a in archs]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate architecture names {names}", "architectures")
    for i, arch in enumerate(archs):
        _wrap(f"architectures[{i}]", lambda: arch.validate(fridge))

    fe = r.sub("front_end")
    amp = r.sub("amplifier")

    max_occ, max_asd = 1e-3, 2e-12
    tr = r.sub("target")
    if tr is not None:
        max_occ = tr.fraction("max_occupation", max_occ)
        max_asd = tr.quantity("max_current_asd", "current_asd", max_asd)
        tr.done()
        if not (max_occ > 0 and max_asd > 0):
            raise ValidationError("targets must be positive", "target")

    report = ReportSpec()
    rr = r.sub("report")
    if rr is not None:
        report = ReportSpec(rr.string("architecture", None), rr.integer("lines", 1, minimum=1))
        rr.done()
        if report.architecture is not None and report.architecture not in names:
            raise ValidationError(f"no architecture named {report.architecture!r}", "report.architecture")

    sweep = SweepSpec()
    sr = r.sub("sweep")
    if sr is not None:
        d = SweepSpec()
        sweep = SweepSpec(
            nf_values=sr.quantities("nf_values", "db", d.nf_values),
            photocurrent_min=sr.quantity("photocurrent_min", "current", d.photocurrent_min),
            photocurrent_max=sr.quantity("photocurrent_max", "current", d.photocurrent_max),
            points=sr.integer("points", d.points, minimum=2),
            signal_power=sr.quantity("signal_power", "power", d.signal_power),
        )
        sr.done()
        if not 0 < sweep.photocurrent_min < sweep.photocurrent_max:
            raise ValidationError("need 0 < photocurrent_min < photocurrent_max", "sweep")
        if any(nf < 0 for nf in sweep.nf_values):
            raise ValidationError("noise figures must be >= 0 dB", "sweep.nf_values")

    attenuation: AttenuationSpec | None = AttenuationSpec()
    photocurrent: PhotocurrentSpec | None = PhotocurrentSpec()
    orr = r.sub("optimize")
    if orr is not None:
        ar = orr.sub("attenuation")
        pr = orr.sub("photocurrent")
        orr.done()
        attenuation = photocurrent = None
        if ar is not None:
            d = AttenuationSpec()
            attenuation = AttenuationSpec(
                source_temperature=ar.quantity("source_temperature", "temperature", d.source_temperature),
                stages=ar.strings("stages", d.stages),
                grid_step=ar.quantity("grid_step", "db", d.grid_step),
                signal_power=ar.quantity("signal_power", "power", d.signal_power),
                objective=ar.string("objective", d.objective, choices=OBJECTIVES),
                max_total_db=ar.quantity("max_total", "db", d.max_total_db),
            )
            ar.done()
            for s in attenuation.stages:
                if s not in fridge.names:
                    raise ValidationError(f"unknown stage {s!r}", "optimize.attenuation.stages")
            if not 0.5 <= attenuation.grid_step <= 5:
                raise ValidationError("grid step must be in [0.5, 5] dB", "optimize.attenuation.grid_step")
        if pr is not None:
            photocurrent = PhotocurrentSpec(pr.quantity("signal_power", "power", PhotocurrentSpec().signal_power))
            pr.done()
    r.done()

    return ScenarioConfig(
        fridge=fridge,
        architectures=archs,
        materials_file=materials_file,
        materials=materials,
        front_end=_parse_front_end(fe) if fe else None,
        amplifier=_parse_amplifier(amp) if amp else None,
        max_occupation=max_occ,
        max_current_asd=max_asd,
        frequency=Frequency.from_hz(freq_hz),
        duty=duty,
        report=report,
        sweep=sweep,
        attenuation=attenuation,
        photocurrent=photocurrent,
    )


def loads_scenario(text: str, base_dir: str | Path | None = None) -> ScenarioConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"TOML syntax error: {exc}") from None
    return parse_scenario(data, base_dir)


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config: {exc}", str(path)) from None
    return loads_scenario(text, path.parent)


# --- dumping ---------------------------------------------------------------

q = format_quantity


def _front_end_table(fe: PhotonicFrontEnd) -> dict:
    return {
        "mean_photocurrent": q(fe.mean_photocurrent, "current"),
        "laser_rin": q(fe.laser_rin_db, "db_per_hz"),
        "v_pi": q(fe.v_pi, "voltage"),
        "drive_temperature": q(fe.drive_temperature, "temperature"),
        "drive_impedance": q(fe.drive_impedance, "resistance"),
        "pd_responsivity": q(fe.pd_responsivity, "responsivity"),
        "pd_bandwidth": q(fe.pd_bandwidth, "frequency"),
        "carrier": q(fe.carrier.hz, "frequency"),
    }


def _amplifier_table(amp: CryoAmplifier) -> dict:
    return {
        "noise_figure": q(amp.noise_figure_db, "db"),
        "transimpedance_gain": q(amp.transimpedance_gain, "resistance"),
        "dissipation": q(amp.dissipation, "power"),
        "ambient": q(amp.ambient, "temperature"),
    }


def _link_table(link: ThermalLink) -> dict:
    t: dict[str, Any] = {"name": link.name, "kind": link.kind, "hot": link.hot, "cold": link.cold, "length": q(link.length, "length")}
    if link.fixed_load is not None:
        t["fixed_load"] = q(link.fixed_load, "power")
    if link.layers:
        t["layers"] = [{"material": l.material, "cross_section": q(l.cross_section, "area")} for l in link.layers]
    return t


def architecture_table(arch: Architecture) -> dict:
    t: dict[str, Any] = {
        "name": arch.name,
        "description": arch.description,
        "signal_power": q(arch.signal_power, "power"),
        "charge_attenuator_heat": arch.charge_attenuator_heat,
        "lines_share_factor": arch.lines_share_factor,
    }
    if arch.links:
        t["links"] = [_link_table(l) for l in arch.links]
    if arch.actives:
        t["actives"] = [
            {"name": c.name, "stage": c.stage, "dissipation": q(c.dissipation, "power"), "duty_cycled": c.duty_cycled}
            for c in arch.actives
        ]
    if arch.attenuation:
        t["attenuation"] = {stage: q(db, "db") for stage, db in arch.attenuation}
    if arch.front_end is not None:
        t["front_end"] = _front_end_table(arch.front_end)
    if arch.amplifier is not None:
        t["amplifier"] = _amplifier_table(arch.amplifier)
    if arch.provenance:
        t["provenance"] = dict(sorted(arch.provenance.items()))
    return t


def scenario_table(cfg: ScenarioConfig) -> dict:
    t: dict[str, Any] = {
        "duty": cfg.duty,
        "frequency": q(cfg.frequency.hz, "frequency"),
        "fridge": {
            "stages": [
                {"name": s.name, "temperature": q(s.temperature, "temperature"), "cooling_power": q(s.cooling_power, "power")}
                for s in cfg.fridge.stages
            ]
        },
    }
    if cfg.materials_file is not None:
        t["materials"] = {"file": cfg.materials_file}
    if cfg.front_end is not None:
        t["front_end"] = _front_end_table(cfg.front_end)
    if cfg.amplifier is not None:
        t["amplifier"] = _amplifier_table(cfg.amplifier)
    t["target"] = {"max_occupation": cfg.max_occupation, "max_current_asd": q(cfg.max_current_asd, "current_asd")}
    report: dict[str, Any] = {"lines": cfg.report.lines}
    if cfg.report.architecture is not None:
        report["architecture"] = cfg.report.architecture
    t["report"] = report
    s = cfg.sweep
    t["sweep"] = {
        "nf_values": [q(v, "db") for v in s.nf_values],
        "photocurrent_min": q(s.photocurrent_min, "current"),
        "photocurrent_max": q(s.photocurrent_max, "current"),
        "points": s.points,
        "signal_power": q(s.signal_power, "power"),
    }
    opt: dict[str, Any] = {}
    if cfg.attenuation is not None:
        a = cfg.attenuation
        opt["attenuation"] = {
            "source_temperature": q(a.source_temperature, "temperature"),
            "stages": list(a.stages),
            "grid_step": q(a.grid_step, "db"),
            "signal_power": q(a.signal_power, "power"),
            "objective": a.objective,
            "max_total": q(a.max_total_db, "db"),
        }
    if cfg.photocurrent is not None:
        opt["photocurrent"] = {"signal_power": q(cfg.photocurrent.signal_power, "power")}
    t["optimize"] = opt
    if cfg.architectures:
        t["architectures"] = [architecture_table(a) for a in cfg.architectures]
    return t


def dump_scenario(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(scenario_table(cfg))


def builtin_scenario(*names: str, fridge: FridgeModel | None = None) -> ScenarioConfig:
    """Scenario holding the named built-in architectures on the default fridge."""
    return ScenarioConfig(
        fridge=default_fridge() if fridge is None else fridge,
        architectures=tuple(builtin(n) for n in names),
    )
