"""``cryolink`` command-line front end.

Every subcommand builds one or more tables.  They are printed to stdout as
CSV or as aligned text (``--format``).  With ``--out DIR`` the CSV files
and a ``manifest.json`` are also written there.  Identical inputs give
byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .architectures import BUILTIN_NAMES, builtin, compare, per_line_loads
from .config import ScenarioConfig, builtin_scenario, dump_scenario, load_scenario
from .errors import CryoLinkError, DomainError, InfeasibleError, UnsupportedConfigurationError, ValidationError
from .noise import qubit_noise_closed_form
from .optimize import (
    min_photocurrent,
    noise_vs_photocurrent_sweep,
    optimize_attenuation_split,
    verify_plan,
)
from .physics import PowerLevel

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4

FORMATS = ("csv", "table")


def fmt(value) -> str:
    """Locale-independent cell text: 6 significant digits, ``inf`` when unbounded."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    v = float(value)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        raise DomainError("refusing to emit NaN")
    return f"{v:.5e}"


def fmt_count(value) -> str:
    return "inf" if math.isinf(value) else str(int(value))


@dataclass
class Table:
    filename: str
    header: tuple[str, ...]
    rows: list[tuple[str, ...]]
    comments: tuple[str, ...] = ()

    def to_csv(self, manifest_lines: Sequence[str]) -> str:
        lines = [f"# {c}" for c in (*manifest_lines, *self.comments)]
        lines.append(",".join(self.header))
        lines.extend(",".join(r) for r in self.rows)
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        widths = [max(len(h), *(len(r[i]) for r in self.rows)) if self.rows else len(h) for i, h in enumerate(self.header)]
        out = [f"== {self.filename}"]
        out.extend(f"   {c}" for c in self.comments)
        out.append("  ".join(h.ljust(w) for h, w in zip(self.header, widths)))
        out.append("  ".join("-" * w for w in widths))
        out.extend("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in self.rows)
        return "\n".join(out) + "\n"


# --- scenario selection ----------------------------------------------------


def _scenario(args, names: Sequence[str] = ()) -> ScenarioConfig:
    """Config file if given, else a built-in scenario holding ``names``."""
    if args.config is not None:
        cfg = load_scenario(args.config)
        if names:
            known = {a.name: a for a in cfg.architectures}
            archs = tuple(known[n] if n in known else builtin(n) for n in names)
            cfg = replace(cfg, architectures=archs)
    else:
        cfg = builtin_scenario(*(names or ("proposed",)))
    if args.duty is not None:
        if not 0 < args.duty <= 1:
            raise ValidationError(f"duty must be in (0, 1], got {args.duty}", "--duty")
        cfg = replace(cfg, duty=args.duty)
    return cfg


def _manifest_lines(cfg: ScenarioConfig, command: str) -> list[str]:
    return [
        f"tool cryolink {__version__}",
        f"command {command}",
        f"config_sha256 {cfg.digest()}",
        f"duty {fmt(cfg.duty)}",
    ]


# --- commands --------------------------------------------------------------


def report_tables(cfg: ScenarioConfig, name: str | None = None) -> list[Table]:
    arch = cfg.architecture(name or cfg.report.architecture)
    n = cfg.report.lines
    rows = []
    for l in per_line_loads(arch, cfg.fridge, cfg.duty, cfg.materials):
        passive, active = l.passive_W * n, l.active_W * n
        total = passive + active
        headroom = math.inf if total == 0 else l.cooling_W / total
        rows.append(tuple(map(fmt, (l.name, l.temperature, l.cooling_W, passive, active, total, headroom))))
    header = ("stage", "temperature_K", "cooling_W", "passive_W", "active_W", "total_W", "headroom_ratio")
    return [Table("report.csv", header, rows, (f"architecture {arch.name}", f"lines {n}"))]


def sweep_tables(cfg: ScenarioConfig) -> list[Table]:
    s = cfg.sweep
    result = noise_vs_photocurrent_sweep(
        cfg.effective_front_end(),
        s.nf_values,
        PowerLevel(s.signal_power),
        (s.photocurrent_min, s.photocurrent_max),
        s.points,
        amp=cfg.effective_amplifier(),
    )
    rows = [tuple(map(fmt, r)) for r in result.rows()]
    comments = (f"signal_power_W {fmt(s.signal_power)}", f"target_asd_A_per_sqrtHz {fmt(cfg.max_current_asd)}")
    return [Table("sweep.csv", ("photocurrent_A", "nf_dB", "noise_asd_A_per_sqrtHz"), rows, comments)]


def attenuation_tables(cfg: ScenarioConfig) -> list[Table]:
    a = cfg.attenuation
    target = cfg.occupation_target()
    plan = optimize_attenuation_split(
        cfg.fridge,
        a.stages,
        a.grid_step,
        PowerLevel(a.signal_power),
        target,
        duty=cfg.duty,
        source_temperature=a.source_temperature,
        objective=a.objective,
        max_total_db=a.max_total_db,
    )
    recheck = verify_plan(plan, cfg.fridge, target, a.source_temperature)
    rows = [
        tuple(map(fmt, (s, cfg.fridge.temperature(s), db, w, r)))
        for s, db, w, r in zip(plan.stages, plan.attenuation_db, plan.dissipation_W, plan.heat_ratio)
    ]
    comments = (
        f"objective {plan.objective}",
        f"objective_value {fmt(plan.objective_value)}",
        f"total_dB {fmt(plan.total_db)}",
        f"achieved_occupation {fmt(recheck)}",
        f"target_occupation {fmt(plan.target_occupation)}",
    )
    header = ("stage", "temperature_K", "attenuation_dB", "dissipation_W", "heat_ratio")
    return [Table("attenuation_plan.csv", header, rows, comments)]


def photocurrent_tables(cfg: ScenarioConfig) -> list[Table]:
    front, amp = cfg.effective_front_end(), cfg.effective_amplifier()
    p_q = PowerLevel(cfg.photocurrent.signal_power)
    I = min_photocurrent(front, amp, cfg.current_target(), p_q)
    at = replace(front, mean_photocurrent=I)
    asd = math.sqrt(qubit_noise_closed_form(at, amp, p_q))
    header = ("photocurrent_A", "optical_power_W", "noise_asd_A_per_sqrtHz", "target_asd_A_per_sqrtHz", "nf_dB", "signal_power_W")
    row = tuple(map(fmt, (I, at.optical_power, asd, cfg.max_current_asd, amp.noise_figure_db, p_q.watts)))
    return [Table("min_photocurrent.csv", header, [row])]


def compare_tables(cfg: ScenarioConfig) -> list[Table]:
    reports = compare(cfg.architectures, cfg.fridge, cfg.duty, cfg.materials)
    stage_rows, summary_rows = [], []
    for r in reports:
        for s in r.stages:
            stage_rows.append(
                (
                    r.architecture,
                    s.name,
                    fmt(s.temperature),
                    fmt(s.cooling_W),
                    fmt(s.per_line_passive_W),
                    fmt(s.per_line_active_W),
                    fmt(s.headroom_ratio),
                    fmt_count(s.max_lines),
                )
            )
        q = r.per_qubit
        summary_rows.append(
            (
                r.architecture,
                r.bottleneck or "none",
                fmt_count(r.max_lines),
                fmt(q.active_W),
                fmt(q.passive_W),
                fmt(q.limiting_active_W),
                fmt(q.limiting_passive_W),
            )
        )
    stage_header = (
        "architecture",
        "stage",
        "temperature_K",
        "cooling_W",
        "per_line_passive_W",
        "per_line_active_W",
        "headroom_ratio",
        "max_lines",
    )
    summary_header = (
        "architecture",
        "bottleneck",
        "max_lines",
        "active_W_per_qubit",
        "passive_W_per_qubit",
        "limiting_active_W_per_qubit",
        "limiting_passive_W_per_qubit",
    )
    note = (
        "per-qubit loads are 4K-equivalent: each stage's load is scaled by (4K cooling / stage cooling); "
        "limiting_* columns count only the bottleneck stage",
    )
    return [
        Table("compare_stages.csv", stage_header, stage_rows),
        Table("compare_summary.csv", summary_header, summary_rows, note),
    ]


# --- output ----------------------------------------------------------------


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def _emit(tables: list[Table], cfg: ScenarioConfig, command: str, args) -> None:
    manifest = _manifest_lines(cfg, command)
    for t in tables:
        sys.stdout.write(t.to_csv(manifest) if args.format == "csv" else t.to_text())
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for t in tables:
            (out / t.filename).write_text(t.to_csv(manifest), encoding="utf-8", newline="\n")
        info = {
            "tool": "cryolink",
            "version": __version__,
            "command": command,
            "config_sha256": cfg.digest(),
            "timestamp": _timestamp(),
            "outputs": [t.filename for t in tables],
        }
        (out / "manifest.json").write_text(json.dumps(info, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _run(args) -> int:
    cmd = args.command
    if cmd == "dump-builtin":
        cfg = _scenario(argparse.Namespace(config=None, duty=args.duty), [args.name])
        text = dump_scenario(cfg)
        if args.out is not None:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            (Path(args.out) / f"{args.name}.toml").write_text(text, encoding="utf-8")
        sys.stdout.write(text)
        return EXIT_OK
    if cmd == "validate":
        cfg = _scenario(args, BUILTIN_NAMES if args.config is None else ())
        for arch in cfg.architectures:
            arch.validate(cfg.fridge)
        names = ", ".join(a.name for a in cfg.architectures) or "none"
        print(f"ok config_sha256={cfg.digest()} architectures={names}")
        return EXIT_OK
    if cmd == "report":
        names = (args.architecture,) if args.architecture else ()
        cfg = _scenario(args, names)
        tables = report_tables(cfg, args.architecture)
    elif cmd == "sweep":
        cfg = _scenario(args)
        tables = sweep_tables(cfg)
    elif cmd == "optimize":
        cfg = _scenario(args)
        tables = []
        if args.what in ("attenuation", "all"):
            if cfg.attenuation is None:
                if args.what == "attenuation":
                    raise ValidationError("scenario has no [optimize.attenuation] section", "optimize.attenuation")
            else:
                tables += attenuation_tables(cfg)
        if args.what in ("photocurrent", "all"):
            if cfg.photocurrent is None:
                if args.what == "photocurrent":
                    raise ValidationError("scenario has no [optimize.photocurrent] section", "optimize.photocurrent")
            else:
                tables += photocurrent_tables(cfg)
    elif cmd == "compare":
        names = tuple(args.names) or (BUILTIN_NAMES if args.config is None else ())
        cfg = _scenario(args, names)
        tables = compare_tables(cfg)
    else:  # pragma: no cover - argparse enforces the choices
        raise ValidationError(f"unknown command {cmd!r}")
    _emit(tables, cfg, cmd, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="scenario TOML file")
    common.add_argument("--duty", type=float, default=argparse.SUPPRESS, help="activity fraction in (0, 1]")
    common.add_argument("--out", default=argparse.SUPPRESS, help="directory for CSV files and manifest.json")
    common.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS, help="stdout format")

    parser = argparse.ArgumentParser(prog="cryolink", description="Cryogenic XY-line thermal and noise budgets.", parents=[common])
    parser.add_argument("--version", action="version", version=f"cryolink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", parents=[common], help="per-stage heat loads of one architecture")
    p.add_argument("architecture", nargs="?", help="architecture name (config entry or builtin)")
    sub.add_parser("sweep", parents=[common], help="qubit noise versus photocurrent per NF")
    p = sub.add_parser("optimize", parents=[common], help="attenuation split and/or minimum photocurrent")
    p.add_argument("--what", choices=("attenuation", "photocurrent", "all"), default="all")
    p = sub.add_parser("compare", parents=[common], help="line capacity of several architectures")
    p.add_argument("names", nargs="*", help=f"architectures (default: {' '.join(BUILTIN_NAMES)})")
    p = sub.add_parser("dump-builtin", parents=[common], help="print a builtin architecture as a scenario file")
    p.add_argument("name", choices=BUILTIN_NAMES)
    sub.add_parser("validate", parents=[common], help="check a scenario file without computing")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("config", None), ("duty", None), ("out", None), ("format", "csv")):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleError as exc:
        limit = f" (limiting: {exc.limiting})" if exc.limiting else ""
        print(f"infeasible: {exc}{limit}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, UnsupportedConfigurationError) as exc:
        print(f"numeric range error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CryoLinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
