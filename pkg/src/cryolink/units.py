"""Unit-suffixed quantity strings such as ``"1.5 W"`` or ``"-70 dBm"``.

Scenario files carry every physical quantity as a string with an explicit
unit; bare numbers are rejected so unit slips cannot pass silently.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal, InvalidOperation

from .errors import ValidationError

_PREFIXES = {
    "": "1",
    "k": "1e3",
    "M": "1e6",
    "G": "1e9",
    "m": "1e-3",
    "u": "1e-6",
    "µ": "1e-6",
    "n": "1e-9",
    "p": "1e-12",
    "f": "1e-15",
}

# dimension -> (canonical unit for output, {unit spelling: scale to SI})
_DIMENSIONS: dict[str, tuple[str, dict[str, str]]] = {}


def _prefixed(base: str, prefixes: str) -> dict[str, str]:
    return {p + base: _PREFIXES[p] for p in prefixes}


def _register(dimension: str, canonical: str, table: dict[str, str]):
    _DIMENSIONS[dimension] = (canonical, table)


_register("temperature", "K", _prefixed("K", ["", "m", "u"]))
_register("power", "W", _prefixed("W", ["", "k", "m", "u", "µ", "n", "p", "f"]))
_register("length", "m", {**_prefixed("m", ["", "m", "u", "µ", "n", "k"]), "cm": "1e-2"})
_register(
    "area",
    "m^2",
    {"m^2": "1", "m2": "1", "cm^2": "1e-4", "mm^2": "1e-6", "mm2": "1e-6", "um^2": "1e-12", "um2": "1e-12", "µm^2": "1e-12"},
)
_register("resistance", "ohm", {**_prefixed("ohm", ["", "k", "M"]), "Ω": "1", "kΩ": "1e3"})
_register("voltage", "V", _prefixed("V", ["", "m", "u", "k"]))
_register("current", "A", _prefixed("A", ["", "m", "u", "µ", "n", "p", "f"]))
_register("frequency", "Hz", _prefixed("Hz", ["", "k", "M", "G"]))
_register("db", "dB", {"dB": "1"})
_register("db_per_hz", "dB/Hz", {"dB/Hz": "1", "dBc/Hz": "1"})
_register("responsivity", "A/W", {"A/W": "1", "mA/mW": "1", "mA/W": "1e-3"})
_register(
    "current_asd",
    "A/rtHz",
    {
        **{p + "A/rtHz": s for p, s in _PREFIXES.items()},
        **{p + "A/sqrt(Hz)": s for p, s in _PREFIXES.items()},
    },
)

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*(\S+)\s*$")


def parse_quantity(value, dimension: str, path: str = "") -> float:
    """Parse ``"<number> <unit>"`` into SI (dB and dB/Hz stay logarithmic).

    Power also accepts ``dBm``.  Raises :class:`ValidationError` naming
    ``path`` for bare numbers, unknown units or a wrong dimension.
    """
    if not isinstance(value, str):
        raise ValidationError(f"expected a quantity string with a unit, got {value!r}", path)
    m = _QUANTITY.match(value)
    if not m:
        raise ValidationError(f"cannot parse quantity {value!r}; expected '<number> <unit>'", path)
    number, unit = m.groups()
    if dimension == "power" and unit == "dBm":
        dbm = float(number)
        if math.isinf(dbm):
            return 0.0 if dbm < 0 else math.inf
        return 1e-3 * 10.0 ** (dbm / 10.0)
    canonical, table = _DIMENSIONS[dimension]
    if unit not in table:
        raise ValidationError(f"unit {unit!r} is not a {dimension} unit (e.g. {canonical!r})", path)
    if number.lstrip("+-") == "inf":
        return float(number)
    try:
        return float(Decimal(number) * Decimal(table[unit]))
    except InvalidOperation:
        raise ValidationError(f"bad number in {value!r}", path) from None


def format_quantity(value: float, dimension: str) -> str:
    """Exact, round-trippable quantity string in the canonical unit."""
    canonical, _ = _DIMENSIONS[dimension]
    return f"{float(value)!r} {canonical}"
