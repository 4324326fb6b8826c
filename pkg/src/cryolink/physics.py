"""Physical constants, unit value types and thermal-noise primitives.

Every PSD function here is explicit about sidedness.  Two-sided densities are
what the Johnson-Nyquist/Bose-Einstein formula yields directly; the noise
chain works exclusively with one-sided densities (twice the two-sided value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Union

import numpy as np

from .errors import DomainError

# CODATA 2018 exact/recommended values.
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
Q_E = 1.602176634e-19  # C


@dataclass(frozen=True)
class PhysicalConstants:
    reduced_planck: float = HBAR
    boltzmann: float = K_B
    electron_charge: float = Q_E


CONSTANTS = PhysicalConstants()

Sidedness = Literal["one", "two"]


@dataclass(frozen=True)
class Frequency:
    """A positive frequency, stored as angular frequency in rad/s."""

    angular: float

    def __post_init__(self):
        if not (self.angular > 0 and math.isfinite(self.angular)):
            raise DomainError(f"frequency must be positive and finite, got {self.angular} rad/s")

    @classmethod
    def from_hz(cls, hz: float) -> "Frequency":
        return cls(2.0 * math.pi * hz)

    @classmethod
    def from_ghz(cls, ghz: float) -> "Frequency":
        return cls.from_hz(ghz * 1e9)

    @property
    def hz(self) -> float:
        return self.angular / (2.0 * math.pi)


@dataclass(frozen=True)
class PowerLevel:
    """Non-negative power in watts with dBm conversions."""

    watts: float

    def __post_init__(self):
        if not self.watts >= 0:
            raise DomainError(f"power must be non-negative, got {self.watts} W")

    @classmethod
    def from_dbm(cls, dbm: float) -> "PowerLevel":
        return cls(1e-3 * 10.0 ** (dbm / 10.0))

    @property
    def dbm(self) -> float:
        if self.watts == 0:
            return -math.inf
        return 10.0 * math.log10(self.watts / 1e-3)


@dataclass(frozen=True)
class AttenuationFactor:
    """Linear power attenuation ``>= 1``; composition is multiplication."""

    linear: float

    def __post_init__(self):
        if not self.linear >= 1.0:
            raise DomainError(f"attenuation must be >= 1 (no gain), got {self.linear}")

    @classmethod
    def from_db(cls, db: float) -> "AttenuationFactor":
        if db < 0:
            raise DomainError(f"attenuation in dB must be >= 0, got {db}")
        return cls(10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.linear)

    @property
    def absorbed_fraction(self) -> float:
        """``1 - 1/A``: the share of incident power dissipated in the attenuator."""
        return (self.linear - 1.0) / self.linear

    def mix(self, incoming, thermal):
        """``incoming / A + (1 - 1/A) thermal`` without cancellation at either end of A."""
        A = self.linear
        if A >= 2.0:
            return thermal + (incoming - thermal) / A
        return incoming + (thermal - incoming) * self.absorbed_fraction

    def __mul__(self, other: "AttenuationFactor") -> "AttenuationFactor":
        return AttenuationFactor(self.linear * other.linear)


IDENTITY_ATTENUATION = AttenuationFactor(1.0)

FrequencyLike = Union[Frequency, float]


def as_frequency(f: FrequencyLike) -> Frequency:
    """Accept a :class:`Frequency` or a plain number in Hz."""
    if isinstance(f, Frequency):
        return f
    return Frequency.from_hz(float(f))


def _check_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be positive and finite, got {value}")
    return arr


def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def reduced_frequency(T, f: FrequencyLike):
    """Return ``hbar*omega / (k_B*T)``."""
    w = as_frequency(f).angular
    T = _check_positive("temperature", T)
    return _scalar_or_array(HBAR * w / (K_B * T))


def bose_einstein_occupation(T, f: FrequencyLike):
    """Mean thermal photon number ``1/(exp(hbar*omega/k_B*T) - 1)``.

    ``T`` may be a scalar or an array (kelvin).
    """
    x = np.asarray(reduced_frequency(T, f), dtype=float)
    # e^-x / (1 - e^-x) never overflows, unlike 1/expm1(x) for large x.
    n = np.exp(-x) / -np.expm1(-x)
    return _scalar_or_array(n)


def thermal_voltage_psd_two_sided(T, f: FrequencyLike, R):
    """Two-sided thermal voltage PSD ``2 R hbar omega n_BE`` in V^2/Hz."""
    w = as_frequency(f).angular
    R = _check_positive("resistance", R)
    return _scalar_or_array(2.0 * R * HBAR * w * np.asarray(bose_einstein_occupation(T, f)))


def thermal_current_psd(T, f: FrequencyLike, R, sidedness: Sidedness = "one"):
    """Thermal current PSD ``S_V / R^2`` in A^2/Hz, one- or two-sided."""
    R = _check_positive("resistance", R)
    two = np.asarray(thermal_voltage_psd_two_sided(T, f, R)) / R**2
    return _scalar_or_array(_apply_sidedness(two, sidedness))


def _apply_sidedness(two_sided, sidedness: Sidedness):
    if sidedness == "two":
        return two_sided
    if sidedness == "one":
        return 2.0 * two_sided
    raise DomainError(f"sidedness must be 'one' or 'two', got {sidedness!r}")


def occupation_to_current_psd(n, f: FrequencyLike, R, sidedness: Sidedness = "two"):
    """Current PSD carried by photon occupation ``n`` (two-sided: ``2 hbar omega n / R``)."""
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 0) or not np.all(np.isfinite(n_arr)):
        raise DomainError(f"occupation must be non-negative and finite, got {n}")
    R = _check_positive("resistance", R)
    w = as_frequency(f).angular
    return _scalar_or_array(_apply_sidedness(2.0 * HBAR * w * n_arr / R, sidedness))


def current_psd_to_occupation(S, f: FrequencyLike, R, sidedness: Sidedness = "two"):
    """Inverse of :func:`occupation_to_current_psd`."""
    S_arr = np.asarray(S, dtype=float)
    if np.any(S_arr < 0) or not np.all(np.isfinite(S_arr)):
        raise DomainError(f"PSD must be non-negative and finite, got {S}")
    R = _check_positive("resistance", R)
    w = as_frequency(f).angular
    if sidedness == "one":
        S_arr = S_arr / 2.0
    elif sidedness != "two":
        raise DomainError(f"sidedness must be 'one' or 'two', got {sidedness!r}")
    return _scalar_or_array(S_arr * R / (2.0 * HBAR * w))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


class TransmonFrequencies(NamedTuple):
    """Angular frequencies (rad/s) of the two lowest transmon transitions."""

    omega01: float
    omega12: float
    anharmonicity: float

    @property
    def anharmonicity_hz(self) -> float:
        return self.anharmonicity / (2.0 * math.pi)


def transmon_frequencies(omega0: FrequencyLike, C_Q: float) -> TransmonFrequencies:
    """Transition frequencies of a transmon with bare frequency ``omega0``.

    Uses the charging energy ``E_C = q^2 / 2C_Q``; the anharmonicity
    ``omega12 - omega01 = -E_C/hbar`` is always negative.
    """
    w0 = as_frequency(omega0).angular
    if not C_Q > 0:
        raise DomainError(f"capacitance must be positive, got {C_Q}")
    ec = Q_E**2 / (2.0 * C_Q) / HBAR
    w01 = w0 - ec
    if w01 <= 0:
        raise DomainError("charging energy exceeds the bare frequency; no bound qubit transition")
    return TransmonFrequencies(omega01=w01, omega12=w0 - 2.0 * ec, anharmonicity=-ec)
