"""Photonic-link noise sources and their propagation down the attenuator chain.

All PSDs in this module are one-sided current densities in A^2/Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError, ValidationError
from .physics import (
    IDENTITY_ATTENUATION,
    K_B,
    Q_E,
    AttenuationFactor,
    Frequency,
    FrequencyLike,
    PowerLevel,
    as_frequency,
    bose_einstein_occupation,
    thermal_current_psd,
)
from .thermal import FridgeModel

CARRIER_6GHZ = Frequency.from_ghz(6.0)


@dataclass(frozen=True)
class PhotonicFrontEnd:
    """Laser, modulator and photodiode parameters of an RF-photonic link."""

    mean_photocurrent: float = 1.4e-6  # A
    laser_rin_db: float = -150.0  # dB/Hz
    v_pi: float = 2.0  # V
    drive_temperature: float = 300.0  # K
    drive_impedance: float = 50.0  # ohm
    pd_responsivity: float = 1.0  # A/W
    pd_bandwidth: float = 10e9  # Hz
    carrier: Frequency = CARRIER_6GHZ

    def __post_init__(self):
        if not self.mean_photocurrent >= 0:
            raise DomainError(f"mean photocurrent must be >= 0, got {self.mean_photocurrent}")
        if not self.laser_rin_db <= -100:
            raise DomainError(f"laser RIN must be <= -100 dB/Hz, got {self.laser_rin_db}")
        if not self.v_pi > 0:
            raise DomainError(f"v_pi must be positive, got {self.v_pi}")
        if not 0 < self.pd_responsivity <= 1.6:
            raise DomainError(f"responsivity must be in (0, 1.6] A/W, got {self.pd_responsivity}")
        if not (self.drive_temperature > 0 and self.drive_impedance > 0 and self.pd_bandwidth > 0):
            raise DomainError("drive temperature, drive impedance and PD bandwidth must be positive")

    @property
    def optical_power(self) -> float:
        """Optical power (W) absorbed at the photodiode."""
        return self.mean_photocurrent / self.pd_responsivity

    @property
    def rin_linear(self) -> float:
        return 10.0 ** (self.laser_rin_db / 10.0)

    @property
    def eom_coefficient(self) -> float:
        """``4 k_B T Z (pi / v_pi)^2``: EOM drive noise per unit ``I^2``."""
        return 4.0 * K_B * self.drive_temperature * self.drive_impedance * (math.pi / self.v_pi) ** 2


@dataclass(frozen=True)
class CryoAmplifier:
    """Transimpedance amplifier at 4 K.

    The default (0 dB, 50 ohm, no dissipation) is the amplifier-less link.
    """

    noise_figure_db: float = 0.0
    transimpedance_gain: float = 50.0  # ohm, frequency-flat
    dissipation: float = 0.0  # W
    ambient: float = 4.0  # K

    def __post_init__(self):
        if not self.noise_figure_db >= 0:
            raise DomainError(f"noise figure must be >= 0 dB, got {self.noise_figure_db}")
        if not (self.transimpedance_gain > 0 and self.ambient > 0):
            raise DomainError("transimpedance gain and ambient temperature must be positive")
        if not self.dissipation >= 0:
            raise DomainError(f"dissipation must be >= 0, got {self.dissipation}")

    @property
    def noise_figure_linear(self) -> float:
        return 10.0 ** (self.noise_figure_db / 10.0)


NO_AMPLIFIER = CryoAmplifier()


@dataclass(frozen=True)
class StageAttenuator:
    stage: str
    attenuation: AttenuationFactor
    physical_temperature: float  # K
    impedance: float = 50.0

    def __post_init__(self):
        if not self.physical_temperature > 0:
            raise DomainError(f"attenuator temperature must be positive, got {self.physical_temperature}")

    @classmethod
    def at_stage(cls, fridge: FridgeModel, stage: str, db: float = 0.0, temperature: float | None = None, impedance: float = 50.0) -> "StageAttenuator":
        """Attenuator thermalized to ``stage`` unless ``temperature`` overrides it."""
        T = fridge.temperature(stage) if temperature is None else temperature
        return cls(stage, AttenuationFactor.from_db(db), T, impedance)


@dataclass(frozen=True)
class NoiseState:
    frequency: Frequency
    current_psd: float  # one-sided, A^2/Hz
    reference_impedance: float = 50.0

    def __post_init__(self):
        if not self.current_psd >= 0:
            raise DomainError(f"PSD must be >= 0, got {self.current_psd}")
        if not self.reference_impedance > 0:
            raise DomainError(f"impedance must be positive, got {self.reference_impedance}")

    @property
    def current_asd(self) -> float:
        return math.sqrt(self.current_psd)


def _check_in_band(front: PhotonicFrontEnd) -> None:
    if front.carrier.hz > front.pd_bandwidth:
        raise UnsupportedConfigurationError(
            f"carrier {front.carrier.hz:g} Hz exceeds photodiode bandwidth {front.pd_bandwidth:g} Hz"
        )


def shot_noise_psd(front: PhotonicFrontEnd) -> float:
    """``2 q I`` with a flat photodiode response (|H|=1) inside its bandwidth."""
    _check_in_band(front)
    return 2.0 * Q_E * front.mean_photocurrent


def rin_noise_psd(front: PhotonicFrontEnd) -> float:
    return front.mean_photocurrent**2 * front.rin_linear


def eom_drive_noise_psd(front: PhotonicFrontEnd) -> float:
    """Johnson noise of the modulator driver transferred to the photocurrent."""
    return front.eom_coefficient * front.mean_photocurrent**2


def tia_input_noise_psd(amp: CryoAmplifier, Z: float = 50.0) -> float:
    """Input-referred TIA current noise ``(NF - 1) 4 k_B T0 / Z``."""
    if not Z > 0:
        raise DomainError(f"impedance must be positive, got {Z}")
    return (amp.noise_figure_linear - 1.0) * 4.0 * K_B * amp.ambient / Z


def photodiode_noise_psd(front: PhotonicFrontEnd) -> float:
    return shot_noise_psd(front) + rin_noise_psd(front) + eom_drive_noise_psd(front)


def propagate_occupation(n_in, att: StageAttenuator, f: FrequencyLike):
    """Photon occupation after an attenuator at temperature ``T_att``.

    ``n_out = n_in / A + (A - 1)/A * n_BE(T_att)``; a convex combination of
    the incoming and the local thermal occupation.  Evaluated as
    The arrangement used keeps the thermal fixed point exact.
    """
    n_th = bose_einstein_occupation(att.physical_temperature, f)
    return att.attenuation.mix(n_in, n_th)


def propagate_psd(state: NoiseState, att: StageAttenuator) -> NoiseState:
    if not math.isclose(state.reference_impedance, att.impedance, rel_tol=1e-12):
        raise ValidationError(
            f"impedance mismatch: state at {state.reference_impedance} ohm, attenuator at {att.impedance} ohm",
            f"attenuators.{att.stage}",
        )
    s_th = thermal_current_psd(att.physical_temperature, state.frequency, att.impedance, "one")
    s_out = att.attenuation.mix(state.current_psd, s_th)
    return NoiseState(state.frequency, s_out, state.reference_impedance)


def noise_at_4k(front: PhotonicFrontEnd, amp: CryoAmplifier, f: FrequencyLike | None = None, Z: float = 50.0) -> NoiseState:
    """Current noise at the 4 K output: ``(S_PD + S_TIA) |A/Z|^2``."""
    freq = front.carrier if f is None else as_frequency(f)
    if freq.hz > front.pd_bandwidth:
        raise UnsupportedConfigurationError(f"frequency {freq.hz:g} Hz exceeds photodiode bandwidth")
    gain = (amp.transimpedance_gain / Z) ** 2
    return NoiseState(freq, (photodiode_noise_psd(front) + tia_input_noise_psd(amp, Z)) * gain, Z)


def chain_noise(
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    attenuators: Sequence[StageAttenuator],
    f: FrequencyLike | None = None,
    Z: float = 50.0,
) -> list[NoiseState]:
    """Noise state at the 4 K output and after each attenuator, in order."""
    states = [noise_at_4k(front, amp, f, Z)]
    for att in attenuators:
        states.append(propagate_psd(states[-1], att))
    return states


def qubit_noise_full(
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    att_cp: StageAttenuator,
    att_mxc: StageAttenuator,
    f: FrequencyLike | None = None,
    Z: float = 50.0,
) -> NoiseState:
    """Qubit-referred noise through the CP and MXC attenuators."""
    return chain_noise(front, amp, (att_cp, att_mxc), f, Z)[-1]


def qubit_signal_power(
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    att_cp: StageAttenuator | None = None,
    att_mxc: StageAttenuator | None = None,
    Z: float = 50.0,
) -> PowerLevel:
    """``(I * A)^2 / (Z * A_CP * A_MXC)``."""
    a_cp = (att_cp.attenuation if att_cp else IDENTITY_ATTENUATION).linear
    a_mxc = (att_mxc.attenuation if att_mxc else IDENTITY_ATTENUATION).linear
    return PowerLevel((front.mean_photocurrent * amp.transimpedance_gain) ** 2 / (Z * a_cp * a_mxc))


def closed_form_terms(
    photocurrent,
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    signal_power: PowerLevel,
    Z: float = 50.0,
) -> dict[str, np.ndarray]:
    """Individual qubit-referred terms of the closed-form MXC noise.

    ``photocurrent`` may be an array; the signal power is held fixed, so the
    implied gain ``|A/Z|^2 / (A_CP A_MXC) = P_Q / (Z I^2)`` varies with it.
    """
    _check_in_band(front)
    I = np.asarray(photocurrent, dtype=float)
    if np.any(I <= 0):
        raise DomainError("closed-form qubit noise needs a positive photocurrent")
    scale = signal_power.watts / (Z * I**2)
    return {
        "shot": scale * 2.0 * Q_E * I,
        "rin": scale * front.rin_linear * I**2,
        "eom": scale * front.eom_coefficient * I**2,
        "tia": scale * tia_input_noise_psd(amp, Z),
    }


def qubit_noise_closed_form(
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    signal_power: PowerLevel,
    Z: float = 50.0,
) -> float:
    """MXC noise assuming the 4 K output dominates (attenuator floors ignored).

    ``S = P_Q/(Z I^2) * (2qI + (RIN + 4kTZ(pi/v_pi)^2) I^2 + (NF-1) 4kT0/Z)``
    """
    terms = closed_form_terms(front.mean_photocurrent, front, amp, signal_power, Z)
    return float(sum(terms.values()))
