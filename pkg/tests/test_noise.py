import math
from dataclasses import replace

import pytest

from cryolink.errors import DomainError, UnsupportedConfigurationError, ValidationError
from cryolink.noise import (
    NO_AMPLIFIER,
    CryoAmplifier,
    NoiseState,
    PhotonicFrontEnd,
    StageAttenuator,
    chain_noise,
    eom_drive_noise_psd,
    noise_at_4k,
    photodiode_noise_psd,
    propagate_occupation,
    propagate_psd,
    qubit_noise_closed_form,
    qubit_noise_full,
    qubit_signal_power,
    rin_noise_psd,
    shot_noise_psd,
    tia_input_noise_psd,
)
from cryolink.physics import (
    K_B,
    Q_E,
    AttenuationFactor,
    Frequency,
    PowerLevel,
    bose_einstein_occupation,
    current_psd_to_occupation,
    occupation_to_current_psd,
    thermal_current_psd,
)
from cryolink.thermal import default_fridge

F6 = Frequency.from_ghz(6.0)
ONE_UA = PhotonicFrontEnd(mean_photocurrent=1e-6)


def att(db, T, stage="X"):
    return StageAttenuator(stage, AttenuationFactor.from_db(db), T)


def test_shot_noise_at_1ua():
    assert math.sqrt(shot_noise_psd(ONE_UA)) == pytest.approx(0.566e-12, rel=0.01)
    assert shot_noise_psd(replace(ONE_UA, mean_photocurrent=0.0)) == 0.0
    four = math.sqrt(shot_noise_psd(replace(ONE_UA, mean_photocurrent=4e-6)))
    assert four == pytest.approx(2 * math.sqrt(shot_noise_psd(ONE_UA)), rel=1e-14)


def test_shot_noise_outside_bandwidth():
    with pytest.raises(UnsupportedConfigurationError):
        shot_noise_psd(replace(ONE_UA, pd_bandwidth=5e9))


def test_rin_noise():
    assert math.sqrt(rin_noise_psd(ONE_UA)) == pytest.approx(31.6e-15, rel=0.01)
    quieter = replace(ONE_UA, laser_rin_db=-160.0)
    assert math.sqrt(rin_noise_psd(ONE_UA)) / math.sqrt(rin_noise_psd(quieter)) == pytest.approx(math.sqrt(10), rel=1e-12)
    assert rin_noise_psd(replace(ONE_UA, mean_photocurrent=0.0)) == 0.0


def test_eom_drive_noise():
    oracle = 4 * K_B * 300 * 50 * (math.pi / 2) ** 2 * 1e-12
    assert eom_drive_noise_psd(ONE_UA) == pytest.approx(oracle, rel=1e-12)
    assert math.sqrt(eom_drive_noise_psd(ONE_UA)) == pytest.approx(1.43e-15, rel=0.02)
    doubled = replace(ONE_UA, v_pi=4.0)
    assert eom_drive_noise_psd(doubled) == pytest.approx(eom_drive_noise_psd(ONE_UA) / 4, rel=1e-14)


def test_front_end_validation():
    for bad in (dict(mean_photocurrent=-1e-6), dict(v_pi=0.0), dict(pd_responsivity=2.0), dict(laser_rin_db=-50.0)):
        with pytest.raises(DomainError):
            PhotonicFrontEnd(**bad)
    assert ONE_UA.optical_power == 1e-6


def test_tia_noise():
    assert tia_input_noise_psd(NO_AMPLIFIER) == 0.0
    nf1 = CryoAmplifier(noise_figure_db=1.0)
    assert tia_input_noise_psd(nf1) == pytest.approx((10**0.1 - 1) * 4 * K_B * 4 / 50, rel=1e-12)
    assert tia_input_noise_psd(nf1) == pytest.approx(1.15e-24, rel=0.01)
    nf2 = CryoAmplifier(noise_figure_db=10 * math.log10(2))
    assert tia_input_noise_psd(nf2) == pytest.approx(4 * K_B * 4 / 50, rel=1e-12)
    with pytest.raises(DomainError):
        CryoAmplifier(noise_figure_db=-1.0)


def test_photodiode_noise_sum():
    total = photodiode_noise_psd(ONE_UA)
    parts = shot_noise_psd(ONE_UA) + rin_noise_psd(ONE_UA) + eom_drive_noise_psd(ONE_UA)
    assert total == parts
    assert total == pytest.approx(shot_noise_psd(ONE_UA), rel=0.005)
    assert photodiode_noise_psd(replace(ONE_UA, mean_photocurrent=0.0)) == 0.0
    assert photodiode_noise_psd(PhotonicFrontEnd()) == pytest.approx(4.5e-25, rel=0.02)


def test_propagate_occupation_examples():
    assert propagate_occupation(5.0, att(0, 4.0), F6) == 5.0
    n_th = bose_einstein_occupation(4.0, F6)
    assert propagate_occupation(n_th, att(20, 4.0), F6) == pytest.approx(n_th, rel=1e-12)
    n_in = bose_einstein_occupation(300.0, F6)
    out = propagate_occupation(n_in, att(20, 4.0), F6)
    assert out == pytest.approx(n_in / 100 + 0.99 * n_th, rel=1e-12)
    assert out == pytest.approx(23.7, rel=0.005)


def test_propagate_psd_matches_occupation_form():
    s_in = 3e-22
    state = NoiseState(F6, s_in)
    a = att(13, 0.082)
    out = propagate_psd(state, a).current_psd
    n_in = current_psd_to_occupation(s_in, F6, 50.0, "one")
    via_n = occupation_to_current_psd(propagate_occupation(n_in, a, F6), F6, 50.0, "one")
    assert out == pytest.approx(via_n, rel=1e-9)
    assert propagate_psd(state, att(0, 4.0)).current_psd == s_in


def test_propagate_psd_impedance_mismatch():
    state = NoiseState(F6, 1e-24, reference_impedance=75.0)
    with pytest.raises(ValidationError):
        propagate_psd(state, att(10, 4.0))


def test_no_attenuator_chain_keeps_4k_noise():
    fridge = default_fridge()
    front = PhotonicFrontEnd()
    cp = StageAttenuator.at_stage(fridge, "CP", 0)
    mxc = StageAttenuator.at_stage(fridge, "MXC", 0)
    states = chain_noise(front, NO_AMPLIFIER, (cp, mxc))
    assert states[-1].current_psd == states[0].current_psd
    assert states[-1].current_asd == pytest.approx(0.68e-12, rel=0.02)


def test_zero_photocurrent_chain_is_silent():
    fridge = default_fridge()
    front = PhotonicFrontEnd(mean_photocurrent=0.0)
    out = qubit_noise_full(front, NO_AMPLIFIER, StageAttenuator.at_stage(fridge, "CP"), StageAttenuator.at_stage(fridge, "MXC"))
    assert out.current_psd == 0.0


def test_20db_chain_matches_direct_recursion():
    fridge = default_fridge()
    front = PhotonicFrontEnd()
    s4 = noise_at_4k(front, NO_AMPLIFIER).current_psd
    out = qubit_noise_full(
        front,
        NO_AMPLIFIER,
        StageAttenuator.at_stage(fridge, "CP", 20),
        StageAttenuator.at_stage(fridge, "MXC", 20),
    ).current_psd
    th_cp = thermal_current_psd(0.082, F6, 50.0, "one")
    th_mxc = thermal_current_psd(0.006, F6, 50.0, "one")
    expected = s4 / 1e4 + 0.99 * th_cp / 100 + 0.99 * th_mxc
    assert out == pytest.approx(expected, rel=0.01)


def test_attenuator_defaults_to_stage_temperature():
    fridge = default_fridge()
    a = StageAttenuator.at_stage(fridge, "CP", 10)
    assert a.physical_temperature == 0.082
    assert StageAttenuator.at_stage(fridge, "CP", 10, temperature=0.1).physical_temperature == 0.1


def test_signal_power():
    front = PhotonicFrontEnd()
    p = qubit_signal_power(front, NO_AMPLIFIER)
    assert p.watts == pytest.approx(9.8e-11, rel=1e-12)
    assert p.dbm == pytest.approx(-70.1, abs=0.05)
    assert qubit_signal_power(replace(front, mean_photocurrent=0.0), NO_AMPLIFIER).watts == 0.0
    fridge = default_fridge()
    p100 = qubit_signal_power(
        front, NO_AMPLIFIER, StageAttenuator.at_stage(fridge, "CP", 10), StageAttenuator.at_stage(fridge, "MXC", 10)
    )
    assert p100.watts == pytest.approx(p.watts / 100, rel=1e-12)


def test_closed_form_operating_point():
    S = qubit_noise_closed_form(PhotonicFrontEnd(), NO_AMPLIFIER, PowerLevel.from_dbm(-70))
    assert math.sqrt(S) == pytest.approx(0.68e-12, rel=0.02)


def test_closed_form_pure_shot_limit():
    front = PhotonicFrontEnd(laser_rin_db=-400.0, v_pi=1e12)
    P = PowerLevel.from_dbm(-70)
    I = front.mean_photocurrent
    assert qubit_noise_closed_form(front, NO_AMPLIFIER, P) == pytest.approx(P.watts / (50 * I**2) * 2 * Q_E * I, rel=1e-12)


def test_closed_form_matches_full_when_floors_negligible():
    front = PhotonicFrontEnd()
    amp = CryoAmplifier(noise_figure_db=1.0, transimpedance_gain=500.0)
    fridge = default_fridge()
    cp, mxc = StageAttenuator.at_stage(fridge, "CP", 10), StageAttenuator.at_stage(fridge, "MXC", 10)
    full = qubit_noise_full(front, amp, cp, mxc).current_psd
    closed = qubit_noise_closed_form(front, amp, qubit_signal_power(front, amp, cp, mxc))
    assert closed == pytest.approx(full, rel=0.05)
    assert closed <= full


def test_closed_form_requires_positive_current():
    with pytest.raises(DomainError):
        qubit_noise_closed_form(PhotonicFrontEnd(mean_photocurrent=0.0), NO_AMPLIFIER, PowerLevel(1e-10))
