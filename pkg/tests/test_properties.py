"""Generative checks of the model invariants."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from cryolink.config import ScenarioConfig, dump_scenario, loads_scenario
from cryolink.architectures import Architecture, builtin, capacity
from cryolink.errors import InfeasibleError
from cryolink.noise import (
    NO_AMPLIFIER,
    CryoAmplifier,
    NoiseState,
    PhotonicFrontEnd,
    StageAttenuator,
    eom_drive_noise_psd,
    noise_at_4k,
    photodiode_noise_psd,
    propagate_occupation,
    propagate_psd,
    qubit_noise_full,
    rin_noise_psd,
    shot_noise_psd,
)
from cryolink.optimize import NoiseTarget, min_photocurrent, noise_vs_photocurrent_sweep
from cryolink.physics import (
    HBAR,
    K_B,
    AttenuationFactor,
    Frequency,
    PowerLevel,
    bose_einstein_occupation,
    current_psd_to_occupation,
    db_to_linear,
    linear_to_db,
    occupation_to_current_psd,
    thermal_current_psd,
    thermal_voltage_psd_two_sided,
)
from cryolink.thermal import (
    ActiveComponent,
    FridgeModel,
    Layer,
    Stage,
    ThermalLink,
    conduction_load_between,
    default_fridge,
    stage_heat_report,
)

MANY = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
SOME = settings(max_examples=60, deadline=None)

temperatures = st.floats(1e-3, 1e3)
freqs_hz = st.floats(1e8, 1e11)
db_values = st.floats(0.0, 60.0)
resistances = st.floats(1.0, 1e4)
P_Q = PowerLevel.from_dbm(-70)


@MANY
@given(temperatures, temperatures, freqs_hz)
def test_occupation_monotone_in_temperature(T1, T2, f):
    assume(T1 < T2 * (1 - 1e-9))
    n1, n2 = bose_einstein_occupation(T1, f), bose_einstein_occupation(T2, f)
    assert n1 <= n2
    if n2 > 1e-300:
        assert n1 < n2


@MANY
@given(temperatures, freqs_hz, freqs_hz)
def test_occupation_monotone_in_frequency(T, f1, f2):
    assume(f1 < f2 * (1 - 1e-9))
    n1, n2 = bose_einstein_occupation(T, f1), bose_einstein_occupation(T, f2)
    assert n1 >= n2
    if n1 > 1e-300:
        assert n1 > n2


@MANY
@given(st.floats(1e-9, 1e-3), freqs_hz, resistances)
def test_classical_limit(x, f, R):
    T = HBAR * 2 * math.pi * f / (K_B * x)
    S = thermal_voltage_psd_two_sided(T, f, R)
    classical = 2 * K_B * T * R
    assert abs(S - classical) / classical < 5e-4


@MANY
@given(st.floats(30.0, 600.0), freqs_hz)
def test_quantum_limit(x, f):
    T = HBAR * 2 * math.pi * f / (K_B * x)
    assert bose_einstein_occupation(T, f) < math.exp(-30) * 1.01


@MANY
@given(temperatures, freqs_hz, resistances, st.floats(1.0, 100.0))
def test_psd_linear_in_resistance(T, f, R, k):
    assert thermal_voltage_psd_two_sided(T, f, k * R) == pytest.approx(k * thermal_voltage_psd_two_sided(T, f, R), rel=1e-12)
    assert thermal_current_psd(T, f, k * R) == pytest.approx(thermal_current_psd(T, f, R) / k, rel=1e-12)


@MANY
@given(st.floats(-200.0, 200.0))
def test_db_round_trip(db):
    assert float(linear_to_db(db_to_linear(db))) == pytest.approx(db, rel=1e-12, abs=1e-12)
    assert PowerLevel.from_dbm(db).dbm == pytest.approx(db, rel=1e-12, abs=1e-12)


@MANY
@given(st.one_of(st.just(0.0), st.floats(1e-200, 1e6)), freqs_hz, resistances)
def test_occupation_psd_round_trip(n, f, R):
    S = occupation_to_current_psd(n, f, R)
    assert current_psd_to_occupation(S, f, R) == pytest.approx(n, rel=1e-12, abs=0.0)


@MANY
@given(temperatures, freqs_hz, db_values)
def test_thermal_equilibrium_fixed_point(T, f, db):
    n = bose_einstein_occupation(T, f)
    out = propagate_occupation(n, StageAttenuator("s", AttenuationFactor.from_db(db), T), f)
    assert out == pytest.approx(n, rel=1e-12, abs=0.0)


@MANY
@given(st.floats(0.0, 1e4), temperatures, freqs_hz, db_values, db_values)
def test_attenuator_composition(n, T, f, db1, db2):
    a1, a2 = AttenuationFactor.from_db(db1), AttenuationFactor.from_db(db2)
    two = propagate_occupation(propagate_occupation(n, StageAttenuator("a", a1, T), f), StageAttenuator("b", a2, T), f)
    one = propagate_occupation(n, StageAttenuator("ab", a1 * a2, T), f)
    # Rounding A1*A2 to a double shifts 1 - 1/A by up to eps; that error scales with |n_th - n|.
    n_th = bose_einstein_occupation(T, f)
    floor = 16 * np.finfo(float).eps * max(abs(n_th - n), 1e-300)
    assert two == pytest.approx(one, rel=1e-12, abs=floor)


@MANY
@given(st.floats(0.0, 1e-18), temperatures, freqs_hz, db_values)
def test_psd_and_occupation_forms_agree(S, T, f, db):
    freq = Frequency.from_hz(f)
    att = StageAttenuator("s", AttenuationFactor.from_db(db), T)
    out = propagate_psd(NoiseState(freq, S), att).current_psd
    n = current_psd_to_occupation(S, freq, 50.0, "one")
    via = occupation_to_current_psd(propagate_occupation(n, att, freq), freq, 50.0, "one")
    assert out == pytest.approx(via, rel=1e-9, abs=1e-300)


@MANY
@given(st.floats(0.0, 1e-18), temperatures, db_values, db_values)
def test_attenuation_monotonicity_sign(S, T, db_lo, db_hi):
    assume(db_lo < db_hi)
    f = Frequency.from_ghz(6.0)
    state = NoiseState(f, S)
    lo = propagate_psd(state, StageAttenuator("s", AttenuationFactor.from_db(db_lo), T)).current_psd
    hi = propagate_psd(state, StageAttenuator("s", AttenuationFactor.from_db(db_hi), T)).current_psd
    s_th = thermal_current_psd(T, f, 50.0)
    if S >= s_th:
        assert hi <= lo * (1 + 1e-12)
    else:
        assert hi >= lo * (1 - 1e-12)


@MANY
@given(st.floats(-12.0, -2.0), st.floats(0.0, 20.0), st.floats(0.0, 20.0))
def test_dominant_4k_approximation(log_i, db_cp, db_mxc):
    fridge = default_fridge()
    f = Frequency.from_ghz(6.0)
    front = PhotonicFrontEnd(mean_photocurrent=10.0**log_i)
    cp = StageAttenuator.at_stage(fridge, "CP", db_cp)
    mxc = StageAttenuator.at_stage(fridge, "MXC", db_mxc)
    s4 = noise_at_4k(front, NO_AMPLIFIER).current_psd
    n4 = current_psd_to_occupation(s4, f, 50.0, "one")
    A_cp, A_mxc = cp.attenuation.linear, mxc.attenuation.linear
    n_cp, n_mxc = bose_einstein_occupation(0.082, f), bose_einstein_occupation(0.006, f)
    assume(n_cp < 0.01 * n4 / A_cp and n_mxc < 0.01 * n4 / (A_cp * A_mxc))
    full = qubit_noise_full(front, NO_AMPLIFIER, cp, mxc).current_psd
    assert full == pytest.approx(s4 / (A_cp * A_mxc), rel=0.05)


@MANY
@given(st.floats(1e-9, 1e-3), st.floats(-180.0, -100.0), st.floats(0.5, 10.0))
def test_removing_a_source_term_reduces_noise(I, rin, v_pi):
    front = PhotonicFrontEnd(mean_photocurrent=I, laser_rin_db=rin, v_pi=v_pi)
    total = photodiode_noise_psd(front)
    parts = (shot_noise_psd(front), rin_noise_psd(front), eom_drive_noise_psd(front))
    assert total == sum(parts)
    for p in parts:
        assert p > 0
        assert total - p < total


nf_lists = st.lists(st.floats(0.0, 10.0), min_size=1, max_size=4)


@MANY
@given(st.floats(-170.0, -100.0), st.floats(0.5, 10.0), nf_lists, st.floats(-90.0, -50.0))
def test_sweep_curves_monotone_and_ordered(rin, v_pi, nfs, p_dbm):
    front = PhotonicFrontEnd(laser_rin_db=rin, v_pi=v_pi)
    nfs = sorted(nfs)
    sweep = noise_vs_photocurrent_sweep(front, nfs, PowerLevel.from_dbm(p_dbm), (1e-8, 1e-2), 25)
    a = sweep.noise_asd
    assert np.all(a[:, 1:] <= a[:, :-1] * (1 + 1e-12))
    assert np.all(a[1:, :] >= a[:-1, :] * (1 - 1e-12))


@MANY
@given(st.floats(-14.0, -10.0), st.floats(-14.0, -10.0), st.floats(0.0, 6.0))
def test_min_photocurrent_monotone_in_target(log_t1, log_t2, nf):
    assume(log_t1 != log_t2)
    tight, loose = sorted((10.0**log_t1, 10.0**log_t2))
    amp = CryoAmplifier(noise_figure_db=nf)
    front = PhotonicFrontEnd()

    def solve(t):
        try:
            return min_photocurrent(front, amp, NoiseTarget.current(t), P_Q)
        except InfeasibleError:
            return math.inf

    assert solve(tight) >= solve(loose)


@SOME
@given(
    st.lists(st.floats(1e-3, 10.0), min_size=1, max_size=2),
    st.floats(0.2, 3.0),
    st.floats(3.0, 200.0),
    st.floats(1.0, 1.5),
)
def test_conduction_load_monotone(areas_mm2, length, t_hot, scale):
    layers = [Layer(m, a * 1e-6) for m, a in zip(("stainless_304", "ptfe"), areas_mm2)]
    base = conduction_load_between(layers, length, 2.0, t_hot)
    assert base > 0
    bigger = [Layer(l.material, l.cross_section * (scale + 0.01)) for l in layers]
    assert conduction_load_between(bigger, length, 2.0, t_hot) > base
    assert conduction_load_between(layers, length * (scale + 0.01), 2.0, t_hot) < base
    assert conduction_load_between(layers, length, 2.0, min(300.0, t_hot * (scale + 0.01))) > base


stage_names = ("50K", "4K", "Still", "CP", "MXC")
links_st = st.lists(
    st.tuples(st.integers(0, 4), st.integers(1, 5), st.floats(0.0, 1e-3)).filter(lambda t: t[0] < t[1]),
    max_size=5,
)
actives_st = st.lists(st.tuples(st.integers(1, 5), st.floats(0.0, 1e-3), st.booleans()), max_size=5)


def _build(links, actives, tag):
    names = ("RT", *stage_names)
    ls = [ThermalLink(f"{tag}l{i}", "rf_coax", names[h], names[c], fixed_load=w) for i, (h, c, w) in enumerate(links)]
    acts = [ActiveComponent(f"{tag}a{i}", names[s], w, d) for i, (s, w, d) in enumerate(actives)]
    return ls, acts


@MANY
@given(links_st, actives_st, links_st, actives_st, st.floats(0.01, 1.0))
def test_heat_report_additive(l1, a1, l2, a2, duty):
    fridge = default_fridge()
    L1, A1 = _build(l1, a1, "x")
    L2, A2 = _build(l2, a2, "y")
    r1 = stage_heat_report(fridge, L1, A1, duty)
    r2 = stage_heat_report(fridge, L2, A2, duty)
    both = stage_heat_report(fridge, L1 + L2, A1 + A2, duty)
    for x, y, z in zip(r1, r2, both):
        assert z.passive_W == pytest.approx(x.passive_W + y.passive_W, rel=1e-12, abs=1e-300)
        assert z.active_W == pytest.approx(x.active_W + y.active_W, rel=1e-12, abs=1e-300)


@MANY
@given(links_st, actives_st, st.floats(0.01, 1.0))
def test_capacity_is_min_over_stages(links, actives, duty):
    L, A = _build(links, actives, "z")
    rep = capacity(Architecture("random", links=tuple(L), actives=tuple(A)), default_fridge(), duty)
    assert rep.max_lines == min((s.max_lines for s in rep.stages), default=math.inf)


@SOME
@given(
    st.lists(st.floats(0.01, 100.0), min_size=1, max_size=4, unique=True),
    st.lists(st.floats(1e-6, 10.0), min_size=4, max_size=4),
    st.floats(0.01, 1.0),
)
def test_config_round_trip(temps, cooling, duty):
    temps = sorted(temps, reverse=True)
    stages = (Stage("RT", 300.0, math.inf),) + tuple(
        Stage(f"S{i}", T, P) for i, (T, P) in enumerate(zip(temps, cooling))
    )
    arch = replace(builtin("conventional"), links=(), attenuation=(), provenance={})
    cfg = ScenarioConfig(fridge=FridgeModel(stages), architectures=(arch,), duty=duty, attenuation=None)
    text = dump_scenario(cfg)
    again = loads_scenario(text)
    assert dump_scenario(again) == text
    assert again.fridge == cfg.fridge
