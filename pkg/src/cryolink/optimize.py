"""Attenuation budgeting and photocurrent operating-point search."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleError, UnsupportedConfigurationError, ValidationError
from .noise import (
    CARRIER_6GHZ,
    NO_AMPLIFIER,
    CryoAmplifier,
    PhotonicFrontEnd,
    StageAttenuator,
    closed_form_terms,
)
from .physics import Frequency, PowerLevel, bose_einstein_occupation, db_to_linear
from .thermal import FridgeModel

OBJECTIVES = ("balanced", "max_heat_ratio", "total_heat_ratio")
MAX_TOTAL_DB = 120.0
_MAX_CANDIDATES = 20_000_000


@dataclass(frozen=True)
class NoiseTarget:
    """Qubit noise limit, as a photon occupation or a current ASD (A/sqrt(Hz))."""

    max_occupation: float | None = None
    max_current_asd: float | None = None
    frequency: Frequency = CARRIER_6GHZ

    def __post_init__(self):
        given = [v for v in (self.max_occupation, self.max_current_asd) if v is not None]
        if len(given) != 1:
            raise ValidationError("exactly one of max_occupation / max_current_asd must be set", "target")
        if not given[0] > 0:
            raise ValidationError(f"target must be positive, got {given[0]}", "target")

    @classmethod
    def occupation(cls, n: float = 1e-3, frequency: Frequency = CARRIER_6GHZ) -> "NoiseTarget":
        return cls(max_occupation=n, frequency=frequency)

    @classmethod
    def current(cls, asd: float = 2e-12, frequency: Frequency = CARRIER_6GHZ) -> "NoiseTarget":
        return cls(max_current_asd=asd, frequency=frequency)


def required_total_attenuation(T_source: float, target: NoiseTarget) -> float:
    """dB needed to bring a ``T_source`` thermal line down to the target occupation."""
    if target.max_occupation is None:
        raise ValidationError("required_total_attenuation needs an occupation target", "target")
    n_src = bose_einstein_occupation(T_source, target.frequency)
    if n_src <= target.max_occupation:
        return 0.0
    return 10.0 * math.log10(n_src / target.max_occupation)


@dataclass(frozen=True)
class AttenuationPlan:
    stages: tuple[str, ...]
    attenuation_db: tuple[float, ...]
    achieved_occupation: float
    dissipation_W: tuple[float, ...]
    heat_ratio: tuple[float, ...]
    objective: str
    objective_value: float
    target_occupation: float

    @property
    def total_db(self) -> float:
        return float(sum(self.attenuation_db))

    @property
    def max_heat_ratio(self) -> float:
        return max(self.heat_ratio) if self.heat_ratio else 0.0

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.stages, self.attenuation_db))

    def attenuators(self, fridge: FridgeModel) -> list[StageAttenuator]:
        return [StageAttenuator.at_stage(fridge, s, d) for s, d in zip(self.stages, self.attenuation_db)]


def chain_occupation(n_source, attenuation_db, stage_occupations):
    """Occupation after a hot-to-cold series of attenuators.

    ``attenuation_db`` has shape ``(..., k)``; ``stage_occupations`` holds the
    k thermal occupations.
    """
    A = db_to_linear(attenuation_db)
    n = np.broadcast_to(np.asarray(n_source, dtype=float), A.shape[:-1]).copy()
    for i, n_th in enumerate(stage_occupations):
        a = A[..., i]
        n = np.where(a >= 2.0, n_th + (n - n_th) / a, n + (n_th - n) * ((a - 1.0) / a))
    return n


def attenuator_dissipation(attenuation_db, signal_power: float, duty: float):
    """Heat (W) absorbed by each attenuator while delivering ``signal_power`` to the qubit.

    The attenuator at stage i absorbs ``(A_i - 1)`` times the power it passes
    downstream, and the downstream power is ``P_Q`` times the colder
    attenuations.
    """
    A = db_to_linear(attenuation_db)
    # Product of colder attenuations (exclusive), cumulated from the cold end.
    colder = np.cumprod(A[..., ::-1], axis=-1)[..., ::-1]
    downstream = np.concatenate([colder[..., 1:], np.ones_like(A[..., :1])], axis=-1)
    return (A - 1.0) * downstream * signal_power * duty


def _quantize(x):
    """Collapse values equal to ~1e-10 relative so ties are order-independent."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(x > 0, np.round(np.log(np.where(x > 0, x, 1.0)) * 1e10), -np.inf)


def optimize_attenuation_split(
    fridge: FridgeModel,
    stages_allowed: Sequence[str],
    grid_step: float,
    signal_power: PowerLevel,
    target: NoiseTarget,
    duty: float = 0.33,
    source_temperature: float = 300.0,
    objective: str = "balanced",
    max_total_db: float = MAX_TOTAL_DB,
) -> AttenuationPlan:
    """Grid search for per-stage attenuation meeting an occupation target.

    Objectives:

    * ``balanced`` minimizes the largest single-stage attenuation, then the
      worst heat ratio;
    * ``max_heat_ratio`` minimizes the worst (attenuator heat / stage cooling);
    * ``total_heat_ratio`` minimizes the sum of those ratios.

    Remaining ties go to the plan with less attenuation at colder stages.
    Every objective is nondecreasing in each stage's attenuation, so for each
    grid point of the warmer stages only the smallest feasible grid value at
    the coldest stage needs evaluating; the result equals the full
    enumeration.
    """
    if objective not in OBJECTIVES:
        raise ValidationError(f"objective must be one of {OBJECTIVES}, got {objective!r}", "optimize.objective")
    if not 0.5 <= grid_step <= 5.0:
        raise ValidationError(f"grid step must be in [0.5, 5] dB, got {grid_step}", "optimize.grid_step")
    if not stages_allowed:
        raise ValidationError("at least one stage must be allowed", "optimize.stages")
    if not 0 < duty <= 1:
        raise DomainError(f"duty must be in (0, 1], got {duty}")
    if target.max_occupation is None:
        raise ValidationError("attenuation split needs an occupation target", "target")
    if not 0 < max_total_db <= MAX_TOTAL_DB:
        raise ValidationError(f"max total must be in (0, {MAX_TOTAL_DB}] dB", "optimize.max_total_db")

    order = sorted({fridge.index(s) for s in stages_allowed})
    if len(order) != len(stages_allowed):
        raise ValidationError("stages must be distinct", "optimize.stages")
    stages = tuple(fridge.stages[i].name for i in order)
    cooling = np.array([fridge.stages[i].cooling_power for i in order])
    f = target.frequency
    n_th = np.array([bose_einstein_occupation(fridge.stages[i].temperature, f) for i in order])
    n_src = bose_einstein_occupation(source_temperature, f)
    t = target.max_occupation
    k = len(stages)

    if n_src <= t:
        zeros = np.zeros(k)
        return _make_plan(stages, zeros, n_src, cooling, signal_power, duty, objective, t)

    if n_th[-1] >= t:
        raise InfeasibleError(
            f"thermal occupation {n_th[-1]:.3g} of the coldest allowed stage {stages[-1]!r} "
            f"is above the target {t:.3g}",
            limiting=stages[-1],
        )

    n_steps = int(math.floor(max_total_db / grid_step + 1e-9))
    grid = np.arange(n_steps + 1) * grid_step
    n_prefix = (n_steps + 1) ** (k - 1)
    if n_prefix > _MAX_CANDIDATES:
        raise UnsupportedConfigurationError(
            f"{k} stages at {grid_step} dB would need {n_prefix:.3g} evaluations; use a coarser grid"
        )

    if k > 1:
        idx = np.stack(np.meshgrid(*[np.arange(n_steps + 1)] * (k - 1), indexing="ij"), axis=-1).reshape(-1, k - 1)
        idx = idx[idx.sum(axis=1) <= n_steps]
        n_before = chain_occupation(n_src, grid[idx], n_th[:-1])
    else:
        idx = np.zeros((1, 0), dtype=int)
        n_before = np.array([n_src])

    # Smallest coldest-stage attenuation that meets the target.
    with np.errstate(divide="ignore", invalid="ignore"):
        a_min = np.where(n_before <= t, 1.0, (n_before - n_th[-1]) / (t - n_th[-1]))
    last = np.ceil(10.0 * np.log10(a_min) / grid_step - 1e-9).astype(int)
    last = np.maximum(last, 0)
    for _ in range(3):
        dbs = np.concatenate([grid[idx], (last * grid_step)[:, None]], axis=1)
        n_out = chain_occupation(n_src, dbs, n_th)
        short = n_out > t * (1 + 1e-12)
        if not short.any():
            break
        last = last + short
    ok = (idx.sum(axis=1) + last <= n_steps) & ~short
    if not ok.any():
        raise InfeasibleError(
            f"target {t:.3g} not reachable within {max_total_db} dB total", limiting=stages[-1]
        )
    idx_all = np.concatenate([idx, last[:, None]], axis=1)[ok]
    dbs = dbs[ok]
    n_out = n_out[ok]

    ratio = attenuator_dissipation(dbs, signal_power.watts, duty) / cooling
    worst = ratio.max(axis=1)
    if objective == "balanced":
        primary = [idx_all.max(axis=1), _quantize(worst)]
    elif objective == "max_heat_ratio":
        primary = [_quantize(worst)]
    else:
        primary = [_quantize(ratio.sum(axis=1))]
    # np.lexsort uses the last key as the primary one.
    colder_first = [idx_all[:, i] for i in range(k)]
    best = np.lexsort(colder_first + primary[::-1])[0]
    return _make_plan(stages, dbs[best], float(n_out[best]), cooling, signal_power, duty, objective, t)


def _make_plan(stages, dbs, n_out, cooling, signal_power, duty, objective, t) -> AttenuationPlan:
    dbs = np.asarray(dbs, dtype=float)
    diss = attenuator_dissipation(dbs, signal_power.watts, duty)
    ratio = diss / cooling
    if objective == "balanced":
        value = float(dbs.max()) if dbs.size else 0.0
    elif objective == "max_heat_ratio":
        value = float(ratio.max())
    else:
        value = float(ratio.sum())
    return AttenuationPlan(
        stages=tuple(stages),
        attenuation_db=tuple(float(d) for d in dbs),
        achieved_occupation=float(n_out),
        dissipation_W=tuple(float(d) for d in diss),
        heat_ratio=tuple(float(r) for r in ratio),
        objective=objective,
        objective_value=value,
        target_occupation=t,
    )


def verify_plan(plan: AttenuationPlan, fridge: FridgeModel, target: NoiseTarget, source_temperature: float = 300.0) -> float:
    """Re-run the occupation chain on ``plan`` one attenuator at a time."""
    from .noise import propagate_occupation

    n = bose_einstein_occupation(source_temperature, target.frequency)
    for att in plan.attenuators(fridge):
        n = propagate_occupation(n, att, target.frequency)
    return float(n)


def min_photocurrent(
    front: PhotonicFrontEnd,
    amp: CryoAmplifier,
    target: NoiseTarget,
    signal_power: PowerLevel,
    Z: float = 50.0,
    rtol: float = 1e-4,
    bounds: tuple[float, float] = (1e-12, 1.0),
) -> float:
    """Smallest mean photocurrent whose closed-form qubit noise meets ``target``.

    Log-space bisection with a fixed iteration count, so the returned value
    is a monotone function of the target.
    """
    if target.max_current_asd is None:
        raise ValidationError("min_photocurrent needs a current-ASD target", "target")
    limit = target.max_current_asd**2
    lo, hi = bounds

    def psd(I):
        return float(sum(closed_form_terms(I, front, amp, signal_power, Z).values()))

    if psd(hi) > limit:
        terms = {name: float(v) for name, v in closed_form_terms(hi, front, amp, signal_power, Z).items()}
        dominant = max(terms, key=terms.get)
        raise InfeasibleError(
            f"noise {math.sqrt(psd(hi)):.3g} A/rtHz at {hi:g} A still exceeds the target "
            f"{target.max_current_asd:.3g} A/rtHz; dominant term: {dominant}",
            limiting=dominant,
        )
    if psd(lo) <= limit:
        return lo
    n_iter = math.ceil(math.log2(math.log(hi / lo) / math.log1p(rtol)))
    log_lo, log_hi = math.log(lo), math.log(hi)
    for _ in range(n_iter):
        mid = 0.5 * (log_lo + log_hi)
        if psd(math.exp(mid)) <= limit:
            log_hi = mid
        else:
            log_lo = mid
    return math.exp(log_hi)


@dataclass(frozen=True)
class PhotocurrentSweep:
    photocurrent: np.ndarray  # (points,)
    nf_db: tuple[float, ...]
    noise_asd: np.ndarray  # (len(nf_db), points), A/sqrt(Hz)

    def rows(self):
        """``(photocurrent_A, nf_dB, noise_asd)`` ordered by NF, then current."""
        for j, nf in enumerate(self.nf_db):
            for i, I in enumerate(self.photocurrent):
                yield float(I), float(nf), float(self.noise_asd[j, i])


def noise_vs_photocurrent_sweep(
    front: PhotonicFrontEnd,
    nf_values: Sequence[float],
    signal_power: PowerLevel,
    I_range: tuple[float, float],
    points: int,
    amp: CryoAmplifier = NO_AMPLIFIER,
    Z: float = 50.0,
) -> PhotocurrentSweep:
    """Closed-form qubit noise ASD over a log-spaced photocurrent grid, per NF."""
    lo, hi = I_range
    if not (0 < lo < hi):
        raise DomainError(f"photocurrent range must satisfy 0 < lo < hi, got {I_range}")
    if points < 2:
        raise DomainError(f"need at least 2 points, got {points}")
    I = np.geomspace(lo, hi, points)
    rows = []
    for nf in nf_values:
        terms = closed_form_terms(I, front, replace(amp, noise_figure_db=float(nf)), signal_power, Z)
        rows.append(np.sqrt(sum(terms.values())))
    return PhotocurrentSweep(I, tuple(float(v) for v in nf_values), np.array(rows))
