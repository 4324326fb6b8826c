"""Thermal and noise budgets for cryogenic qubit XY-control links."""

__version__ = "0.1.0"

from .architectures import (
    BUILTIN_NAMES,
    Architecture,
    CapacityReport,
    builtin,
    capacity,
    compare,
    per_line_loads,
    per_qubit_power,
)
from .errors import (
    CryoLinkError,
    DomainError,
    InfeasibleError,
    TemperatureRangeError,
    UnsupportedConfigurationError,
    ValidationError,
)
from .noise import (
    NO_AMPLIFIER,
    CryoAmplifier,
    NoiseState,
    PhotonicFrontEnd,
    StageAttenuator,
    chain_noise,
    qubit_noise_closed_form,
    qubit_noise_full,
)
from .optimize import (
    AttenuationPlan,
    NoiseTarget,
    min_photocurrent,
    noise_vs_photocurrent_sweep,
    optimize_attenuation_split,
    required_total_attenuation,
    verify_plan,
)
from .physics import (
    AttenuationFactor,
    Frequency,
    PowerLevel,
    bose_einstein_occupation,
    thermal_current_psd,
    transmon_frequencies,
)
from .thermal import (
    ActiveComponent,
    FridgeModel,
    Stage,
    ThermalLink,
    conduction_load,
    default_fridge,
    default_materials,
    smf28_fiber,
    stage_heat_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
