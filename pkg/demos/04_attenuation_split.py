"""Distribute attenuation over the 4K, CP and MXC plates of a coax drive line."""

from cryolink.optimize import NoiseTarget, optimize_attenuation_split, required_total_attenuation, verify_plan
from cryolink.physics import PowerLevel
from cryolink.thermal import default_fridge

fridge = default_fridge()
target = NoiseTarget.occupation(1e-3)
P_Q = PowerLevel.from_dbm(-70)
print(f"total attenuation needed from 300 K: {required_total_attenuation(300.0, target):.1f} dB")

for objective in ("balanced", "max_heat_ratio"):
    plan = optimize_attenuation_split(fridge, ["4K", "CP", "MXC"], 1.0, P_Q, target, objective=objective)
    print(f"\n{objective}: {plan.attenuation_db} dB, total {plan.total_db:.0f} dB")
    print(f"  occupation at the qubit {verify_plan(plan, fridge, target):.3e}")
    for stage, w in zip(plan.stages, plan.dissipation_W):
        print(f"  {stage:4s} dissipates {w:.3e} W of {fridge.stage(stage).cooling_power:.1e} W")
