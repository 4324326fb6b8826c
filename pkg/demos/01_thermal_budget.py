"""Heat budget of a 1 m SMF-28 fiber run from room temperature to the 4K plate."""

from cryolink.thermal import (
    ActiveComponent,
    conduction_load,
    default_fridge,
    smf28_fiber,
    stage_heat_report,
)

fridge = default_fridge()
fiber = smf28_fiber("RT", "4K", length=1.0)
print(f"conduction through one fiber: {conduction_load(fiber, fridge) * 1e6:.2f} uW")

# Longer fiber leaks proportionally less heat.
for length in (0.5, 1.0, 2.0):
    print(f"  length {length:.1f} m -> {conduction_load(smf28_fiber(length=length), fridge) * 1e6:.2f} uW")

# 100 fibers plus one duty-cycled photodiode per line at 4K.
links = [smf28_fiber(name=f"fiber{i}") for i in range(100)]
pds = [ActiveComponent(f"pd{i}", "4K", 1.4e-6) for i in range(100)]
print("\nstage    passive_W    active_W    headroom")
for s in stage_heat_report(fridge, links, pds, duty=0.33):
    print(f"{s.name:6s} {s.passive_W:11.3e} {s.active_W:11.3e} {s.headroom_ratio:11.3e}")
