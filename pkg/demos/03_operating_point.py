"""Smallest photocurrent meeting a qubit noise target, with and without a cryo amplifier."""

import numpy as np

from cryolink.noise import NO_AMPLIFIER, CryoAmplifier, PhotonicFrontEnd
from cryolink.optimize import NoiseTarget, min_photocurrent, noise_vs_photocurrent_sweep
from cryolink.physics import PowerLevel

P_Q = PowerLevel.from_dbm(-70)
front = PhotonicFrontEnd()
target = NoiseTarget.current(0.7e-12)

for amp in (NO_AMPLIFIER, CryoAmplifier(noise_figure_db=1.0), CryoAmplifier(noise_figure_db=3.0)):
    I = min_photocurrent(front, amp, target, P_Q)
    print(f"NF {amp.noise_figure_db:.0f} dB: minimum photocurrent {I * 1e6:.3f} uA")

sweep = noise_vs_photocurrent_sweep(front, [0.0, 3.0], P_Q, (1e-7, 1e-4), 7)
print("\nphotocurrent_A   NF0_A/rtHz   NF3_A/rtHz")
for i, I in enumerate(sweep.photocurrent):
    print(f"{I:12.3e} {sweep.noise_asd[0, i]:12.3e} {sweep.noise_asd[1, i]:12.3e}")
print(f"\nlowest noise in the sweep: {np.min(sweep.noise_asd[0]):.3e} A/rtHz")
