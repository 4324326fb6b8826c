"""Follow photonic link noise from the photodiode down to the qubit."""

import math

from cryolink.noise import (
    NO_AMPLIFIER,
    PhotonicFrontEnd,
    StageAttenuator,
    chain_noise,
    eom_drive_noise_psd,
    rin_noise_psd,
    shot_noise_psd,
)
from cryolink.physics import current_psd_to_occupation
from cryolink.thermal import default_fridge

front = PhotonicFrontEnd(mean_photocurrent=1e-6)
print("photodiode sources at 1 uA (A/rtHz):")
for name, psd in (("shot", shot_noise_psd(front)), ("RIN", rin_noise_psd(front)), ("EOM drive", eom_drive_noise_psd(front))):
    print(f"  {name:10s} {math.sqrt(psd):.3e}")

fridge = default_fridge()
for db in (0, 10, 20):
    atts = (StageAttenuator.at_stage(fridge, "CP", db), StageAttenuator.at_stage(fridge, "MXC", db))
    states = chain_noise(PhotonicFrontEnd(), NO_AMPLIFIER, atts)
    out = states[-1]
    n = current_psd_to_occupation(out.current_psd, out.frequency, 50.0, "one")
    print(f"{db:2d} dB at CP and MXC: {out.current_asd:.3e} A/rtHz at the qubit, occupation {n:.3e}")
