"""Line capacity of four wiring architectures in the same fridge."""

from cryolink.architectures import BUILTIN_NAMES, builtin, compare
from cryolink.thermal import default_fridge

fridge = default_fridge()
for duty in (0.1, 0.33, 1.0):
    print(f"duty {duty}")
    for rep in compare([builtin(n) for n in BUILTIN_NAMES], fridge, duty):
        print(f"  {rep.architecture:14s} {rep.max_lines:>8} lines, limited by {rep.bottleneck}")
