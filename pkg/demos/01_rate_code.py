"""
Rate coding of concentration levels
===================================

Each of the 16 concentration levels is sent as a periodic spike train whose
period grows as the level falls. Counting spikes in one window recovers the
level.
"""

import numpy as np

from klinokinesis.ratecode import DEFAULT_TABLE, calibrate_sensory, decode_count, default_encoder, quantize

# Search for a single LIF sensor that hits every period. It does not exist for
# the default table, so trains are synthesized directly.
cal = calibrate_sensory(DEFAULT_TABLE, 1000)
print("searched", cal.searched, "parameter sets; synthesized trains:", cal.synthesized,
      "; longest run of periods any candidate hit:", cal.matched_levels, "of 16")

enc = default_encoder(1000)
for level in reversed(DEFAULT_TABLE.levels):
    n = enc.count(level)
    print(f"level {level:4.1f}: {n:3d} spikes -> decoded {decode_count(n, 1000)}")

# Everything between 3.4 and 6.7 reads as 3.4.
for c in np.linspace(3.4, 6.6, 5):
    print(f"c = {c:.2f} -> level {quantize(c)}, {enc.count(quantize(c))} spikes")
