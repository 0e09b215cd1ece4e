"""
One window of the 14-neuron controller
======================================

Run a single 1000-step window and look at which neurons spiked.
"""

import numpy as np

from klinokinesis.network import build_default_network, run_window, table1_oracle

net = build_default_network(1000)

for triple in [(0.5, 0.4, 0.3), (0.5, 0.6, 0.5), (0.5, 0.5, 0.5), (0.5, 0.4, 0.6), (0.5, None, None)]:
    out = run_window(net, *triple, record=True)
    fired = {r: n for r, n in out.counts.items() if n}
    print(triple, "->", table1_oracle(*triple), "| turn axis", out.turn_axis, "|", fired)

# When does the turn detector fire relative to the phase clock?
out = run_window(net, 0.5, 0.6, 0.5, record=True)
print("N_phase spike at", np.flatnonzero(out.raster.train("N_phase")))
print("N11 spike at", np.flatnonzero(out.raster.train("N11")))
print("motor spike at", {m: np.flatnonzero(out.raster.train(m)) for m in ("N_r1", "N_r2", "N_r3")})
