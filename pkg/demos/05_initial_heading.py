"""
How much the initial heading matters
====================================

Turns only happen when the sensed level changes, and each turn reverses one
axis in rotation. Which orbit the agent settles into therefore depends on
the starting sign vector and motor axis.
"""

import itertools
from dataclasses import replace

from klinokinesis.agent import OracleController, run_simulation
from klinokinesis.io import load_config

for name in ("fig7", "fig6"):
    base = load_config(name).sim
    print(name)
    for signs in itertools.product((1, -1), repeat=3):
        row = []
        for axis in "XYZ":
            sim = replace(base, initial_signs=signs, initial_axis=axis)
            rec = run_simulation(sim, OracleController(axis))
            tail = rec.concentrations[-125:]
            row.append(f"{axis}: {tail.min():6.2f}..{tail.max():6.2f}")
        print(" ", signs, " | ".join(row))
