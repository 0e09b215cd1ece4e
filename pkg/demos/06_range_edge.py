"""
Tracking near the top of the level table
========================================

Above 3.4 the next level is 6.7, so the controller is nearly blind there.
Compare the steady deviation for a set point in the middle of the table and
one at its edge.
"""

from dataclasses import replace

from klinokinesis.agent import run_simulation
from klinokinesis.io import load_config

base = replace(load_config("fig6").sim, initial_position=(40.0, 20.0, 30.0))
for c_set in (0.6, 1.0, 1.8, 3.4):
    m = run_simulation(replace(base, c_set=c_set)).metrics
    print(f"c_set {c_set}: final-quarter mean deviation {m.steady_mean_deviation:9.3f}")
