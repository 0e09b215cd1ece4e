"""Spiking-neural-network klinokinesis for contour tracking in 3D concentration fields."""
from .agent import OracleController, SimConfig, make_controller, run_simulation, step_agent
from .environment import LINEAR_PROFILE, DiscretizedField, GaussianField, LinearField
from .lif import NeuronParams, NeuronState, step_current, step_neuron, step_voltage
from .network import (ChemotaxisNetwork, build_default_network, motor_advance, run_window,
                      run_windows, table1_oracle)
from .ratecode import DEFAULT_TABLE, LevelTable, calibrate_sensory, level_to_period, quantize

__version__ = "0.1.0"
