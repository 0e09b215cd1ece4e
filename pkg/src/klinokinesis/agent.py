"""Time-windowed sense -> decide -> move loop.

Each window the agent samples the field at its (fixed) position, quantizes
it, lets the controller run one network window on (set, current, previous)
levels, flips the sign of the axis a turn names, then moves ``step_length``
along every axis in the direction of its sign.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional, Protocol

import numpy as np

from .environment import Field
from .network import AXES, ChemotaxisNetwork, build_default_network, motor_advance, table1_oracle
from .ratecode import DEFAULT_TABLE, LevelTable, default_encoder, quantize

__all__ = [
    "SimConfig",
    "AgentState",
    "Row",
    "TrajectoryRecord",
    "Metrics",
    "Controller",
    "OracleController",
    "NetworkController",
    "make_controller",
    "initial_state",
    "step_agent",
    "run_simulation",
    "compute_metrics",
]


class Controller(Protocol):
    def decide(self, c_set: float, c_cur: Optional[float], c_prev: Optional[float]) -> Optional[str]:
        """Return the axis to reverse this window, or None."""


class NetworkController:
    """Drives the spiking network; its motor ring carries the turn cycle."""

    def __init__(self, network: ChemotaxisNetwork):
        self.network = network
        self.last_outcome = None
        self.record_next = False

    def decide(self, c_set, c_cur, c_prev):
        self.last_outcome = self.network.run_window(c_set, c_cur, c_prev, record=self.record_next)
        return self.last_outcome.turn_axis


class OracleController:
    """Rule-based turn decisions plus the reference X->Y->Z motor cycle, no spiking."""

    def __init__(self, initial_axis: str = "X"):
        self.axis = initial_axis

    def decide(self, c_set, c_cur, c_prev):
        self.axis, turned = motor_advance(self.axis, table1_oracle(c_set, c_cur, c_prev) == "change")
        return turned


@dataclass(frozen=True)
class SimConfig:
    field: Field
    c_set: float
    initial_position: tuple
    initial_signs: tuple = (1, 1, 1)
    n_windows: int = 500
    step_length: float = 1.0
    window_steps: int = 1000
    initial_axis: str = "X"
    table: LevelTable = DEFAULT_TABLE

    def __post_init__(self):
        if self.window_steps < 34:
            raise ValueError("window_steps must be >= 34")
        if self.n_windows < 1:
            raise ValueError("n_windows must be >= 1")
        if not self.step_length > 0:
            raise ValueError("step_length must be positive")
        if len(self.initial_position) != 3 or not all(math.isfinite(v) for v in self.initial_position):
            raise ValueError("initial_position must be a finite 3-point")
        if len(self.initial_signs) != 3 or any(s not in (-1, 1) for s in self.initial_signs):
            raise ValueError("initial_signs components must be -1 or +1")
        if self.initial_axis not in AXES:
            raise ValueError(f"initial_axis must be one of {AXES}")
        if quantize(self.c_set, self.table) is None:
            raise ValueError(f"c_set {self.c_set} lies below the level table")
        object.__setattr__(self, "initial_position", tuple(float(v) for v in self.initial_position))
        object.__setattr__(self, "initial_signs", tuple(int(s) for s in self.initial_signs))

    @property
    def set_level(self) -> float:
        return quantize(self.c_set, self.table)


@dataclass(frozen=True)
class AgentState:
    position: tuple
    signs: tuple
    prev_level: Optional[float]

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +/-1")


@dataclass(frozen=True)
class Row:
    window: int
    position: tuple       # where the window's concentration was sensed
    concentration: float
    level: Optional[float]
    turn_axis: Optional[str]
    signs: tuple          # after this window's decision


def _step(state: AgentState, config: SimConfig, controller, window: int):
    c = config.field.sample(state.position)
    level = quantize(c, config.table)
    axis = controller.decide(config.set_level, level, state.prev_level)
    signs = list(state.signs)
    if axis is not None:
        k = AXES.index(axis)
        signs[k] = -signs[k]
    signs = tuple(signs)
    position = tuple(p + config.step_length * s for p, s in zip(state.position, signs))
    row = Row(window, state.position, c, level, axis, signs)
    return AgentState(position, signs, level), row


def step_agent(state: AgentState, config: SimConfig, controller, window: int = 0):
    """One window: sense, decide (turn first), then move along the post-turn signs."""
    return _step(state, config, controller, window)


def initial_state(config: SimConfig) -> AgentState:
    start_level = quantize(config.field.sample(config.initial_position), config.table)
    return AgentState(config.initial_position, config.initial_signs, start_level)


def make_controller(config: SimConfig, kind: str = "network", topology=None, encoder=None,
                    backend: str = "compiled"):
    if kind == "oracle":
        return OracleController(config.initial_axis)
    if kind != "network":
        raise ValueError(f"unknown controller {kind!r}")
    topology = topology or build_default_network(config.window_steps)
    encoder = encoder or default_encoder(config.window_steps, config.table)
    return NetworkController(ChemotaxisNetwork(topology, encoder, config.initial_axis, backend))


@dataclass
class Metrics:
    first_crossing_window: Optional[int]
    steady_mean_deviation: float
    steady_max_deviation: float
    oscillation_amplitudes: list
    total_turns: int
    turns_per_axis: tuple

    def to_dict(self) -> dict:
        return {
            "first_crossing_window": self.first_crossing_window,
            "steady_mean_deviation": self.steady_mean_deviation,
            "steady_max_deviation": self.steady_max_deviation,
            "oscillation_amplitudes": list(self.oscillation_amplitudes),
            "total_turns": self.total_turns,
            "turns_per_axis": list(self.turns_per_axis),
        }


@dataclass
class TrajectoryRecord:
    config: SimConfig
    rows: list
    metrics: Optional[Metrics] = None
    rasters: dict = dc_field(default_factory=dict)   # window -> WindowRaster

    @property
    def positions(self) -> np.ndarray:
        return np.array([r.position for r in self.rows])

    @property
    def concentrations(self) -> np.ndarray:
        return np.array([r.concentration for r in self.rows])

    @property
    def turn_axes(self) -> list:
        return [r.turn_axis for r in self.rows]

    @property
    def deviations(self) -> np.ndarray:
        f, c = self.config.field, self.config.c_set
        return np.array([f.iso_deviation(r.position, c) for r in self.rows])


def quarters(n: int) -> list[slice]:
    edges = [round(k * n / 4) for k in range(5)]
    return [slice(edges[k], edges[k + 1]) for k in range(4)]


def compute_metrics(record: TrajectoryRecord) -> Metrics:
    cfg = record.config
    conc = record.concentrations
    tol = cfg.table.cell_width(cfg.c_set)
    within = np.flatnonzero(np.abs(conc - cfg.c_set) <= tol + 1e-12)
    dev = record.deviations
    q = quarters(len(conc))
    final = dev[q[3]] if len(dev[q[3]]) else dev
    amps = [float(conc[s].max() - conc[s].min()) if len(conc[s]) else 0.0 for s in q]
    axes = [a for a in record.turn_axes if a is not None]
    return Metrics(
        first_crossing_window=int(within[0]) if len(within) else None,
        steady_mean_deviation=float(final.mean()),
        steady_max_deviation=float(final.max()),
        oscillation_amplitudes=amps,
        total_turns=len(axes),
        turns_per_axis=tuple(axes.count(a) for a in AXES),
    )


def run_simulation(config: SimConfig, controller=None, record_windows=()) -> TrajectoryRecord:
    """Run ``config.n_windows`` windows; rasters are kept for ``record_windows``
    (network controller only)."""
    controller = controller or make_controller(config)
    record_windows = set(record_windows)
    if record_windows and not isinstance(controller, NetworkController):
        raise ValueError("rasters can only be recorded from the network controller")
    state = initial_state(config)
    rows, rasters = [], {}
    for w in range(config.n_windows):
        if record_windows:
            controller.record_next = w in record_windows
        state, row = _step(state, config, controller, w)
        rows.append(row)
        if w in record_windows:
            rasters[w] = controller.last_outcome.raster
    record = TrajectoryRecord(config, rows, rasters=rasters)
    record.metrics = compute_metrics(record)
    return record
