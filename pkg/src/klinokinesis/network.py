"""The 14-neuron klinokinesis controller.

Roles and wiring:

* ``N_ref``, ``N1``, ``N2`` -- rate-coded sensors for the set, current and
  previous (one window delayed) concentration.
* ``N3``..``N6`` -- rate comparators. Each gets +1 from its activating sensor
  and -1 from its inhibiting sensor. Their current does not leak, so it is
  exactly the running spike-count difference; they latch (fire once).
* ``N7 = N3 AND N5`` and ``N8 = N4 AND N6`` -- a single active input settles
  below threshold, two inputs cross it.
* ``N_phase`` -- bias-driven clock firing once per window, late.
* ``N11`` -- turn detector: weak non-leaking excitation from N7/N8 (so any
  number of their spikes stays sub-threshold), a strong kick from
  ``N_phase`` that is sub-threshold on its own, strong self-inhibition and a
  refractory period spanning the window.
* ``N_r1``..``N_r3`` -- motor ring for the X, Y, Z axes. The primed neuron
  has a persistent current of ``MOTOR_PRIME``; an N11 spike lifts all three
  by ``MOTOR_KICK`` and only the primed one crosses. Its outgoing synapses
  then hand the prime to the next neuron and cancel the kick exactly.

Synaptic spikes reach their targets on the next step.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .lif import NeuronParams, Population
from .ratecode import DEFAULT_TABLE, LevelTable, SensoryEncoder, default_encoder

__all__ = [
    "ROLES",
    "AXES",
    "Synapse",
    "NetworkTopology",
    "build_default_network",
    "load_network",
    "MotorState",
    "WindowRaster",
    "WindowOutcome",
    "BatchOutcome",
    "ChemotaxisNetwork",
    "run_window",
    "run_windows",
    "table1_oracle",
    "motor_advance",
    "MIN_WINDOW_STEPS",
]

ROLES = ("N_ref", "N1", "N2", "N3", "N4", "N5", "N6", "N7", "N8",
         "N_phase", "N11", "N_r1", "N_r2", "N_r3")
SENSORY = ("N_ref", "N1", "N2")
MOTOR = ("N_r1", "N_r2", "N_r3")
AXES = ("X", "Y", "Z")
MIN_WINDOW_STEPS = 34

# Comparators: exact count-difference integrators that latch.
COMPARATOR = dict(decay_current=0.0, decay_voltage=0.1, gain=1.0, i0=1.0, threshold=0.5)
# AND gates: voltage settles at the input current; 1 input -> 1.0, 2 inputs -> 2.0.
AND_GATE = dict(decay_current=0.0, decay_voltage=0.5, gain=0.5, i0=1.0, threshold=1.4,
                refractory_steps=8)
# Leaky clock; threshold is fitted per window length in build_default_network.
PHASE_CLOCK = dict(decay_current=0.001, decay_voltage=0.001, gain=1.0, i0=1.0)
PHASE_FRACTION = 0.9
PHASE_TAIL = 10
# Turn detector; evidence and kick weights are scaled by window length.
TURN = dict(decay_current=0.0, decay_voltage=0.9, gain=0.9, i0=1.0, threshold=1.0)
TURN_EVIDENCE = 0.5   # total budget of N7+N8 excitation over a full window
TURN_MARGIN = 0.25    # kick falls this many per-window evidence units short of threshold
TURN_SELF_INHIBITION = -4.0
# Motor ring (integers keep the persistent currents exact).
MOTOR_NEURON = dict(decay_current=0.0, decay_voltage=0.5, gain=0.5, i0=1.0, threshold=2.5,
                    refractory_steps=2)
MOTOR_PRIME = 2.0
MOTOR_KICK = 1.0
# Placeholder params for the sensory roles when their trains are synthesized.
SENSOR_PLACEHOLDER = dict(decay_current=0.5, decay_voltage=0.0, gain=1.0, i0=0.5, threshold=1.0)


@dataclass(frozen=True)
class Synapse:
    pre: str
    post: str
    weight: float


@dataclass(frozen=True)
class NetworkTopology:
    params: dict          # role -> NeuronParams
    synapses: tuple       # of Synapse
    window_steps: int
    bias: dict = field(default_factory=dict)   # role -> constant drive y
    motor_prime: float = MOTOR_PRIME

    def __post_init__(self):
        if set(self.params) != set(ROLES):
            raise ValueError("topology must define params for exactly the 14 roles")
        for s in self.synapses:
            if s.pre not in ROLES or s.post not in ROLES:
                raise ValueError(f"synapse references unknown neuron: {s}")
        if self.window_steps < MIN_WINDOW_STEPS:
            raise ValueError(f"window_steps must be >= {MIN_WINDOW_STEPS}")

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((len(ROLES), len(ROLES)))
        for s in self.synapses:
            w[ROLES.index(s.pre), ROLES.index(s.post)] += s.weight
        return w

    def bias_vector(self) -> np.ndarray:
        return np.array([self.bias.get(r, 0.0) for r in ROLES])

    def with_params(self, role: str, **changes) -> "NetworkTopology":
        params = dict(self.params)
        params[role] = replace(params[role], **changes)
        return replace(self, params=params)

    def with_synapses(self, synapses: Sequence[Synapse]) -> "NetworkTopology":
        return replace(self, synapses=tuple(synapses))

    def to_dict(self) -> dict:
        return {
            "window_steps": self.window_steps,
            "motor_prime": self.motor_prime,
            "params": {r: self.params[r].to_dict() for r in ROLES},
            "bias": {r: v for r, v in self.bias.items()},
            "synapses": [[s.pre, s.post, s.weight] for s in self.synapses],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkTopology":
        return cls(
            params={r: NeuronParams.from_dict(p) for r, p in d["params"].items()},
            synapses=tuple(Synapse(*s) for s in d["synapses"]),
            window_steps=int(d["window_steps"]),
            bias=dict(d.get("bias", {})),
            motor_prime=float(d.get("motor_prime", MOTOR_PRIME)),
        )


def phase_offset(window_steps: int) -> int:
    return min(int(round(PHASE_FRACTION * window_steps)), window_steps - PHASE_TAIL)


def _fit_phase_threshold(params: NeuronParams, offset: int) -> float:
    # Free-running clock voltage; threshold sits between the values at offset-1 and offset.
    pop = Population([replace(params, threshold=1e300)])
    drive = np.ones((1, 1))
    v = []
    for _ in range(offset + 1):
        pop.step(drive)
        v.append(pop.voltage[0, 0])
    return 0.5 * (v[offset - 1] + v[offset])


def _circuit_synapses(window_steps: int) -> list[Synapse]:
    evidence = TURN_EVIDENCE / window_steps
    kick = TURN["threshold"] - TURN_MARGIN / window_steps
    syn = [
        Synapse("N_ref", "N3", 1.0), Synapse("N1", "N3", -1.0),
        Synapse("N1", "N4", 1.0), Synapse("N_ref", "N4", -1.0),
        Synapse("N2", "N5", 1.0), Synapse("N1", "N5", -1.0),
        Synapse("N1", "N6", 1.0), Synapse("N2", "N6", -1.0),
        Synapse("N3", "N7", 1.0), Synapse("N5", "N7", 1.0),
        Synapse("N4", "N8", 1.0), Synapse("N6", "N8", 1.0),
        Synapse("N7", "N11", evidence), Synapse("N8", "N11", evidence),
        Synapse("N_phase", "N11", kick), Synapse("N11", "N11", TURN_SELF_INHIBITION),
    ]
    for m in MOTOR:
        syn.append(Synapse("N11", m, MOTOR_KICK))
    for i, m in enumerate(MOTOR):
        nxt, prv = MOTOR[(i + 1) % 3], MOTOR[(i - 1) % 3]
        syn.append(Synapse(m, m, -(MOTOR_PRIME + MOTOR_KICK)))
        syn.append(Synapse(m, nxt, MOTOR_PRIME - MOTOR_KICK))
        syn.append(Synapse(m, prv, -MOTOR_KICK))
    return syn


def build_default_network(window_steps: int = 1000,
                          sensor_params: Optional[NeuronParams] = None) -> NetworkTopology:
    if window_steps < MIN_WINDOW_STEPS:
        raise ValueError(f"window_steps must be >= {MIN_WINDOW_STEPS} "
                         f"(two periods of the slowest code), got {window_steps}")
    sensor = sensor_params or NeuronParams(**SENSOR_PLACEHOLDER)
    latch = window_steps
    phase = NeuronParams(**PHASE_CLOCK, threshold=1.0, refractory_steps=latch)
    phase = replace(phase, threshold=_fit_phase_threshold(phase, phase_offset(window_steps)))
    comparator = NeuronParams(**COMPARATOR, refractory_steps=latch)
    params = {
        "N_ref": sensor, "N1": sensor, "N2": sensor,
        "N3": comparator, "N4": comparator, "N5": comparator, "N6": comparator,
        "N7": NeuronParams(**AND_GATE), "N8": NeuronParams(**AND_GATE),
        "N_phase": phase,
        "N11": NeuronParams(**TURN, refractory_steps=latch),
        "N_r1": NeuronParams(**MOTOR_NEURON), "N_r2": NeuronParams(**MOTOR_NEURON),
        "N_r3": NeuronParams(**MOTOR_NEURON),
    }
    return NetworkTopology(params=params, synapses=tuple(_circuit_synapses(window_steps)),
                           window_steps=window_steps, bias={"N_phase": 1.0})


def load_network(path) -> NetworkTopology:
    with open(path) as fh:
        return NetworkTopology.from_dict(json.load(fh))


def default_network_file():
    return resources.files("klinokinesis").joinpath("data/default_network.json")


# -- motor ring state ---------------------------------------------------------

@dataclass(frozen=True)
class MotorState:
    """Persistent currents of the three motor neurons (carried across windows)."""

    currents: tuple = (MOTOR_PRIME, 0.0, 0.0)

    @classmethod
    def primed(cls, axis: str = "X", prime: float = MOTOR_PRIME) -> "MotorState":
        c = [0.0, 0.0, 0.0]
        c[AXES.index(axis)] = prime
        return cls(tuple(c))

    @property
    def axis(self) -> str:
        return AXES[int(np.argmax(self.currents))]


def motor_advance(axis: str, n11_spiked: bool) -> tuple[str, Optional[str]]:
    """Reference motor cycle: on a turn emit the current axis and rotate X->Y->Z->X."""
    if not n11_spiked:
        return axis, None
    return AXES[(AXES.index(axis) + 1) % 3], axis


def table1_oracle(c_set: Optional[float], c_cur: Optional[float],
                  c_prev: Optional[float]) -> str:
    """Non-spiking reference controller: "change" or "continue".

    None (a silent sensor) ranks below every level.
    """
    def key(c):
        return -np.inf if c is None else c

    s, c, p = key(c_set), key(c_cur), key(c_prev)
    if (s > c and p > c) or (s < c and p < c):
        return "change"
    return "continue"


# -- simulation -----------------------------------------------------------------

@dataclass
class WindowRaster:
    spikes: np.ndarray        # (n_neurons, window_steps) bool
    roles: tuple = ROLES

    @property
    def counts(self) -> dict:
        return {r: int(n) for r, n in zip(self.roles, self.spikes.sum(axis=1))}

    def train(self, role: str) -> np.ndarray:
        return self.spikes[self.roles.index(role)]


@dataclass
class WindowOutcome:
    raster: Optional[WindowRaster]
    counts: dict
    turn_axis: Optional[str]
    n11_spike_count: int
    motor_state: MotorState


@dataclass
class BatchOutcome:
    counts: np.ndarray          # (batch, 14) spike counts
    motor_currents: np.ndarray  # (batch, 3)
    rasters: Optional[np.ndarray] = None   # (batch, 14, window_steps)

    def count(self, role: str) -> np.ndarray:
        return self.counts[:, ROLES.index(role)]

    @property
    def turn_axes(self) -> list:
        motor = self.counts[:, [ROLES.index(m) for m in MOTOR]]
        out = []
        for row in motor:
            active = np.flatnonzero(row)
            out.append(AXES[active[0]] if len(active) == 1 and row[active[0]] == 1 else None)
        return out


class _Engine:
    """Runs windows for a batch; ``backend`` is "compiled" (numba) or "numpy"."""

    def __init__(self, topology: NetworkTopology, batch: int, backend: str = "compiled"):
        if backend not in ("compiled", "numpy"):
            raise ValueError(f"unknown backend {backend!r}")
        self.topology = topology
        self.backend = backend
        self.pop = Population([topology.params[r] for r in ROLES], batch=batch)
        self.w = topology.weight_matrix()
        self.bias = topology.bias_vector()
        self.sensory_idx = [ROLES.index(r) for r in SENSORY]
        self.motor_idx = [ROLES.index(r) for r in MOTOR]

    def run(self, sensory_trains: np.ndarray, motor_currents: np.ndarray,
            record: bool = False, inject: Optional[dict] = None) -> BatchOutcome:
        """``sensory_trains``: (batch, 3, window_steps); ``inject``: role -> bool (window_steps,).

        Injected trains override a neuron's own spikes; used to probe sub-networks.
        """
        steps = self.topology.window_steps
        pop = self.pop
        forced_idx = list(self.sensory_idx)
        forced = [sensory_trains[:, k, :] for k in range(3)]
        for role, train in (inject or {}).items():
            forced_idx.append(ROLES.index(role))
            forced.append(np.broadcast_to(np.asarray(train, dtype=bool), (pop.batch, steps)))
        forced = np.ascontiguousarray(np.stack(forced, axis=1))   # (batch, n_forced, steps)
        init = np.zeros((pop.batch, pop.n))
        init[:, self.motor_idx] = motor_currents
        if self.backend == "compiled":
            from ._kernel import run_window_kernel

            counts, current, rasters = run_window_kernel(
                pop.keep_current, pop.keep_voltage, pop.gain, pop.i0, pop.threshold,
                pop.reset_potential, pop.refractory_steps, self.w, self.bias,
                np.array(forced_idx, dtype=np.int64), forced, init, record)
            return BatchOutcome(counts, current[:, self.motor_idx].copy(),
                                rasters if record else None)
        pop.reset()
        pop.current[:] = init
        counts = np.zeros((pop.batch, pop.n), dtype=np.int64)
        rasters = np.zeros((pop.batch, pop.n, steps), dtype=bool) if record else None
        spikes = np.zeros((pop.batch, pop.n), dtype=bool)
        for i in range(steps):
            drive = self.bias + spikes @ self.w
            spikes = pop.step(drive)
            spikes[:, forced_idx] = forced[:, :, i]
            counts += spikes
            if record:
                rasters[:, :, i] = spikes
        return BatchOutcome(counts, pop.current[:, self.motor_idx].copy(), rasters)


class ChemotaxisNetwork:
    """A stateful network instance: topology, sensory encoder and the motor ring."""

    def __init__(self, topology: Optional[NetworkTopology] = None,
                 encoder: Optional[SensoryEncoder] = None,
                 initial_axis: str = "X", backend: str = "compiled"):
        self.topology = topology or build_default_network()
        self.encoder = encoder or default_encoder(self.topology.window_steps)
        if self.encoder.window_steps != self.topology.window_steps:
            raise ValueError("encoder and topology disagree on window_steps")
        self.motor_state = MotorState.primed(initial_axis, self.topology.motor_prime)
        self._engine = _Engine(self.topology, batch=1, backend=backend)

    @property
    def table(self) -> LevelTable:
        return self.encoder.table

    def run_window(self, c_set, c_cur, c_prev, record: bool = False,
                   inject: Optional[dict] = None) -> WindowOutcome:
        outcome = run_window(self.topology, c_set, c_cur, c_prev, self.motor_state,
                             encoder=self.encoder, record=record, inject=inject,
                             _engine=self._engine)
        self.motor_state = outcome.motor_state
        return outcome


def _trains(encoder: SensoryEncoder, c_set, c_cur, c_prev) -> np.ndarray:
    return np.stack([encoder.train(c_set), encoder.train(c_cur), encoder.train(c_prev)])


def run_window(topology: NetworkTopology, c_set, c_cur, c_prev,
               motor_state: Optional[MotorState] = None,
               encoder: Optional[SensoryEncoder] = None, record: bool = False,
               inject: Optional[dict] = None, backend: str = "compiled",
               _engine: Optional[_Engine] = None) -> WindowOutcome:
    """Simulate one time window and read out the turn decision."""
    encoder = encoder or default_encoder(topology.window_steps)
    motor_state = motor_state or MotorState.primed("X", topology.motor_prime)
    engine = _engine or _Engine(topology, batch=1, backend=backend)
    out = engine.run(_trains(encoder, c_set, c_cur, c_prev)[None],
                     np.array([motor_state.currents]), record=record, inject=inject)
    counts = {r: int(n) for r, n in zip(ROLES, out.counts[0])}
    raster = WindowRaster(out.rasters[0]) if record else None
    return WindowOutcome(
        raster=raster,
        counts=counts,
        turn_axis=out.turn_axes[0],
        n11_spike_count=counts["N11"],
        motor_state=MotorState(tuple(float(c) for c in out.motor_currents[0])),
    )


def run_windows(topology: NetworkTopology, triples: Sequence[tuple],
                motor_states: Optional[Sequence[MotorState]] = None,
                encoder: Optional[SensoryEncoder] = None, record: bool = False,
                inject: Optional[dict] = None, backend: str = "compiled",
                chunk: int = 4096) -> BatchOutcome:
    """Simulate many independent windows at once; ``triples`` are (c_set, c_cur, c_prev)."""
    encoder = encoder or default_encoder(topology.window_steps)
    n = len(triples)
    if motor_states is None:
        motor = np.tile(MotorState.primed("X", topology.motor_prime).currents, (n, 1))
    else:
        motor = np.array([m.currents for m in motor_states], dtype=float)
    parts = []
    for lo in range(0, n, chunk):
        block = triples[lo:lo + chunk]
        trains = np.stack([_trains(encoder, *t) for t in block])
        parts.append(_Engine(topology, batch=len(block), backend=backend).run(
            trains, motor[lo:lo + chunk], record=record, inject=inject))
    return BatchOutcome(
        counts=np.concatenate([p.counts for p in parts]),
        motor_currents=np.concatenate([p.motor_currents for p in parts]),
        rasters=np.concatenate([p.rasters for p in parts]) if record else None,
    )
