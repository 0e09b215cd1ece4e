"""Discrete-time leaky integrate-and-fire neuron.

Each step first updates the synaptic current, then the membrane potential::

    I[i+1] = I[i] * (1 - decay_current) + i0 * y
    V[i+1] = V[i] * (1 - decay_voltage) + gain * I[i+1]

A neuron fires when V reaches ``threshold``; V is then set to
``reset_potential`` and held there for ``refractory_steps`` steps while the
current keeps evolving.

The scalar functions (`step_current`, `step_voltage`, `step_neuron`) are the
reference semantics. `Population` applies the same arithmetic to a batch of
independent networks at once and is what the network simulator uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

__all__ = [
    "NeuronParams",
    "NeuronState",
    "DriveTerm",
    "step_current",
    "step_voltage",
    "step_neuron",
    "run_constant_drive",
    "Population",
]


@dataclass(frozen=True)
class NeuronParams:
    decay_current: float = 0.0
    decay_voltage: float = 0.0
    gain: float = 1.0
    i0: float = 1.0
    threshold: float = 1.0
    reset_potential: float = 0.0
    refractory_steps: int = 0

    def __post_init__(self):
        for name in ("decay_current", "decay_voltage", "gain", "i0", "threshold", "reset_potential"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.decay_current < 1.0:
            raise ValueError(f"decay_current must lie in [0, 1), got {self.decay_current}")
        if not 0.0 <= self.decay_voltage < 1.0:
            raise ValueError(f"decay_voltage must lie in [0, 1), got {self.decay_voltage}")
        if int(self.refractory_steps) != self.refractory_steps or self.refractory_steps < 0:
            raise ValueError(f"refractory_steps must be a nonnegative integer, got {self.refractory_steps}")
        if not self.threshold > self.reset_potential:
            raise ValueError("threshold must exceed reset_potential")

    def to_dict(self) -> dict:
        return {
            "decay_current": self.decay_current,
            "decay_voltage": self.decay_voltage,
            "gain": self.gain,
            "i0": self.i0,
            "threshold": self.threshold,
            "reset_potential": self.reset_potential,
            "refractory_steps": int(self.refractory_steps),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NeuronParams":
        return cls(**d)


@dataclass(frozen=True)
class NeuronState:
    current: float = 0.0
    voltage: float = 0.0
    refractory_remaining: int = 0
    fired: bool = False


@dataclass(frozen=True)
class DriveTerm:
    """One additive contribution to a neuron's drive ``y``.

    ``kind`` is ``"bias"`` (constant), ``"stimulus"`` (proportional to an
    external channel such as a concentration) or ``"synaptic"`` (``weight``
    times the pre-synaptic neuron's spike on the previous step).
    """

    kind: str
    weight: float
    source: Optional[str] = None

    KINDS = ("bias", "stimulus", "synaptic")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if self.kind == "bias" and self.source is not None:
            raise ValueError("bias drive takes no source")
        if self.kind != "bias" and not self.source:
            raise ValueError(f"{self.kind} drive needs a source")
        if not math.isfinite(self.weight):
            raise ValueError("weight must be finite")


def _check_finite(*values):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input {v!r}")


def step_current(state: NeuronState, params: NeuronParams, drive_y: float) -> NeuronState:
    _check_finite(state.current, drive_y)
    current = state.current * (1.0 - params.decay_current) + params.i0 * drive_y
    return replace(state, current=current)


def step_voltage(state: NeuronState, params: NeuronParams) -> NeuronState:
    _check_finite(state.voltage, state.current)
    if state.refractory_remaining > 0:
        return replace(
            state,
            voltage=params.reset_potential,
            refractory_remaining=state.refractory_remaining - 1,
            fired=False,
        )
    voltage = state.voltage * (1.0 - params.decay_voltage) + params.gain * state.current
    if voltage >= params.threshold:
        return replace(
            state,
            voltage=params.reset_potential,
            refractory_remaining=int(params.refractory_steps),
            fired=True,
        )
    return replace(state, voltage=voltage, fired=False)


def step_neuron(state: NeuronState, params: NeuronParams, drive_y: float) -> NeuronState:
    return step_voltage(step_current(state, params, drive_y), params)


def run_constant_drive(params: NeuronParams, drive_y: float, n_steps: int,
                       state: Optional[NeuronState] = None) -> np.ndarray:
    """Spike train (bool array) of a single neuron under constant drive."""
    state = state or NeuronState()
    spikes = np.zeros(n_steps, dtype=bool)
    for i in range(n_steps):
        state = step_neuron(state, params, drive_y)
        spikes[i] = state.fired
    return spikes


class Population:
    """A batch of identical networks of LIF neurons, advanced in lock-step.

    State arrays have shape ``(batch, n_neurons)``. Per-neuron parameters are
    broadcast along the batch axis. Arithmetic mirrors `step_neuron`
    operation for operation so that results agree bit for bit.
    """

    def __init__(self, params: list[NeuronParams], batch: int = 1):
        self.n = len(params)
        self.batch = batch
        self.keep_current = np.array([1.0 - p.decay_current for p in params])
        self.keep_voltage = np.array([1.0 - p.decay_voltage for p in params])
        self.gain = np.array([p.gain for p in params])
        self.i0 = np.array([p.i0 for p in params])
        self.threshold = np.array([p.threshold for p in params])
        self.reset_potential = np.array([p.reset_potential for p in params])
        self.refractory_steps = np.array([p.refractory_steps for p in params], dtype=np.int64)
        self.reset()

    def reset(self, mask: Optional[np.ndarray] = None):
        """Zero the state; with ``mask`` (per neuron), only those neurons."""
        shape = (self.batch, self.n)
        if mask is None:
            self.current = np.zeros(shape)
            self.voltage = np.zeros(shape)
            self.refractory = np.zeros(shape, dtype=np.int64)
            self.fired = np.zeros(shape, dtype=bool)
        else:
            self.current[:, mask] = 0.0
            self.voltage[:, mask] = 0.0
            self.refractory[:, mask] = 0
            self.fired[:, mask] = False

    def step(self, drive_y: np.ndarray) -> np.ndarray:
        self.current = self.current * self.keep_current + self.i0 * drive_y
        candidate = self.voltage * self.keep_voltage + self.gain * self.current
        refractory = self.refractory > 0
        fired = (candidate >= self.threshold) & ~refractory
        self.voltage = np.where(refractory | fired, self.reset_potential, candidate)
        self.refractory = np.where(
            fired, self.refractory_steps, np.where(refractory, self.refractory - 1, 0)
        )
        self.fired = fired
        return fired
