"""Concentration levels and their per-window spike-rate codes.

Concentrations are floored onto a fixed ladder of 16 levels. The k-th
largest level fires every ``k + 2`` neural steps (0-based ``k``), so 6.7
gives 500 spikes per 1000-step window, 3.4 gives 333, 2.3 gives 250, and
so on down to 0.1 at period 17. Below the lowest level the sensor is
silent.
"""
from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lif import NeuronParams, Population, run_constant_drive

__all__ = [
    "DEFAULT_LEVELS",
    "LevelTable",
    "DEFAULT_TABLE",
    "quantize",
    "level_to_period",
    "period_to_level",
    "sensory_drive",
    "spikes_per_window",
    "periodic_train",
    "SensoryCalibration",
    "CalibrationError",
    "calibrate_sensory",
    "SensoryEncoder",
    "decode_count",
]

DEFAULT_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.8, 2.3, 3.4, 6.7)


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class LevelTable:
    levels: tuple = DEFAULT_LEVELS

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("level table is empty")
        if any(not math.isfinite(v) for v in levels):
            raise ValueError("levels must be finite")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("levels must be strictly increasing")

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __contains__(self, value):
        return value in self.levels

    def index(self, level: float) -> int:
        try:
            return self.levels.index(level)
        except ValueError:
            raise ValueError(f"{level!r} is not a table level") from None

    def cell_width(self, c: float) -> float:
        """Width of the floor cell holding ``c`` (the gap to the next level up).

        The top cell is unbounded in principle; its width is taken as the gap
        just below it.
        """
        lvl = quantize(c, self)
        if lvl is None:
            return self.levels[0]
        k = self.index(lvl)
        if k + 1 < len(self.levels):
            return self.levels[k + 1] - lvl
        return lvl - self.levels[k - 1] if k > 0 else lvl


DEFAULT_TABLE = LevelTable()


# Values this close below a level count as on it, so that field evaluations
# that land on a boundary in exact arithmetic are not floored a cell down.
BOUNDARY_RTOL = 1e-9


def quantize(c: float, table: LevelTable = DEFAULT_TABLE) -> Optional[float]:
    """Largest table level not exceeding ``c``; None below the table."""
    if not math.isfinite(c):
        raise ValueError(f"non-finite concentration {c!r}")
    k = bisect.bisect_right(table.levels, c + BOUNDARY_RTOL * max(1.0, abs(c)))
    return table.levels[k - 1] if k else None


def level_to_period(level: float, table: LevelTable = DEFAULT_TABLE) -> int:
    k = table.index(level)
    return len(table) - k + 1


def period_to_level(period: int, table: LevelTable = DEFAULT_TABLE) -> float:
    k = len(table) + 1 - period
    if not 0 <= k < len(table):
        raise ValueError(f"no level has period {period}")
    return table.levels[k]


def sensory_drive(level: Optional[float]) -> float:
    return 0.0 if level is None else float(level)


def spikes_per_window(period: int, window_steps: int) -> int:
    return window_steps // period


def periodic_train(period: Optional[int], window_steps: int) -> np.ndarray:
    """Spike on every step ``i`` with ``(i + 1) % period == 0``; phase restarts per window."""
    train = np.zeros(window_steps, dtype=bool)
    if period is not None:
        train[period - 1::period] = True
    return train


@dataclass(frozen=True)
class SensoryCalibration:
    """Outcome of `calibrate_sensory`.

    ``params`` is a neuron whose constant-drive firing matches every target
    period; it is None when no searched parameter set does, in which case
    ``synthesized`` is True and sensory trains are generated directly at the
    target periods.
    """

    table: LevelTable
    window_steps: int
    params: Optional[NeuronParams]
    synthesized: bool
    searched: int = 0
    matched_levels: int = 0   # longest run of periods, fastest first, any candidate hit


def _first_spike_and_period(train: np.ndarray):
    idx = np.flatnonzero(train)
    if len(idx) < 2:
        return None
    isi = np.diff(idx)
    if np.any(isi != isi[0]):
        return None
    return int(idx[0]), int(isi[0])


_CURRENT_DECAYS = (0.5, 0.9, 0.99)
_VOLTAGE_DECAYS = (0.0, 0.05, 0.1, 0.2, 0.5)
_REFRACTORY = (0, 1)
_THRESHOLDS_REL = np.geomspace(0.05, 20.0, 200)


def _periods_match(trains: np.ndarray, period: int) -> np.ndarray:
    """Per row: at least two spikes, every inter-spike interval equal to ``period``."""
    t = np.arange(trains.shape[-1])
    first = np.argmax(trains, axis=-1)[:, None]
    last = (trains.shape[-1] - 1 - np.argmax(trains[:, ::-1], axis=-1))[:, None]
    expected = (t >= first) & (t <= last) & ((t - first) % period == 0)
    return (trains.sum(axis=-1) >= 2) & np.all(trains == expected, axis=-1)


def calibrate_sensory(table: LevelTable = DEFAULT_TABLE, window_steps: int = 1000,
                      allow_synthesis: bool = True) -> SensoryCalibration:
    """Search for one LIF parameter set that reproduces every target period.

    Candidates are a grid over current decay, voltage decay, refractory steps
    and threshold (``i0`` equals the current decay, so the steady current is
    the drive itself). Levels are checked fastest first over a short horizon,
    all surviving candidates simulated as one population, and a candidate is
    dropped at its first miss. A candidate matching every level is re-checked
    with the scalar reference over the full window. Without a match the
    result falls back to synthesized trains, or raises when
    ``allow_synthesis`` is False.
    """
    if len(table) == 0:
        raise CalibrationError("empty level table")
    slowest = len(table) + 1
    if window_steps < 2 * slowest:
        raise CalibrationError("window too short for the slowest code")
    targets = sorted((level_to_period(lvl, table), lvl) for lvl in table)
    horizon = min(window_steps, 8 * slowest + 40)

    cand = [NeuronParams(decay_current=dc, decay_voltage=dv, gain=1.0, i0=dc,
                         threshold=float(t), refractory_steps=r)
            for dc, dv, r in itertools.product(_CURRENT_DECAYS, _VOLTAGE_DECAYS, _REFRACTORY)
            for t in _THRESHOLDS_REL * table.levels[-1]]
    alive = np.arange(len(cand))
    matched = 0
    for period, lvl in targets:
        pop = Population([cand[j] for j in alive])
        drive = np.full((1, len(alive)), lvl)
        trains = np.empty((len(alive), horizon), dtype=bool)
        for i in range(horizon):
            trains[:, i] = pop.step(drive)[0]
        alive = alive[_periods_match(trains, period)]
        if not len(alive):
            break
        matched += 1
    for j in alive:
        params = cand[j]
        full = [_first_spike_and_period(run_constant_drive(params, lvl, window_steps))
                for _, lvl in targets]
        if all(f is not None and f[1] == p for f, (p, _) in zip(full, targets)):
            return SensoryCalibration(table, window_steps, params, False, len(cand), len(table))
    if not allow_synthesis:
        raise CalibrationError(
            f"no LIF parameter set reproduces all {len(table)} periods "
            f"({len(cand)} candidates; at most {matched} matched, fastest first)")
    return SensoryCalibration(table, window_steps, None, True, len(cand), matched)


@dataclass
class SensoryEncoder:
    """Turns an optional level into a one-window spike train."""

    calibration: SensoryCalibration
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def table(self) -> LevelTable:
        return self.calibration.table

    @property
    def window_steps(self) -> int:
        return self.calibration.window_steps

    def train(self, level: Optional[float]) -> np.ndarray:
        if level not in self._cache:
            if level is None:
                tr = np.zeros(self.window_steps, dtype=bool)
            elif self.calibration.synthesized:
                tr = periodic_train(level_to_period(level, self.table), self.window_steps)
            else:
                self.table.index(level)
                tr = run_constant_drive(self.calibration.params, sensory_drive(level),
                                        self.window_steps)
            tr.setflags(write=False)
            self._cache[level] = tr
        return self._cache[level]

    def count(self, level: Optional[float]) -> int:
        return int(self.train(level).sum())


def decode_count(count: int, window_steps: int, table: LevelTable = DEFAULT_TABLE) -> Optional[float]:
    """Invert a per-window spike count back to its level (None for silence)."""
    if count == 0:
        return None
    for lvl in table:
        if spikes_per_window(level_to_period(lvl, table), window_steps) == count:
            return lvl
    raise ValueError(f"spike count {count} matches no level")


def default_encoder(window_steps: int = 1000, table: LevelTable = DEFAULT_TABLE) -> SensoryEncoder:
    return SensoryEncoder(_cached_calibration(table, window_steps))


_CALIBRATIONS: dict = {}


def _cached_calibration(table: LevelTable, window_steps: int) -> SensoryCalibration:
    key = (table.levels, window_steps)
    if key not in _CALIBRATIONS:
        _CALIBRATIONS[key] = calibrate_sensory(table, window_steps)
    return _CALIBRATIONS[key]
