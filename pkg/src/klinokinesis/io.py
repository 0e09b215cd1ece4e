"""Scenario configuration files, presets and result files.

Configs are YAML mappings. A config may name a ``preset`` and override any
of its keys; unknown keys are rejected.

Trajectory CSV columns: ``window,x,y,z,concentration,level,turn_axis``;
floats carry 9 significant digits and empty fields are written as ``""``.
Raster CSV columns: ``step`` followed by one 0/1 column per neuron role.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .agent import SimConfig, TrajectoryRecord
from .environment import field_from_dict, field_to_dict
from .network import ROLES, NetworkTopology, WindowRaster, load_network
from .ratecode import DEFAULT_TABLE, LevelTable

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "PRESETS",
    "load_config",
    "parse_config",
    "dump_config",
    "emit_trajectory",
    "emit_metrics",
    "emit_raster",
    "TRAJECTORY_HEADER",
]

TRAJECTORY_HEADER = "window,x,y,z,concentration,level,turn_axis"

LINEAR_FIELD = {"kind": "linear", "c0": 0.6, "gradient": [0.1, 0.1, -0.1], "origin": [40, 20, 30]}

PRESETS = {
    "fig6": {
        "c_set": 0.5,
        "initial_position": [14, 14, 15],
        "field": LINEAR_FIELD,
    },
    "fig7": {
        "c_set": 0.5,
        "initial_position": [40, 40, 50],
        "field": {"kind": "discretized", "inner": LINEAR_FIELD},
    },
    "gaussian": {
        "c_set": 1.24,
        "initial_position": [0, 0, 0],
        "field": {"kind": "gaussian", "amplitude": 6.7, "center": [0, 0, 0], "sigma": 6.0},
    },
}

DEFAULTS = {
    "scenario": None,
    "window_steps": 1000,
    "n_windows": 500,
    "step_length": 1.0,
    "initial_signs": [1, 1, 1],
    "initial_axis": "X",
    "output_dir": None,
    "dump_rasters": [],
    "level_table": None,
    "network_params": None,
}

REQUIRED = ("c_set", "initial_position", "field")
KNOWN = set(DEFAULTS) | set(REQUIRED) | {"preset"}


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    sim: SimConfig
    scenario: Optional[str] = None
    output_dir: Optional[str] = None
    dump_rasters: list = field(default_factory=list)
    level_table: Optional[list] = None
    network_params: Optional[str] = None

    def topology(self) -> Optional[NetworkTopology]:
        if self.network_params is None:
            return None
        topology = load_network(self.network_params)
        if topology.window_steps != self.sim.window_steps:
            raise ConfigError("network_params.window_steps does not match window_steps")
        return topology


def _as_point(key, value, length=3):
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise ConfigError(f"{key}: expected a list of {length} numbers, got {value!r}")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected numbers, got {value!r}") from None


def parse_config(data: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    unknown = set(data) - KNOWN
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(unknown))}")
    merged = dict(DEFAULTS)
    preset = data.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"preset: unknown preset {preset!r} (known: {', '.join(PRESETS)})")
        merged.update(PRESETS[preset])
        merged["scenario"] = preset
    merged.update({k: v for k, v in data.items() if k != "preset"})
    missing = [k for k in REQUIRED if k not in merged]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")

    table = DEFAULT_TABLE
    if merged["level_table"] is not None:
        try:
            table = LevelTable(tuple(merged["level_table"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"level_table: {exc}") from None

    network_params = merged["network_params"]
    if network_params is not None:
        path = Path(network_params)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise ConfigError(f"network_params: file not found: {path}")
        network_params = str(path)

    try:
        fld = field_from_dict(merged["field"], table)
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"field: {exc}") from None

    signs = merged["initial_signs"]
    if not isinstance(signs, (list, tuple)) or len(signs) != 3 or any(s not in (-1, 1) for s in signs):
        raise ConfigError(f"initial_signs: expected three values of -1 or +1, got {signs!r}")
    for key in ("window_steps", "n_windows"):
        if not isinstance(merged[key], int) or isinstance(merged[key], bool):
            raise ConfigError(f"{key}: expected an integer, got {merged[key]!r}")
    if merged["window_steps"] < 34:
        raise ConfigError("window_steps: must be >= 34")
    if merged["n_windows"] < 1:
        raise ConfigError("n_windows: must be >= 1")
    try:
        step_length = float(merged["step_length"])
        c_set = float(merged["c_set"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"numeric field: {exc}") from None
    if not step_length > 0:
        raise ConfigError("step_length: must be positive")
    dumps = merged["dump_rasters"] or []
    if not all(isinstance(w, int) and 0 <= w < merged["n_windows"] for w in dumps):
        raise ConfigError("dump_rasters: expected window indices within [0, n_windows)")

    try:
        sim = SimConfig(
            field=fld,
            c_set=c_set,
            initial_position=_as_point("initial_position", merged["initial_position"]),
            initial_signs=tuple(int(s) for s in signs),
            n_windows=merged["n_windows"],
            step_length=step_length,
            window_steps=merged["window_steps"],
            initial_axis=merged["initial_axis"],
            table=table,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ScenarioConfig(sim=sim, scenario=merged["scenario"], output_dir=merged["output_dir"],
                          dump_rasters=sorted(set(dumps)),
                          level_table=list(table.levels) if merged["level_table"] is not None else None,
                          network_params=network_params)


def load_config(path_or_preset) -> ScenarioConfig:
    """Load a YAML scenario file, or build a bare preset by name."""
    if str(path_or_preset) in PRESETS:
        return parse_config({"preset": str(path_or_preset)})
    path = Path(path_or_preset)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return parse_config(data if data is not None else {}, base_dir=path.parent)


def config_to_dict(cfg: ScenarioConfig) -> dict:
    sim = cfg.sim
    d = {
        "scenario": cfg.scenario,
        "c_set": sim.c_set,
        "initial_position": list(sim.initial_position),
        "initial_signs": list(sim.initial_signs),
        "initial_axis": sim.initial_axis,
        "n_windows": sim.n_windows,
        "step_length": sim.step_length,
        "window_steps": sim.window_steps,
        "field": field_to_dict(sim.field),
        "output_dir": cfg.output_dir,
        "dump_rasters": list(cfg.dump_rasters),
        "level_table": cfg.level_table,
        "network_params": cfg.network_params,
    }
    return d


def dump_config(cfg: ScenarioConfig, path) -> Path:
    path = Path(path)
    path.write_text(yaml.safe_dump(config_to_dict(cfg), sort_keys=False))
    return path


def _g(v: float) -> str:
    return f"{v:.9g}"


def emit_trajectory(record: TrajectoryRecord, out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [TRAJECTORY_HEADER]
    for r in record.rows:
        x, y, z = r.position
        level = '""' if r.level is None else _g(r.level)
        axis = r.turn_axis or '""'
        lines.append(f"{r.window},{_g(x)},{_g(y)},{_g(z)},{_g(r.concentration)},{level},{axis}")
    path = out_dir / "trajectory.csv"
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def emit_metrics(record: TrajectoryRecord, out_dir, scenario: Optional[str] = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"scenario": scenario, **record.metrics.to_dict()}
    path = out_dir / "metrics.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def emit_raster(raster: WindowRaster, window: int, out_dir) -> Path:
    out_dir = Path(out_dir) / "rasters"
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["step," + ",".join(raster.roles)]
    for i, col in enumerate(raster.spikes.T):
        lines.append(f"{i}," + ",".join("1" if s else "0" for s in col))
    path = out_dir / f"window_{window:05d}.csv"
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_network(topology: NetworkTopology, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(topology.to_dict(), indent=2) + "\n")
    return path


def output_dir_for(cfg: ScenarioConfig, out: Optional[str]) -> Path:
    return Path(out or cfg.output_dir or os.path.join("out", cfg.scenario or "run"))
