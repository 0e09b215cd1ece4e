"""Static 3D concentration fields and distances to their iso-surfaces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .ratecode import DEFAULT_TABLE, LevelTable, quantize

__all__ = [
    "LinearField",
    "GaussianField",
    "DiscretizedField",
    "Field",
    "IsoPlane",
    "IsoSphere",
    "sample",
    "iso_deviation",
    "field_from_dict",
    "field_to_dict",
    "LINEAR_PROFILE",
]


def _floats(p) -> tuple:
    return tuple(float(v) for v in _vec(p))


def _vec(p) -> np.ndarray:
    a = np.asarray(p, dtype=float)
    if a.shape != (3,) or not np.all(np.isfinite(a)):
        raise ValueError(f"expected a finite 3-vector, got {p!r}")
    return a


@dataclass(frozen=True)
class IsoPlane:
    normal: np.ndarray     # unit
    offset: float          # normal . p == offset on the plane

    def distance(self, p) -> float:
        return abs(float(np.dot(self.normal, p)) - self.offset)


@dataclass(frozen=True)
class IsoSphere:
    center: np.ndarray
    radius: float

    def distance(self, p) -> float:
        return abs(float(np.linalg.norm(np.asarray(p, dtype=float) - self.center)) - self.radius)


@dataclass(frozen=True)
class LinearField:
    """``c0 + gradient . (p - origin)``."""

    c0: float
    gradient: tuple
    origin: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "gradient", _floats(self.gradient))
        object.__setattr__(self, "origin", _floats(self.origin))
        if not any(self.gradient):
            raise ValueError("linear field needs a nonzero gradient")
        object.__setattr__(self, "c0", float(self.c0))

    def sample(self, p) -> float:
        d = _vec(p) - np.asarray(self.origin)
        return self.c0 + math.fsum(g * x for g, x in zip(self.gradient, d))

    def iso_surface(self, c_set: float) -> IsoPlane:
        g = np.asarray(self.gradient)
        norm = float(np.linalg.norm(g))
        # g . p == c_set - c0 + g . origin
        offset = (c_set - self.c0 + float(np.dot(g, self.origin))) / norm
        return IsoPlane(g / norm, offset)

    def iso_deviation(self, p, c_set: float) -> float:
        return abs(self.sample(p) - c_set) / float(np.linalg.norm(self.gradient))


@dataclass(frozen=True)
class GaussianField:
    """``amplitude * exp(-|p - center|^2 / (2 sigma^2))``."""

    amplitude: float
    center: tuple
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "center", _floats(self.center))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not self.amplitude > 0:
            raise ValueError("gaussian amplitude must be positive")
        if not self.sigma > 0:
            raise ValueError("gaussian sigma must be positive")

    def sample(self, p) -> float:
        d = _vec(p) - np.asarray(self.center)
        return self.amplitude * math.exp(-float(np.dot(d, d)) / (2.0 * self.sigma ** 2))

    def iso_radius(self, c_set: float) -> float:
        if not 0 < c_set <= self.amplitude:
            raise ValueError(f"no iso-surface at {c_set}: field spans (0, {self.amplitude}]")
        return self.sigma * math.sqrt(2.0 * math.log(self.amplitude / c_set))

    def iso_surface(self, c_set: float) -> IsoSphere:
        return IsoSphere(np.asarray(self.center), self.iso_radius(c_set))

    def iso_deviation(self, p, c_set: float) -> float:
        return self.iso_surface(c_set).distance(_vec(p))


@dataclass(frozen=True)
class DiscretizedField:
    """Floors the inner field onto the level table; sub-table values read as 0."""

    inner: Union[LinearField, GaussianField]
    table: LevelTable = field(default=DEFAULT_TABLE)

    def sample(self, p) -> float:
        lvl = quantize(self.inner.sample(p), self.table)
        return 0.0 if lvl is None else lvl

    def iso_surface(self, c_set: float):
        return self.inner.iso_surface(c_set)

    def iso_deviation(self, p, c_set: float) -> float:
        return self.inner.iso_deviation(p, c_set)


Field = Union[LinearField, GaussianField, DiscretizedField]

LINEAR_PROFILE = LinearField(c0=0.6, gradient=(0.1, 0.1, -0.1), origin=(40.0, 20.0, 30.0))


def sample(field: Field, p) -> float:
    return field.sample(p)


def iso_deviation(field: Field, p, c_set: float) -> float:
    return field.iso_deviation(p, c_set)


def field_to_dict(f: Field) -> dict:
    if isinstance(f, LinearField):
        return {"kind": "linear", "c0": f.c0, "gradient": list(f.gradient), "origin": list(f.origin)}
    if isinstance(f, GaussianField):
        return {"kind": "gaussian", "amplitude": f.amplitude, "center": list(f.center),
                "sigma": f.sigma}
    if isinstance(f, DiscretizedField):
        return {"kind": "discretized", "inner": field_to_dict(f.inner)}
    raise TypeError(f"not a field: {f!r}")


_FIELD_KEYS = {
    "linear": {"c0", "gradient", "origin"},
    "gaussian": {"amplitude", "center", "sigma"},
    "discretized": {"inner"},
}


def field_from_dict(d: dict, table: LevelTable = DEFAULT_TABLE) -> Field:
    kind = d.get("kind")
    if kind not in _FIELD_KEYS:
        raise ValueError(f"field.kind must be one of {sorted(_FIELD_KEYS)}, got {kind!r}")
    extra = set(d) - _FIELD_KEYS[kind] - {"kind"}
    if extra:
        raise ValueError(f"unknown key(s) for {kind} field: {sorted(extra)}")
    if kind == "linear":
        return LinearField(float(d["c0"]), tuple(d["gradient"]), tuple(d.get("origin", (0, 0, 0))))
    if kind == "gaussian":
        return GaussianField(float(d["amplitude"]), tuple(d["center"]), float(d["sigma"]))
    return DiscretizedField(field_from_dict(d["inner"], table), table)
