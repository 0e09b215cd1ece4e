import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from klinokinesis.environment import (LINEAR_PROFILE, DiscretizedField, GaussianField, LinearField,
                                      field_from_dict, field_to_dict, iso_deviation, sample)
from klinokinesis.ratecode import DEFAULT_LEVELS

coord = st.floats(-100, 100, allow_nan=False)
point = st.tuples(coord, coord, coord)
GAUSS = GaussianField(6.7, (1.0, -2.0, 0.5), 6.0)


def test_linear_samples():
    assert sample(LINEAR_PROFILE, (40, 20, 30)) == pytest.approx(0.6)
    assert sample(LINEAR_PROFILE, (14, 14, 15)) == pytest.approx(-1.1)
    assert sample(LINEAR_PROFILE, (40, 40, 50)) == pytest.approx(0.6)


def test_gaussian_center_is_amplitude():
    assert sample(GAUSS, GAUSS.center) == 6.7


def test_plane_deviation_example():
    assert iso_deviation(LINEAR_PROFILE, (40, 20, 30), 0.5) == pytest.approx(0.1 / (0.1 * math.sqrt(3)))
    assert iso_deviation(LINEAR_PROFILE, (40, 20, 30), 0.5) == pytest.approx(0.5774, abs=1e-4)


def test_deviation_zero_on_surface():
    plane = LINEAR_PROFILE.iso_surface(0.5)
    p = plane.normal * plane.offset
    assert iso_deviation(LINEAR_PROFILE, p, 0.5) == pytest.approx(0.0, abs=1e-12)
    r = GAUSS.iso_radius(1.24)
    q = np.asarray(GAUSS.center) + r * np.array([0.0, 0.6, 0.8])
    assert iso_deviation(GAUSS, q, 1.24) == pytest.approx(0.0, abs=1e-12)


def test_gaussian_at_amplitude_radius_zero():
    assert GAUSS.iso_radius(6.7) == 0.0
    p = (4.0, 2.0, 0.5)
    assert iso_deviation(GAUSS, p, 6.7) == pytest.approx(np.linalg.norm(np.subtract(p, GAUSS.center)))


def test_gaussian_unattainable_set_point():
    with pytest.raises(ValueError):
        iso_deviation(GAUSS, (0, 0, 0), 7.0)


@given(point, point)
def test_linear_is_affine(p, d):
    f = LinearField(0.3, (0.2, -0.5, 0.7), (1, 2, 3))
    lhs = sample(f, np.add(p, d)) - sample(f, p)
    rhs = float(np.dot(f.gradient, d))
    scale = max(1.0, sum(abs(g * x) for g, x in zip(f.gradient, d)))
    assert abs(lhs - rhs) <= 1e-12 * scale + 1e-12 * max(1.0, abs(sample(f, p)))


@given(point, st.floats(0, 2 * math.pi), st.floats(0, math.pi))
def test_gaussian_radial_symmetry(p, theta, phi):
    d = np.subtract(p, GAUSS.center)
    r = float(np.linalg.norm(d))
    q = np.asarray(GAUSS.center) + r * np.array([math.sin(phi) * math.cos(theta),
                                                    math.sin(phi) * math.sin(theta), math.cos(phi)])
    assert sample(GAUSS, q) == pytest.approx(sample(GAUSS, p), rel=1e-12, abs=1e-300)


@given(point)
def test_discretized_is_level_or_zero(p):
    f = DiscretizedField(LINEAR_PROFILE)
    v = sample(f, p)
    assert v == 0.0 or v in DEFAULT_LEVELS
    cont = sample(LINEAR_PROFILE, p)
    assert v <= cont + 1e-9 or (v == 0.0 and cont < 0.1)


def test_discretized_delegates_deviation():
    f = DiscretizedField(LINEAR_PROFILE)
    p = (41.3, 18.2, 33.0)
    assert iso_deviation(f, p, 0.5) == iso_deviation(LINEAR_PROFILE, p, 0.5)


def _brute_plane(field, p, c_set, n=400, span=60.0):
    plane = field.iso_surface(c_set)
    nrm = plane.normal
    u = np.cross(nrm, [1.0, 0.0, 0.0] if abs(nrm[0]) < 0.9 else [0.0, 1.0, 0.0])
    u /= np.linalg.norm(u)
    v = np.cross(nrm, u)
    foot = np.asarray(p) - (np.dot(nrm, p) - plane.offset) * nrm
    # grid centred on a coarse in-plane guess offset from the true foot point
    centre = foot + 3.3 * u - 2.1 * v
    s = np.linspace(-span / 2, span / 2, n)
    a, b = np.meshgrid(s, s)
    pts = centre + a[..., None] * u + b[..., None] * v
    return float(np.min(np.linalg.norm(pts - np.asarray(p), axis=-1)))


def _brute_sphere(field, p, c_set, n=600):
    r = field.iso_radius(c_set)
    theta = np.linspace(0, 2 * math.pi, n)
    phi = np.linspace(0, math.pi, n // 2)
    t, f = np.meshgrid(theta, phi)
    pts = np.asarray(field.center) + r * np.stack(
        [np.sin(f) * np.cos(t), np.sin(f) * np.sin(t), np.cos(f)], axis=-1)
    return float(np.min(np.linalg.norm(pts - np.asarray(p), axis=-1)))


def test_deviation_matches_brute_force_oracle():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = rng.uniform([20, 0, 10], [60, 40, 50])
        want = _brute_plane(LINEAR_PROFILE, p, 0.5)
        got = iso_deviation(LINEAR_PROFILE, p, 0.5)
        assert got == pytest.approx(want, rel=0.01, abs=0.05)
    for _ in range(20):
        p = np.asarray(GAUSS.center) + rng.uniform(-20, 20, 3)
        want = _brute_sphere(GAUSS, p, 1.24)
        got = iso_deviation(GAUSS, p, 1.24)
        assert got == pytest.approx(want, rel=0.01, abs=0.05)


@pytest.mark.parametrize("f", [LINEAR_PROFILE, GAUSS, DiscretizedField(LINEAR_PROFILE),
                               DiscretizedField(GAUSS)])
def test_field_dict_round_trip(f):
    assert field_from_dict(field_to_dict(f)) == f


@pytest.mark.parametrize("d", [{"kind": "cubic"}, {"kind": "linear", "c0": 0, "gradient": [1, 0, 0], "slope": 1},
                               {"kind": "gaussian", "amplitude": -1, "center": [0, 0, 0], "sigma": 1},
                               {"kind": "linear", "c0": 0, "gradient": [0, 0, 0]}])
def test_field_dict_validation(d):
    with pytest.raises(ValueError):
        field_from_dict(d)


def test_non_finite_point_rejected():
    with pytest.raises(ValueError):
        sample(LINEAR_PROFILE, (math.nan, 0, 0))
