import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horoshrink.errors import DomainError, PreconditionError
from horoshrink.geometry import (
    CurvatureSample,
    GeneratingCurve,
    SymmetryKind,
    UpperHalfSpacePoint,
    centered_derivatives,
    horosphere_curve,
    hyperbolic_from_euclidean,
    hyperbolic_inner,
    normal_dot_dz,
    residual_profile,
    shrinker_residual,
    vertical_plane_curve,
)

heights = st.floats(1e-3, 1e3)
angles = st.floats(0.0, 2 * math.pi)


def unit(theta, phi):
    return np.array([math.sin(phi) * math.cos(theta), math.sin(phi) * math.sin(theta), math.cos(phi)])


@given(angles, st.floats(0.0, math.pi), heights)
def test_normal_dot_dz_is_ne3_over_z(theta, phi, z):
    N = unit(theta, phi)
    assert abs(normal_dot_dz(N, z) - N[2] / z) <= 1e-14 * max(1.0, abs(N[2] / z))


@given(angles, st.floats(0.0, math.pi), heights)
def test_hyperbolic_normal_has_unit_length(theta, phi, z):
    N = z * unit(theta, phi)
    assert hyperbolic_inner(N, N, z) == pytest.approx(1.0, abs=1e-13)


@given(heights, st.floats(-10, 10), st.floats(-1, 1))
def test_curvature_conversion(z, H_e, n3):
    assert hyperbolic_from_euclidean(z, H_e, n3) == pytest.approx(z * H_e + n3)


def test_horizontal_plane_z1_is_a_shrinker():
    # plane z = c: H_e = 0, upward normal; H = 1 and <N, dz> = 1/c
    for c, expected in ((1.0, 0.0), (2.0, 0.5)):
        s = CurvatureSample.from_euclidean(UpperHalfSpacePoint(0, 0, c), 0.0, (0, 0, 1))
        assert s.residual == pytest.approx(expected)


def test_invalid_points_and_normals():
    with pytest.raises(DomainError):
        UpperHalfSpacePoint(0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        CurvatureSample.from_euclidean(UpperHalfSpacePoint(0, 0, 1), 0.0, (0, 0, 2))
    with pytest.raises(DomainError):
        hyperbolic_inner([1, 0, 0], [1, 0, 0], -1.0)


@given(
    st.lists(st.floats(0.01, 1.0), min_size=4, max_size=30),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3),
)
def test_centered_derivatives_exact_on_quadratics(steps, a, b, c):
    t = np.concatenate([[0.0], np.cumsum(steps)])
    f = a + b * t + c * t * t
    d1, d2 = centered_derivatives(t, f)
    ti = t[1:-1]
    scale = 1 + abs(a) + abs(b) + abs(c)
    assert np.allclose(d1, b + 2 * c * ti, atol=1e-9 * scale * (1 + t[-1]) ** 2)
    assert np.allclose(d2, 2 * c, atol=1e-7 * scale * (1 + t[-1]) ** 2)


def test_horosphere_residual_exactly_zero_in_both_symmetries():
    curve = horosphere_curve((0.0, 5.0), 101)
    for kind in SymmetryKind:
        rep = shrinker_residual(curve, kind)
        assert rep.max_residual == 0.0


def test_vertical_plane_residual_exactly_zero():
    rep = shrinker_residual(vertical_plane_curve(0.3, (0.5, 5.0), 2001))
    assert rep.max_residual == 0.0
    assert rep.symmetry == "parabolic-cylinder"


def test_circle_is_detected_as_non_solution():
    # the half-cylinder over a Euclidean semicircle is not a horo-shrinker
    t = np.linspace(0.2, math.pi - 0.2, 2001)
    curve = GeneratingCurve("grim", t, 2 * np.cos(t), 2 * np.sin(t))
    res = residual_profile(curve)
    assert np.max(np.abs(res)) > 0.1


def test_residual_preconditions():
    t = np.linspace(0, 1, 4)
    with pytest.raises(PreconditionError):
        residual_profile(GeneratingCurve("grim", t, t, t + 1))
    t = np.array([0, 1, 1, 2, 3, 4.0])
    with pytest.raises(PreconditionError):
        residual_profile(GeneratingCurve("grim", t, t, t + 1))
    t = np.linspace(0, 1, 6)
    with pytest.raises(DomainError):
        residual_profile(GeneratingCurve("grim", t, t, t - 0.5))
    with pytest.raises(DomainError):
        residual_profile(GeneratingCurve("wing", t, t - 0.5, t + 1))


def test_columns_must_match_length():
    with pytest.raises(ValueError):
        GeneratingCurve("grim", np.arange(5.0), np.arange(4.0), np.ones(5))
