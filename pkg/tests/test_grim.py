import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horoshrink.errors import DomainError, PreconditionError, SolverFailure
from horoshrink.geometry import shrinker_residual
from horoshrink.grim import (
    H1,
    first_integral,
    first_period,
    grim_field,
    half_period_s,
    jacobian,
    jacobian_fd,
    linearization_at_equilibrium,
    solve_grim,
    symmetry_check,
    z0_from_star,
    z0_star_map,
)
from horoshrink.ode import SolverConfig

from .oracles import ORACLE


@pytest.fixture(scope="module")
def orbit05():
    return solve_grim(0.5, (0.0, 30.0), n_samples=6001)


def test_first_integral_reference_values():
    assert first_integral((1.0, 0.0)) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert first_integral((0.5, 0.0)) == pytest.approx(4 * math.exp(-4.0), rel=1e-15)


def test_equilibrium_and_domain():
    assert grim_field((1.0, 0.0)) == (0.0, 0.0)
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            grim_field((bad, 0.0))
        with pytest.raises(DomainError):
            first_integral((bad, 0.0))


@given(st.floats(0.05, 20.0), st.floats(-1.5, 1.5))
def test_first_integral_is_conserved_by_the_field(z, theta):
    # dc/ds = grad c . (z', theta') vanishes identically
    dz, dth = grim_field((z, theta))
    c = first_integral((z, theta))
    dc_dz = c * (-2.0 / z + 2.0 / z**2)
    dc_dth = -math.sin(theta) / (z * z * math.exp(2.0 / z))
    assert abs(dc_dz * dz + dc_dth * dth) <= 1e-12 * (abs(c) / z + 1e-300) * (1 + z)


def test_h1_short_circuit_is_exact():
    orbit = solve_grim(1.0, (0.0, 10.0), n_samples=101)
    assert orbit.classification == H1
    assert np.all(orbit.z == 1.0) and np.all(orbit.theta == 0.0)
    assert shrinker_residual(orbit.curve()).max_residual == 0.0


def test_z0_star_matches_independent_oracle():
    assert abs(z0_star_map(0.5) - ORACLE["grim_z0_0.5_z0_star"]) < 1e-7
    assert abs(half_period_s(0.5) - ORACLE["grim_z0_0.5_half_period_s"]) < 1e-8
    star, period = first_period(0.5)
    assert abs(period - ORACLE["grim_z0_0.5_period_x"]) < 1e-8
    assert star == pytest.approx(z0_star_map(0.5), abs=1e-10)


def test_orbit_events_and_periods(orbit05):
    assert orbit05.z0 == 0.5
    assert orbit05.z0_star == pytest.approx(ORACLE["grim_z0_0.5_z0_star"], abs=1e-7)
    ex = orbit05.extrema
    kinds = [e.kind for e in ex]
    assert all(a != b for a, b in zip(kinds, kinds[1:]))
    for e in ex:
        if e.kind.endswith("max"):
            assert e.state[1] == pytest.approx(orbit05.z0_star, abs=1e-9)
        else:
            assert e.state[1] == pytest.approx(0.5, abs=1e-9)
    p = np.array(orbit05.periods)
    assert len(p) >= 3 and np.ptp(p) / p.mean() < 1e-8
    z1 = [e for e in orbit05.events if e.kind == "z-one"]
    assert len(z1) >= 2


def test_first_integral_drift(orbit05):
    assert orbit05.first_integral_drift() <= 1e-8 * (1 + orbit05.first_integral_c)


def test_start_above_one_gives_same_profile():
    star = z0_star_map(0.5)
    orbit = solve_grim(star, (0.0, 12.0), n_samples=1201)
    assert orbit.z0_star == star
    assert orbit.z0 == pytest.approx(0.5, abs=1e-9)


@settings(max_examples=15)
@given(st.floats(0.15, 0.95))
def test_round_trip_closes(z0):
    assert abs(z0_from_star(z0_star_map(z0)) - z0) < 1e-7


@settings(max_examples=10)
@given(st.floats(0.15, 0.9), st.floats(0.01, 0.05))
def test_z0_star_decreases_with_z0(z0, dz):
    # empirical: larger minima give lower maxima
    assert z0_star_map(z0) > z0_star_map(z0 + dz) > 1.0


def test_symmetric_span_symmetry():
    orbit = solve_grim(0.5, (-10.0, 10.0), n_samples=2001)
    rep = symmetry_check(orbit)
    assert rep.max_asymmetry <= 100 * orbit.config.rtol
    assert rep.reflection_field_error < 1e-14


def test_symmetry_check_needs_symmetric_grid(orbit05):
    with pytest.raises(PreconditionError):
        symmetry_check(orbit05)


def test_linearization():
    rep = linearization_at_equilibrium()
    assert np.array_equal(rep.matrix, np.array([[0.0, 1.0], [-2.0, 0.0]]))
    assert np.allclose(rep.eigenvalues, [-1j * math.sqrt(2), 1j * math.sqrt(2)], atol=1e-15)
    assert rep.kind == "center"


@given(st.floats(0.2, 5.0), st.floats(-1.4, 1.4))
def test_fd_jacobian_agrees(z, theta):
    assert np.max(np.abs(jacobian_fd((z, theta)) - jacobian((z, theta)))) < 1e-6 * (1 + 1 / z**3)


def test_domain_checks():
    with pytest.raises(DomainError):
        z0_star_map(1.5)
    with pytest.raises(DomainError):
        z0_from_star(0.5)
    with pytest.raises(DomainError):
        solve_grim(-1.0)
    with pytest.raises(PreconditionError):
        solve_grim(0.5, (1.0, 5.0))


def test_solver_failure_carries_partial_orbit():
    with pytest.raises(SolverFailure) as info:
        solve_grim(0.5, (0.0, 50.0), SolverConfig(max_steps=20), n_samples=501)
    partial = info.value.partial
    assert partial.status == "max-steps"
    assert np.isfinite(partial.z[0]) and np.isnan(partial.z[-1])
