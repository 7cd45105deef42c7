import math

import numpy as np
import pytest

from horoshrink.analysis import (
    PhasePortraitSpec,
    oscillation_report,
    parameter_table,
    phase_portrait,
)
from horoshrink.errors import DomainError, PreconditionError
from horoshrink.grim import H1, solve_grim
from horoshrink.rotational import solve_bowl, solve_wing


@pytest.fixture(scope="module")
def portrait():
    seeds = [(0.2, 0.0), (1.1, 0.0), (2.0, 0.0), (5.0, 0.0), (1.0, 0.0), (0.7, 0.4)]
    return phase_portrait(PhasePortraitSpec(seed_points=seeds, n_samples=1001))


def test_loops_close_and_are_symmetric(portrait):
    loops = [o for o in portrait.orbits if o.period_s is not None]
    assert len(loops) == 4
    for o in loops:
        assert o.closure_error <= 1e-6
        assert o.symmetry_distance <= 1e-6
        # one closed loop winds around the equilibrium
        assert o.z.min() < 1.0 < o.z.max()
        assert o.theta.min() < 0.0 < o.theta.max()
    assert portrait.max_closure_error <= 1e-6


def test_equilibrium_seed_is_a_point(portrait):
    eq = portrait.orbits[4]
    assert len(eq.s) == 1 and eq.z[0] == 1.0 and eq.theta[0] == 0.0


def test_off_axis_seed_conserves_first_integral(portrait):
    o = portrait.orbits[5]
    c = np.cos(o.theta) / (o.z**2 * np.exp(2 / o.z))
    assert np.max(np.abs(c - o.first_integral_c)) < 1e-9


def test_annotations(portrait):
    assert set(portrait.nullclines) == {"z=1", "theta=0"}
    assert tuple(portrait.equilibrium) == (1.0, 0.0)


@pytest.mark.parametrize("seed", [(0.0, 0.0), (-1.0, 0.0), (1.0, math.pi / 2), (10.0, 0.0)])
def test_seed_outside_window_rejected(seed):
    with pytest.raises(DomainError):
        PhasePortraitSpec(z_range=(0.05, 6.0), seed_points=[seed])


def test_grim_amplitudes_constant():
    rep = oscillation_report(solve_grim(0.5, (0.0, 30.0), n_samples=3001))
    assert rep.alternates and rep.straddles
    assert rep.max_amplitude_spread <= 1e-6
    assert rep.fitted_decay is None and not rep.empirical


def test_bowl_amplitudes_decay():
    rep = oscillation_report(solve_bowl(0.5, 30.0, n_samples=301, picard_check=False))
    assert rep.alternates and rep.straddles
    assert rep.monotone_decay
    assert rep.fitted_decay > 0 and 0 <= rep.fit_r2 <= 1
    assert rep.empirical


@pytest.mark.parametrize("sign", [1, -1])
def test_wing_branch_report(sign):
    rep = oscillation_report(solve_wing(1.0, 2.0, 30.0, n_samples=2001), branch=sign)
    assert rep.alternates and rep.straddles


def test_h1_has_no_extrema():
    with pytest.raises(PreconditionError):
        oscillation_report(solve_grim(1.0, (0.0, 5.0), n_samples=11))
    with pytest.raises(PreconditionError):
        oscillation_report(solve_bowl(1.0, 5.0, n_samples=11))


def test_grim_table():
    grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    t = parameter_table("grim", grid)
    stars = [r[1] for r in t.rows]
    assert all(s > 1 for s in stars)
    assert all(a > b for a, b in zip(stars, stars[1:]))
    assert stars[-1] < 1.2
    assert t.injective and t.min_separation > 1e-9


def test_degenerate_rows():
    assert parameter_table("grim", [1.0]).rows == [(1.0, 1.0, None, H1)]
    assert parameter_table("bowl", [1.0]).rows == [(1.0, None, None, H1)]


def test_bowl_table():
    t = parameter_table("bowl", [0.5, 2.0])
    (_, h1, r1, _), (_, h2, r2, _) = t.rows
    assert h1 > 1 and h2 > 1 and r2 > r1


@pytest.mark.parametrize("family,grid", [("grim", [1.5]), ("grim", [0.0]), ("bowl", [-1.0]),
                                         ("grim", []), ("grim", [0.5, 0.5]), ("wing", [1.0])])
def test_invalid_grids(family, grid):
    with pytest.raises((DomainError, PreconditionError)):
        parameter_table(family, grid)
