"""Horo-shrinkers invariant under parabolic translations (grim reapers).

The profile (x(s), 0, z(s)), with s the hyperbolic arc length, solves

    x' = z cos(theta),  z' = z sin(theta),  theta' = 2 cos(theta) (1 - z) / z,

and the reduced system in (z, theta) has the first integral
cos(theta) z**-2 exp(-2/z). Orbits through (z0, 0) with 0 < z0 < 1 close up
around the centre (1, 0), so the profiles are periodic graphs over the
x-axis oscillating between z0 and a height z0* > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError, SolverFailure
from .geometry import GeneratingCurve
from .ode import Event, EventSpec, SolverConfig, integrate

H1 = "horosphere-H1"
VERTICAL = "vertical-plane"
PERIODIC = "periodic-graph"


class PhasePoint(NamedTuple):
    z: float
    theta: float


def _check_height(z):
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")


def grim_field(p) -> tuple[float, float]:
    """Right-hand side (z', theta') of the reduced autonomous system."""
    z, theta = p
    _check_height(z)
    return z * math.sin(theta), 2.0 * math.cos(theta) * (1.0 - z) / z


def first_integral(p) -> float:
    """cos(theta) / (z**2 exp(2/z)); constant along every orbit."""
    z, theta = p
    _check_height(z)
    return math.cos(theta) / (z * z * math.exp(2.0 / z))


def first_integral_array(z: np.ndarray, theta: np.ndarray) -> np.ndarray:
    return np.cos(theta) / (z * z * np.exp(2.0 / z))


def _rhs(s, y):
    # y = (x, z, theta)
    z, theta = y[1], y[2]
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    c, sn = math.cos(theta), math.sin(theta)
    return np.array([z * c, z * sn, 2.0 * c * (1.0 - z) / z])


def _reduced_rhs(s, y):
    z, theta = y
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    return np.array(grim_field((z, theta)))


def _events() -> list[EventSpec]:
    return [
        EventSpec("theta-zero", lambda s, y: y[2]),
        EventSpec("z-one", lambda s, y: y[1] - 1.0),
        # z' = z sin(theta) changes sign with sin(theta)
        EventSpec("z-extremum", lambda s, y: math.sin(y[2])),
    ]


@dataclass
class GrimOrbit:
    """Sampled grim-reaper profile with its invariants and events.

    Samples are uniform in the hyperbolic arc length ``s`` and taken from
    the dense output; events carry refined locations and states
    ``(x, z, theta)``.
    """

    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    z_start: float
    z0: float | None
    z0_star: float | None
    period_x: float | None
    periods: list[float]
    first_integral_c: float
    classification: str
    events: list[Event] = field(default_factory=list)
    config: SolverConfig = field(default_factory=SolverConfig)
    status: str = "completed"

    @property
    def extrema(self) -> list[Event]:
        return [e for e in self.events if e.kind.startswith("z-extremum")]

    def first_integral_drift(self) -> float:
        c = first_integral_array(self.z, self.theta)
        return float(np.max(np.abs(c - self.first_integral_c)))

    def curve(self) -> GeneratingCurve:
        return GeneratingCurve(
            "grim",
            self.s,
            self.x,
            self.z,
            self.theta,
            meta={
                "params": {"z0": self.z_start},
                "first_integral_c": self.first_integral_c,
                "classification": self.classification,
            },
        )


def _sample_grid(s_span, n_samples):
    return np.linspace(s_span[0], s_span[1], n_samples)


def _fill(samples, grid, traj):
    idx = np.searchsorted(grid, traj.s_eval)
    samples[idx] = traj.y_eval


def solve_grim(
    z0: float,
    s_span: tuple[float, float] = (0.0, 50.0),
    config: SolverConfig | None = None,
    n_samples: int = 20001,
) -> GrimOrbit:
    """Integrate the grim-reaper profile through (x, z, theta) = (0, z0, 0).

    ``s_span`` may straddle 0, in which case both halves are integrated
    from the start point. ``z0`` above 1 starts at a maximum instead of a
    minimum; the orbit is the same up to a translation in x.
    """
    config = config or SolverConfig()
    _check_height(z0)
    s_lo, s_hi = float(s_span[0]), float(s_span[1])
    if not s_lo <= 0.0 <= s_hi or s_lo == s_hi:
        raise PreconditionError("s_span must contain the start point s=0")
    c = first_integral((z0, 0.0))
    grid = _sample_grid((s_lo, s_hi), n_samples)

    if z0 == 1.0:
        n = len(grid)
        return GrimOrbit(
            s=grid, x=grid.copy(), z=np.ones(n), theta=np.zeros(n), z_start=1.0,
            z0=1.0, z0_star=1.0, period_x=None, periods=[], first_integral_c=c,
            classification=H1, config=config,
        )

    y0 = np.array([0.0, z0, 0.0])
    events, statuses = [], []
    samples = np.full((len(grid), 3), np.nan)
    for lo, hi in ((0.0, s_lo), (0.0, s_hi)):
        if lo == hi:
            continue
        mask = (grid >= min(lo, hi)) & (grid <= max(lo, hi))
        traj = integrate(_rhs, y0, (lo, hi), config, _events(), t_eval=grid[mask])
        _fill(samples, grid, traj)
        events.extend(traj.events)
        statuses.append(traj.status)
    events.sort(key=lambda e: e.s)

    status = next((st for st in statuses if st != "completed"), "completed")
    forward = [e for e in events if e.s > 0]
    crossings = [(0.0, y0)] + [(e.s, e.state) for e in forward if e.kind == "theta-zero"]
    if z0 < 1.0:
        z_min, z_max = z0, next((st[1] for _, st in crossings if st[1] > 1.0), None)
    else:
        z_max, z_min = z0, next((st[1] for _, st in crossings if st[1] < 1.0), None)
    minima_x = [st[0] for _, st in crossings if st[1] < 1.0]
    periods = [b - a for a, b in zip(minima_x, minima_x[1:])]

    orbit = GrimOrbit(
        s=grid,
        x=samples[:, 0],
        z=samples[:, 1],
        theta=samples[:, 2],
        z_start=float(z0),
        z0=None if z_min is None else float(z_min),
        z0_star=None if z_max is None else float(z_max),
        period_x=periods[0] if periods else None,
        periods=periods,
        first_integral_c=c,
        classification=PERIODIC,
        events=events,
        config=config,
        status=status,
    )
    if status != "completed":
        raise SolverFailure(f"grim integration ended early: {status}", partial=orbit)
    return orbit


def _next_theta_zero(z_start: float, config: SolverConfig, s_max: float = 1e4):
    """First return of the reduced orbit through (z_start, 0) to theta = 0."""
    ev = EventSpec("theta-zero", lambda s, y: y[1], terminal=True)
    cfg = config if config.h_max is not None else SolverConfig(
        rtol=config.rtol, atol=config.atol, h_init=config.h_init, h_max=1.0,
        max_steps=config.max_steps, event_tol=config.event_tol,
    )
    traj = integrate(_reduced_rhs, [z_start, 0.0], (0.0, s_max), cfg, [ev])
    if not traj.events:
        raise SolverFailure(f"no return to theta=0 from z={z_start!r} ({traj.status})", traj)
    return traj.events[0]


def z0_star_map(z0: float, config: SolverConfig | None = None) -> float:
    """Maximum height z0* > 1 of the periodic profile whose minimum is z0."""
    if not 0.0 < z0 < 1.0:
        raise DomainError(f"z0 must lie in (0, 1), got {z0!r}")
    return float(_next_theta_zero(z0, config or SolverConfig()).state[0])


def z0_from_star(z1: float, config: SolverConfig | None = None) -> float:
    """Inverse of :func:`z0_star_map`: minimum height for maximum ``z1`` > 1."""
    if not z1 > 1.0:
        raise DomainError(f"z1 must exceed 1, got {z1!r}")
    return float(_next_theta_zero(z1, config or SolverConfig()).state[0])


def first_period(z0: float, config: SolverConfig | None = None) -> tuple[float, float]:
    """(z0*, x-period) of the profile with minimum ``z0`` in (0, 1).

    Integrates the full system from the minimum to the next minimum, i.e.
    the first upward crossing of theta = 0 after the start.
    """
    if not 0.0 < z0 < 1.0:
        raise DomainError(f"z0 must lie in (0, 1), got {z0!r}")
    config = config or SolverConfig()
    if config.h_max is None:
        config = SolverConfig(
            rtol=config.rtol, atol=config.atol, h_init=config.h_init, h_max=1.0,
            max_steps=config.max_steps, event_tol=config.event_tol,
        )
    evs = [
        EventSpec("theta-zero", lambda s, y: y[2], direction=-1),
        EventSpec("theta-zero", lambda s, y: y[2], direction=1, terminal=True),
    ]
    traj = integrate(_rhs, [0.0, z0, 0.0], (0.0, 1e4), config, evs)
    top = [e for e in traj.events if e.direction < 0]
    end = [e for e in traj.events if e.direction > 0]
    if not top or not end:
        raise SolverFailure(f"no full period found from z0={z0!r} ({traj.status})", traj)
    return float(top[0].state[1]), float(end[0].state[0])


def half_period_s(z0: float, config: SolverConfig | None = None) -> float:
    """Arc length from the minimum z0 to the next maximum."""
    return float(_next_theta_zero(z0, config or SolverConfig()).s)


@dataclass(frozen=True)
class SymmetryReport:
    max_z_asymmetry: float
    max_theta_asymmetry: float
    max_x_asymmetry: float
    reflection_field_error: float

    @property
    def max_asymmetry(self) -> float:
        return max(self.max_z_asymmetry, self.max_theta_asymmetry, self.max_x_asymmetry)


def symmetry_check(orbit: GrimOrbit) -> SymmetryReport:
    """Reflection symmetries of the phase plane along a sampled orbit.

    Checks z(-s) = z(s), theta(-s) = -theta(s), x(-s) = -x(s) on a grid
    symmetric about s = 0, and that (z, pi - theta) is again an orbit by
    comparing the field there with (z', -theta') along the samples.
    """
    s = orbit.s
    if not np.allclose(s, -s[::-1], rtol=0, atol=1e-12 * max(1.0, abs(s[-1]))):
        raise PreconditionError("orbit must be sampled on a span symmetric about s=0")
    mid = len(s) // 2
    if len(s) % 2 == 0 or orbit.theta[mid] != 0.0:
        raise PreconditionError("orbit must start at theta=0 at s=0")
    z_asym = float(np.max(np.abs(orbit.z - orbit.z[::-1])))
    t_asym = float(np.max(np.abs(orbit.theta + orbit.theta[::-1])))
    x_asym = float(np.max(np.abs(orbit.x + orbit.x[::-1])))

    err = 0.0
    for z, th in zip(orbit.z, orbit.theta):
        dz, dth = grim_field((z, th))
        rz, rth = grim_field((z, math.pi - th))
        err = max(err, abs(rz - dz), abs(rth + dth))
    return SymmetryReport(z_asym, t_asym, x_asym, err)


@dataclass(frozen=True)
class LinearizationReport:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    trace: float
    determinant: float
    kind: str


def jacobian(p) -> np.ndarray:
    """Analytic Jacobian of the reduced field at ``p``."""
    z, theta = p
    _check_height(z)
    c, sn = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [sn, z * c],
            [-2.0 * c / (z * z), -2.0 * sn * (1.0 - z) / z],
        ]
    )


def jacobian_fd(p, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the reduced field."""
    p = np.asarray(p, dtype=float)
    J = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        J[:, j] = (np.array(grim_field(p + e)) - np.array(grim_field(p - e))) / (2 * h)
    return J


def linearization_at_equilibrium() -> LinearizationReport:
    J = jacobian((1.0, 0.0))
    eig = np.linalg.eigvals(J)
    eig = eig[np.argsort(eig.imag)]
    tr, det = float(np.trace(J)), float(np.linalg.det(J))
    kind = "center" if tr == 0.0 and det > 0 else "other"
    return LinearizationReport(J, eig, tr, det, kind)
