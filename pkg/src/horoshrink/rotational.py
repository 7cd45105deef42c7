"""Horo-shrinkers invariant under rotations about the z-axis.

Profiles (x(s), 0, z(s)) in Euclidean arc length satisfy

    x' = cos(theta),  z' = sin(theta),
    theta' = -sin(theta)/x + 2 cos(theta) (1 - z) / z**2.

Bowls meet the axis orthogonally at height z0 and are radial graphs
z = z(r) solving

    z'' / (1 + z'**2) + z'/r = 2 (1 - z) / z**2,   z(0) = z0, z'(0) = 0,

which is singular at r = 0. The start near the axis comes from the
truncated Taylor expansion (z''(0) = (1 - z0)/z0**2) and is checked
against a Picard iteration of the integral operator that proves
existence. Wings never meet the axis; they are integrated in arc length
from the waist (x0, z0), where the tangent is vertical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import DomainError, PreconditionError, SolverFailure
from .geometry import GeneratingCurve
from .ode import Event, EventSpec, SolverConfig, Trajectory, integrate, integrate_with_quadrature

SLOPE_CAP_DEG = 75.0
SLOPE_RETURN_DEG = 60.0


class RotState(NamedTuple):
    x: float
    z: float
    theta: float


def rot_field(state) -> tuple[float, float, float]:
    """(x', z', theta') of the arc-length system."""
    x, z, theta = state
    if not x > 0:
        raise DomainError(f"distance to the axis must be positive, got x={x!r}")
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    c, sn = math.cos(theta), math.sin(theta)
    return c, sn, -sn / x + 2.0 * c * (1.0 - z) / (z * z)


def _arc_rhs(s, y):
    return np.array(rot_field(y))


def _graph_rhs(r, y):
    # y = (z, z') with r the distance to the axis
    z, p = y
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    return np.array([p, (1.0 + p * p) * (2.0 * (1.0 - z) / (z * z) - p / r)])


def rot3_rhs(r, y):
    """Graph x = x(r) over the height r: y = (x, dx/dr)."""
    x, q = y
    if not x > 0:
        raise DomainError(f"distance to the axis must be positive, got x={x!r}")
    return np.array([q, (r * r + 2.0 * (r - 1.0) * x * q) * (1.0 + q * q) / (r * r * x)])


def axis_curvature(z0: float) -> float:
    """Limit of z''(r) as r -> 0 for the bowl through (0, z0)."""
    if not z0 > 0:
        raise DomainError(f"z0 must be positive, got {z0!r}")
    return (1.0 - z0) / (z0 * z0)


def bowl_series_start(z0: float, r_switch: float = 1e-3) -> tuple[float, float]:
    """(z, z') at ``r_switch`` from the second-order expansion at the axis."""
    c = axis_curvature(z0)
    if not r_switch >= 0:
        raise DomainError("r_switch must be non-negative")
    return z0 + 0.5 * c * r_switch**2, c * r_switch


# ---------------------------------------------------------------- Picard ----


def _band_bound(z0: float, eps: float) -> float:
    # |2(1-z)/z^2| is monotone on (0, 2] and [2, oo); check the ends and z=2
    candidates = [z0 - eps, z0 + eps]
    if z0 - eps < 2.0 < z0 + eps:
        candidates.append(2.0)
    return max(abs(2.0 * (1.0 - z) / z**2) for z in candidates)


@dataclass(frozen=True)
class PicardSetup:
    z0: float
    epsilon: float
    M: float
    R: float
    contraction_tol: float = 1e-12
    max_iters: int = 200

    def __post_init__(self):
        if not self.z0 > 0:
            raise DomainError(f"z0 must be positive, got {self.z0!r}")
        if not 0 < self.epsilon < min(self.z0, 1.0):
            raise PreconditionError("epsilon must lie in (0, min(z0, 1))")
        if self.M < _band_bound(self.z0, self.epsilon) * (1 - 1e-12):
            raise PreconditionError("M does not bound |2(1-z)/z^2| on the band")
        if self.M > 0 and self.R > self.radius_bound(self.epsilon, self.M) * (1 + 1e-12):
            raise PreconditionError("R exceeds the contraction radius bound")

    @staticmethod
    def radius_bound(eps: float, M: float) -> float:
        if M == 0:
            return math.sqrt(3) * eps / 2
        return min(1.0 / M, math.sqrt(3) * eps / 2, math.sqrt(3) * eps / (2 * M))

    @classmethod
    def default(cls, z0: float, epsilon: float | None = None, **kw) -> "PicardSetup":
        if not z0 > 0:
            raise DomainError(f"z0 must be positive, got {z0!r}")
        eps = min(z0, 1.0) / 2 if epsilon is None else epsilon
        M = _band_bound(z0, eps)
        return cls(z0, eps, M, cls.radius_bound(eps, M), **kw)


@dataclass
class PicardResult:
    setup: PicardSetup
    r: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    iterations: int
    deltas: list[float]

    def at(self, r: float) -> tuple[float, float]:
        """(z, z') at ``r`` by cubic Hermite interpolation of the fixed point."""
        if not 0 <= r <= self.r[-1]:
            raise ValueError("r outside the Picard interval")
        spline = CubicHermiteSpline(self.r, self.z, self.dz)
        return float(spline(r)), float(spline.derivative()(r))

    def axis_curvature(self, n_fit: int = 12) -> float:
        """z''(0) from a least-squares fit z' = a r + b r^3 near the axis."""
        r, p = self.r[1 : n_fit + 1], self.dz[1 : n_fit + 1]
        A = np.stack([r, r**3], axis=1)
        coef, *_ = np.linalg.lstsq(A, p, rcond=None)
        return float(coef[0])

    def as_dict(self) -> dict:
        return {
            "z0": self.setup.z0,
            "epsilon": self.setup.epsilon,
            "M": self.setup.M,
            "R": self.setup.R,
            "contraction_tol": self.setup.contraction_tol,
            "iterations": self.iterations,
            "deltas": list(self.deltas),
            "n_grid": len(self.r),
        }


def picard_operator(z0: float, r: np.ndarray, z: np.ndarray, dz: np.ndarray):
    """One application of the integral operator on grid samples.

    Returns the new (z, z'). Raises PreconditionError when the inner
    average leaves (-1, 1), where the inverse of y / sqrt(1 + y^2) is
    undefined.
    """
    g = 2.0 * (1.0 - z) / (z * z * np.sqrt(1.0 + dz * dz))
    weighted = cumulative_simpson(r * g, x=r, initial=0.0)
    inner = np.zeros_like(r)
    inner[1:] = weighted[1:] / r[1:]
    if np.any(np.abs(inner) >= 1.0):
        raise PreconditionError("Picard inner average left (-1, 1); R is too large")
    p_new = inner / np.sqrt(1.0 - inner * inner)
    z_new = z0 + cumulative_simpson(p_new, x=r, initial=0.0)
    return z_new, p_new


def picard_iterate(setup: PicardSetup, n_grid: int = 4001) -> PicardResult:
    """Fixed point of the integral operator on a uniform grid over [0, R].

    Starts from the constant function z0 and stops when the C^1 sup-norm
    of successive differences drops below ``setup.contraction_tol``.
    """
    r = np.linspace(0.0, setup.R, n_grid)
    z = np.full(n_grid, float(setup.z0))
    dz = np.zeros(n_grid)
    deltas = []
    for it in range(1, setup.max_iters + 1):
        z_new, dz_new = picard_operator(setup.z0, r, z, dz)
        delta = float(np.max(np.abs(z_new - z)) + np.max(np.abs(dz_new - dz)))
        deltas.append(delta)
        z, dz = z_new, dz_new
        if delta < setup.contraction_tol:
            return PicardResult(setup, r, z, dz, it, deltas)
    raise SolverFailure(
        f"Picard iteration did not converge in {setup.max_iters} iterations "
        f"(last delta {deltas[-1]:.3e})",
        partial=PicardResult(setup, r, z, dz, setup.max_iters, deltas),
    )


def first_picard_image(z0: float, r):
    """Closed form of T applied to the constant function z0."""
    k = axis_curvature(z0)
    r = np.asarray(r, dtype=float)
    if k == 0:
        return np.full_like(r, z0)
    return z0 + (1.0 - np.sqrt(1.0 - (k * r) ** 2)) / k


# ------------------------------------------------------------------ bowls ---


@dataclass
class BowlCurve:
    """Radial-graph profile of the bowl through (0, z0).

    ``quad`` is the running integral of z'(t)^2 / t from the axis.
    ``switches`` lists radii where a steep slope forced the arc-length
    form; for true bowls this never happens, so a non-empty list is a
    diagnostic.
    """

    z0: float
    r_switch: float
    r: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    quad: np.ndarray
    extrema: list[Event]
    energy_residual: float
    switches: list[float] = field(default_factory=list)
    picard: dict | None = None
    status: str = "completed"
    config: SolverConfig = field(default_factory=SolverConfig)

    def curve(self) -> GeneratingCurve:
        return GeneratingCurve(
            "bowl",
            self.r,
            self.r.copy(),
            self.z,
            None,
            param_name="r",
            extra={"dz": self.dz, "quad": self.quad},
            meta={"params": {"z0": self.z0, "r_switch": self.r_switch}},
        )


def energy_terms(z0, z, dz, quad):
    """Left and right sides of the integrated energy identity."""
    lhs = 0.5 * np.log1p(np.asarray(dz) ** 2) + quad
    rhs = -2.0 * (1.0 / np.asarray(z) + np.log(z)) + 2.0 * (1.0 / z0 + math.log(z0))
    return lhs, rhs


def energy_identity_residual(curve) -> float:
    """Max over samples of |LHS - RHS| of the bowl energy identity."""
    if isinstance(curve, GeneratingCurve):
        if "quad" not in curve.extra or "dz" not in curve.extra:
            raise PreconditionError("curve carries no energy accumulator")
        z0 = curve.meta.get("params", {}).get("z0", curve.z[0])
        lhs, rhs = energy_terms(z0, curve.z, curve.extra["dz"], curve.extra["quad"])
    else:
        if curve.quad is None:
            raise PreconditionError("curve carries no energy accumulator")
        lhs, rhs = energy_terms(curve.z0, curve.z, curve.dz, curve.quad)
    return float(np.max(np.abs(lhs - rhs)))


def _graph_events(cap):
    return [
        EventSpec("z-extremum", lambda r, y: y[1]),
        EventSpec("user", lambda r, y: abs(y[1]) - cap, direction=1, terminal=True),
    ]


def _arc_events(r_max, back):
    return [
        EventSpec("z-extremum", lambda s, y: math.sin(y[2])),
        EventSpec("user", lambda s, y: y[0] - r_max, direction=1, terminal=True),
        EventSpec("user", lambda s, y: abs(math.sin(y[2])) - back, direction=-1, terminal=True),
    ]


def _arc_quad(s, y):
    # z'(r)^2 / r  dr/ds  with dr/ds = cos(theta)
    x, _, theta = y
    c = math.cos(theta)
    return math.sin(theta) ** 2 / (x * c)


def solve_bowl(
    z0: float,
    r_max: float = 30.0,
    config: SolverConfig | None = None,
    r_switch: float = 1e-3,
    n_samples: int = 6001,
    picard_check: bool = True,
    slope_cap_deg: float = SLOPE_CAP_DEG,
) -> BowlCurve:
    """Bowl profile z(r) on [0, r_max] sampled on a uniform radial grid."""
    config = config or SolverConfig()
    if not z0 > 0:
        raise DomainError(f"z0 must be positive, got {z0!r}")
    if not r_max > r_switch > 0:
        raise PreconditionError("need 0 < r_switch < r_max")
    grid = np.linspace(0.0, r_max, n_samples)

    picard = None
    if picard_check and z0 != 1.0:
        picard = _picard_crosscheck(z0, r_switch)

    if z0 == 1.0:
        n = len(grid)
        return BowlCurve(1.0, r_switch, grid, np.ones(n), np.zeros(n), np.zeros(n), [], 0.0,
                         picard=picard, config=config)

    c = axis_curvature(z0)
    z_s, p_s = bowl_series_start(z0, r_switch)
    q_s = 0.5 * c * c * r_switch**2

    out = np.full((n_samples, 3), np.nan)
    near = grid < r_switch
    out[near, 0] = z0 + 0.5 * c * grid[near] ** 2
    out[near, 1] = c * grid[near]
    out[near, 2] = 0.5 * c * c * grid[near] ** 2

    cap = math.tan(math.radians(slope_cap_deg))
    back = math.sin(math.radians(SLOPE_RETURN_DEG))
    extrema: list[Event] = []
    switches: list[float] = []
    r, state, q = r_switch, (z_s, p_s), q_s
    status = "completed"
    while r < r_max:
        mask = (grid >= r) & (grid <= r_max)
        traj = integrate_with_quadrature(
            _graph_rhs, [lambda t, y: y[1] ** 2 / t], list(state), (r, r_max), config,
            q0=[q], events=_graph_events(cap), t_eval=grid[mask],
        )
        if len(traj.s_eval):
            out[np.searchsorted(grid, traj.s_eval)] = traj.y_eval
        extrema += [Event(e.kind, e.s, e.state[:2], e.direction)
                    for e in traj.events if e.kind.startswith("z-extremum")]
        if traj.status != "completed":
            status = traj.status
            break
        if traj.s_end >= r_max:
            break
        # steep slope: continue in arc length until the tangent flattens again
        r_sw = traj.s_end
        switches.append(r_sw)
        z_sw, p_sw, q_sw = traj.y_end
        theta = math.atan(p_sw)
        arc = integrate_with_quadrature(
            _arc_rhs, [_arc_quad], [r_sw, z_sw, theta], (0.0, 10.0 * (r_max - r_sw) + 10.0),
            config, q0=[q_sw], events=_arc_events(r_max, back),
        )
        _fill_from_arc(out, grid, arc)
        extrema += [Event(e.kind, e.state[0], np.array([e.state[1], math.tan(e.state[2])]), e.direction)
                    for e in arc.events if e.kind.startswith("z-extremum")]
        if arc.status != "completed" or not arc.events:
            status = arc.status
            break
        x_e, z_e, th_e, q_e = arc.y_end
        if math.cos(th_e) <= 0:
            raise SolverFailure("bowl profile stopped being a graph", partial=arc)
        r, state, q = x_e, (z_e, math.tan(th_e)), q_e

    curve = BowlCurve(
        z0=float(z0),
        r_switch=r_switch,
        r=grid,
        z=out[:, 0],
        dz=out[:, 1],
        quad=out[:, 2],
        extrema=extrema,
        energy_residual=float("nan"),
        switches=switches,
        picard=picard,
        status=status,
        config=config,
    )
    if status != "completed":
        raise SolverFailure(f"bowl integration ended early: {status}", partial=curve)
    curve.energy_residual = energy_identity_residual(curve)
    return curve


def _fill_from_arc(out, grid, arc: Trajectory):
    x = arc.y[:, 0]
    lo, hi = x.min(), x.max()
    for k in np.nonzero((grid > lo) & (grid <= hi) & np.isnan(out[:, 0]))[0]:
        target = grid[k]
        i = int(np.searchsorted(x, target))
        i = min(max(i, 1), len(x) - 1)
        s_root = brentq(lambda s: arc(s)[0] - target, arc.s[i - 1], arc.s[i], xtol=1e-14)
        _, z, th, q = arc(s_root)
        out[k] = (z, math.tan(th), q)


def _picard_crosscheck(z0: float, r_switch: float) -> dict:
    setup = PicardSetup.default(z0)
    res = picard_iterate(setup)
    r_check = min(r_switch, setup.R)
    z_p, p_p = res.at(r_check)
    z_s, p_s = bowl_series_start(z0, r_check)
    info = res.as_dict()
    info.update(
        r_check=r_check,
        series_minus_picard_z=z_s - z_p,
        series_minus_picard_dz=p_s - p_p,
        axis_curvature=res.axis_curvature(),
    )
    return info


# ------------------------------------------------------------------ wings ---


@dataclass
class WingCurve:
    """Annulus profile through the waist (x0, z0), arc length s in [-S, S].

    s > 0 runs along the upper branch, s < 0 along the lower one.
    """

    x0: float
    z0: float
    s: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    branch_split: int
    events: list[Event]
    waist_second_derivative: float
    status: str = "completed"
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def extrema(self) -> list[Event]:
        return [e for e in self.events if e.kind.startswith("z-extremum")]

    def branch_extrema(self, sign: int) -> list[Event]:
        """Extrema of one branch, ordered away from the waist."""
        return sorted((e for e in self.extrema if e.s * sign > 0), key=lambda e: abs(e.s))

    def x_critical_points(self) -> list[Event]:
        """Zeros of x' including the waist itself (direction +1: minimum of x)."""
        waist = Event("x-critical", 0.0, np.array([self.x0, self.z0, math.pi / 2]),
                      1 if self.waist_second_derivative > 0 else -1)
        found = [e for e in self.events if e.kind == "x-critical"]
        return sorted([waist] + found, key=lambda e: e.s)

    def branch(self, sign: int) -> tuple[np.ndarray, np.ndarray]:
        """(x, z) of the upper (+1) or lower (-1) branch, x increasing."""
        i = self.branch_split
        if sign > 0:
            return self.x[i:], self.z[i:]
        return self.x[: i + 1][::-1], self.z[: i + 1][::-1]

    def curve(self) -> GeneratingCurve:
        return GeneratingCurve(
            "wing", self.s, self.x, self.z, self.theta,
            meta={"params": {"x0": self.x0, "z0": self.z0}},
        )


WAIST_FD_STEP = 1e-3


def solve_wing(
    x0: float,
    z0: float,
    s_max: float = 40.0,
    config: SolverConfig | None = None,
    n_samples: int = 8001,
) -> WingCurve:
    """Wing profile with vertical tangent at the waist (x0, z0)."""
    config = config or SolverConfig()
    if not x0 > 0 or not z0 > 0:
        raise DomainError("x0 and z0 must be positive")
    if not s_max > 10 * WAIST_FD_STEP:
        raise PreconditionError("s_max too small")
    if n_samples % 2 == 0:
        n_samples += 1
    grid = np.linspace(-s_max, s_max, n_samples)
    split = n_samples // 2
    grid[split] = 0.0
    y0 = [x0, z0, math.pi / 2]
    events = [
        EventSpec("z-extremum", lambda s, y: math.sin(y[2])),
        EventSpec("x-critical", lambda s, y: math.cos(y[2])),
        EventSpec("z-one", lambda s, y: y[1] - 1.0),
    ]
    out = np.full((n_samples, 3), np.nan)
    found: list[Event] = []
    status = "completed"
    near = {}
    for sign in (1.0, -1.0):
        part = grid[split:] if sign > 0 else grid[: split + 1]
        pts = np.union1d(part, [sign * WAIST_FD_STEP])
        traj = integrate(_arc_rhs, y0, (0.0, sign * s_max), config, events, t_eval=pts)
        vals = dict(zip(traj.s_eval.tolist(), traj.y_eval))
        for k in np.nonzero(np.isin(grid, part))[0]:
            if grid[k] in vals:
                out[k] = vals[grid[k]]
        if sign * WAIST_FD_STEP in vals:
            near[sign] = vals[sign * WAIST_FD_STEP][0]
        found += traj.events
        if traj.status != "completed":
            status = traj.status
    found.sort(key=lambda e: e.s)

    h = WAIST_FD_STEP
    xpp = (near.get(1.0, np.nan) - 2 * x0 + near.get(-1.0, np.nan)) / h**2 if near else float("nan")
    wing = WingCurve(
        float(x0), float(z0), grid, out[:, 0], out[:, 1], out[:, 2], split, found, float(xpp),
        status=status, config=config,
    )
    if status != "completed":
        raise SolverFailure(f"wing integration ended early: {status}", partial=wing)
    return wing


def wing_graph_crosscheck(wing: WingCurve, margin: float = 0.05, config: SolverConfig | None = None) -> float:
    """Compare the wing with the graph x = x(z) integrated from the waist.

    The graph form is regular at the waist but blows up where the profile
    has a horizontal tangent, so each branch is compared from the waist up
    to ``margin`` before its first z-extremum. Returns the max deviation
    in x.
    """
    config = config or SolverConfig()
    worst = 0.0
    for sign in (1, -1):
        ex = wing.branch_extrema(sign)
        s_limit = abs(ex[0].s) if ex else abs(wing.s[-1])
        sel = (np.sign(wing.s) == sign) & (np.abs(wing.s) <= s_limit * (1 - margin))
        z_pts, x_pts = wing.z[sel], wing.x[sel]
        if len(z_pts) == 0:
            continue
        z_end = z_pts.max() if sign > 0 else z_pts.min()
        traj = integrate(rot3_rhs, [wing.x0, 0.0], (wing.z0, z_end), config, t_eval=z_pts)
        x_graph = dict(zip(traj.s_eval.tolist(), traj.y_eval[:, 0]))
        dev = [abs(x_graph[zv] - xv) for zv, xv in zip(z_pts, x_pts) if zv in x_graph]
        worst = max(worst, max(dev, default=0.0))
    return worst
