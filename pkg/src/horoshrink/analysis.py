"""Post-processing: phase portraits, oscillation statistics, parameter tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from .errors import DomainError, PreconditionError
from .grim import H1, GrimOrbit, PhasePoint, _reduced_rhs, first_period, first_integral
from .ode import EventSpec, SolverConfig, integrate
from .rotational import BowlCurve, WingCurve, solve_bowl

EQUILIBRIUM = PhasePoint(1.0, 0.0)


@dataclass(frozen=True)
class PhasePortraitSpec:
    """Window of the (z, theta) phase plane and the seeds to draw.

    Seeds on theta = 0 are traced over exactly one period; other seeds are
    traced over ``[-span, span]``.
    """

    z_range: tuple[float, float] = (0.05, 6.0)
    theta_range: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    seed_points: tuple[PhasePoint, ...] = ()
    span: float = 20.0
    n_samples: int = 2001

    def __post_init__(self):
        z_lo, z_hi = self.z_range
        t_lo, t_hi = self.theta_range
        if not 0.0 <= z_lo < z_hi:
            raise DomainError(f"z_range must lie in z > 0, got {self.z_range!r}")
        if not -math.pi / 2 <= t_lo < t_hi <= math.pi / 2:
            raise DomainError(f"theta_range must lie in [-pi/2, pi/2], got {self.theta_range!r}")
        if not self.span > 0 or self.n_samples < 3:
            raise PreconditionError("span must be positive and n_samples >= 3")
        seeds = tuple(PhasePoint(float(z), float(t)) for z, t in self.seed_points)
        for z, t in seeds:
            if not (z > 0 and z_lo <= z <= z_hi and t_lo < t < t_hi and abs(t) < math.pi / 2):
                raise DomainError(f"seed ({z!r}, {t!r}) outside the phase window")
        object.__setattr__(self, "seed_points", seeds)


@dataclass
class PhaseOrbit:
    seed: PhasePoint
    s: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    period_s: float | None = None
    closure_error: float | None = None
    symmetry_distance: float | None = None
    first_integral_c: float | None = None


@dataclass
class PhasePortrait:
    spec: PhasePortraitSpec
    orbits: list[PhaseOrbit]
    equilibrium: PhasePoint = EQUILIBRIUM
    nullclines: dict = field(
        default_factory=lambda: {
            # theta' = 0 on z = 1, z' = 0 on theta = 0
            "z=1": "theta' changes sign",
            "theta=0": "z' changes sign",
        }
    )

    @property
    def max_closure_error(self) -> float:
        errs = [o.closure_error for o in self.orbits if o.closure_error is not None]
        return max(errs, default=0.0)

    @property
    def max_symmetry_distance(self) -> float:
        d = [o.symmetry_distance for o in self.orbits if o.symmetry_distance is not None]
        return max(d, default=0.0)


def _period_s(seed: PhasePoint, config: SolverConfig):
    # the loop closes at the second crossing of theta = 0, which has the
    # orientation theta' has at the seed
    up = seed.z < 1.0
    evs = [
        EventSpec("theta-zero", lambda s, y: y[1], direction=-1 if up else 1),
        EventSpec("theta-zero", lambda s, y: y[1], direction=1 if up else -1, terminal=True),
    ]
    traj = integrate(_reduced_rhs, list(seed), (0.0, 1e4), config, evs)
    end = [e for e in traj.events if e.direction == (1 if up else -1)]
    if not end:
        raise PreconditionError(f"orbit through {seed!r} does not close ({traj.status})")
    return end[0].s, end[0].state


def _trace(seed, lo, hi, grid, config):
    out = np.full((len(grid), 2), np.nan)
    for a, b in ((0.0, lo), (0.0, hi)):
        if a == b:
            continue
        mask = (grid >= min(a, b)) & (grid <= max(a, b))
        traj = integrate(_reduced_rhs, list(seed), (a, b), config, t_eval=grid[mask])
        out[np.searchsorted(grid, traj.s_eval)] = traj.y_eval
    return out


def phase_portrait(spec: PhasePortraitSpec, config: SolverConfig | None = None) -> PhasePortrait:
    """Trace every seed forward and backward in the reduced (z, theta) system."""
    config = config or SolverConfig()
    if config.h_max is None:
        config = SolverConfig(rtol=config.rtol, atol=config.atol, h_init=config.h_init,
                              h_max=0.5, max_steps=config.max_steps, event_tol=config.event_tol)
    n = spec.n_samples | 1
    orbits = []
    for seed in spec.seed_points:
        if seed == EQUILIBRIUM:
            orbits.append(PhaseOrbit(seed, np.zeros(1), np.ones(1), np.zeros(1), None, 0.0, 0.0,
                                     first_integral(seed)))
            continue
        if seed.theta == 0.0:
            T, back = _period_s(seed, config)
            grid = np.linspace(-T / 2, T / 2, n)
            grid[n // 2] = 0.0
            zt = _trace(seed, -T / 2, T / 2, grid, config)
            # return to the seed after one period, and the two half-loops
            # meeting on the far side
            closure = max(float(np.hypot(*(back - np.array(seed)))),
                          float(np.hypot(*(zt[-1] - zt[0]))))
            pts = zt
            refl = zt * np.array([1.0, -1.0])
            sym = max(directed_hausdorff(pts, refl)[0], directed_hausdorff(refl, pts)[0])
            orbits.append(PhaseOrbit(seed, grid, zt[:, 0], zt[:, 1], T, closure, float(sym),
                                     first_integral(seed)))
        else:
            grid = np.linspace(-spec.span, spec.span, n)
            grid[n // 2] = 0.0
            zt = _trace(seed, -spec.span, spec.span, grid, config)
            orbits.append(PhaseOrbit(seed, grid, zt[:, 0], zt[:, 1],
                                     first_integral_c=first_integral(seed)))
    return PhasePortrait(spec, orbits)


@dataclass
class OscillationReport:
    """Extrema of a profile about the horosphere z = 1.

    ``fitted_decay`` is the common rate b of a least-squares fit
    log|h - 1| ~ a_kind - b * location with one intercept for maxima and
    one for minima; it is an empirical description only. Overshoot above
    1 is larger than undershoot below, so ``monotone_decay`` asks each
    envelope separately to shrink; ``monotone_interleaved`` asks the same
    of the raw alternating sequence.
    """

    extrema: list[tuple[float, float, str]]
    amplitudes: list[float]
    alternates: bool
    straddles: bool
    fitted_decay: float | None
    fit_r2: float | None
    monotone_decay: bool
    max_amplitude_spread: float
    monotone_interleaved: bool = False
    empirical: bool = True

    def as_dict(self) -> dict:
        return {
            "extrema": [list(e) for e in self.extrema],
            "amplitudes": self.amplitudes,
            "alternates": self.alternates,
            "straddles": self.straddles,
            "fitted_decay": self.fitted_decay,
            "fit_r2": self.fit_r2,
            "monotone_decay": self.monotone_decay,
            "max_amplitude_spread": self.max_amplitude_spread,
            "monotone_interleaved": self.monotone_interleaved,
            "empirical": self.empirical,
        }


def _extrema_of(curve, branch: int):
    if isinstance(curve, GrimOrbit):
        evs = [e for e in curve.extrema if e.s >= 0]
        return [(float(e.state[0]), float(e.state[1]), e.kind) for e in evs], False
    if isinstance(curve, BowlCurve):
        return [(float(e.s), float(e.state[0]), e.kind) for e in curve.extrema], True
    if isinstance(curve, WingCurve):
        if branch not in (1, -1):
            raise PreconditionError("wing branch must be +1 or -1")
        evs = curve.branch_extrema(branch)
        return [(float(e.state[0]), float(e.state[1]), e.kind) for e in evs], True
    raise PreconditionError(f"unsupported curve type {type(curve).__name__}")


def oscillation_report(curve, branch: int = 1) -> OscillationReport:
    """Extrema, amplitudes and an amplitude-decay fit for one profile.

    Grim orbits are exactly periodic, so no decay fit is attached; their
    amplitudes are reported per kind via ``max_amplitude_spread``.
    """
    extrema, rotational = _extrema_of(curve, branch)
    if len(extrema) < 2:
        raise PreconditionError(f"need at least 2 extrema, found {len(extrema)}")
    kinds = [k for _, _, k in extrema]
    alternates = all(a != b for a, b in zip(kinds, kinds[1:]))
    straddles = all((h > 1.0) if k.endswith("max") else (h < 1.0) for _, h, k in extrema)
    amps = [abs(h - 1.0) for _, h, _ in extrema]

    spread = 0.0
    monotone = True
    for kind in ("z-extremum-max", "z-extremum-min"):
        a = [amp for amp, k in zip(amps, kinds) if k == kind]
        if a:
            spread = max(spread, max(a) - min(a))
            monotone = monotone and all(y < x for x, y in zip(a, a[1:]))

    decay = r2 = None
    if rotational and len(extrema) >= 3:
        loc = np.array([e[0] for e in extrema])
        la = np.log(np.array(amps))
        is_max = np.array([k.endswith("max") for k in kinds], dtype=float)
        A = np.vstack([is_max, 1.0 - is_max, loc]).T
        coef, *_ = np.linalg.lstsq(A, la, rcond=None)
        fit = A @ coef
        ss_tot = float(np.sum((la - la.mean()) ** 2))
        r2 = 1.0 - float(np.sum((la - fit) ** 2)) / ss_tot if ss_tot > 0 else 1.0
        decay = float(-coef[2])
    interleaved = all(b < a for a, b in zip(amps, amps[1:]))
    return OscillationReport(extrema, amps, alternates, straddles, decay, r2, monotone,
                             spread, interleaved, empirical=rotational)


@dataclass
class ParameterTable:
    family: str
    columns: tuple[str, ...]
    rows: list[tuple]
    injective: bool
    min_separation: float | None

    def as_dicts(self) -> list[dict]:
        return [dict(zip(self.columns, r)) for r in self.rows]


TABLE_COLUMNS = {
    "grim": ("z0", "z0_star", "period_x", "classification"),
    "bowl": ("z0", "first_max_height", "first_max_r", "classification"),
}


def parameter_table(family: str, grid, config: SolverConfig | None = None,
                    r_max: float = 30.0) -> ParameterTable:
    """Tabulate the defining parameter of each family member on ``grid``.

    grim: z0 in (0, 1] -> (z0*, x-period). bowl: z0 > 0 -> first maximum of
    the profile (height and radius). z0 = 1 gives the degenerate horosphere row.
    """
    if family not in TABLE_COLUMNS:
        raise PreconditionError(f"unknown family {family!r}; expected grim or bowl")
    grid = [float(v) for v in grid]
    if not grid:
        raise PreconditionError("empty parameter grid")
    if len(set(grid)) != len(grid):
        raise PreconditionError("grid values must be distinct")
    config = config or SolverConfig()
    rows = []
    for z0 in grid:
        if family == "grim":
            if not 0.0 < z0 <= 1.0:
                raise DomainError(f"grim grid values must lie in (0, 1], got {z0!r}")
            if z0 == 1.0:
                rows.append((1.0, 1.0, None, H1))
                continue
            star, period = first_period(z0, config)
            rows.append((z0, star, period, "periodic-graph"))
        else:
            if not z0 > 0.0:
                raise DomainError(f"bowl grid values must be positive, got {z0!r}")
            if z0 == 1.0:
                rows.append((1.0, None, None, H1))
                continue
            bowl = solve_bowl(z0, r_max, config, n_samples=301, picard_check=False)
            first = next((e for e in bowl.extrema if e.kind.endswith("max")), None)
            if first is None:
                rows.append((z0, None, None, "bowl"))
            else:
                rows.append((z0, float(first.state[0]), float(first.s), "bowl"))

    outs = [r[1] for r in rows if r[1] is not None]
    sep = None
    injective = True
    if len(outs) >= 2:
        srt = np.sort(np.array(outs))
        sep = float(np.min(np.diff(srt)))
        injective = sep > 1e-9
    return ParameterTable(family, TABLE_COLUMNS[family], rows, injective, sep)
