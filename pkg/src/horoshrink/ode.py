"""Explicit adaptive Runge-Kutta integration with dense output and events.

The stepper is the Dormand-Prince 5(4) pair (local extrapolation, FSAL)
with a proportional-integral step-size controller and the free
fourth-order continuous extension. Events are located as sign changes of
user functions between accepted steps and refined on the interpolant
with Brent's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NonFiniteFieldError

Field = Callable[[float, np.ndarray], np.ndarray]

STATUSES = ("completed", "max-steps", "step-underflow", "domain-exit")

EVENT_KINDS = (
    "theta-zero",
    "z-one",
    "z-extremum-max",
    "z-extremum-min",
    "x-critical",
    "user",
)

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)
# Continuous extension: y(s + t h) = y + h * K^T P [t, t^2, t^3, t^4].
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and step bounds for :func:`integrate`.

    ``h_max=None`` means one tenth of the integration span; ``h_init=None``
    selects the first step automatically.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    h_init: float | None = None
    h_max: float | None = None
    max_steps: int = 1_000_000
    event_tol: float = 1e-12

    def __post_init__(self):
        for name in ("rtol", "atol", "event_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.h_max is not None and not self.h_max > 0:
            raise ValueError("h_max must be positive")
        if self.h_init is not None:
            if not self.h_init > 0:
                raise ValueError("h_init must be positive")
            if self.h_max is not None and self.h_init > self.h_max:
                raise ValueError("h_init must not exceed h_max")

    def scaled(self, factor: float) -> "SolverConfig":
        """Same config with rtol and atol multiplied by ``factor``."""
        return replace(self, rtol=self.rtol * factor, atol=self.atol * factor)

    def as_dict(self) -> dict:
        return {
            "rtol": self.rtol,
            "atol": self.atol,
            "h_init": self.h_init,
            "h_max": self.h_max,
            "max_steps": self.max_steps,
            "event_tol": self.event_tol,
        }


@dataclass(frozen=True)
class EventSpec:
    """A scalar function whose sign changes mark an event.

    ``direction`` filters crossings: +1 rising only, -1 falling only, 0 both.
    For ``kind="z-extremum"`` the reported kind is ``z-extremum-max`` on a
    falling crossing of the derivative and ``z-extremum-min`` on a rising one.
    """

    kind: str
    func: Callable[[float, np.ndarray], float]
    direction: int = 0
    terminal: bool = False

    def label(self, direction: int) -> str:
        if self.kind == "z-extremum":
            return "z-extremum-min" if direction > 0 else "z-extremum-max"
        return self.kind


@dataclass(frozen=True)
class Event:
    kind: str
    s: float
    state: np.ndarray
    direction: int = 0

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "s": float(self.s),
            "state": [float(v) for v in self.state],
            "direction": int(self.direction),
        }


@dataclass
class Trajectory:
    """Accepted steps, event states and the piecewise dense interpolant."""

    s: np.ndarray
    y: np.ndarray
    events: list[Event]
    status: str
    message: str = ""
    nfev: int = 0
    n_quad: int = 0
    s_eval: np.ndarray = field(default=None, repr=False)
    y_eval: np.ndarray = field(default=None, repr=False)
    _t0: np.ndarray = field(default=None, repr=False)
    _h: np.ndarray = field(default=None, repr=False)
    _y0: np.ndarray = field(default=None, repr=False)
    _Q: np.ndarray = field(default=None, repr=False)

    @property
    def state(self) -> np.ndarray:
        return self.y[:, : self.y.shape[1] - self.n_quad]

    @property
    def quad(self) -> np.ndarray:
        return self.y[:, self.y.shape[1] - self.n_quad :]

    @property
    def s_end(self) -> float:
        return float(self.s[-1])

    @property
    def y_end(self) -> np.ndarray:
        return self.y[-1]

    def events_of(self, kind: str) -> list[Event]:
        return [e for e in self.events if e.kind == kind]

    def __call__(self, s) -> np.ndarray:
        """Evaluate the dense output at ``s`` (scalar or array).

        Points outside the covered span raise ``ValueError``.
        """
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lo, hi = sorted((float(self.s[0]), float(self.s[-1])))
        span_tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(s < lo - span_tol) or np.any(s > hi + span_tol):
            raise ValueError("dense output requested outside the integrated span")
        if self._h is None or len(self._h) == 0:
            out = np.repeat(self.y[:1], len(s), axis=0)
            return out[0] if scalar else out
        forward = self._h[0] > 0
        starts = self._t0 if forward else -self._t0
        key = s if forward else -s
        idx = np.clip(np.searchsorted(starts, key, side="right") - 1, 0, len(starts) - 1)
        t = (s - self._t0[idx]) / self._h[idx]
        powers = np.stack([t, t**2, t**3, t**4], axis=-1)
        incr = np.einsum("ndk,nk->nd", self._Q[idx], powers)
        out = self._y0[idx] + self._h[idx, None] * incr
        return out[0] if scalar else out


def _check_finite(value: np.ndarray, s: float, y: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise NonFiniteFieldError(s, y)
    return value


def _initial_step(f, s0, y0, f0, direction, rtol, atol, h_max):
    # Hairer, Norsett & Wanner, "Solving ODEs I", II.4.
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, h_max)
    try:
        f1 = f(s0 + direction * h0, y0 + direction * h0 * f0)
    except DomainError:
        return min(1e-6, h_max)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, h_max)


def _rk_step(f, s, y, f0, hs):
    K = np.empty((7, y.size))
    K[0] = f0
    for i in range(1, 7):
        K[i] = f(s + _C[i] * hs, y + hs * (_A_ROWS[i] @ K[:i]))
    return y + hs * (_B @ K), K


_A_ROWS = [np.asarray(row) for row in _A]


def integrate(
    field: Field,
    y0: Sequence[float],
    s_span: tuple[float, float],
    config: SolverConfig | None = None,
    events: Sequence[EventSpec] = (),
    t_eval: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``y' = field(s, y)`` over ``s_span`` (forward or backward).

    ``t_eval`` points are hit exactly by step endpoints (not interpolated);
    their states are returned in ``Trajectory.y_eval``. A ``DomainError``
    raised by the field shrinks the step; when the step can no longer
    shrink the run stops with status ``domain-exit``. A non-finite field
    value raises :class:`NonFiniteFieldError`.
    """
    config = config or SolverConfig()
    s0, s1 = float(s_span[0]), float(s_span[1])
    if s0 == s1:
        raise ValueError("degenerate integration span")
    direction = 1.0 if s1 > s0 else -1.0
    span = abs(s1 - s0)
    h_max = config.h_max if config.h_max is not None else span / 10
    rtol, atol = config.rtol, config.atol

    nfev = 0

    def f(s, y):
        nonlocal nfev
        nfev += 1
        return field(s, y)

    stops = _stop_points(t_eval, s0, s1, direction)
    stop_idx = 0
    y = np.array(y0, dtype=float)
    dim = y.size
    s = s0
    eval_s, eval_y = [], []
    while stop_idx < len(stops) and stops[stop_idx] == s0:
        eval_s.append(s0)
        eval_y.append(y.copy())
        stop_idx += 1

    f0 = _check_finite(np.asarray(f(s, y), dtype=float), s, y)
    if config.h_init is not None:
        h = min(config.h_init, h_max)
    else:
        h = _initial_step(f, s, y, f0, direction, rtol, atol, h_max)

    ts, ys = [s], [y.copy()]
    seg_t0, seg_h, seg_y0, seg_Q = [], [], [], []
    found: list[Event] = []
    g_prev = [_event_value(ev, s, y) for ev in events]

    err_old = 1e-4
    status, message = "completed", ""
    steps = 0
    rejected_last = False

    while True:
        if steps >= config.max_steps:
            status, message = "max-steps", f"stopped after {steps} steps at s={s!r}"
            break
        target = stops[stop_idx] if stop_idx < len(stops) else s1
        remaining = abs(target - s)
        min_step = 16 * np.finfo(float).eps * max(abs(s), 1.0)
        h_try = min(h, h_max)
        if h_try < min_step:
            status, message = "step-underflow", f"step size underflow at s={s!r}"
            break
        # landing exactly on the target avoids a sliver step afterwards
        landing = h_try >= remaining or remaining - h_try < min_step
        if landing:
            h_try = remaining
        hs = direction * h_try
        s_new = target if landing else s + hs
        hs = s_new - s
        try:
            y_new, K = _rk_step(f, s, y, f0, hs)
        except DomainError as exc:
            h = 0.25 * h_try
            if h < min_step:
                status, message = "domain-exit", f"{exc} (at s={s!r})"
                break
            rejected_last = True
            continue
        if not np.isfinite(K).all():
            stage = int(np.argmin(np.isfinite(K).all(axis=1)))
            raise NonFiniteFieldError(s + _C[stage] * hs, y)
        err_vec = hs * (_E @ K) / (atol + rtol * np.maximum(np.abs(y), np.abs(y_new)))
        err = math.sqrt(float(err_vec @ err_vec) / dim)

        if err > 1.0:
            h = h_try / min(1 / _FAC_MIN, err**_EXPO / _SAFETY)
            rejected_last = True
            continue

        fac = (err**_EXPO if err > 0 else 0.0) / err_old**_BETA
        fac = min(1 / _FAC_MIN, max(1 / _FAC_MAX, fac / _SAFETY))
        h_next = h_try / fac
        if rejected_last:
            h_next = min(h_next, h_try)
        if landing:
            # a step shortened to hit a target says nothing about the natural step
            h_next = max(h_next, h)
        err_old = max(err, 1e-4)
        Q = K.T @ _P
        seg_t0.append(s)
        seg_h.append(hs)
        seg_y0.append(y.copy())
        seg_Q.append(Q)
        steps += 1

        stop = False
        if events:
            g_new = [_event_value(ev, s_new, y_new) for ev in events]
            hits = []
            for j, ev in enumerate(events):
                crossing = _crossing(g_prev[j], g_new[j], ev.direction, direction)
                if crossing:
                    loc, state = _refine(ev, f, s, hs, y, f0, Q, config.event_tol)
                    # roots at the initial point are not events
                    if abs(loc - s0) > config.event_tol:
                        hits.append((loc, j, crossing, state))
                if g_new[j] != 0.0:
                    g_prev[j] = g_new[j]
            hits.sort(key=lambda item: direction * item[0])
            for loc, j, crossing, state in hits:
                ev = events[j]
                found.append(Event(ev.label(crossing), float(loc), state, crossing))
                ts.append(float(loc))
                ys.append(state)
                if ev.terminal:
                    stop = True
                    s_stop, y_stop = float(loc), state
                    break
        if stop:
            if s_stop == s:
                for seg in (seg_t0, seg_h, seg_y0, seg_Q):
                    seg.pop()
            else:
                seg_h[-1] = s_stop - s
                seg_Q[-1] = _rescale_segment(Q, hs, s_stop - s)
            s, y = s_stop, y_stop
            break

        s, y = s_new, y_new
        f0 = K[6]
        ts.append(s)
        ys.append(y.copy())
        h = h_next
        rejected_last = False
        if landing:
            if stop_idx < len(stops) and s == stops[stop_idx]:
                eval_s.append(s)
                eval_y.append(y.copy())
                stop_idx += 1
            if s == s1:
                break

    return Trajectory(
        s=np.asarray(ts),
        y=np.asarray(ys),
        events=found,
        status=status,
        message=message,
        nfev=nfev,
        s_eval=np.asarray(eval_s),
        y_eval=np.asarray(eval_y).reshape(-1, dim),
        _t0=np.asarray(seg_t0),
        _h=np.asarray(seg_h),
        _y0=np.asarray(seg_y0).reshape(-1, dim),
        _Q=np.asarray(seg_Q).reshape(-1, dim, 4),
    )


def _stop_points(t_eval, s0, s1, direction) -> list[float]:
    if t_eval is None:
        return []
    pts = np.asarray(t_eval, dtype=float)
    lo, hi = min(s0, s1), max(s0, s1)
    if np.any(pts < lo) or np.any(pts > hi):
        raise ValueError("t_eval points must lie inside s_span")
    pts = np.unique(pts)
    if direction < 0:
        pts = pts[::-1]
    return [float(v) for v in pts]


def integrate_with_quadrature(
    field: Field,
    quad_integrands: Sequence[Callable[[float, np.ndarray], float]],
    y0: Sequence[float],
    s_span: tuple[float, float],
    config: SolverConfig | None = None,
    q0: Sequence[float] | None = None,
    events: Sequence[EventSpec] = (),
    t_eval: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``field`` together with running integrals of ``quad_integrands``.

    The accumulators are appended to the state and advanced with the same
    stages. Singular integrands must be handled by the caller, e.g. by
    starting away from the singular point and passing the initial
    accumulator values in ``q0``.
    """
    n = len(y0)
    m = len(quad_integrands)
    q0 = [0.0] * m if q0 is None else list(q0)
    if len(q0) != m:
        raise ValueError("q0 must match the number of integrands")

    def augmented(s, ya):
        y = ya[:n]
        dy = np.asarray(field(s, y), dtype=float)
        dq = [g(s, y) for g in quad_integrands]
        return np.concatenate([dy, dq])

    wrapped = [
        replace(ev, func=(lambda s, ya, _f=ev.func: _f(s, ya[:n]))) for ev in events
    ]
    traj = integrate(augmented, list(y0) + q0, s_span, config, wrapped, t_eval)
    traj.n_quad = m
    return traj


def _event_value(ev: EventSpec, s: float, y: np.ndarray) -> float:
    return float(ev.func(s, y))


def _crossing(g0: float, g1: float, direction: int, orientation: float) -> int:
    # returned sign refers to increasing s, whatever the integration direction
    # an exact zero at a step end is reported from the following step
    if g0 == 0.0 or g1 == 0.0:
        return 0
    if (g0 < 0) == (g1 < 0):
        return 0
    sign = 1 if g1 > g0 else -1
    sign = int(sign * orientation)
    if direction and sign != direction:
        return 0
    return sign


def _dense(y, hs, Q, t):
    return y + hs * (Q @ np.array([t, t * t, t**3, t**4]))


def _rescale_segment(Q: np.ndarray, hs: float, hs_new: float) -> np.ndarray:
    # y + hs*Q p(t) with t = u*hs_new/hs  ->  y + hs_new*Q' p(u)
    r = hs_new / hs
    return Q * np.array([1.0, r, r * r, r**3])


def _refine(ev, f, s, hs, y, f0, Q, tol):
    """Root of an event inside the step [s, s + hs].

    The root is bracketed on the dense interpolant, then polished on the
    map tau -> RK step of length tau from (s, y), whose endpoint values
    coincide with the accepted step, so the returned state carries the
    accuracy of a genuine step rather than of the interpolant.
    """

    def g_dense(t):
        return _event_value(ev, s + t * hs, _dense(y, hs, Q, t))

    def step_to(t):
        if t == 0.0:
            return y.copy()
        return _rk_step(f, s, y, f0, t * hs)[0]

    def g_step(t):
        return _event_value(ev, s + t * hs, step_to(t))

    t_tol = tol / abs(hs)
    eps = 4 * np.finfo(float).eps
    ga, gb = g_dense(0.0), g_dense(1.0)
    if ga == 0.0:
        return s, y.copy()
    if (ga < 0) == (gb < 0):
        t_guess = 1.0
    else:
        t_guess = brentq(g_dense, 0.0, 1.0, xtol=t_tol, rtol=eps, maxiter=200)

    # polish in a small bracket around the interpolant root, else the whole step
    width = max(1e-6, 100 * t_tol)
    a, b = max(0.0, t_guess - width), min(1.0, t_guess + width)
    fa, fb = g_step(a), g_step(b)
    if (fa < 0) == (fb < 0) and fa != 0.0 and fb != 0.0:
        a, b = 0.0, 1.0
        fa, fb = g_step(a), g_step(b)
    if fa == 0.0:
        t_root = a
    elif fb == 0.0:
        t_root = b
    elif (fa < 0) == (fb < 0):
        t_root = t_guess
    else:
        t_root = brentq(g_step, a, b, xtol=t_tol, rtol=eps, maxiter=200)
    return s + t_root * hs, step_to(t_root)
