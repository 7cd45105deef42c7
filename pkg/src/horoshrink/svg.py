"""Minimal self-contained SVG line plots (no plotting dependency)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str | None = None
    color: str | None = None
    width: float = 1.5


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions covering [lo, hi] with steps 1, 2 or 5 x 10^k."""
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t = first + len(ticks) * step
    return ticks


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def _limits(values, pad=0.05):
    v = np.concatenate([np.asarray(a, dtype=float).ravel() for a in values])
    v = v[np.isfinite(v)]
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(v.min()), float(v.max())
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    span = hi - lo
    return lo - pad * span, hi + pad * span


def render(
    series: list[Series],
    xlabel: str,
    ylabel: str,
    title: str | None = None,
    hlines: tuple[float, ...] = (),
    vlines: tuple[float, ...] = (),
    points: tuple[tuple[float, float, str], ...] = (),
    xlim=None,
    ylim=None,
) -> str:
    """Render polylines on an 800x600 canvas with axes and tick labels.

    ``hlines``/``vlines`` are dashed reference lines; ``points`` are
    labelled markers. Non-finite samples break a polyline.
    """
    xs = [s.x for s in series] + [[p[0] for p in points]] + [list(vlines)]
    ys = [s.y for s in series] + [[p[1] for p in points]] + [list(hlines)]
    x0, x1 = xlim or _limits(xs)
    y0, y1 = ylim or _limits(ys)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath></defs>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.2f}" y1="{TOP + ph}" x2="{X:.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{TOP + ph + 20}" text-anchor="middle">{_tick_label(t)}</text>')
    for t in nice_ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{LEFT - 5}" y1="{Y:.2f}" x2="{LEFT}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{Y + 4:.2f}" text-anchor="end">{_tick_label(t)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="20" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {TOP + ph / 2:.2f})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>')

    out.append('<g clip-path="url(#plot)">')
    for h in hlines:
        out.append(f'<line x1="{LEFT}" y1="{py(h):.2f}" x2="{LEFT + pw}" y2="{py(h):.2f}" '
                   f'stroke="gray" stroke-dasharray="6 4"/>')
    for v in vlines:
        out.append(f'<line x1="{px(v):.2f}" y1="{TOP}" x2="{px(v):.2f}" y2="{TOP + ph}" '
                   f'stroke="gray" stroke-dasharray="6 4"/>')
    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        # split into runs of finite samples
        breaks = np.flatnonzero(np.diff(ok.astype(int)) != 0) + 1
        for run in np.split(np.arange(len(x)), breaks):
            if len(run) == 0 or not ok[run[0]]:
                continue
            pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[run], y[run]))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{s.width}"/>')
    for x, y, label in points:
        out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="4" fill="black"/>')
        if label:
            out.append(f'<text x="{px(x) + 7:.2f}" y="{py(y) - 7:.2f}">{escape(label)}</text>')
    out.append("</g>")

    labelled = [(s, s.color or PALETTE[i % len(PALETTE)]) for i, s in enumerate(series) if s.label]
    for k, (s, color) in enumerate(labelled):
        y = TOP + 16 + 16 * k
        out.append(f'<line x1="{LEFT + pw - 150}" y1="{y - 4}" x2="{LEFT + pw - 125}" y2="{y - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw - 120}" y="{y}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curve_svg(x, z, title: str | None = None, xlabel: str = "x", label: str | None = None) -> str:
    """Generating curve in the (x, z) half-plane with the horosphere z = 1."""
    return render([Series(x, z, label)], xlabel, "z", title, hlines=(1.0,))


def phase_svg(portrait, title: str | None = "phase plane (z, theta)") -> str:
    """Orbits of a phase portrait with the lines z = 1, theta = 0 and the equilibrium."""
    series = [
        Series(o.z, o.theta, f"z0={o.seed.z:g}, theta0={o.seed.theta:g}")
        for o in portrait.orbits if len(o.s) > 1
    ]
    eq = portrait.equilibrium
    spec = portrait.spec
    return render(
        series, "z", "theta", title,
        hlines=(0.0,), vlines=(1.0,),
        points=((eq.z, eq.theta, "(1, 0)"),),
        xlim=spec.z_range, ylim=spec.theta_range,
    )
