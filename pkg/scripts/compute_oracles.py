"""Independent reference values for the test suite.

Pure-Python classical RK4 with a fixed step h = 1e-5; event locations are
found by bisection on the length of the final RK4 step. Nothing from the
package is imported, so agreement with the adaptive solver is a genuine
cross-check. Run once and paste the printed dict into tests/oracles.py.

    python3 scripts/compute_oracles.py
"""

from __future__ import annotations

import math
import time

H = 1e-5


def rk4(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, [a + h / 2 * b for a, b in zip(y, k1)])
    k3 = f(t + h / 2, [a + h / 2 * b for a, b in zip(y, k2)])
    k4 = f(t + h, [a + h * b for a, b in zip(y, k3)])
    return [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


def march(f, t, y, g, direction, skip=0, t_max=1e3):
    """Step until g changes sign in the given direction (+1 up, -1 down),
    ignoring the first ``skip`` such crossings; return (t, y) at the root."""
    g0 = g(y)
    while t < t_max:
        y1 = rk4(f, t, y, H)
        g1 = g(y1)
        if (direction > 0 and g0 < 0 <= g1) or (direction < 0 and g0 > 0 >= g1):
            if skip == 0:
                lo, hi = 0.0, H
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    gm = g(rk4(f, t, y, mid))
                    if (gm < 0) == (g0 < 0):
                        lo = mid
                    else:
                        hi = mid
                tau = 0.5 * (lo + hi)
                return t + tau, rk4(f, t, y, tau)
            skip -= 1
        t, y, g0 = t + H, y1, g1
    raise RuntimeError("no event before t_max")


def grim(t, y):
    x, z, th = y
    c = math.cos(th)
    return [z * c, z * math.sin(th), 2 * c * (1 - z) / z]


def bowl(r, y):
    z, p = y
    return [p, (1 + p * p) * (2 * (1 - z) / (z * z) - p / r)]


def bowl_start(z0, r):
    # z = z0 + a r^2 + b r^4 with the r^4 term kept so that the start error
    # is far below the RK4 error budget
    a = (1 - z0) / (2 * z0 * z0)
    dF = 2 * (z0 - 2) / z0**3
    b = (8 * a**3 + dF * a) / 16
    return [z0 + a * r * r + b * r**4, 2 * a * r + 4 * b * r**3]


def main():
    out = {}
    t0 = time.time()
    # grim z0 = 0.5: theta first crosses 0 downward at the maximum z0*,
    # then upward at the next minimum, one x-period later
    s1, y1 = march(grim, 0.0, [0.0, 0.5, 0.0], lambda y: y[2], -1)
    out["grim_z0_0.5_z0_star"] = y1[1]
    out["grim_z0_0.5_half_period_s"] = s1
    s2, y2 = march(grim, s1, y1, lambda y: y[2], +1)
    out["grim_z0_0.5_period_x"] = y2[0]
    out["grim_z0_0.5_return_z"] = y2[1]

    for z0 in (0.5, 2.0):
        r0 = 1e-3
        start = bowl_start(z0, r0)
        # first maximum: z' crosses 0 downward; first minimum: upward
        r1, y1 = march(bowl, r0, start, lambda y: y[1], -1)
        out[f"bowl_z0_{z0:g}_first_max_r"] = r1
        out[f"bowl_z0_{z0:g}_first_max_z"] = y1[0]
        r2, y2 = march(bowl, r0, start, lambda y: y[1], +1)
        out[f"bowl_z0_{z0:g}_first_min_r"] = r2
        out[f"bowl_z0_{z0:g}_first_min_z"] = y2[0]

    for k, v in out.items():
        print(f"    {k!r}: {v!r},")
    print(f"# {time.time() - t0:.1f} s")


if __name__ == "__main__":
    main()
