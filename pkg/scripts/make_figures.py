"""Regenerate the standard plots and tables into an output directory.

    python3 scripts/make_figures.py [outdir]

Writes phase_portrait.svg, grim_profiles.svg, bowl_profiles.svg,
wing_profile.svg, grim_table.csv, bowl_table.csv and summary.json.
"""

from __future__ import annotations

import sys
from pathlib import Path

from horoshrink.analysis import PhasePortraitSpec, oscillation_report, parameter_table, phase_portrait
from horoshrink.files import dumps, table_to_csv
from horoshrink.grim import solve_grim
from horoshrink.rotational import solve_bowl, solve_wing
from horoshrink.svg import Series, phase_svg, render
from horoshrink.verify import verify_curve

GRIM_SEEDS = (0.2, 1.1, 2.0, 5.0)


def main(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {}

    spec = PhasePortraitSpec(z_range=(0.0, 6.0), seed_points=[(z, 0.0) for z in GRIM_SEEDS])
    portrait = phase_portrait(spec)
    (outdir / "phase_portrait.svg").write_text(phase_svg(portrait))
    summary["phase"] = {
        f"{o.seed.z:g}": {"period_s": o.period_s, "closure_error": o.closure_error,
                          "symmetry_distance": o.symmetry_distance}
        for o in portrait.orbits
    }

    series, grim = [], {}
    for z0 in GRIM_SEEDS:
        orbit = solve_grim(z0, (-25.0, 25.0), n_samples=10001)
        series.append(Series(orbit.x, orbit.z, f"z0={z0:g}"))
        rep = verify_curve(orbit.curve())
        grim[f"{z0:g}"] = {"z_min": orbit.z0, "z_max": orbit.z0_star, "period_x": orbit.period_x,
                           "max_residual": rep.max_residual, "first_integral_drift": rep.max_drift}
    (outdir / "grim_profiles.svg").write_text(
        render(series, "x", "z", "grim reaper profiles", hlines=(1.0,), ylim=(0.0, 6.0), xlim=(-20.0, 20.0)))
    summary["grim"] = grim

    series, bowls = [], {}
    for z0 in (0.5, 1.0, 2.0):
        b = solve_bowl(z0, 30.0, n_samples=3001)
        series.append(Series(b.r, b.z, f"z0={z0:g}"))
        entry = {"energy_residual": b.energy_residual, "max_residual": verify_curve(b.curve()).max_residual}
        if z0 != 1.0:
            osc = oscillation_report(b)
            entry.update(n_extrema=len(osc.extrema), fitted_decay=osc.fitted_decay, fit_r2=osc.fit_r2,
                         monotone_decay=osc.monotone_decay)
        bowls[f"{z0:g}"] = entry
    (outdir / "bowl_profiles.svg").write_text(render(series, "r", "z", "bowl profiles", hlines=(1.0,)))
    summary["bowl"] = bowls

    w = solve_wing(1.0, 2.0, 40.0)
    upper_x, upper_z = w.branch(1)
    lower_x, lower_z = w.branch(-1)
    (outdir / "wing_profile.svg").write_text(render(
        [Series(upper_x, upper_z, "upper branch"), Series(lower_x, lower_z, "lower branch")],
        "x", "z", "wing profile through (1, 2)", hlines=(1.0,), points=((1.0, 2.0, "waist"),)))
    summary["wing"] = {
        "waist_second_derivative": w.waist_second_derivative,
        "max_residual": verify_curve(w.curve()).max_residual,
        "branches": {str(s): oscillation_report(w, s).as_dict() for s in (1, -1)},
    }

    for family, grid in (("grim", [round(0.1 * k, 1) for k in range(1, 11)]), ("bowl", [0.25, 0.5, 0.75, 1.0,
                                                                                        1.5, 2.0, 3.0])):
        table = parameter_table(family, grid)
        (outdir / f"{family}_table.csv").write_text(table_to_csv(table.columns, table.rows))
        summary[f"{family}_table_injective"] = table.injective

    (outdir / "summary.json").write_text(dumps(summary))
    print(f"wrote {len(list(outdir.iterdir()))} files to {outdir}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures"))
