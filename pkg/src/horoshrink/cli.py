"""Command-line interface: ``horoshrink {grim,bowl,wing,phase,table,verify}``.

Exit codes: 0 success, 1 numerical failure (partial files are still
written), 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import PhasePortraitSpec, parameter_table, phase_portrait
from .errors import DomainError, NonFiniteFieldError, PreconditionError, SolverFailure
from .files import dumps, read_curve, table_to_csv, write_curve
from .grim import GrimOrbit, solve_grim
from .ode import SolverConfig
from .rotational import BowlCurve, WingCurve, solve_bowl, solve_wing
from .svg import curve_svg, phase_svg
from .verify import verify_curve

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2

# keys accepted in a --config file, with their parsers
CONFIG_KEYS = {
    "rtol": float,
    "atol": float,
    "event_tol": float,
    "h_init": float,
    "h_max": float,
    "max_steps": int,
}


class UsageError(Exception):
    pass


def load_config_file(path) -> dict:
    """Parse a ``key=value`` file; blank lines and ``#`` comments are skipped."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CONFIG_KEYS[key](value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return values


def solver_config(args) -> SolverConfig:
    values = load_config_file(args.config) if args.config else {}
    for key in ("rtol", "atol", "event_tol"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    try:
        return SolverConfig(**values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    return vals


def _pair(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected two numbers lo,hi, got {text!r}")
    return vals[0], vals[1]


def _seeds(text: str) -> list[tuple[float, float]]:
    """``z`` or ``z:theta`` items separated by commas."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        z, _, th = item.partition(":")
        try:
            out.append((float(z), float(th) if th else 0.0))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad seed {item!r}") from None
    return out


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 5:
        raise argparse.ArgumentTypeError("need at least 5 samples")
    return v


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("value must be finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rtol", type=_finite, help="relative tolerance (default 1e-10)")
    common.add_argument("--atol", type=_finite, help="absolute tolerance (default 1e-12)")
    common.add_argument("--event-tol", dest="event_tol", type=_finite, help="event location tolerance")
    common.add_argument("--out", help="output path stem (files get .csv / .events.json appended)")
    common.add_argument("--svg", help="also write an SVG plot to this path")
    common.add_argument("--config", help="key=value file with solver settings; flags win")

    p = argparse.ArgumentParser(prog="horoshrink", description="Horo-shrinker profiles in the upper half-space.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("grim", parents=[common], help="parabolic-invariant profile (grim reaper)")
    g.add_argument("--z0", type=_finite, required=True)
    g.add_argument("--s-max", dest="s_max", type=_finite, default=50.0)
    g.add_argument("--n-samples", dest="n_samples", type=_positive_int, default=20001)

    b = sub.add_parser("bowl", parents=[common], help="rotational profile meeting the axis")
    b.add_argument("--z0", type=_finite, required=True)
    b.add_argument("--r-max", dest="r_max", type=_finite, default=30.0)
    b.add_argument("--r-switch", dest="r_switch", type=_finite, default=1e-3)
    b.add_argument("--n-samples", dest="n_samples", type=_positive_int, default=6001)

    w = sub.add_parser("wing", parents=[common], help="rotational annulus profile")
    w.add_argument("--x0", type=_finite, required=True)
    w.add_argument("--z0", type=_finite, required=True)
    w.add_argument("--s-max", dest="s_max", type=_finite, default=40.0)
    w.add_argument("--n-samples", dest="n_samples", type=_positive_int, default=8001)

    ph = sub.add_parser("phase", parents=[common], help="phase portrait in the (z, theta) plane")
    ph.add_argument("--seeds", type=_seeds, default=_seeds("0.2,1.1,2,5"),
                    help="comma-separated z or z:theta seeds (default 0.2,1.1,2,5)")
    ph.add_argument("--z-range", dest="z_range", type=_pair, default=(0.0, 6.0))
    ph.add_argument("--theta-range", dest="theta_range", type=_pair, default=(-math.pi / 2, math.pi / 2))
    ph.add_argument("--span", type=_finite, default=20.0)
    ph.add_argument("--n-samples", dest="n_samples", type=_positive_int, default=2001)

    t = sub.add_parser("table", parents=[common], help="parameter table for a family")
    t.add_argument("--family", choices=("grim", "bowl"), required=True)
    t.add_argument("--grid", type=_floats, required=True, help="comma-separated z0 values")
    t.add_argument("--r-max", dest="r_max", type=_finite, default=30.0)

    v = sub.add_parser("verify", parents=[common], help="verify a curve CSV")
    v.add_argument("in_file", help="curve CSV written by grim/bowl/wing")
    v.add_argument("--family", help="override the family or symmetry from the file")
    return p


def _stem(args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


def _with_suffix(stem: Path, suffix: str) -> Path:
    return stem.with_name(stem.name + suffix)


def _header(family: str, params: dict, config: SolverConfig) -> dict:
    return {"family": family, "params": params, "config": config.as_dict(), "version": __version__}


def _emit_curve(obj, args, stem, params, summary, title, xlabel="x") -> list[Path]:
    curve = obj.curve()
    rep = verify_curve(curve)
    csv_path = _with_suffix(stem, ".csv")
    write_curve(csv_path, curve, {"config": obj.config.as_dict(), "version": __version__})
    doc = _header(curve.family, params, obj.config)
    doc.update(status=obj.status, summary=summary, verification=rep.as_dict())
    doc["events"] = [e.as_dict() for e in _events_of(obj)]
    ev_path = _with_suffix(stem, ".events.json")
    ev_path.write_text(dumps(doc))
    written = [csv_path, ev_path]
    if args.svg:
        Path(args.svg).write_text(curve_svg(curve.x, curve.z, title, xlabel=xlabel))
        written.append(Path(args.svg))
    return written


def _events_of(obj):
    return obj.extrema if isinstance(obj, BowlCurve) else obj.events


def _grim_summary(o: GrimOrbit) -> dict:
    return {
        "classification": o.classification,
        "z0": o.z0,
        "z0_star": o.z0_star,
        "period_x": o.period_x,
        "periods": o.periods,
        "first_integral_c": o.first_integral_c,
        "first_integral_drift": o.first_integral_drift(),
    }


def _bowl_summary(b: BowlCurve) -> dict:
    return {
        "z0": b.z0,
        "energy_residual": b.energy_residual,
        "switches": b.switches,
        "picard": b.picard,
    }


def _wing_summary(w: WingCurve) -> dict:
    return {
        "x0": w.x0,
        "z0": w.z0,
        "waist_second_derivative": w.waist_second_derivative,
        "x_critical_points": [e.as_dict() for e in w.x_critical_points()],
    }


def cmd_grim(args) -> int:
    cfg = solver_config(args)
    if not args.z0 > 0:
        raise UsageError(f"--z0 must be positive, got {args.z0}")
    if not args.s_max > 0:
        raise UsageError("--s-max must be positive")
    params = {"z0": args.z0, "s_max": args.s_max, "n_samples": args.n_samples}
    orbit = solve_grim(args.z0, (0.0, args.s_max), cfg, n_samples=args.n_samples)
    _emit_curve(orbit, args, _stem(args, "grim"), params, _grim_summary(orbit),
                f"grim reaper z0={args.z0:g}")
    return EXIT_OK


def cmd_bowl(args) -> int:
    cfg = solver_config(args)
    if not args.z0 > 0:
        raise UsageError(f"--z0 must be positive, got {args.z0}")
    if not args.r_max > args.r_switch > 0:
        raise UsageError("need 0 < --r-switch < --r-max")
    params = {"z0": args.z0, "r_max": args.r_max, "r_switch": args.r_switch, "n_samples": args.n_samples}
    bowl = solve_bowl(args.z0, args.r_max, cfg, r_switch=args.r_switch, n_samples=args.n_samples)
    _emit_curve(bowl, args, _stem(args, "bowl"), params, _bowl_summary(bowl),
                f"bowl z0={args.z0:g}", xlabel="r")
    return EXIT_OK


def cmd_wing(args) -> int:
    cfg = solver_config(args)
    if not (args.x0 > 0 and args.z0 > 0):
        raise UsageError("--x0 and --z0 must be positive")
    params = {"x0": args.x0, "z0": args.z0, "s_max": args.s_max, "n_samples": args.n_samples}
    wing = solve_wing(args.x0, args.z0, args.s_max, cfg, n_samples=args.n_samples)
    _emit_curve(wing, args, _stem(args, "wing"), params, _wing_summary(wing),
                f"wing (x0, z0)=({args.x0:g}, {args.z0:g})")
    return EXIT_OK


def cmd_phase(args) -> int:
    cfg = solver_config(args)
    spec = PhasePortraitSpec(tuple(args.z_range), tuple(args.theta_range), tuple(args.seeds),
                             args.span, args.n_samples)
    portrait = phase_portrait(spec, cfg)
    stem = _stem(args, "phase")
    doc = _header("phase", {"seeds": [list(s) for s in spec.seed_points], "z_range": list(spec.z_range),
                            "theta_range": list(spec.theta_range), "span": spec.span}, cfg)
    doc["orbits"] = [
        {"seed": list(o.seed), "period_s": o.period_s, "closure_error": o.closure_error,
         "symmetry_distance": o.symmetry_distance, "first_integral_c": o.first_integral_c}
        for o in portrait.orbits
    ]
    doc["equilibrium"] = list(portrait.equilibrium)
    doc["nullclines"] = portrait.nullclines
    _with_suffix(stem, ".json").write_text(dumps(doc))
    svg_path = Path(args.svg) if args.svg else _with_suffix(stem, ".svg")
    svg_path.write_text(phase_svg(portrait))
    return EXIT_OK


def cmd_table(args) -> int:
    cfg = solver_config(args)
    table = parameter_table(args.family, args.grid, cfg, r_max=args.r_max)
    stem = _stem(args, f"table-{args.family}")
    _with_suffix(stem, ".csv").write_text(table_to_csv(table.columns, table.rows))
    if not table.injective:
        print(f"warning: parameter map not injective on grid (separation {table.min_separation})",
              file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    curve = read_curve(args.in_file)
    rep = verify_curve(curve, args.family)
    text = dumps(rep.as_dict())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "grim": cmd_grim,
    "bowl": cmd_bowl,
    "wing": cmd_wing,
    "phase": cmd_phase,
    "table": cmd_table,
    "verify": cmd_verify,
}


def _write_partial(args, exc: SolverFailure):
    obj = exc.partial
    if not isinstance(obj, (GrimOrbit, BowlCurve, WingCurve)):
        return
    stem = _stem(args, args.command)
    curve = obj.curve()
    write_curve(_with_suffix(stem, ".csv"), curve, {"config": obj.config.as_dict(), "version": __version__,
                                                    "status": obj.status})
    doc = _header(curve.family, {}, obj.config)
    doc.update(status=obj.status, diagnostic=str(exc), events=[e.as_dict() for e in _events_of(obj)])
    _with_suffix(stem, ".events.json").write_text(dumps(doc))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"horoshrink {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverFailure as exc:
        print(f"horoshrink {args.command}: numerical failure: {exc}", file=sys.stderr)
        _write_partial(args, exc)
        return EXIT_NUMERICAL
    except NonFiniteFieldError as exc:
        print(f"horoshrink {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, PreconditionError) as exc:
        print(f"horoshrink {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"horoshrink {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
