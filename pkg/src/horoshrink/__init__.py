"""Numerical solver and verification toolkit for horo-shrinkers (H = <N, d/dz>)
in the upper half-space model of hyperbolic 3-space."""

__version__ = "0.1.0"

from .errors import DomainError, NonFiniteFieldError, PreconditionError, SolverFailure  # noqa: E402
from .geometry import GeneratingCurve, SymmetryKind, VerificationReport, shrinker_residual  # noqa: E402
from .grim import GrimOrbit, first_integral, grim_field, solve_grim, z0_from_star, z0_star_map  # noqa: E402
from .ode import SolverConfig, integrate  # noqa: E402
from .rotational import (  # noqa: E402
    BowlCurve,
    PicardSetup,
    WingCurve,
    bowl_series_start,
    energy_identity_residual,
    picard_iterate,
    solve_bowl,
    solve_wing,
)
from .verify import verify_curve  # noqa: E402

__all__ = [
    "BowlCurve", "DomainError", "GeneratingCurve", "GrimOrbit", "NonFiniteFieldError",
    "PicardSetup", "PreconditionError", "SolverConfig", "SolverFailure", "SymmetryKind",
    "VerificationReport", "WingCurve", "bowl_series_start", "energy_identity_residual",
    "first_integral", "grim_field", "integrate", "picard_iterate", "shrinker_residual",
    "solve_bowl", "solve_grim", "solve_wing", "verify_curve", "z0_from_star", "z0_star_map",
]
