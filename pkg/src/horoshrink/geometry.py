"""Upper half-space conventions and the horo-shrinker residual oracle.

A point of hyperbolic 3-space is ``(x, y, z)`` with ``z > 0`` and metric
``<.,.>_e / z**2``. Surfaces are handled through their Euclidean mean
curvature ``H_e`` and Euclidean unit normal ``N_e``; the hyperbolic mean
curvature is ``z * H_e + N_e[2]`` and ``<N, d/dz> = N_e[2] / z``.

The residual oracle never touches the generating ODEs: it rebuilds tangent
angle and curvature of a sampled profile with centered finite differences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError


class SymmetryKind(str, enum.Enum):
    """Invariance group of a surface built from a planar profile (x, z)."""

    PARABOLIC = "parabolic-cylinder"  # rulings parallel to (0, 1, 0)
    ROTATIONAL = "rotational"  # axis = z-axis


FAMILY_SYMMETRY = {
    "grim": SymmetryKind.PARABOLIC,
    "vertical-plane": SymmetryKind.PARABOLIC,
    "horosphere": SymmetryKind.ROTATIONAL,
    "bowl": SymmetryKind.ROTATIONAL,
    "wing": SymmetryKind.ROTATIONAL,
}


@dataclass(frozen=True)
class UpperHalfSpacePoint:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0:
            raise DomainError(f"height must be positive, got z={self.z!r}")


@dataclass(frozen=True)
class CurvatureSample:
    point: UpperHalfSpacePoint
    euclidean_mean_curvature: float
    euclidean_normal: tuple[float, float, float]
    hyperbolic_mean_curvature: float

    def __post_init__(self):
        if abs(np.linalg.norm(self.euclidean_normal) - 1.0) > 1e-12:
            raise DomainError("Euclidean normal must be a unit vector")

    @classmethod
    def from_euclidean(cls, point, H_e, N_e):
        N_e = tuple(float(v) for v in N_e)
        H = hyperbolic_from_euclidean(point.z, H_e, N_e[2])
        return cls(point, float(H_e), N_e, H)

    @property
    def normal_dot_dz(self) -> float:
        return self.euclidean_normal[2] / self.point.z

    @property
    def residual(self) -> float:
        return self.hyperbolic_mean_curvature - self.normal_dot_dz


def hyperbolic_from_euclidean(z: float, H_e: float, N_e3: float) -> float:
    """Hyperbolic mean curvature from Euclidean data at height ``z``."""
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    return z * H_e + N_e3


def hyperbolic_inner(u, v, z: float) -> float:
    """Hyperbolic metric at height ``z`` applied to Euclidean components."""
    if not z > 0:
        raise DomainError(f"height must be positive, got z={z!r}")
    return float(np.dot(u, v)) / z**2


def normal_dot_dz(N_e, z: float) -> float:
    """``<N, d/dz>`` for the hyperbolic unit normal ``N = z * N_e``."""
    return hyperbolic_inner(z * np.asarray(N_e, dtype=float), (0.0, 0.0, 1.0), z)


@dataclass
class GeneratingCurve:
    """A sampled planar profile (x(t), z(t)) plus family metadata.

    ``param`` is hyperbolic or Euclidean arc length (``param_name="s"``)
    or the radial graph variable (``param_name="r"``). ``extra`` holds
    family specific columns such as the slope and the energy accumulator
    of bowl profiles.
    """

    family: str
    param: np.ndarray
    x: np.ndarray
    z: np.ndarray
    theta: np.ndarray | None = None
    param_name: str = "s"
    extra: dict[str, np.ndarray] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.param = np.asarray(self.param, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        if self.theta is not None:
            self.theta = np.asarray(self.theta, dtype=float)
        n = len(self.param)
        cols = [self.x, self.z] + ([self.theta] if self.theta is not None else [])
        cols += list(self.extra.values())
        if any(len(c) != n for c in cols):
            raise ValueError("all curve columns must have the same length")

    @property
    def symmetry(self) -> SymmetryKind:
        return FAMILY_SYMMETRY[self.family]

    def __len__(self):
        return len(self.param)

    def columns(self) -> dict[str, np.ndarray]:
        cols = {self.param_name: self.param, "x": self.x, "z": self.z}
        if self.theta is not None:
            cols["theta"] = self.theta
        cols.update(self.extra)
        return cols


@dataclass(frozen=True)
class VerificationReport:
    family: str
    symmetry: str
    n_samples: int
    max_residual: float
    rms_residual: float
    conserved_quantity: str | None = None
    reference_value: float | None = None
    max_drift: float | None = None

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "symmetry": self.symmetry,
            "n_samples": self.n_samples,
            "max_residual": self.max_residual,
            "rms_residual": self.rms_residual,
            "conserved_quantity": self.conserved_quantity,
            "reference_value": self.reference_value,
            "max_drift": self.max_drift,
        }


def centered_derivatives(t: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """First and second derivatives at interior nodes of a (non-uniform) grid.

    Three-point Lagrange stencils; second order on smooth grids. Written
    in terms of forward/backward differences so constant columns give
    exactly zero derivatives.
    """
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    back = f[1:-1] - f[:-2]
    fwd = f[2:] - f[1:-1]
    d1 = (h1 * h1 * fwd + h2 * h2 * back) / (h1 * h2 * (h1 + h2))
    d2 = 2.0 * (fwd / h2 - back / h1) / (h1 + h2)
    return d1, d2


def residual_profile(curve: GeneratingCurve, family=None) -> np.ndarray:
    """``H - <N, d/dz>`` at every interior sample of ``curve``."""
    kind = SymmetryKind(family) if family is not None else curve.symmetry
    t, x, z = curve.param, curve.x, curve.z
    if len(t) < 5:
        raise PreconditionError("residual needs at least 5 samples")
    if np.any(np.diff(t) <= 0):
        raise PreconditionError("curve parameter must be strictly increasing")
    if np.any(z <= 0):
        raise DomainError("profile leaves the upper half-space")
    xd, xdd = centered_derivatives(t, x)
    zd, zdd = centered_derivatives(t, z)
    speed = np.hypot(xd, zd)
    kappa = (xd * zdd - zd * xdd) / speed**3
    cos_t = xd / speed
    sin_t = zd / speed
    zi = z[1:-1]
    if kind is SymmetryKind.PARABOLIC:
        H_e = 0.5 * kappa
    else:
        xi = x[1:-1]
        if np.any(xi <= 0):
            raise DomainError("rotational profile touches the axis at an interior sample")
        H_e = 0.5 * (kappa + sin_t / xi)
    H = zi * H_e + cos_t
    return H - cos_t / zi


def shrinker_residual(curve: GeneratingCurve, family=None) -> VerificationReport:
    """Max and RMS of ``H - <N, d/dz>`` over interior samples."""
    kind = SymmetryKind(family) if family is not None else curve.symmetry
    res = residual_profile(curve, kind)
    return VerificationReport(
        family=curve.family,
        symmetry=kind.value,
        n_samples=len(curve),
        max_residual=float(np.max(np.abs(res))),
        rms_residual=float(np.sqrt(np.mean(res**2))),
    )


def horosphere_curve(x_range=(0.0, 10.0), n: int = 2001, family: str = "horosphere") -> GeneratingCurve:
    """Profile of the horosphere z = 1 (as a rotational or ruled surface)."""
    s = np.linspace(x_range[0], x_range[1], n)
    return GeneratingCurve(
        family, s, s.copy(), np.ones(n), np.zeros(n), meta={"params": {"z0": 1.0}}
    )


def vertical_plane_curve(x0: float = 0.0, z_range=(0.5, 5.0), n: int = 2001) -> GeneratingCurve:
    """Profile of the vertical plane x = x0, parametrized by height."""
    s = np.linspace(0.0, np.log(z_range[1] / z_range[0]), n)
    z = z_range[0] * np.exp(s)
    return GeneratingCurve(
        "vertical-plane",
        s,
        np.full(n, float(x0)),
        z,
        np.full(n, np.pi / 2),
        meta={"params": {"x0": float(x0)}},
    )
