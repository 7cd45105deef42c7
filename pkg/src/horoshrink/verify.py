"""Verification of sampled profiles: equation residual plus conservation drift."""

from __future__ import annotations

import math

import numpy as np

from .errors import PreconditionError
from .geometry import FAMILY_SYMMETRY, GeneratingCurve, SymmetryKind, VerificationReport, shrinker_residual
from .grim import first_integral_array
from .rotational import energy_identity_residual


def verify_curve(curve: GeneratingCurve, family: SymmetryKind | str | None = None) -> VerificationReport:
    """Residual of ``H = <N, d/dz>`` and, where one exists, the drift of the
    family's conserved quantity.

    grim: the first integral, referenced to the value stored in the curve
    metadata (or at the first sample). bowl: the energy identity, whose
    right-hand side vanishes at the axis.
    """
    kind = None
    if family is not None:
        if family in FAMILY_SYMMETRY:
            kind = FAMILY_SYMMETRY[family]
        else:
            try:
                kind = SymmetryKind(family)
            except ValueError:
                raise PreconditionError(f"unknown family or symmetry {family!r}") from None
    rep = shrinker_residual(curve, kind)
    name = ref = drift = None
    if curve.family == "grim" and curve.theta is not None:
        c = first_integral_array(curve.z, curve.theta)
        ref = curve.meta.get("first_integral_c", float(c[0]))
        name = "first-integral"
        drift = float(np.max(np.abs(c - ref)))
    elif curve.family == "bowl" and "quad" in curve.extra:
        z0 = curve.meta.get("params", {}).get("z0", float(curve.z[0]))
        name = "energy-identity"
        ref = 2.0 * (1.0 / z0 + math.log(z0))
        drift = energy_identity_residual(curve)
    return VerificationReport(
        family=rep.family,
        symmetry=rep.symmetry,
        n_samples=rep.n_samples,
        max_residual=rep.max_residual,
        rms_residual=rep.rms_residual,
        conserved_quantity=name,
        reference_value=ref,
        max_drift=drift,
    )
