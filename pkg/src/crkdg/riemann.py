"""Interface numerical fluxes f_hat . nu."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigurationError
from .physics import ConservationLaw, ScalarLaw

FLUX_KINDS = ("lax_friedrichs_local", "lax_friedrichs_global", "godunov_scalar", "upwind_linear")
_ALIASES = {"llf": "lax_friedrichs_local", "lf": "lax_friedrichs_local",
            "local_lax_friedrichs": "lax_friedrichs_local", "godunov": "godunov_scalar",
            "upwind": "upwind_linear", "global_lax_friedrichs": "lax_friedrichs_global"}


@dataclass(frozen=True)
class FluxScheme:
    kind: str = "lax_friedrichs_local"
    alpha: float | None = None  # for the global Lax-Friedrichs flux

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in FLUX_KINDS:
            raise ConfigurationError(f"unknown flux scheme {self.kind!r}")
        object.__setattr__(self, "kind", kind)


def numerical_flux(scheme: FluxScheme, law: ConservationLaw, uL, uR, axis=0, sign=1.0, alpha=None):
    """f_hat(uL, uR) . nu with nu = sign * e_axis; uL is the interior trace.

    ``alpha`` overrides the local Lax-Friedrichs viscosity (e.g. the cell-mean
    based per-edge value used by the DG operator); it broadcasts against the
    state arrays without their variable axis.
    """
    uL = np.asarray(uL, float)
    uR = np.asarray(uR, float)
    kind = scheme.kind
    if kind == "godunov_scalar":
        if not isinstance(law, ScalarLaw):
            raise ConfigurationError("Godunov flux is only available for scalar laws")
        return _godunov(law, uL[..., 0], uR[..., 0], axis, sign)[..., None]
    if kind == "upwind_linear":
        if not getattr(law, "linear", False) or law.n_var != 1:
            raise ConfigurationError("upwind flux needs a scalar linear law")
        bn = sign * law.beta[axis]
        return bn * (uL if bn >= 0 else uR)
    fL = sign * law.flux(uL, axis)
    fR = sign * law.flux(uR, axis)
    if kind == "lax_friedrichs_global":
        a = scheme.alpha
        if a is None:
            if not getattr(law, "linear", False):
                raise ConfigurationError("global Lax-Friedrichs flux needs an explicit alpha")
            a = float(np.max(np.abs(law.beta)))
        return 0.5 * (fL + fR - a * (uR - uL))
    a = law.alpha(uL, uR, axis) if alpha is None else np.asarray(alpha, float)
    return 0.5 * (fL + fR - a[..., None] * (uR - uL))


def _godunov(law: ScalarLaw, uL, uR, axis, sign):
    if K.USE_NUMBA and law.scalar_kind is not None:
        param = law.beta[axis] if law.scalar_kind == K.SCALAR_LINEAR else 0.0
        return K.godunov_numba(law.scalar_kind, param, sign, uL, uR)

    def g(u):
        return sign * law.flux(np.asarray(u)[..., None], axis)[..., 0]

    return K.godunov_numpy(g, uL, uR)
