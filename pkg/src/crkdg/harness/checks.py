"""Self-contained algebraic checks: compact-step / single-step equivalence and tableau identities."""
from __future__ import annotations

import numpy as np

from ..mesh import build_interval_mesh
from ..physics import LinearAdvection
from ..spatial import DGSpace, SpatialOperator
from ..timestep import builtin_tableaus, get_tableau, lwdg_linear_step, step_crkdg
from .properties import Check

EQUIVALENCE_TOL = 1e-12
TABLEAU_TOL = 1e-14
# (tableau, degree) pairs whose compact step is compared with the single-step Taylor form
EQUIVALENCE_CASES = (("midpoint", 1), ("third_order", 2), ("rk4", 3))


def equivalence_residuals(seed=0, n_fields=50, cells=16, cfl=0.1, perturbation="alternating"):
    """Max-norm gap between one compact step and the single-step form, per tableau."""
    rng = np.random.default_rng(seed)
    law = LinearAdvection((1.0,))
    out = {}
    for name, k in EQUIVALENCE_CASES:
        tab = get_tableau(name)
        mesh = build_interval_mesh(0.0, 1.0, cells, perturbation, periodic=True)
        space = DGSpace(mesh, k)
        op = SpatialOperator(space, law, "upwind_linear", {})
        dt = cfl * mesh.widths.min()
        worst = 0.0
        for _ in range(n_fields):
            u = rng.standard_normal((cells, k + 1, 1))
            a = step_crkdg(tab, u, dt, op)
            b = lwdg_linear_step(op, u, dt, tab.order)
            worst = max(worst, float(np.max(np.abs(a - b))))
        out[name] = worst
    return out


def equivalence_checks(seed=0, n_fields=50):
    return [Check(f"equivalence[{name}]", r <= EQUIVALENCE_TOL, f"max |diff| {r:.3e} over {n_fields} fields")
            for name, r in equivalence_residuals(seed, n_fields).items()]


def tableau_checks():
    out = []
    for name, tab in builtin_tableaus().items():
        s = abs(float(np.sum(tab.b)) - 1.0)
        res = float(np.max(np.abs(tab.linear_order_residuals()))) if tab.linear_order else 0.0
        ok = s <= TABLEAU_TOL and res <= TABLEAU_TOL
        out.append(Check(f"tableau[{name}]", ok, f"|sum b - 1| = {s:.1e}, order residual {res:.1e}"))
    return out
