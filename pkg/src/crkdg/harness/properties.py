"""Pass/fail evaluation of the properties a run configuration asserts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..physics import Euler


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def total_variation(space, u, component=0):
    return float(np.sum(np.abs(np.diff(space.cell_means(u)[:, component]))))


def drift_per_100(result) -> float:
    """Largest drift increase over any window of 100 steps."""
    d = np.concatenate([[0.0], result.drift])
    if len(d) <= 101:
        return float(d.max())
    return float(np.max(np.abs(d[100:] - d[:-100])))


def check_run(result, props, initial_tv=None, reference_l1=None):
    """Checks on a completed run; completion itself is implied by having a result."""
    out = [Check("completion", result.finite and abs(result.time - result.scenario.end_time)
                 <= 1e-12 * max(1.0, result.scenario.end_time),
                 f"t={result.time:.6g} after {result.steps} steps")]
    if props.positivity and isinstance(result.scenario.law, Euler):
        ok = result.min_density > 0 and result.min_pressure > 0
        out.append(Check("positivity", ok, f"min rho={result.min_density:.4g}, min p={result.min_pressure:.4g}"))
    if props.density_max is not None and isinstance(result.scenario.law, Euler):
        ok = 0 < result.min_density and result.max_density <= props.density_max
        out.append(Check("density_range", ok, f"rho in [{result.min_density:.4g}, {result.max_density:.4g}], "
                         f"bound (0, {props.density_max:g}]"))
    if props.conservation_tol is not None:
        w = drift_per_100(result)
        out.append(Check("conservation", w <= props.conservation_tol,
                         f"drift per 100 steps {w:.3e} (tol {props.conservation_tol:g})"))
    err = result.errors or {}
    for key, lim in (("L2", props.max_l2_error), ("Linf", props.max_linf_error)):
        if lim is not None:
            e = err.get(key, math.nan)
            out.append(Check(f"{key}_error", e <= lim, f"{e:.4e} (limit {lim:g})"))
    if props.max_tv_growth is not None and initial_tv is not None:
        g = total_variation(result.space, result.u) / max(initial_tv, 1e-300)
        out.append(Check("tv_growth", g < props.max_tv_growth, f"factor {g:.3f} (limit {props.max_tv_growth:g})"))
    if props.max_reference_l1 is not None and reference_l1 is not None:
        out.append(Check("reference_l1", reference_l1 <= props.max_reference_l1,
                         f"{reference_l1:.4e} (limit {props.max_reference_l1:g})"))
    return out


def check_convergence(report, props):
    out = []
    orders = {"l1": report.l1_orders, "l2": report.l2_orders, "linf": report.linf_orders}[props.order_norm]
    picked = [(n, o) for n, o in zip(report.cells, orders) if o is not None and n >= props.order_from]
    text = ", ".join(f"N={n}: {o:.3f}" for n, o in picked) or "no orders"
    if props.min_order is not None:
        out.append(Check(f"{props.order_norm}_min_order", bool(picked) and all(o >= props.min_order for _, o in picked),
                         f"{text} (>= {props.min_order:g})"))
    if props.max_order is not None:
        out.append(Check(f"{props.order_norm}_max_order", bool(picked) and all(o <= props.max_order for _, o in picked),
                         f"{text} (<= {props.max_order:g})"))
    for key, lim, errs in (("L2", props.max_l2_error, report.l2), ("Linf", props.max_linf_error, report.linf)):
        if lim is not None:
            out.append(Check(f"finest_{key}_error", errs[-1] <= lim, f"{errs[-1]:.4e} (limit {lim:g})"))
    return out
