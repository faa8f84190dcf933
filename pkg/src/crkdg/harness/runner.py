"""Time marching of scenarios, error norms and convergence studies."""
from __future__ import annotations

import logging
import math
import time as _time
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels as K
from ..errors import AdmissibilityError, NumericError
from ..limiters import Limiter
from ..physics import Euler
from ..spatial import DGSpace, SpatialOperator
from ..timestep import compute_dt, step_crkdg, step_rkdg, step_shu_osher_hybrid
from .scenarios import Scenario

log = logging.getLogger(__name__)

TIME_EPS = 1e-12


@dataclass
class RunResult:
    scenario: Scenario
    space: DGSpace
    u: np.ndarray
    time: float
    steps: int
    wall_time: float
    drift: np.ndarray  # relative conservation drift after every step
    min_density: float = math.inf
    min_pressure: float = math.inf
    max_density: float = -math.inf
    troubled: list = field(default_factory=list)
    errors: dict | None = None  # {"L1", "L2", "Linf"} of the error component

    @property
    def max_drift(self) -> float:
        return float(self.drift.max(initial=0.0))

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.u)))


def error_norms(space: DGSpace, u, exact, t, component=0, n_points=None, measure=None):
    """L1, L2 and L-infinity errors of one component on a (k+3)-point tensor rule.

    Norms are integrals over the domain; with ``measure`` they are divided by
    the domain measure (L1) or its square root (L2).
    """
    n = n_points or space.k + 3
    pts, wts, V = space.quadrature_points(n)
    num = np.matmul(V, u)[..., component]
    ref = np.asarray(exact(pts, t), float)[..., component]
    e = np.abs(num - ref)
    m = 1.0 if measure is None else float(measure)
    return {"L1": float(np.sum(wts * e)) / m, "L2": float(np.sqrt(np.sum(wts * e * e) / m)),
            "Linf": float(e.max())}


def _drift(space, u, reference, scale):
    return float(np.max(np.abs(space.total(u) - reference)) / scale)


def time_step(scenario: Scenario, space, u, law):
    rule = scenario.dt_rule
    if rule.kind == "fixed":
        return rule.value * scenario.nominal_h
    return compute_dt(space, u, law, rule.value)


def build_solver(scenario: Scenario):
    """Mesh, space, operator and limiter for a scenario."""
    mesh = scenario.build_mesh()
    space = DGSpace(mesh, scenario.degree)
    op = SpatialOperator(space, scenario.law, scenario.flux, scenario.boundary,
                         admissibility=scenario.admissibility)
    limiter = Limiter(space, scenario.law, scenario.limiter, scenario.boundary)
    return space, op, limiter


def run_scenario(scenario: Scenario, max_steps=None, callback=None) -> RunResult:
    """March ``scenario`` to its end time; final step is clamped onto the end time.

    Admissibility failures are re-raised with the step number and time.
    """
    t0 = _time.perf_counter()
    space, op, limiter = build_solver(scenario)
    law = scenario.law
    u = scenario.initial_field(space)
    if scenario.limit_initial:
        u = limiter(u)
    tab = scenario.resolved_tableau()
    scheme = scenario.scheme
    total0 = space.total(u)
    # relative to max_v sum |K| |mean_v|, which stays meaningful when a total is zero
    scale = max(float(np.max(space.mesh.volumes @ np.abs(space.cell_means(u)))), 1e-300)
    result = RunResult(scenario, space, u, 0.0, 0, 0.0, np.zeros(0))
    drift = []
    t, T, n = 0.0, scenario.end_time, 0
    is_euler = isinstance(law, Euler)
    # extrema are taken over the states the admissibility policy constrains
    states = space.volume_values if scenario.admissibility == "quadrature" else \
        (lambda v: space.cell_means(v)[:, None, :])
    while T - t > TIME_EPS * max(1.0, T):
        dt = min(time_step(scenario, space, u, law), T - t)
        try:
            if scheme == "crkdg":
                u = step_crkdg(tab, u, dt, op, limiter, t)
            elif scheme == "rkdg":
                u = step_rkdg(tab, u, dt, op, limiter, t)
            else:
                u = step_shu_osher_hybrid(u, dt, op, limiter, t)
        except AdmissibilityError as exc:
            exc.args = (f"{exc.args[0]} at step {n + 1}, t={t:.6g}",)
            raise
        n += 1
        t = T if T - (t + dt) <= TIME_EPS * max(1.0, T) else t + dt
        if not np.all(np.isfinite(u)):
            bad = int(np.argwhere(~np.isfinite(u))[0][0])
            raise NumericError(f"non-finite coefficients at step {n}, t={t:.6g}", cell=bad)
        drift.append(_drift(space, u, total0, scale))
        result.troubled.append(limiter.last_flagged)
        if is_euler:
            rmin, rmax, pmin = K.euler_extrema(states(u), law.gamma)
            result.min_density = min(result.min_density, rmin)
            result.max_density = max(result.max_density, rmax)
            result.min_pressure = min(result.min_pressure, pmin)
        if callback is not None:
            callback(n, t, u)
        if max_steps is not None and n >= max_steps:
            break
    result.u, result.time, result.steps = u, t, n
    result.drift = np.asarray(drift)
    if scenario.exact is not None and abs(t - T) <= TIME_EPS * max(1.0, T):
        measure = scenario.domain_measure if scenario.error_scale == "mean" else None
        result.errors = error_norms(space, u, scenario.exact, t, scenario.error_component, measure=measure)
    result.wall_time = _time.perf_counter() - t0
    log.info("%s N=%s k=%d %s: %d steps in %.2fs", scenario.name, scenario.cells, scenario.degree,
             scheme, n, result.wall_time)
    return result


@dataclass
class ErrorReport:
    """Per-mesh errors with observed orders log2(e_N / e_2N) between successive refinements."""

    cells: list
    l1: list
    l2: list
    linf: list
    wall: list

    @staticmethod
    def _orders(cells, errs):
        out = [None]
        for i in range(1, len(cells)):
            ok = cells[i] == 2 * cells[i - 1] and errs[i] > 0 and errs[i - 1] > 0
            out.append(math.log2(errs[i - 1] / errs[i]) if ok else None)
        return out

    @property
    def l2_orders(self):
        return self._orders(self.cells, self.l2)

    @property
    def linf_orders(self):
        return self._orders(self.cells, self.linf)

    @property
    def l1_orders(self):
        return self._orders(self.cells, self.l1)

    def rows(self):
        for row in zip(self.cells, self.l2, self.l2_orders, self.linf, self.linf_orders, self.wall):
            yield row

    def format(self) -> str:
        lines = [f"{'N':>6}  {'L2 error':>11} {'order':>6}  {'Linf error':>11} {'order':>6}"]
        for n, e2, o2, ei, oi, _ in self.rows():
            fo = lambda o: "     -" if o is None else f"{o:6.2f}"  # noqa: E731
            lines.append(f"{n:>6}  {e2:11.4e} {fo(o2)}  {ei:11.4e} {fo(oi)}")
        return "\n".join(lines)


def convergence_study(scenario: Scenario, cells) -> ErrorReport:
    """Run ``scenario`` on each resolution in ``cells``; needs an exact solution."""
    if scenario.exact is None:
        raise NumericError(f"scenario {scenario.name!r} has no exact solution")
    rep = ErrorReport([], [], [], [], [])
    for n in cells:
        res = run_scenario(scenario.with_cells(n))
        rep.cells.append(int(n))
        rep.l1.append(res.errors["L1"])
        rep.l2.append(res.errors["L2"])
        rep.linf.append(res.errors["Linf"])
        rep.wall.append(res.wall_time)
    return rep
