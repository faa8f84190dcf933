"""Scenario definitions and the built-in registry of test problems."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError
from ..limiters import LimiterConfig
from ..mesh import build_interval_mesh, build_rect_mesh, forward_step_mesh
from ..physics import (DMR_POST, SOD_LEFT, SOD_RIGHT, BoundaryCondition, BuckleyLeverett, Burgers,
                       ConservationLaw, Euler, LinearAdvection, advection_sine, burgers_sine,
                       dmr_state, euler_density_wave, exact_riemann)
from ..spatial import ADMISSIBILITY_POLICIES
from ..timestep import DEFAULT_CRKDG, DEFAULT_RKDG, get_tableau

SCHEME_KINDS = ("crkdg", "rkdg", "shu_osher_hybrid")


@dataclass(frozen=True)
class DtRule:
    """``fixed``: dt = value * h (h the nominal axis spacing).  ``cfl``: dt from wave speeds."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("fixed", "cfl"):
            raise ConfigurationError(f"unknown time-step rule {self.kind!r}")
        if not self.value > 0:
            raise ConfigurationError("time-step factor must be positive")


@dataclass(frozen=True)
class Scenario:
    name: str
    law: ConservationLaw
    domain: tuple  # ((a, b),) or ((x0, x1), (y0, y1))
    cells: tuple  # (N,) or (Nx, Ny)
    initial: Callable  # physical points (..., dim) -> states (..., n_var)
    boundary: dict  # side -> BoundaryCondition; axes absent from it are periodic
    flux: str
    degree: int
    end_time: float
    dt_rule: DtRule
    scheme: str = "crkdg"
    tableau: object = None  # name or ButcherTableau; None picks the default for the degree
    limiter: LimiterConfig = field(default_factory=LimiterConfig)
    exact: Callable | None = None  # (points, t) -> states
    perturbation: str = "none"
    geometry: str = "box"  # or "forward_step"
    error_component: int = 0
    limit_initial: bool = False
    density_bound: float | None = None  # asserted upper bound on density, if any
    error_scale: str = "absolute"  # or "mean": L1 / |domain| and L2 / sqrt|domain|
    admissibility: str = "quadrature"  # or "means"; see SpatialOperator
    initial_projection: str = "l2"  # or "means": start from the cell averages of the L2 projection

    def __post_init__(self):
        if not self.end_time > 0:
            raise ConfigurationError("end time must be positive")
        if self.scheme not in SCHEME_KINDS:
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        if len(self.cells) != len(self.domain):
            raise ConfigurationError("cell counts do not match the domain dimension")
        if not 0 <= self.degree <= 4:
            raise ConfigurationError("degree must be in [0, 4]")
        if self.tableau is not None:
            get_tableau(self.tableau)
        if self.initial_projection not in ("l2", "means"):
            raise ConfigurationError(f"unknown initial projection {self.initial_projection!r}")
        if self.admissibility not in ADMISSIBILITY_POLICIES:
            raise ConfigurationError(f"unknown admissibility policy {self.admissibility!r}")
        if self.error_scale not in ("absolute", "mean"):
            raise ConfigurationError(f"unknown error scale {self.error_scale!r}")

    @property
    def dim(self) -> int:
        return len(self.domain)

    @property
    def periodic(self) -> tuple:
        sides = (("left", "right"), ("bottom", "top"))[: self.dim]
        return tuple(all(s not in self.boundary for s in pair) for pair in sides)

    @property
    def domain_measure(self) -> float:
        return float(np.prod([b - a for a, b in self.domain]))

    @property
    def nominal_h(self) -> float:
        return max((b - a) / n for (a, b), n in zip(self.domain, self.cells))

    def resolved_tableau(self):
        if self.tableau is not None:
            return get_tableau(self.tableau)
        table = DEFAULT_RKDG if self.scheme == "rkdg" else DEFAULT_CRKDG
        return get_tableau(table[self.degree])

    def with_cells(self, n) -> "Scenario":
        """Copy at resolution ``n`` along x, keeping the aspect ratio of the grid."""
        n = int(n)
        if self.dim == 1:
            return dataclasses.replace(self, cells=(n,))
        nx, ny = self.cells
        return dataclasses.replace(self, cells=(n, max(1, round(n * ny / nx))))

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def initial_field(self, space):
        """Initial coefficients (before any initial limiting)."""
        u = space.project(self.initial)
        if self.initial_projection == "means":
            u[:, 1:, :] = 0.0
        return u

    def build_mesh(self):
        if self.geometry == "forward_step":
            return forward_step_mesh(*self.cells)
        if self.dim == 1:
            (a, b), = self.domain
            return build_interval_mesh(a, b, self.cells[0], self.perturbation, periodic=self.periodic[0])
        if self.perturbation not in ("none", None):
            raise ConfigurationError("node perturbation is only available in 1D")
        return build_rect_mesh(*self.domain, *self.cells, periodic=self.periodic)


# ------------------------------------------------------------------ registry

def _inflow(fn):
    return BoundaryCondition("inflow", fn)


def _crkdg_cfl(k, scheme, rk=(0.3, 0.18), ck=(0.3, 0.16)):
    c = rk if scheme == "rkdg" else ck
    return DtRule("cfl", c[0] if k <= 1 else c[1])


def burgers_sine_scenario(degree=1, scheme="crkdg", variant="uniform", cells=40):
    if variant not in ("uniform", "nonuniform"):
        raise ConfigurationError(f"unknown variant {variant!r}")
    return Scenario(
        name="burgers_sine", law=Burgers(), domain=((-np.pi, np.pi),), cells=(cells,),
        initial=lambda x: np.sin(x[..., 0])[..., None],
        boundary={}, flux="godunov_scalar", degree=degree, end_time=0.2,
        dt_rule=DtRule("fixed", 0.1 if degree <= 2 else 0.05), scheme=scheme,
        exact=lambda x, t: burgers_sine(x[..., 0], t)[..., None],
        perturbation="none" if variant == "uniform" else "alternating",
    )


def euler_wave_1d_scenario(degree=1, scheme="crkdg", variant=None, cells=20):
    law = Euler(1)
    return Scenario(
        name="euler_wave_1d", law=law, domain=((0.0, 2.0),), cells=(cells,),
        initial=lambda x: euler_density_wave(x, 0.0, law),
        boundary={}, flux="lax_friedrichs_local", degree=degree, end_time=2.0,
        dt_rule=_crkdg_cfl(degree, scheme), scheme=scheme,
        exact=lambda x, t: euler_density_wave(x, t, law),
    )


def advection_1d_scenario(degree=2, scheme="crkdg", variant="inflow", cells=40):
    if variant not in ("periodic", "inflow"):
        raise ConfigurationError(f"unknown variant {variant!r}")
    law = LinearAdvection((1.0,))
    exact = lambda x, t: advection_sine(x, t)  # noqa: E731
    boundary = {} if variant == "periodic" else {"left": _inflow(exact), "right": BoundaryCondition("outflow")}
    return Scenario(
        name="advection_1d", law=law, domain=((0.0, 4 * np.pi),), cells=(cells,),
        initial=lambda x: exact(x, 0.0), boundary=boundary, flux="upwind_linear", degree=degree,
        end_time=20.0, dt_rule=DtRule("fixed", 0.16), scheme=scheme, exact=exact,
    )


def euler_wave_2d_scenario(degree=1, scheme="crkdg", variant=None, cells=20):
    law = Euler(2)
    return Scenario(
        name="euler_wave_2d", law=law, domain=((0.0, 2.0), (0.0, 2.0)), cells=(cells, cells),
        initial=lambda x: euler_density_wave(x, 0.0, law),
        boundary={}, flux="lax_friedrichs_local", degree=degree, end_time=0.5,
        dt_rule=_crkdg_cfl(degree, scheme, rk=(0.3, 0.18), ck=(0.2, 0.12)), scheme=scheme,
        exact=lambda x, t: euler_density_wave(x, t, law), error_scale="mean",
    )


def advection_2d_scenario(degree=3, scheme="crkdg", variant="inflow", cells=20):
    if variant not in ("periodic", "inflow"):
        raise ConfigurationError(f"unknown variant {variant!r}")
    beta = (1.0, 1.0)
    exact = lambda x, t: advection_sine(x, t, beta, np.pi)  # noqa: E731
    out = BoundaryCondition("outflow")
    boundary = {} if variant == "periodic" else {
        "left": _inflow(exact), "bottom": _inflow(exact), "right": out, "top": out}
    return Scenario(
        name="advection_2d", law=LinearAdvection(beta), domain=((-1.0, 1.0), (-1.0, 1.0)),
        cells=(cells, cells), initial=lambda x: exact(x, 0.0), boundary=boundary,
        flux="upwind_linear", degree=degree, end_time=0.4,
        dt_rule=DtRule("fixed", 1 / 20 if scheme == "rkdg" else 1 / 30), scheme=scheme, exact=exact,
        error_scale="mean",
    )


# sup |f'| of the Buckley-Leverett flux (attained near u = 0.2871); cell-mean speeds
# badly underestimate it when the data sit at the flat tails of f
BL_MAX_SPEED = 2.33203037583


def buckley_leverett_scenario(degree=1, scheme="crkdg", variant="test1", cells=80):
    states = {"test1": (2.0, -2.0), "test2": (-3.0, 3.0)}
    if variant not in states:
        raise ConfigurationError(f"unknown variant {variant!r}")
    ul, ur = states[variant]
    out = BoundaryCondition("outflow")
    return Scenario(
        name="buckley_leverett", law=BuckleyLeverett(), domain=((-1.0, 1.0),), cells=(cells,),
        initial=lambda x: np.where(x[..., 0] < 0.0, ul, ur)[..., None],
        boundary={"left": out, "right": out}, flux="godunov_scalar", degree=degree, end_time=1.0,
        dt_rule=DtRule("fixed", _crkdg_cfl(degree, scheme).value / BL_MAX_SPEED), scheme=scheme,
        limiter=LimiterConfig("tvb_weno", 1.0), limit_initial=True,
    )


def sod_scenario(degree=2, scheme="crkdg", variant=None, cells=100):
    law = Euler(1)
    out = BoundaryCondition("outflow")

    def exact(x, t):
        rho, w, p = exact_riemann(x[..., 0], t, SOD_LEFT, SOD_RIGHT, 0.5, law.gamma)
        return law.to_conserved(rho, [w], p)

    pieces = [(0.5, SOD_LEFT), (np.inf, SOD_RIGHT)]
    return Scenario(
        name="sod", law=law, domain=((0.0, 1.0),), cells=(cells,),
        initial=lambda x: _piecewise_euler(law, x, pieces), boundary={"left": out, "right": out},
        flux="lax_friedrichs_local", degree=degree, end_time=0.2, dt_rule=_crkdg_cfl(degree, scheme),
        scheme=scheme, limiter=LimiterConfig("tvb_weno", 1.0), exact=exact, limit_initial=True,
    )


def _piecewise_euler(law, x, pieces):
    """pieces: [(upper_bound, (rho, w, p)), ...] in increasing order."""
    x = x[..., 0]
    rho, w, p = (np.empty_like(x) for _ in range(3))
    lo = -np.inf
    for hi, (r, v, q) in pieces:
        sel = (x > lo) & (x <= hi)
        rho[sel], w[sel], p[sel] = r, v, q
        lo = hi
    return law.to_conserved(rho, [w], p)


def blast_wave_scenario(degree=2, scheme="crkdg", variant=None, cells=300):
    law = Euler(1)
    wall = BoundaryCondition("reflective")
    pieces = [(0.1, (1.0, 0.0, 1000.0)), (0.9, (1.0, 0.0, 0.01)), (np.inf, (1.0, 0.0, 100.0))]
    return Scenario(
        name="blast_wave", law=law, domain=((0.0, 1.0),), cells=(cells,),
        initial=lambda x: _piecewise_euler(law, x, pieces), boundary={"left": wall, "right": wall},
        flux="lax_friedrichs_local", degree=degree, end_time=0.038, dt_rule=_crkdg_cfl(degree, scheme),
        scheme=scheme, limiter=LimiterConfig("tvb_weno", 200.0), limit_initial=True,
    )


SHU_OSHER_LEFT = (3.857143, 2.629369, 10.333333)


def shu_osher_scenario(degree=2, scheme="crkdg", variant=None, cells=200):
    law = Euler(1)

    def initial(x):
        xs = x[..., 0]
        left = xs < -4.0
        rho = np.where(left, SHU_OSHER_LEFT[0], 1.0 + 0.2 * np.sin(5.0 * xs))
        w = np.where(left, SHU_OSHER_LEFT[1], 0.0)
        p = np.where(left, SHU_OSHER_LEFT[2], 1.0)
        return law.to_conserved(rho, [w], p)

    left_state = law.to_conserved(np.array(SHU_OSHER_LEFT[0]), [SHU_OSHER_LEFT[1]], SHU_OSHER_LEFT[2])
    inflow = _inflow(lambda pts, t: np.broadcast_to(left_state, pts.shape[:-1] + (3,)))
    return Scenario(
        name="shu_osher", law=law, domain=((-5.0, 5.0),), cells=(cells,), initial=initial,
        boundary={"left": inflow, "right": BoundaryCondition("outflow")},
        flux="lax_friedrichs_local", degree=degree, end_time=1.8, dt_rule=_crkdg_cfl(degree, scheme),
        scheme=scheme, limiter=LimiterConfig("tvb_weno", 200.0), limit_initial=True,
    )


def double_mach_scenario(degree=1, scheme="crkdg", variant=None, cells=480):
    law = Euler(2)
    post = law.to_conserved(np.array(DMR_POST[0]), [DMR_POST[1], DMR_POST[2]], DMR_POST[3])
    return Scenario(
        name="double_mach", law=law, domain=((0.0, 4.0), (0.0, 1.0)), cells=(cells, cells // 4),
        initial=lambda x: dmr_state(x[..., 0], x[..., 1], 0.0, law),
        boundary={"left": _inflow(lambda pts, t: np.broadcast_to(post, pts.shape[:-1] + (4,))),
                  "right": BoundaryCondition("outflow"),
                  "top": BoundaryCondition("double_mach_top"),
                  "bottom": BoundaryCondition("double_mach_bottom")},
        flux="lax_friedrichs_local", degree=degree, end_time=0.2,
        dt_rule=_crkdg_cfl(degree, scheme, rk=(0.3, 0.18), ck=(0.2, 0.12)), scheme=scheme,
        limiter=LimiterConfig("tvb_minmod", 50.0, characteristic=True), limit_initial=True, density_bound=25.0,
        admissibility="means", initial_projection="means",
    )


MACH3_STATE = (1.4, 3.0, 0.0, 1.0)


def forward_step_scenario(degree=1, scheme="crkdg", variant=None, cells=240):
    law = Euler(2)
    r, u, v, p = MACH3_STATE
    free = law.to_conserved(np.array(r), [u, v], p)
    wall = BoundaryCondition("reflective")
    return Scenario(
        name="forward_step", law=law, domain=((0.0, 3.0), (0.0, 1.0)), cells=(cells, cells // 3),
        initial=lambda x: np.broadcast_to(free, x.shape[:-1] + (4,)).copy(),
        boundary={"left": _inflow(lambda pts, t: np.broadcast_to(free, pts.shape[:-1] + (4,))),
                  "right": BoundaryCondition("outflow"), "top": wall, "bottom": wall, "step": wall},
        flux="lax_friedrichs_local", degree=degree, end_time=4.0,
        dt_rule=_crkdg_cfl(degree, scheme, rk=(0.3, 0.18), ck=(0.2, 0.12)), scheme=scheme,
        limiter=LimiterConfig("tvb_minmod", 50.0, characteristic=True), geometry="forward_step",
        density_bound=25.0,
        admissibility="means",
    )


REGISTRY = {
    "burgers_sine": burgers_sine_scenario,
    "euler_wave_1d": euler_wave_1d_scenario,
    "advection_1d": advection_1d_scenario,
    "euler_wave_2d": euler_wave_2d_scenario,
    "advection_2d": advection_2d_scenario,
    "buckley_leverett": buckley_leverett_scenario,
    "sod": sod_scenario,
    "blast_wave": blast_wave_scenario,
    "shu_osher": shu_osher_scenario,
    "double_mach": double_mach_scenario,
    "forward_step": forward_step_scenario,
}


def get_scenario(name, **options) -> Scenario:
    """Build a registered scenario; options: degree, scheme, variant, cells."""
    if name not in REGISTRY:
        raise ConfigurationError(f"unknown scenario {name!r}; known: {sorted(REGISTRY)}")
    options = {k: v for k, v in options.items() if v is not None}
    return REGISTRY[name](**options)
