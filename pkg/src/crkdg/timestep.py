"""Butcher tableaus and the fully discrete RKDG / compact RKDG steppers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Fr
from math import factorial

import numpy as np

from .errors import AdmissibilityError, ConfigurationError, ParameterError


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    name: str
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    order: int
    linear_order: bool = True  # satisfies the linear order conditions up to ``order``
    exact: tuple | None = field(default=None, repr=False)  # rational entries when known

    @property
    def stages(self) -> int:
        return len(self.b)

    def d_coefficients(self) -> np.ndarray:
        """d[i, l] (1-based i, 0-based l): d_i0 = 1, d_il = sum_{m=l}^{i-1} a_im d_{m,l-1}."""
        s = self.stages
        d = np.zeros((s + 1, s))
        for i in range(1, s + 1):
            d[i, 0] = 1.0
            for l in range(1, i):
                d[i, l] = sum(self.A[i - 1, m - 1] * d[m, l - 1] for m in range(l, i))
        return d

    def linear_order_residuals(self) -> np.ndarray:
        """sum_{i=l+1}^s b_i d_il - 1/(l+1)! for l = 0..order-1."""
        d = self.d_coefficients()
        s = self.stages
        res = []
        for l in range(self.order):
            lhs = sum(self.b[i - 1] * d[i, l] for i in range(l + 1, s + 1))
            res.append(lhs - 1.0 / factorial(l + 1))
        return np.array(res)

    def check(self, tol=1e-12):
        """Shape, explicitness, row sums and the linear order conditions."""
        A, s = self.A, self.stages
        if A.shape != (s, s) or self.c.shape != (s,) or s == 0:
            raise ParameterError(f"tableau {self.name!r}: A must be {s}x{s} and c of length {s}")
        if np.any(np.triu(A) != 0):
            raise ParameterError(f"tableau {self.name!r} is not explicit")
        if np.max(np.abs(A.sum(axis=1) - self.c)) > tol:
            raise ParameterError(f"tableau {self.name!r}: c differs from the row sums of A")
        if self.order < 1:
            raise ParameterError(f"tableau {self.name!r}: order must be positive")
        if self.linear_order and np.max(np.abs(self.linear_order_residuals())) > tol:
            raise ParameterError(f"tableau {self.name!r} misses the order-{self.order} linear conditions")


def _tableau(name, A, b, c, order, linear_order=True):
    Af = np.array([[float(x) for x in row] for row in A])
    return ButcherTableau(name, Af, np.array([float(x) for x in b]), np.array([float(x) for x in c]),
                          order, linear_order, exact=(A, b, c))


_TABLEAUS = {
    "forward_euler": _tableau("forward_euler", [[0]], [1], [0], 1),
    # two-stage second order, a21 = 1/2, b = (0, 1)
    "midpoint": _tableau("midpoint", [[0, 0], [Fr(1, 2), 0]], [0, 1], [0, Fr(1, 2)], 2),
    # Butcher form of SSP-RK2 (Heun)
    "heun": _tableau("heun", [[0, 0], [1, 0]], [Fr(1, 2), Fr(1, 2)], [0, 1], 2),
    # three-stage third order with a31 = 0 used by the third-order compact scheme
    "third_order": _tableau("third_order",
                            [[0, 0, 0], [Fr(1, 3), 0, 0], [0, Fr(2, 3), 0]],
                            [Fr(1, 4), 0, Fr(3, 4)], [0, Fr(1, 3), Fr(2, 3)], 3),
    # Butcher form of SSP-RK3 (Shu-Osher)
    "ssp_rk3": _tableau("ssp_rk3",
                        [[0, 0, 0], [1, 0, 0], [Fr(1, 4), Fr(1, 4), 0]],
                        [Fr(1, 6), Fr(1, 6), Fr(2, 3)], [0, 1, Fr(1, 2)], 3),
    "rk4": _tableau("rk4",
                    [[0, 0, 0, 0], [Fr(1, 2), 0, 0, 0], [0, Fr(1, 2), 0, 0], [0, 0, 1, 0]],
                    [Fr(1, 6), Fr(1, 3), Fr(1, 3), Fr(1, 6)], [0, Fr(1, 2), Fr(1, 2), 1], 4),
    # Runge-Kutta-Fehlberg, fifth-order weights
    "fehlberg5": _tableau(
        "fehlberg5",
        [[0, 0, 0, 0, 0, 0],
         [Fr(1, 4), 0, 0, 0, 0, 0],
         [Fr(3, 32), Fr(9, 32), 0, 0, 0, 0],
         [Fr(1932, 2197), Fr(-7200, 2197), Fr(7296, 2197), 0, 0, 0],
         [Fr(439, 216), -8, Fr(3680, 513), Fr(-845, 4104), 0, 0],
         [Fr(-8, 27), 2, Fr(-3544, 2565), Fr(1859, 4104), Fr(-11, 40), 0]],
        [Fr(16, 135), 0, Fr(6656, 12825), Fr(28561, 56430), Fr(-9, 50), Fr(2, 55)],
        [0, Fr(1, 4), Fr(3, 8), Fr(12, 13), 1, Fr(1, 2)], 5),
}
_ALIASES = {"ssp_rk2": "heun", "rk2": "midpoint", "rk3": "third_order", "classical_rk4": "rk4",
            "rkf5": "fehlberg5", "euler": "forward_euler"}

# default pairings of DG degree with a (k+1)-order method
DEFAULT_CRKDG = {0: "forward_euler", 1: "midpoint", 2: "third_order", 3: "rk4", 4: "fehlberg5"}
DEFAULT_RKDG = {0: "forward_euler", 1: "heun", 2: "ssp_rk3", 3: "rk4", 4: "fehlberg5"}


def get_tableau(name) -> ButcherTableau:
    if isinstance(name, ButcherTableau):
        return name
    key = _ALIASES.get(name, name)
    if key not in _TABLEAUS:
        raise ConfigurationError(f"unknown tableau {name!r}; known: {sorted(_TABLEAUS)}")
    return _TABLEAUS[key]


def builtin_tableaus():
    return dict(_TABLEAUS)


def custom_tableau(A, b, c, order, name="custom") -> ButcherTableau:
    tab = ButcherTableau(name, np.asarray(A, float), np.asarray(b, float), np.asarray(c, float), int(order))
    tab.check()
    return tab


# ------------------------------------------------------------------ steppers

def _identity(u):
    return u


def _guard(fn, stage):
    try:
        return fn()
    except AdmissibilityError as exc:
        if exc.stage is None:
            exc.stage = stage
            exc.args = (f"{exc.args[0]} (stage {stage})",)
        raise


def step_rkdg(tableau, u, dt, op, limiter=None, t=0.0):
    """Classical RKDG step: every stage uses the coupled DG operator.

    Boundary data for stage j is taken at t + c_j dt and the limiter follows
    every stage and the final update.
    """
    tab = get_tableau(tableau)
    limit = limiter or _identity
    if dt == 0:
        return limit(u.copy())
    s = tab.stages
    stage_ops = [None] * s
    needed = [bool(tab.b[j] != 0 or np.any(tab.A[j + 1:, j] != 0)) for j in range(s)]
    for i in range(s):
        ui = u.copy()
        for j in range(i):
            if tab.A[i, j] != 0:
                ui -= dt * tab.A[i, j] * stage_ops[j]
        if i > 0:
            ui = limit(ui)
        if needed[i]:
            stage_ops[i] = _guard(lambda: op.dg(ui, t + tab.c[i] * dt, stage=i + 1), i + 1)
    out = u.copy()
    for i in range(s):
        if tab.b[i] != 0:
            out -= dt * tab.b[i] * stage_ops[i]
    return limit(out)


def compact_stages(tab, u, dt, op):
    """Inner stage values built with the cell-local operator only."""
    s = tab.stages
    stages = [u]
    loc = [None] * s
    for i in range(1, s):
        ui = u.copy()
        for j in range(i):
            if tab.A[i, j] != 0:
                if loc[j] is None:
                    loc[j] = _guard(lambda: op.local(stages[j], stage=j + 1), j + 1)
                ui -= dt * tab.A[i, j] * loc[j]
        stages.append(ui)
    return stages


def step_crkdg(tableau, u, dt, op, limiter=None, t=0.0):
    """Compact RKDG step: local operator in inner stages, DG operator in the final update.

    Boundary data entering f_hat(u^(i)) is evaluated at t + c_i dt.  The
    limiter is applied once, after the final update.
    """
    tab = get_tableau(tableau)
    limit = limiter or _identity
    if dt == 0:
        return limit(u.copy())
    stages = compact_stages(tab, u, dt, op)
    out = u.copy()
    for i in range(tab.stages):
        if tab.b[i] != 0:
            out -= dt * tab.b[i] * _guard(lambda: op.dg(stages[i], t + tab.c[i] * dt, stage=i + 1), i + 1)
    return limit(out)


def step_shu_osher_hybrid(u, dt, op, limiter=None, t=0.0):
    """Negative control: local operator swapped into the Shu-Osher form of SSP-RK2.

    u1 = u - dt L_loc(u);  u_new = u/2 + (u1 - dt L_dg(u1))/2.  This is neither
    conservative nor second order.
    """
    limit = limiter or _identity
    if dt == 0:
        return limit(u.copy())
    u1 = u - dt * _guard(lambda: op.local(u, stage=1), 1)
    return limit(0.5 * u + 0.5 * (u1 - dt * _guard(lambda: op.dg(u1, t + dt, stage=2), 2)))


SCHEMES = {"rkdg": step_rkdg, "crkdg": step_crkdg}


def lwdg_linear_step(op, u, dt, order, t=0.0):
    """Single-stage form u - dt DG(sum_{i<p} dt^i/(i+1)! L^i u) with L = -local.

    For constant-coefficient linear laws with the upwind flux this coincides
    with a compact RKDG step of any p-stage, order-p tableau.
    """
    if not getattr(op.law, "linear", False):
        raise ConfigurationError("the single-step Taylor form needs a linear law")
    term = u.copy()
    acc = u.copy()
    for i in range(1, order):
        term = -op.local(term) * dt
        acc += term / factorial(i + 1)
    return u - dt * op.dg(acc, t)


def compute_dt(space, u, law, cfl, fallback=None):
    """dt = cfl * min_K 1 / sum_d (lambda_d / dx_d), wave speeds at cell means."""
    means = space.cell_means(u)
    rate = np.zeros(space.mesh.n_cells)
    for d in range(space.dim):
        rate += law.max_speed(means, d) / space.mesh.widths[:, d]
    rmax = float(np.max(rate))
    if not np.isfinite(rmax):
        raise AdmissibilityError("non-finite wave speed in time-step selection")
    if rmax <= 0.0:
        if fallback is None:
            raise ParameterError("zero wave speed everywhere and no fallback time step")
        return float(fallback)
    return float(cfl / rmax)
