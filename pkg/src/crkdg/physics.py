"""Conservation laws, boundary ghost states, and exact-solution oracles."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels as K
from .errors import AdmissibilityError, ConfigurationError, DomainError, NumericError

GAMMA = 1.4


class ConservationLaw:
    """Flux f(u) = (f_1(u), ..., f_d(u)) with wave-speed and eigen information.

    States are arrays whose last axis holds the ``n_var`` conserved variables.
    """

    name = "law"
    n_var = 1
    dim = 1
    linear = False
    scalar_kind = None  # id for the compiled Godunov kernel

    def flux(self, U, axis):
        raise NotImplementedError

    def max_speed(self, U, axis):
        """Spectral radius of the flux Jacobian along ``axis``."""
        raise NotImplementedError

    def eigensystem(self, U, axis):
        """Right eigenvectors R and R^{-1} of the Jacobian along ``axis``."""
        n = self.n_var
        shape = np.shape(U)[:-1] + (n, n)
        eye = np.broadcast_to(np.eye(n), shape).copy()
        return eye, eye.copy()

    def admissible(self, U):
        return np.all(np.isfinite(U), axis=-1)

    def check_admissible(self, U, stage=None, cell_axis=0):
        ok = self.admissible(U)
        if not np.all(ok):
            bad = np.argwhere(~ok)[0]
            cell = int(bad[cell_axis]) if np.ndim(ok) > 1 else None
            raise AdmissibilityError(f"inadmissible {self.name} state",
                                     state=np.asarray(U)[tuple(bad)].tolist(),
                                     cell=cell, stage=stage)

    def alpha(self, uL, uR, axis):
        """Lax-Friedrichs viscosity bound over the two states."""
        return np.maximum(self.max_speed(uL, axis), self.max_speed(uR, axis))


class ScalarLaw(ConservationLaw):
    n_var = 1
    param = 0.0

    def f(self, u):
        raise NotImplementedError

    def df(self, u):
        raise NotImplementedError

    def flux(self, U, axis=0):
        return self.f(U)

    def max_speed(self, U, axis=0):
        return np.abs(self.df(U[..., 0]))


class LinearAdvection(ScalarLaw):
    linear = True
    scalar_kind = K.SCALAR_LINEAR

    def __init__(self, beta=(1.0,)):
        self.beta = np.atleast_1d(np.asarray(beta, float))
        self.dim = len(self.beta)
        self.name = "advection"

    def flux(self, U, axis=0):
        return self.beta[axis] * U

    def max_speed(self, U, axis=0):
        return np.full(np.shape(U)[:-1], abs(self.beta[axis]))

    @property
    def param(self):
        return float(self.beta[0])


class Burgers(ScalarLaw):
    name = "burgers"
    scalar_kind = K.SCALAR_BURGERS

    def f(self, u):
        return 0.5 * u * u

    def df(self, u):
        return u


class BuckleyLeverett(ScalarLaw):
    name = "buckley_leverett"
    scalar_kind = K.SCALAR_BUCKLEY_LEVERETT

    def f(self, u):
        return 4.0 * u * u / (4.0 * u * u + (1.0 - u) ** 2)

    def df(self, u):
        den = 4.0 * u * u + (1.0 - u) ** 2
        return 8.0 * u * (1.0 - u) / den ** 2


class Euler(ConservationLaw):
    """Compressible Euler equations, ideal gas, conserved (rho, rho*vel, E)."""

    def __init__(self, dim=1, gamma=GAMMA):
        self.dim = dim
        self.n_var = dim + 2
        self.gamma = gamma
        self.name = f"euler{dim}d"

    def flux(self, U, axis=0):
        return K.euler_flux(U, axis, self.gamma)

    def max_speed(self, U, axis=0):
        return K.euler_speed(U, axis, self.gamma)

    def pressure(self, U):
        mom = U[..., 1:-1]
        return (self.gamma - 1.0) * (U[..., -1] - 0.5 * np.sum(mom * mom, axis=-1) / U[..., 0])

    def admissible(self, U):
        U = np.asarray(U, float)
        with np.errstate(all="ignore"):
            ok = np.all(np.isfinite(U), axis=-1) & (U[..., 0] > 0)
            ok &= self.pressure(U) > 0
        return ok

    def check_admissible(self, U, stage=None, cell_axis=0):
        i = K.euler_first_bad(np.asarray(U, float), self.gamma)
        if i >= 0:
            shape = np.shape(U)[:-1]
            idx = np.unravel_index(i, shape)
            raise AdmissibilityError("negative density or pressure" if np.all(np.isfinite(U[idx]))
                                     else "non-finite Euler state",
                                     state=np.asarray(U)[idx].tolist(),
                                     cell=int(idx[cell_axis]) if len(shape) > 1 else None, stage=stage)

    def to_conserved(self, rho, vel, p):
        """(rho, velocity components, p) -> conserved state array."""
        rho = np.asarray(rho, float)
        vel = [np.broadcast_to(np.asarray(v, float), rho.shape) for v in vel]
        p = np.broadcast_to(np.asarray(p, float), rho.shape)
        if len(vel) != self.dim:
            raise ValueError(f"expected {self.dim} velocity components")
        U = np.empty(rho.shape + (self.n_var,))
        U[..., 0] = rho
        ke = 0.0
        for d, v in enumerate(vel):
            U[..., 1 + d] = rho * v
            ke = ke + v * v
        U[..., -1] = p / (self.gamma - 1.0) + 0.5 * rho * ke
        return U

    def to_primitive(self, U):
        """Conserved -> (rho, velocity (..., dim), p)."""
        U = np.asarray(U, float)
        rho = U[..., 0]
        vel = U[..., 1:-1] / rho[..., None]
        return rho, vel, self.pressure(U)

    def sound_speed(self, U):
        return np.sqrt(self.gamma * self.pressure(U) / U[..., 0])

    def eigensystem(self, U, axis=0):
        U = np.asarray(U, float)
        g = self.gamma
        rho, vel, p = self.to_primitive(U)
        c = np.sqrt(g * p / rho)
        q2 = np.sum(vel * vel, axis=-1)
        H = (U[..., -1] + p) / rho
        un = vel[..., axis]
        n = self.n_var
        R = np.zeros(U.shape[:-1] + (n, n))
        # acoustic waves in columns 0 and n-1, entropy wave in column 1
        R[..., 0, 0] = 1.0
        R[..., 0, n - 1] = 1.0
        R[..., 0, 1] = 1.0
        for d in range(self.dim):
            R[..., 1 + d, 0] = vel[..., d]
            R[..., 1 + d, n - 1] = vel[..., d]
            R[..., 1 + d, 1] = vel[..., d]
        R[..., 1 + axis, 0] -= c
        R[..., 1 + axis, n - 1] += c
        R[..., -1, 0] = H - un * c
        R[..., -1, n - 1] = H + un * c
        R[..., -1, 1] = 0.5 * q2
        if self.dim == 2:
            t = 1 - axis  # shear wave
            R[..., 0, 2] = 0.0
            R[..., 1 + t, 2] = 1.0
            R[..., 1 + axis, 2] = 0.0
            R[..., -1, 2] = vel[..., t]
        return R, np.linalg.inv(R)

    def eigenvalues(self, U, axis=0):
        rho, vel, p = self.to_primitive(U)
        c = np.sqrt(self.gamma * p / rho)
        un = vel[..., axis]
        lam = [un - c, un] + ([un] if self.dim == 2 else []) + [un + c]
        return np.stack(lam, axis=-1)


LAWS = {
    "advection": LinearAdvection,
    "burgers": Burgers,
    "buckley_leverett": BuckleyLeverett,
    "euler": Euler,
}


def flux_eval(law: ConservationLaw, U, axis=0):
    """Physical flux along ``axis`` after an admissibility check (raises AdmissibilityError)."""
    U = np.asarray(U, float)
    law.check_admissible(U)
    return law.flux(U, axis)


# ---------------------------------------------------------------- oracles

def burgers_sine(x, t, tol=1e-13, maxiter=100):
    """Solution of u_t + (u^2/2)_x = 0 with u(x,0) = sin(x), valid for t < 1."""
    if t >= 1.0:
        raise DomainError(f"sine Burgers solution has shocked by t={t} (>= 1)")
    x = np.asarray(x, float)
    u = np.sin(x)
    for _ in range(maxiter):
        r = u - np.sin(x - u * t)
        du = r / (1.0 + t * np.cos(x - u * t))
        u = u - du
        if np.max(np.abs(du), initial=0.0) < tol:
            break
    else:
        raise NumericError("Newton iteration for Burgers characteristics did not converge")
    return u


def euler_density_wave(x, t, law: Euler, velocity=None, amplitude=0.2):
    """Advected density wave rho = 1 + A sin(pi (x.1 - (vel.1) t)), uniform p = 1."""
    x = np.asarray(x, float)
    if law.dim == 1:
        xs = x[..., 0] if x.ndim and x.shape[-1] == 1 else x
        vel = [1.0] if velocity is None else list(velocity)
        rho = 1.0 + amplitude * np.sin(np.pi * (xs - vel[0] * t))
    else:
        vel = [0.7, 0.3] if velocity is None else list(velocity)
        rho = 1.0 + amplitude * np.sin(np.pi * (x[..., 0] + x[..., 1] - (vel[0] + vel[1]) * t))
    return law.to_conserved(rho, vel, 1.0)


def advection_sine(x, t, beta=(1.0,), scale=1.0):
    """Product of sines translated by beta*t: prod_d sin(scale*(x_d - beta_d t))."""
    x = np.asarray(x, float)
    beta = np.atleast_1d(beta)
    if x.ndim == 0 or x.shape[-1] != len(beta):
        x = x[..., None]
    out = np.ones(x.shape[:-1])
    for d, b in enumerate(beta):
        out = out * np.sin(scale * (x[..., d] - b * t))
    return out[..., None]


# ------------------------------------------------------ exact Riemann solver

@dataclass(frozen=True)
class RiemannStar:
    p: float
    u: float


def _pressure_function(p, rho, pk, ck, g):
    if p > pk:
        A = 2.0 / ((g + 1.0) * rho)
        B = (g - 1.0) / (g + 1.0) * pk
        sq = np.sqrt(A / (p + B))
        return (p - pk) * sq, sq * (1.0 - 0.5 * (p - pk) / (B + p))
    e = (g - 1.0) / (2.0 * g)
    return 2.0 * ck / (g - 1.0) * ((p / pk) ** e - 1.0), (p / pk) ** (-(g + 1.0) / (2.0 * g)) / (rho * ck)


def riemann_star(left, right, gamma=GAMMA, tol=1e-12, maxiter=100) -> RiemannStar:
    """Star-region pressure and velocity by Newton iteration on the pressure function."""
    rl, ul, pl = left
    rr, ur, pr = right
    cl = np.sqrt(gamma * pl / rl)
    cr = np.sqrt(gamma * pr / rr)
    if 2.0 * (cl + cr) / (gamma - 1.0) <= ur - ul:
        raise NumericError("Riemann data generates vacuum")
    p = max(tol, 0.5 * (pl + pr) - 0.125 * (ur - ul) * (rl + rr) * (cl + cr))
    for _ in range(maxiter):
        fl, dfl = _pressure_function(p, rl, pl, cl, gamma)
        fr, dfr = _pressure_function(p, rr, pr, cr, gamma)
        pn = p - (fl + fr + ur - ul) / (dfl + dfr)
        pn = max(pn, tol)
        if abs(pn - p) <= tol * 0.5 * (pn + p):
            p = pn
            break
        p = pn
    else:
        raise NumericError("Newton iteration for the star pressure did not converge")
    fl, _ = _pressure_function(p, rl, pl, cl, gamma)
    fr, _ = _pressure_function(p, rr, pr, cr, gamma)
    return RiemannStar(p=p, u=0.5 * (ul + ur) + 0.5 * (fr - fl))


def exact_riemann(x, t, left, right, x0=0.0, gamma=GAMMA):
    """Self-similar exact solution of the 1D Euler Riemann problem.

    Returns primitive arrays (rho, w, p) sampled at ``x``.
    """
    if t <= 0:
        raise DomainError("exact Riemann solution needs t > 0")
    g = gamma
    rl, ul, pl = left
    rr, ur, pr = right
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)
    star = riemann_star(left, right, g)
    ps, us = star.p, star.u
    s = (np.asarray(x, float) - x0) / t
    rho = np.empty_like(s)
    w = np.empty_like(s)
    p = np.empty_like(s)
    gm = (g - 1.0) / (g + 1.0)

    left_side = s <= us
    # left of contact
    if ps > pl:
        SL = ul - cl * np.sqrt((g + 1) / (2 * g) * ps / pl + (g - 1) / (2 * g))
        rsl = rl * (ps / pl + gm) / (gm * ps / pl + 1.0)
        m = left_side & (s < SL)
        rho[m], w[m], p[m] = rl, ul, pl
        m = left_side & (s >= SL)
        rho[m], w[m], p[m] = rsl, us, ps
    else:
        csl = cl * (ps / pl) ** ((g - 1) / (2 * g))
        SHL, STL = ul - cl, us - csl
        rsl = rl * (ps / pl) ** (1 / g)
        m = left_side & (s < SHL)
        rho[m], w[m], p[m] = rl, ul, pl
        m = left_side & (s >= STL)
        rho[m], w[m], p[m] = rsl, us, ps
        m = left_side & (s >= SHL) & (s < STL)
        fan = 2 / (g + 1) + (g - 1) / ((g + 1) * cl) * (ul - s[m])
        rho[m] = rl * fan ** (2 / (g - 1))
        w[m] = 2 / (g + 1) * (cl + (g - 1) / 2 * ul + s[m])
        p[m] = pl * fan ** (2 * g / (g - 1))
    right_side = ~left_side
    if ps > pr:
        SR = ur + cr * np.sqrt((g + 1) / (2 * g) * ps / pr + (g - 1) / (2 * g))
        rsr = rr * (ps / pr + gm) / (gm * ps / pr + 1.0)
        m = right_side & (s > SR)
        rho[m], w[m], p[m] = rr, ur, pr
        m = right_side & (s <= SR)
        rho[m], w[m], p[m] = rsr, us, ps
    else:
        csr = cr * (ps / pr) ** ((g - 1) / (2 * g))
        SHR, STR = ur + cr, us + csr
        rsr = rr * (ps / pr) ** (1 / g)
        m = right_side & (s > SHR)
        rho[m], w[m], p[m] = rr, ur, pr
        m = right_side & (s <= STR)
        rho[m], w[m], p[m] = rsr, us, ps
        m = right_side & (s > STR) & (s <= SHR)
        fan = 2 / (g + 1) - (g - 1) / ((g + 1) * cr) * (ur - s[m])
        rho[m] = rr * fan ** (2 / (g - 1))
        w[m] = 2 / (g + 1) * (-cr + (g - 1) / 2 * ur + s[m])
        p[m] = pr * fan ** (2 * g / (g - 1))
    return rho, w, p


SOD_LEFT = (1.0, 0.0, 1.0)
SOD_RIGHT = (0.125, 0.0, 0.1)


def sod_exact(x, t, x0=0.5):
    """Sod shock tube (1,0,1)/(0.125,0,0.1) with the diaphragm at x0."""
    return exact_riemann(x, t, SOD_LEFT, SOD_RIGHT, x0=x0)


# ------------------------------------------------------- double Mach states

def normal_shock_post_state(rho1, p1, mach, gamma=GAMMA):
    """Rankine-Hugoniot: state behind a shock of Mach ``mach`` moving into gas at rest.

    Returns (rho2, speed of gas behind the shock, p2, shock speed).
    """
    c1 = np.sqrt(gamma * p1 / rho1)
    S = mach * c1
    m2 = mach * mach
    rho2 = rho1 * (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0)
    p2 = p1 * (2.0 * gamma * m2 - (gamma - 1.0)) / (gamma + 1.0)
    u2 = S * (1.0 - rho1 / rho2)
    return rho2, u2, p2, S


# pre-shock gas at rest with c = 1; Mach 10 shock inclined 60 degrees to the x-axis
DMR_PRE = (1.4, 0.0, 0.0, 1.0)
_r2, _u2, _p2, DMR_SHOCK_SPEED = normal_shock_post_state(1.4, 1.0, 10.0)
DMR_POST = (_r2, _u2 * np.cos(np.pi / 6), -_u2 * np.sin(np.pi / 6), _p2)  # (8, 7.1447, -4.125, 116.5)
DMR_X0 = 1.0 / 6.0


def dmr_shock_x(y, t):
    """x-position of the incident shock at height y and time t."""
    # the 60-degree shock line moves horizontally at speed / sin(60 deg) = 20/sqrt(3)
    return DMR_X0 + (y + 2.0 * DMR_SHOCK_SPEED * t) / np.sqrt(3.0)


def dmr_state(x, y, t, law: Euler):
    """Exact incident-shock state: post-shock left of the shock line, pre-shock right."""
    x = np.asarray(x, float)
    post = x < dmr_shock_x(np.asarray(y, float), t)
    prim = [np.where(post, a, b) for a, b in zip(DMR_POST, DMR_PRE)]
    return law.to_conserved(prim[0], [prim[1], prim[2]], prim[3])


# ------------------------------------------------------------ boundary policy

@dataclass
class BoundaryCondition:
    """Ghost-state rule for one boundary side.

    kind: inflow (``state(points, t)`` gives the exterior state), outflow,
    reflective, double_mach_top, double_mach_bottom.
    """

    kind: str
    state: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("inflow", "outflow", "reflective", "double_mach_top",
                             "double_mach_bottom", "periodic"):
            raise ConfigurationError(f"unknown boundary tag {self.kind!r}")


def ghost_state(bc: BoundaryCondition, interior, points, axis, t, law=None, partner=None):
    """Exterior trace at boundary points.

    interior: (..., n_var) interior traces; points: (..., dim) physical
    coordinates; axis: normal axis of the edge.
    """
    kind = bc.kind
    if kind == "periodic":
        if partner is None:
            raise ConfigurationError("periodic boundary needs the wrapped partner trace")
        return np.asarray(partner, float)
    if kind == "outflow":
        return np.array(interior, float, copy=True)
    if kind == "inflow":
        if bc.state is None:
            raise ConfigurationError("inflow boundary needs a prescribed state")
        return np.asarray(bc.state(points, t), float).reshape(np.shape(interior))
    if kind == "reflective":
        return reflect(interior, axis)
    if kind == "double_mach_top":
        return dmr_state(points[..., 0], points[..., 1], t, law)
    if kind == "double_mach_bottom":
        out = reflect(interior, axis)
        post = points[..., 0] < DMR_X0
        if np.any(post):
            fixed = dmr_state(np.zeros_like(points[..., 0]), np.zeros_like(points[..., 0]), 0.0, law)
            out[post] = fixed[post]
        return out
    raise ConfigurationError(f"unknown boundary tag {kind!r}")


def reflect(interior, axis):
    """Mirror state: momentum component normal to the wall changes sign."""
    out = np.array(interior, float, copy=True)
    if out.shape[-1] > 1:
        out[..., 1 + axis] *= -1.0
    else:
        out *= -1.0
    return out
