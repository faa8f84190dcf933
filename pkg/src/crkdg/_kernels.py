"""Hot pointwise kernels with numba and pure-numpy implementations.

The numba path is used when numba imports and ``CRKDG_NUMBA`` is not set to
``0``.  Both paths compute the same formulas; they agree to round-off, not
bitwise, so a run is deterministic only within one setting.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("CRKDG_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")

GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)
GODUNOV_SAMPLES = 512
GODUNOV_TOL = 1e-12

# scalar flux ids understood by the compiled Godunov kernel
SCALAR_BURGERS = 0
SCALAR_BUCKLEY_LEVERETT = 1
SCALAR_LINEAR = 2


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


def set_threads(n):
    if HAVE_NUMBA and n:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))


# ----------------------------------------------------------------- Euler flux

def euler_flux_numpy(U, axis, gamma):
    rho = U[..., 0]
    mom = U[..., 1:-1]
    E = U[..., -1]
    vel = mom / rho[..., None]
    p = (gamma - 1.0) * (E - 0.5 * np.sum(mom * vel, axis=-1))
    un = vel[..., axis]
    F = np.empty_like(U)
    F[..., 0] = mom[..., axis]
    F[..., 1:-1] = mom * un[..., None]
    F[..., 1 + axis] += p
    F[..., -1] = un * (E + p)
    return F


@_njit
def _euler_flux_loop(U2, axis, gamma, F2):
    n, nv = U2.shape
    nd = nv - 2
    for i in range(n):
        rho = U2[i, 0]
        E = U2[i, nv - 1]
        ke = 0.0
        for d in range(nd):
            ke += U2[i, 1 + d] * U2[i, 1 + d]
        ke = 0.5 * ke / rho
        p = (gamma - 1.0) * (E - ke)
        un = U2[i, 1 + axis] / rho
        F2[i, 0] = U2[i, 1 + axis]
        for d in range(nd):
            F2[i, 1 + d] = U2[i, 1 + d] * un
        F2[i, 1 + axis] += p
        F2[i, nv - 1] = un * (E + p)


def euler_flux_numba(U, axis, gamma):
    U2 = np.ascontiguousarray(U).reshape(-1, U.shape[-1])
    F2 = np.empty_like(U2)
    _euler_flux_loop(U2, int(axis), float(gamma), F2)
    return F2.reshape(U.shape)


def euler_speed_numpy(U, axis, gamma):
    """|normal velocity| + sound speed."""
    rho = U[..., 0]
    mom = U[..., 1:-1]
    E = U[..., -1]
    p = (gamma - 1.0) * (E - 0.5 * np.sum(mom * mom, axis=-1) / rho)
    c = np.sqrt(np.abs(gamma * p / rho))
    return np.abs(mom[..., axis] / rho) + c


@_njit
def _euler_speed_loop(U2, axis, gamma, out):
    n, nv = U2.shape
    for i in range(n):
        rho = U2[i, 0]
        ke = 0.0
        for d in range(nv - 2):
            ke += U2[i, 1 + d] * U2[i, 1 + d]
        p = (gamma - 1.0) * (U2[i, nv - 1] - 0.5 * ke / rho)
        out[i] = abs(U2[i, 1 + axis] / rho) + np.sqrt(abs(gamma * p / rho))


def euler_speed_numba(U, axis, gamma):
    U2 = np.ascontiguousarray(U).reshape(-1, U.shape[-1])
    out = np.empty(U2.shape[0])
    _euler_speed_loop(U2, int(axis), float(gamma), out)
    return out.reshape(U.shape[:-1])


def euler_first_bad_numpy(U, gamma):
    """Flat index of the first state with non-finite entries, rho <= 0 or p <= 0; -1 if none."""
    U2 = U.reshape(-1, U.shape[-1])
    with np.errstate(all="ignore"):
        rho = U2[:, 0]
        p = (gamma - 1.0) * (U2[:, -1] - 0.5 * np.sum(U2[:, 1:-1] ** 2, axis=1) / rho)
        ok = np.all(np.isfinite(U2), axis=1) & (rho > 0) & (p > 0)
    bad = np.flatnonzero(~ok)
    return int(bad[0]) if len(bad) else -1


@_njit
def _euler_first_bad_loop(U2, gamma):
    n, nv = U2.shape
    for i in range(n):
        rho = U2[i, 0]
        ke = 0.0
        for d in range(1, nv - 1):
            ke += U2[i, d] * U2[i, d]
        p = (gamma - 1.0) * (U2[i, nv - 1] - 0.5 * ke / rho)
        # NaN fails both comparisons
        if not (rho > 0.0 and p > 0.0 and abs(p) < np.inf and abs(ke) < np.inf):
            return i
    return -1


def euler_first_bad_numba(U, gamma):
    U2 = np.ascontiguousarray(U).reshape(-1, U.shape[-1])
    return int(_euler_first_bad_loop(U2, float(gamma)))


def euler_extrema_numpy(U, gamma):
    """(min rho, max rho, min p) over all states."""
    U2 = U.reshape(-1, U.shape[-1])
    rho = U2[:, 0]
    p = (gamma - 1.0) * (U2[:, -1] - 0.5 * np.sum(U2[:, 1:-1] ** 2, axis=1) / rho)
    return float(rho.min()), float(rho.max()), float(p.min())


@_njit
def _euler_extrema_loop(U2, gamma):
    n, nv = U2.shape
    rmin, rmax, pmin = np.inf, -np.inf, np.inf
    for i in range(n):
        rho = U2[i, 0]
        ke = 0.0
        for d in range(1, nv - 1):
            ke += U2[i, d] * U2[i, d]
        p = (gamma - 1.0) * (U2[i, nv - 1] - 0.5 * ke / rho)
        rmin = min(rmin, rho)
        rmax = max(rmax, rho)
        pmin = min(pmin, p)
    return rmin, rmax, pmin


def euler_extrema_numba(U, gamma):
    U2 = np.ascontiguousarray(U).reshape(-1, U.shape[-1])
    return tuple(float(v) for v in _euler_extrema_loop(U2, float(gamma)))


# ------------------------------------------------------------ scalar Godunov

def godunov_numpy(g, uL, uR):
    """Godunov flux for a scalar flux ``g`` (vectorized callable).

    uL <= uR: min of g on [uL, uR]; otherwise max of g on [uR, uL].  The
    extremum is located by dense sampling and refined by golden section.
    """
    uL = np.asarray(uL, float)
    uR = np.asarray(uR, float)
    shape = np.broadcast(uL, uR).shape
    uL = np.broadcast_to(uL, shape).ravel()
    uR = np.broadcast_to(uR, shape).ravel()
    sgn = np.where(uL <= uR, 1.0, -1.0)  # minimize sgn*g
    lo = np.minimum(uL, uR)
    hi = np.maximum(uL, uR)
    n = GODUNOV_SAMPLES
    t = np.linspace(0.0, 1.0, n)
    S = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    S[:, -1] = hi
    vals = sgn[:, None] * g(S)
    j = np.argmin(vals, axis=1)
    rows = np.arange(len(lo))
    best = vals[rows, j]
    step = (hi - lo) / (n - 1)
    a = np.clip(S[rows, j] - step, lo, hi)
    b = np.clip(S[rows, j] + step, lo, hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc = sgn * g(c)
    fd = sgn * g(d)
    while True:
        active = (b - a) > GODUNOV_TOL
        if not active.any():
            break
        left = (fc < fd) & active
        right = (~left) & active
        # shrink towards the smaller value
        b = np.where(left, d, b)
        d = np.where(left, c, d)
        fd = np.where(left, fc, fd)
        c = np.where(left, b - GOLDEN * (b - a), c)
        a = np.where(right, c, a)
        c = np.where(right, d, c)
        fc = np.where(right, fd, fc)
        d = np.where(right, a + GOLDEN * (b - a), d)
        newc = left
        newd = right
        if newc.any():
            fc = np.where(newc, sgn * g(c), fc)
        if newd.any():
            fd = np.where(newd, sgn * g(d), fd)
    best = np.minimum(best, np.minimum(fc, fd))
    best = np.minimum(best, sgn * g(0.5 * (a + b)))
    out = sgn * best
    out = np.where(uL == uR, g(uL), out)
    return out.reshape(shape)


@_njit
def _scalar_g(kind, param, u):
    if kind == SCALAR_BURGERS:
        return 0.5 * u * u
    if kind == SCALAR_BUCKLEY_LEVERETT:
        v = 1.0 - u
        return 4.0 * u * u / (4.0 * u * u + v * v)
    return param * u


@_njit
def _godunov_loop(kind, param, sign, uL, uR, out):
    n = uL.shape[0]
    ns = 512
    for i in range(n):
        a0 = uL[i]
        b0 = uR[i]
        if a0 == b0:
            out[i] = sign * _scalar_g(kind, param, a0)
            continue
        s = 1.0 if a0 <= b0 else -1.0
        lo = min(a0, b0)
        hi = max(a0, b0)
        step = (hi - lo) / (ns - 1)
        best = 1e300
        barg = lo
        for j in range(ns):
            x = lo + step * j if j < ns - 1 else hi
            v = s * sign * _scalar_g(kind, param, x)
            if v < best:
                best = v
                barg = x
        a = max(barg - step, lo)
        b = min(barg + step, hi)
        g = 0.5 * (np.sqrt(5.0) - 1.0)
        c = b - g * (b - a)
        d = a + g * (b - a)
        fc = s * sign * _scalar_g(kind, param, c)
        fd = s * sign * _scalar_g(kind, param, d)
        while b - a > 1e-12:
            if fc < fd:
                b = d
                d = c
                fd = fc
                c = b - g * (b - a)
                fc = s * sign * _scalar_g(kind, param, c)
            else:
                a = c
                c = d
                fc = fd
                d = a + g * (b - a)
                fd = s * sign * _scalar_g(kind, param, d)
        best = min(best, fc, fd, s * sign * _scalar_g(kind, param, 0.5 * (a + b)))
        out[i] = s * best


def godunov_numba(kind, param, sign, uL, uR):
    uL = np.asarray(uL, float)
    uR = np.asarray(uR, float)
    shape = np.broadcast(uL, uR).shape
    a = np.ascontiguousarray(np.broadcast_to(uL, shape)).ravel()
    b = np.ascontiguousarray(np.broadcast_to(uR, shape)).ravel()
    out = np.empty(a.shape[0])
    _godunov_loop(int(kind), float(param), float(sign), a, b, out)
    return out.reshape(shape)


# ------------------------------------------------------------------ minmod

def modified_minmod_numpy(a1, a2, a3, bound):
    """TVB-modified minmod: a1 if |a1| <= bound, else minmod(a1, a2, a3)."""
    s = np.sign(a1)
    same = (np.sign(a2) == s) & (np.sign(a3) == s)
    mm = np.where(same, s * np.minimum(np.abs(a1), np.minimum(np.abs(a2), np.abs(a3))), 0.0)
    return np.where(np.abs(a1) <= bound, a1, mm)


@_njit
def _mminmod_loop(a1, a2, a3, bound, out):
    for i in range(a1.shape[0]):
        x = a1[i]
        if abs(x) <= bound[i]:
            out[i] = x
            continue
        y = a2[i]
        z = a3[i]
        if x > 0.0 and y > 0.0 and z > 0.0:
            out[i] = min(x, y, z)
        elif x < 0.0 and y < 0.0 and z < 0.0:
            out[i] = max(x, y, z)
        else:
            out[i] = 0.0


def modified_minmod_numba(a1, a2, a3, bound):
    arrs = np.broadcast_arrays(np.asarray(a1, float), np.asarray(a2, float),
                               np.asarray(a3, float), np.asarray(bound, float))
    shape = arrs[0].shape
    flat = [np.ascontiguousarray(x).ravel() for x in arrs]
    out = np.empty(flat[0].shape[0])
    _mminmod_loop(flat[0], flat[1], flat[2], flat[3], out)
    return out.reshape(shape)


def minmod(a1, a2, a3):
    return modified_minmod(a1, a2, a3, 0.0 * np.asarray(a1, float) - 1.0)


if USE_NUMBA:
    euler_flux = euler_flux_numba
    euler_speed = euler_speed_numba
    modified_minmod = modified_minmod_numba
    euler_first_bad = euler_first_bad_numba
    euler_extrema = euler_extrema_numba
else:
    euler_flux = euler_flux_numpy
    euler_speed = euler_speed_numpy
    modified_minmod = modified_minmod_numpy
    euler_first_bad = euler_first_bad_numpy
    euler_extrema = euler_extrema_numpy
