"""Fourier stability analysis of RKDG and compact RKDG for u_t + u_x = 0.

Blocks are probed from the actual spatial operators on a three-cell periodic
mesh of unit width, so the analysis exercises the same code as the solver.
With the upwind flux, the DG operator on cell j reads cells j and j-1 only:
DG u_j = A0 c_j + Am1 c_{j-1}; the local operator is a single block D.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import AnalysisError, ParameterError
from .mesh import build_interval_mesh
from .physics import LinearAdvection
from .spatial import DGSpace, SpatialOperator
from .timestep import get_tableau

THETA_POINTS = 2048
STABILITY_TOL = 1e-10


@lru_cache(maxsize=None)
def operator_blocks(k):
    """(A0, Am1, D) for unit cell width and unit advection speed."""
    mesh = build_interval_mesh(0.0, 3.0, 3, periodic=True)
    space = DGSpace(mesh, k)
    op = SpatialOperator(space, LinearAdvection((1.0,)), "upwind_linear")
    m = space.n_modes
    A0 = np.zeros((m, m))
    Am1 = np.zeros((m, m))
    D = np.zeros((m, m))
    for j in range(m):
        u = np.zeros((3, m, 1))
        u[1, j, 0] = 1.0
        r = op.dg(u)
        A0[:, j] = r[1, :, 0]
        Am1[:, j] = r[2, :, 0]
        D[:, j] = op.local(u)[1, :, 0]
    for a in (A0, Am1, D):
        a.setflags(write=False)
    return A0, Am1, D


def build_amplification(scheme, tableau, k, theta, cfl):
    """Amplification matrix G(theta) of one step at CFL number ``cfl`` (= dt/h)."""
    if scheme not in ("rkdg", "crkdg"):
        raise ParameterError(f"unsupported scheme {scheme!r}")
    if not 0 <= k <= 4:
        raise ParameterError("degree must be in [0, 4]")
    tab = get_tableau(tableau)
    A0, Am1, D = operator_blocks(k)
    L = A0 + Am1 * np.exp(-1j * theta)
    inner = L if scheme == "rkdg" else D.astype(complex)
    m = A0.shape[0]
    eye = np.eye(m, dtype=complex)
    s = tab.stages
    # stage maps u^(i) = P_i u^n
    P = [eye]
    for i in range(1, s):
        Pi = eye.copy()
        for j in range(i):
            if tab.A[i, j] != 0:
                Pi = Pi - cfl * tab.A[i, j] * inner @ P[j]
        P.append(Pi)
    G = eye.copy()
    for i in range(s):
        if tab.b[i] != 0:
            G = G - cfl * tab.b[i] * L @ P[i]
    return G


def _amplification_batch(scheme, tab, k, thetas, cfl):
    A0, Am1, D = operator_blocks(k)
    m = A0.shape[0]
    L = A0[None] + Am1[None] * np.exp(-1j * thetas)[:, None, None]
    inner = L if scheme == "rkdg" else np.broadcast_to(D.astype(complex), L.shape)
    eye = np.broadcast_to(np.eye(m, dtype=complex), L.shape)
    P = [eye]
    for i in range(1, tab.stages):
        Pi = eye.copy()
        for j in range(i):
            if tab.A[i, j] != 0:
                Pi = Pi - cfl * tab.A[i, j] * inner @ P[j]
        P.append(Pi)
    G = eye.copy()
    for i in range(tab.stages):
        if tab.b[i] != 0:
            G = G - cfl * tab.b[i] * L @ P[i]
    return G


def spectral_radius_max(scheme, tableau, k, cfl, n_theta=THETA_POINTS):
    tab = get_tableau(tableau)
    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    G = _amplification_batch(scheme, tab, k, thetas, cfl)
    return float(np.max(np.abs(np.linalg.eigvals(G))))


def is_stable(scheme, tableau, k, cfl, n_theta=THETA_POINTS):
    return spectral_radius_max(scheme, tableau, k, cfl, n_theta) <= 1.0 + STABILITY_TOL


def max_cfl(scheme, tableau, k, tol=1e-4, bracket=(0.0, 2.0), n_theta=THETA_POINTS):
    """Largest stable CFL number by bisection on the spectral-radius predicate."""
    if not is_stable(scheme, tableau, k, 1e-6, n_theta):
        raise AnalysisError(f"{scheme} with {tableau} and k={k} is unstable at every CFL number")
    lo, hi = bracket
    lo = max(lo, 1e-6)
    if is_stable(scheme, tableau, k, hi, n_theta):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_stable(scheme, tableau, k, mid, n_theta):
            lo = mid
        else:
            hi = mid
    return lo


def cfl_table(n_theta=THETA_POINTS):
    """Rows (order, scheme, tableau, k, cfl) for second- and third-order schemes."""
    rows = []
    for order, k, ctab, rtab in ((2, 1, "midpoint", "heun"), (3, 2, "third_order", "ssp_rk3")):
        rows.append((order, "crkdg", ctab, k, max_cfl("crkdg", ctab, k, n_theta=n_theta)))
        rows.append((order, "rkdg", rtab, k, max_cfl("rkdg", rtab, k, n_theta=n_theta)))
    return rows
