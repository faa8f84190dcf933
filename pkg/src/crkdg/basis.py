"""Reference-element machinery: Gauss rules, orthonormal modal bases, L2 projection.

The reference cell is [-1, 1]^d.  Modes are orthonormal with respect to the
reference measure, so on a physical cell with Jacobian J = |K| / 2^d the mass
matrix is J * I and coefficient 0 of a field equals its mean times
``sqrt(2^d)`` (the inverse of the constant mode's value).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg

from .errors import NumericError, ParameterError

MAX_DEGREE = 4


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # (n,) in 1D or (n, d)
    weights: np.ndarray  # (n,)

    @property
    def size(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=None)
def _leggauss(n):
    x, w = npleg.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_rule(n_points: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1], exact through degree 2n-1."""
    if not isinstance(n_points, (int, np.integer)) or not 1 <= n_points <= 20:
        raise ParameterError(f"n_points must be an integer in [1, 20], got {n_points!r}")
    x, w = _leggauss(int(n_points))
    return QuadratureRule(x, w)


def tensor_rule(n_points: int, dim: int) -> QuadratureRule:
    """Tensor Gauss rule on [-1, 1]^dim; points ordered with the last axis fastest."""
    r = gauss_rule(n_points)
    if dim == 1:
        return QuadratureRule(r.points[:, None].copy(), r.weights.copy())
    X, Y = np.meshgrid(r.points, r.points, indexing="ij")
    WX, WY = np.meshgrid(r.weights, r.weights, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    return QuadratureRule(pts, (WX * WY).ravel())


def _monomial_exponents(dim, k):
    if dim == 1:
        return np.arange(k + 1)[:, None]
    # total degree first, then descending power of xi
    return np.array([(d - j, j) for d in range(k + 1) for j in range(d + 1)])


def _monomials(points, exponents, deriv=None):
    """Values of each monomial (or a partial derivative of it) at ``points``.

    points: (n, dim); returns (n, n_mono).
    """
    n, dim = points.shape
    deriv = (0,) * dim if deriv is None else deriv
    out = np.ones((n, len(exponents)))
    for j, ex in enumerate(exponents):
        for a in range(dim):
            p, d = int(ex[a]), deriv[a]
            if d > p:
                out[:, j] = 0.0
                break
            coef = 1.0
            for t in range(d):
                coef *= p - t
            out[:, j] *= coef * points[:, a] ** (p - d)
    return out


@dataclass(frozen=True, eq=False)
class ReferenceBasis:
    """Orthonormal modal basis of P^k on [-1, 1]^dim with cached tables.

    Faces are numbered axis-major, low side first: in 1D face 0 is xi=-1 and
    face 1 is xi=+1; in 2D faces 0/1 are xi=-1/+1 and faces 2/3 are eta=-1/+1.
    """

    dim: int
    degree: int
    exponents: np.ndarray  # (n_mono, dim)
    coef: np.ndarray  # (m, n_mono): mode_i = sum_j coef[i, j] * monomial_j
    volume_rule: QuadratureRule
    edge_rule: QuadratureRule
    values: np.ndarray = field(repr=False)  # (nq, m)
    grads: np.ndarray = field(repr=False)  # (dim, nq, m)
    face_values: np.ndarray = field(repr=False)  # (2*dim, nqe, m)

    @property
    def n_modes(self) -> int:
        return self.coef.shape[0]

    @property
    def n_faces(self) -> int:
        return 2 * self.dim

    @property
    def reference_measure(self) -> float:
        return 2.0 ** self.dim

    @property
    def mean_factor(self) -> float:
        """Value of the constant mode; cell mean = c0 * mean_factor."""
        return float(self.coef[0, 0])

    def evaluate(self, points) -> np.ndarray:
        """Mode values at reference points, shape (n, m)."""
        pts = self._as_points(points)
        return _monomials(pts, self.exponents) @ self.coef.T

    def derivative(self, points, order) -> np.ndarray:
        """Partial derivative of each mode; ``order`` is an int (1D) or tuple."""
        pts = self._as_points(points)
        if np.isscalar(order):
            order = (int(order),)
        return _monomials(pts, self.exponents, tuple(order)) @ self.coef.T

    def gradient(self, points) -> np.ndarray:
        pts = self._as_points(points)
        out = []
        for a in range(self.dim):
            d = [0] * self.dim
            d[a] = 1
            out.append(_monomials(pts, self.exponents, tuple(d)) @ self.coef.T)
        return np.stack(out)

    def face_points(self, face: int, tangential=None) -> np.ndarray:
        """Reference coordinates of points on ``face`` (edge-rule points by default)."""
        axis, side = divmod(face, 2)
        s = 1.0 if side else -1.0
        if self.dim == 1:
            return np.array([[s]])
        t = self.edge_rule.points if tangential is None else np.asarray(tangential, float)
        pts = np.empty((len(t), 2))
        pts[:, axis] = s
        pts[:, 1 - axis] = t
        return pts

    def _as_points(self, points):
        pts = np.asarray(points, dtype=float)
        if self.dim == 1 and pts.ndim <= 1:
            pts = pts.reshape(-1, 1)
        return pts


def _orthonormalize(exponents, rule):
    """Modified Gram-Schmidt (two passes) of the monomials under ``rule``."""
    M = _monomials(rule.points, exponents)
    w = rule.weights
    n = len(exponents)
    C = np.eye(n)
    for i in range(n):
        for _ in range(2):
            for j in range(i):
                proj = np.sum(w * (M @ C[i]) * (M @ C[j]))
                C[i] -= proj * C[j]
        C[i] /= np.sqrt(np.sum(w * (M @ C[i]) ** 2))
    return C


@lru_cache(maxsize=None)
def build_basis(dimension: int, k: int) -> ReferenceBasis:
    """Orthonormal basis of P^k on the reference interval or square.

    1D modes are scaled Legendre polynomials; 2D modes are total-degree
    monomials orthonormalized numerically, ordered by degree then by
    descending power of xi.  Volume and edge rules use k+2 points per axis.
    """
    if dimension not in (1, 2):
        raise ParameterError(f"dimension must be 1 or 2, got {dimension!r}")
    if not isinstance(k, (int, np.integer)) or not 0 <= k <= MAX_DEGREE:
        raise ParameterError(f"degree must be in [0, {MAX_DEGREE}], got {k!r}")
    k = int(k)
    exps = _monomial_exponents(dimension, k)
    vol = tensor_rule(k + 2, dimension)
    edge = gauss_rule(k + 2)
    if dimension == 1:
        coef = np.zeros((k + 1, k + 1))
        for n in range(k + 1):
            c = np.zeros(n + 1)
            c[n] = 1.0
            coef[n, : n + 1] = npleg.leg2poly(c) * np.sqrt((2 * n + 1) / 2.0)
    else:
        coef = _orthonormalize(exps, vol)
    for arr in (coef, exps):
        arr.setflags(write=False)

    proto = ReferenceBasis(dimension, k, exps, coef, vol, edge,
                           values=np.empty(0), grads=np.empty(0), face_values=np.empty(0))
    values = proto.evaluate(vol.points)
    grads = proto.gradient(vol.points)
    faces = np.stack([proto.evaluate(proto.face_points(f)) for f in range(2 * dimension)])
    for arr in (values, grads, faces):
        arr.setflags(write=False)
    return ReferenceBasis(dimension, k, exps, coef, vol, edge, values, grads, faces)


def reference_points_to_physical(points, center, width):
    """Map reference points (n, d) onto cells; returns (n_cells, n, d)."""
    pts = np.asarray(points, float)
    return center[:, None, :] + 0.5 * width[:, None, :] * pts[None, :, :]


def l2_project(sampler: Callable, centers, widths, basis: ReferenceBasis, n_points=None):
    """L2 projection of ``sampler`` onto P^k of each cell.

    ``sampler`` maps physical points of shape (..., dim) to values of shape
    (...,) or (..., n_var).  ``centers``/``widths`` are (n_cells, dim).
    Returns coefficients of shape (n_cells, m, n_var).
    """
    centers = np.atleast_2d(np.asarray(centers, float))
    widths = np.atleast_2d(np.asarray(widths, float))
    if centers.shape[1] != basis.dim:
        centers = centers.reshape(-1, basis.dim)
        widths = widths.reshape(-1, basis.dim)
    if n_points is None:
        rule, vals = basis.volume_rule, basis.values
    else:
        rule = tensor_rule(n_points, basis.dim)
        vals = basis.evaluate(rule.points)
    phys = reference_points_to_physical(rule.points, centers, widths)
    f = np.asarray(sampler(phys), dtype=float)
    if f.ndim == 2:
        f = f[..., None]
    bad = ~np.isfinite(f)
    if bad.any():
        cell = int(np.argwhere(bad)[0][0])
        raise NumericError("non-finite sample in L2 projection", cell=cell)
    # c_i = sum_q w_q f(x_q) phi_i(xi_q)
    return np.einsum("q,qm,cqv->cmv", rule.weights, vals, f)


def evaluate_field(coeffs, basis: ReferenceBasis, points) -> np.ndarray:
    """Values of modal fields at reference points: (n_cells, n, n_var)."""
    return np.einsum("qm,cmv->cqv", basis.evaluate(points), coeffs)
