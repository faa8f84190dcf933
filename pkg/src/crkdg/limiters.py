"""TVB troubled-cell detection, 1D WENO reconstruction and minmod slope limiting.

Limiters only touch modes >= 1, so cell means (and therefore the discrete
conservation) are preserved bit for bit.  Detection reads the pre-limiter
field and application writes to a copy, which makes the result independent
of the order in which flagged cells are processed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigurationError
from .physics import reflect

# boundary kinds whose ghost cell is the mirror image of the wall cell
MIRRORED = ("reflective", "double_mach_bottom")

LIMITER_KINDS = ("none", "tvb_minmod", "tvb_weno")


@dataclass
class LimiterConfig:
    kind: str = "none"
    M: float = 0.0
    characteristic: bool | None = None  # default: on for 1D systems and for 2D k >= 2
    eps: float = 1e-6
    power: float = 2.0
    linear_weights: tuple = (0.001, 0.998, 0.001)

    def __post_init__(self):
        if self.kind not in LIMITER_KINDS:
            raise ConfigurationError(f"unknown limiter kind {self.kind!r}")
        if self.M < 0:
            raise ConfigurationError("TVB constant M must be non-negative")


def _neighbors(mesh):
    nb = np.empty_like(mesh.cell_edges)
    for f in range(mesh.cell_edges.shape[1]):
        e = mesh.cell_edges[:, f]
        nb[:, f] = mesh.edge_cells[e, 1 if f % 2 else 0]
    return nb


class Limiter:
    """Callable limiter bound to a space and a law; ``last_flagged`` holds the latest count."""

    def __init__(self, space, law, config: LimiterConfig | None = None, boundary: dict | None = None):
        self.space = space
        self.law = law
        self.config = config or LimiterConfig()
        mesh = space.mesh
        self.neighbors = _neighbors(mesh)
        # walls get a mirrored ghost mean; other boundaries fall back to one-sided differences
        self.mirror = np.zeros(self.neighbors.shape, bool)
        for side, bc in (boundary or {}).items():
            if getattr(bc, "kind", bc) in MIRRORED:
                self.mirror |= (self.neighbors < 0) & (mesh.edge_sides[mesh.cell_edges] == side)
        b = space.basis
        self.dim = space.dim
        # value of the linear mode along axis d at the high face center
        center_face = [np.eye(self.dim)[d] for d in range(self.dim)]
        self.slope_scale = (np.array([b.evaluate(center_face[d][None, :])[0, 1 + d] for d in range(self.dim)])
                            if space.k >= 1 else np.ones(self.dim))
        self.face_mid = np.stack([b.evaluate(((2 * (f % 2) - 1) * np.eye(self.dim)[f // 2])[None, :])[0]
                                  for f in range(2 * self.dim)])  # (nf, m)
        cfg = self.config
        self.characteristic = cfg.characteristic
        if self.characteristic is None:
            self.characteristic = law.n_var > 1 and (self.dim == 1 or space.k >= 2)
        self.last_flagged = 0
        if cfg.kind == "tvb_weno" and space.k >= 1:
            if self.dim != 1:
                raise ConfigurationError("the WENO limiter is implemented for 1D only")
            self._setup_weno()

    def __call__(self, u):
        cfg = self.config
        if cfg.kind == "none" or self.space.k == 0:
            self.last_flagged = 0
            return u
        flags = self.detect(u)
        self.last_flagged = int(flags.sum())
        if not flags.any():
            return u
        if cfg.kind == "tvb_weno":
            return self.apply_weno(u, flags)
        return self.apply_minmod(u, flags)

    # -- detection ----------------------------------------------------------------
    def _mean_differences(self, means, d):
        """Forward and backward mean differences along axis d; one-sided at boundaries."""
        nb = self.neighbors
        lo, hi = nb[:, 2 * d], nb[:, 2 * d + 1]
        fwd = np.where((hi >= 0)[:, None], means[np.maximum(hi, 0)] - means, np.nan)
        bwd = np.where((lo >= 0)[:, None], means - means[np.maximum(lo, 0)], np.nan)
        if self.mirror.any():
            ghost = reflect(means, d)
            fwd = np.where(self.mirror[:, 2 * d + 1, None], ghost - means, fwd)
            bwd = np.where(self.mirror[:, 2 * d, None], means - ghost, bwd)
        fwd = np.where(np.isnan(fwd), bwd, fwd)
        bwd = np.where(np.isnan(bwd), fwd, bwd)
        return np.nan_to_num(fwd), np.nan_to_num(bwd)

    def _char(self, means, d):
        if self.characteristic:
            # eigenvectors only exist at admissible states
            self.law.check_admissible(means)
            return self.law.eigensystem(means, d)
        return None, None

    def detect(self, u):
        """Boolean mask of troubled cells (modified minmod with bound M h^2)."""
        if self.space.k == 0:
            return np.zeros(len(u), bool)
        sp = self.space
        means = sp.cell_means(u)
        flags = np.zeros(len(u), bool)
        for d in range(self.dim):
            fwd, bwd = self._mean_differences(means, d)
            hi_dev = np.einsum("m,cmv->cv", self.face_mid[2 * d + 1], u) - means
            lo_dev = means - np.einsum("m,cmv->cv", self.face_mid[2 * d], u)
            R, Rinv = self._char(means, d)
            if Rinv is not None:
                fwd, bwd, hi_dev, lo_dev = (np.einsum("cij,cj->ci", Rinv, x) for x in (fwd, bwd, hi_dev, lo_dev))
            bound = (self.config.M * sp.mesh.widths[:, d] ** 2)[:, None]
            for dev in (hi_dev, lo_dev):
                flags |= np.any(K.modified_minmod(dev, fwd, bwd, bound) != dev, axis=1)
        return flags

    # -- minmod slope limiting ------------------------------------------------------
    def apply_minmod(self, u, flags):
        """Flagged cells become limited linear polynomials."""
        sp = self.space
        out = u.copy()
        idx = np.flatnonzero(flags)
        means = sp.cell_means(u)
        for d in range(self.dim):
            a = self.slope_scale[d]
            fwd, bwd = self._mean_differences(means, d)
            fwd, bwd = fwd[idx] / a, bwd[idx] / a
            slope = u[idx, 1 + d, :]
            bound = (self.config.M * sp.mesh.widths[idx, d] ** 2 / a)[:, None]
            R, Rinv = self._char(means[idx], d)
            if Rinv is None:
                new = K.modified_minmod(slope, fwd, bwd, bound)
            else:
                cs, cf, cb = (np.einsum("cij,cj->ci", Rinv, x) for x in (slope, fwd, bwd))
                lim = K.modified_minmod(cs, cf, cb, bound)
                # a slope minmod leaves alone (up to the transform round-off) stays bitwise,
                # which makes limiting idempotent
                kept = np.all(np.abs(lim - cs) <= 1e-12 * (np.abs(cs) + np.abs(cf) + np.abs(cb)), axis=1)
                new = np.where(kept[:, None], slope, np.einsum("cij,cj->ci", R, lim))
            out[idx, 1 + d, :] = new
        out[idx, 1 + self.dim:, :] = 0.0
        return out

    # -- WENO reconstruction (1D) --------------------------------------------------
    def _setup_weno(self):
        sp = self.space
        b = sp.basis
        k = sp.k
        rule = b.volume_rule
        xi = rule.points[:, 0]
        mesh = sp.mesh
        x = mesh.centers[:, 0]
        h = mesh.widths[:, 0]
        n = mesh.n_cells
        # matrices mapping neighbor coefficients onto each cell's basis
        self.shift = np.zeros((2, n, b.n_modes, b.n_modes))
        vals_w = rule.weights[:, None] * b.values  # (nq, m)
        for side, f in ((0, 0), (1, 1)):
            nbr = self.neighbors[:, f]
            ok = nbr >= 0
            j = np.where(ok, nbr, np.arange(n))
            xc_n = x[j].copy()
            if mesh.nodes is not None:
                # periodic wrap: place the neighbor next to the cell geometrically
                L = mesh.nodes[-1] - mesh.nodes[0]
                if side == 0:
                    xc_n = np.where(xc_n > x, xc_n - L, xc_n)
                else:
                    xc_n = np.where(xc_n < x, xc_n + L, xc_n)
            phys = x[:, None] + 0.5 * h[:, None] * xi[None, :]
            xi_n = (phys - xc_n[:, None]) * 2.0 / h[j][:, None]
            Vn = b.evaluate(xi_n.reshape(-1)).reshape(n, len(xi), b.n_modes)
            # shift[c, i, j] = sum_q w_q phi_i(xi_q) phi_j(xi_n(q))
            self.shift[side] = np.einsum("qi,cqj->cij", vals_w, Vn)
        self.has_nbr = self.neighbors >= 0
        # smoothness-indicator quadratic form: sum_s 2^(2s-1) int (d^s p)^2
        S = np.zeros((b.n_modes, b.n_modes))
        for s in range(1, k + 1):
            D = b.derivative(xi, s)
            S += 2.0 ** (2 * s - 1) * D.T @ (rule.weights[:, None] * D)
        self.smooth_form = S

    def apply_weno(self, u, flags):
        cfg = self.config
        sp = self.space
        idx = np.flatnonzero(flags)
        out = u.copy()
        means = sp.cell_means(u)
        own = u[idx]
        cand = []
        gam = []
        for side, f in ((0, 0), (1, 1)):
            nbr = self.neighbors[idx, f]
            ok = nbr >= 0
            src = u[np.where(ok, nbr, idx)]
            p = np.einsum("cij,cjv->civ", self.shift[side][idx], src)
            p[:, 0, :] = own[:, 0, :]  # shift mean to this cell's mean
            cand.append(p)
            gam.append(np.where(ok, cfg.linear_weights[0 if side == 0 else 2], 0.0))
        polys = np.stack([cand[0], own, cand[1]])  # (3, nf, m, v)
        gammas = np.stack([gam[0], np.full(len(idx), cfg.linear_weights[1]), gam[1]])  # (3, nf)
        if self.characteristic:
            R, Rinv = self.law.eigensystem(means[idx], 0)
            polys = np.einsum("cij,lcmj->lcmi", Rinv, polys)
        beta = np.einsum("lcmv,mn,lcnv->lcv", polys, self.smooth_form, polys)
        wbar = gammas[:, :, None] / (cfg.eps + beta) ** cfg.power
        w = wbar / wbar.sum(axis=0, keepdims=True)
        new = np.einsum("lcv,lcmv->cmv", w, polys)
        if self.characteristic:
            new = np.einsum("cij,cmj->cmi", R, new)
        new[:, 0, :] = own[:, 0, :]
        out[idx] = new
        return out


def detect_troubled_cells(space, law, u, M, characteristic=None):
    return Limiter(space, law, LimiterConfig("tvb_minmod", M, characteristic)).detect(u)


def apply_weno_limiter_1d(space, law, u, flags, config: LimiterConfig | None = None):
    cfg = config or LimiterConfig("tvb_weno")
    return Limiter(space, law, cfg).apply_weno(u, np.asarray(flags, bool))


def apply_minmod_limiter_2d(space, law, u, flags, config: LimiterConfig | None = None):
    cfg = config or LimiterConfig("tvb_minmod")
    return Limiter(space, law, cfg).apply_minmod(u, np.asarray(flags, bool))
