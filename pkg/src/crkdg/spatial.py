"""The coupled DG divergence and the cell-local divergence operators.

Fields are arrays of modal coefficients with shape (n_cells, n_modes, n_var).
With orthonormal reference modes, the weak form divided by the cell Jacobian
gives, for mode i and axis d with half-width ratio 2/dx_d,

    r_i = sum_d (2/dx_d) [ -sum_q w_q f_d(u_q) dphi_i/dxi_d(q)
                           + sum_{faces on axis d} sum_q w_q (f_hat . nu) phi_i(q) ]
"""
from __future__ import annotations

import numpy as np

from .basis import ReferenceBasis, build_basis, l2_project, tensor_rule
from .errors import AdmissibilityError, ConfigurationError
from .mesh import MeshTopology
from .physics import BoundaryCondition, ConservationLaw, ghost_state
from .riemann import FluxScheme, numerical_flux


class DGSpace:
    """Piecewise P^k space on a mesh with the quadrature tables the operators need."""

    def __init__(self, mesh: MeshTopology, k: int):
        self.mesh = mesh
        self.basis: ReferenceBasis = build_basis(mesh.dim, k)
        b = self.basis
        self.k = k
        self.dim = mesh.dim
        self.n_modes = b.n_modes
        self.scale = 2.0 / mesh.widths  # (n_cells, dim)
        w = b.volume_rule.weights
        self.vol_test = np.stack([(w[:, None] * b.grads[d]).T for d in range(self.dim)])  # (dim, m, nq)
        we = b.edge_rule.weights if self.dim == 2 else np.ones(1)
        self.face_test = np.stack([(we[:, None] * b.face_values[f]).T for f in range(b.n_faces)])  # (nf, m, nqe)
        self.face_sign = np.array([-1.0, 1.0] * self.dim)
        self.nqe = b.face_values.shape[1]
        # per axis: both faces stacked (low, high); test tables carry the outward sign
        self.face_values_axis = [np.concatenate([b.face_values[2 * d], b.face_values[2 * d + 1]])
                                 for d in range(self.dim)]
        self.face_test_axis = [np.concatenate([-self.face_test[2 * d], self.face_test[2 * d + 1]], axis=1)
                               for d in range(self.dim)]

    # -- evaluation helpers ---------------------------------------------------
    def volume_values(self, u):
        return np.matmul(self.basis.values, u)

    def trace(self, u, face):
        return np.matmul(self.basis.face_values[face], u)

    def cell_means(self, u):
        return u[:, 0, :] * self.basis.mean_factor

    def total(self, u):
        """sum_K |K| * mean_K, per variable."""
        return np.sum(self.mesh.volumes[:, None] * self.cell_means(u), axis=0)

    def project(self, sampler, n_points=None):
        return l2_project(sampler, self.mesh.centers, self.mesh.widths, self.basis, n_points)

    def quadrature_points(self, n_points):
        """Physical points and weights (including |K|) of a tensor rule per cell."""
        rule = tensor_rule(n_points, self.dim)
        pts = self.mesh.centers[:, None, :] + 0.5 * self.mesh.widths[:, None, :] * rule.points[None]
        wts = rule.weights[None, :] * (self.mesh.volumes / 2.0 ** self.dim)[:, None]
        return pts, wts, self.basis.evaluate(rule.points)

    def edge_points(self, edges):
        """Physical coordinates (n, nqe, dim) of the edge quadrature points."""
        m = self.mesh
        edges = np.asarray(edges, dtype=int)
        c = m.edge_centers[edges]
        if self.dim == 1:
            return c[:, None, :]
        pts = np.repeat(c[:, None, :], self.nqe, axis=1)
        eta = self.basis.edge_rule.points
        for axis in (0, 1):
            sel = m.edge_axis[edges] == axis
            t = 1 - axis
            pts[sel, :, t] += 0.5 * m.edge_lengths[edges][sel, None] * eta[None, :]
        return pts

    def evaluate_at(self, u, cells, ref_points):
        """Field values at reference points of selected cells."""
        return np.matmul(self.basis.evaluate(ref_points), u[cells])


ADMISSIBILITY_POLICIES = ("quadrature", "means")


def _check_finite(U, stage):
    if not np.all(np.isfinite(U)):
        bad = np.argwhere(~np.isfinite(U))[0]
        raise AdmissibilityError("non-finite state", state=U[tuple(bad[:-1])].tolist(),
                                 cell=int(bad[1]), stage=stage)


class SpatialOperator:
    """Binds a space, a conservation law, a numerical flux and a boundary policy.

    ``admissibility`` selects which states must be admissible: every
    quadrature value (``"quadrature"``) or only the cell means, with
    quadrature values merely finite (``"means"``).
    """

    def __init__(self, space: DGSpace, law: ConservationLaw, flux: FluxScheme | str = "lax_friedrichs_local",
                 boundary: dict | None = None, check_admissible: bool = True, admissibility: str = "quadrature"):
        if admissibility not in ADMISSIBILITY_POLICIES:
            raise ConfigurationError(f"unknown admissibility policy {admissibility!r}")
        self.space = space
        self.law = law
        self.flux = flux if isinstance(flux, FluxScheme) else FluxScheme(flux)
        self.boundary = dict(boundary or {})
        self.check = check_admissible
        self.pointwise = admissibility == "quadrature"
        mesh = space.mesh
        for side in mesh.boundary_sides():
            if side not in self.boundary:
                raise ConfigurationError(f"no boundary condition for side {side!r}")
            if not isinstance(self.boundary[side], BoundaryCondition):
                self.boundary[side] = BoundaryCondition(self.boundary[side])
        self._setup_edges()

    def _setup_edges(self):
        sp, mesh = self.space, self.space.mesh
        self.axis_groups = []
        for d in range(sp.dim):
            edges = np.flatnonzero(mesh.edge_axis == d)
            minus = mesh.edge_cells[edges, 0]
            plus = mesh.edge_cells[edges, 1]
            bnd = []
            for side in sorted(set(mesh.edge_sides[edges]) - {""}):
                loc = np.flatnonzero(mesh.edge_sides[edges] == side)
                ge = edges[loc]
                interior_is_minus = minus[loc] >= 0
                # split so each block has a single orientation
                for flag in (True, False):
                    sel = interior_is_minus == flag
                    if sel.any():
                        bnd.append(dict(side=side, loc=loc[sel], interior_minus=flag,
                                        cells=(minus if flag else plus)[loc[sel]],
                                        points=sp.edge_points(ge[sel])))
            self.axis_groups.append(dict(edges=edges, minus=minus, plus=plus, boundary=bnd))

    # -- operators ------------------------------------------------------------
    # Internally fields are laid out modes-major, (m, n_cells * n_var), so each
    # table application is one GEMM instead of n_cells small products.

    @staticmethod
    def _modes_major(u):
        return np.ascontiguousarray(u.transpose(1, 0, 2)).reshape(u.shape[1], -1)

    def _apply(self, table, values, shape):
        """table (m, q) applied to values (q, n, v) or (2, q/2, n, v) -> (m, n, v)."""
        return (table @ values.reshape(table.shape[1], -1)).reshape(shape)

    def _volume_term(self, um, n, nv, stage=None):
        sp, law = self.space, self.law
        Uq = (sp.basis.values @ um).reshape(-1, n, nv)
        if self.check:
            if self.pointwise:
                law.check_admissible(Uq, stage=stage, cell_axis=1)
            else:
                means = (um[0] * sp.basis.mean_factor).reshape(1, n, nv)
                law.check_admissible(means, stage=stage, cell_axis=1)
                _check_finite(Uq, stage)
        out = np.zeros((sp.n_modes, n, nv))
        for d in range(sp.dim):
            out -= self._apply(sp.vol_test[d], law.flux(Uq, d), out.shape) * sp.scale[None, :, d, None]
        return out

    def local(self, u, stage=None):
        """Cell-local divergence: interior traces only, no neighbor access."""
        sp, law = self.space, self.law
        n, _, nv = u.shape
        um = self._modes_major(u)
        out = self._volume_term(um, n, nv, stage)
        if sp.k == 0:
            # face terms of a constant cancel exactly in theory; keep it exact in floating point
            return np.zeros_like(u)
        for d in range(sp.dim):
            T = (sp.face_values_axis[d] @ um).reshape(-1, n, nv)
            out += self._apply(sp.face_test_axis[d], law.flux(T, d), out.shape) * sp.scale[None, :, d, None]
        return np.ascontiguousarray(out.transpose(1, 0, 2))

    def edge_fluxes(self, u, t=0.0, um=None):
        """f_hat . e_axis on every edge, laid out (nqe, n_edges, n_var)."""
        sp, law, mesh = self.space, self.law, self.space.mesh
        n, _, nv = u.shape
        if um is None:
            um = self._modes_major(u)
        nqe = sp.nqe
        F = np.empty((nqe, mesh.n_edges, nv))
        need_alpha = self.flux.kind == "lax_friedrichs_local"
        means = sp.cell_means(u) if need_alpha else None
        for d, grp in enumerate(self.axis_groups):
            ne = len(grp["edges"])
            T = (sp.face_values_axis[d] @ um).reshape(2, nqe, n, nv)  # low face, high face
            mM, mP = grp["minus"], grp["plus"]
            if grp["boundary"]:
                okM, okP = mM >= 0, mP >= 0
                uM = np.empty((nqe, ne, nv))
                uP = np.empty_like(uM)
                uM[:, okM] = T[1][:, mM[okM]]
                uP[:, okP] = T[0][:, mP[okP]]
            else:
                uM, uP = T[1][:, mM], T[0][:, mP]
            if need_alpha:
                aM = np.zeros(ne)
                aP = np.zeros(ne)
                okM, okP = mM >= 0, mP >= 0
                aM[okM] = law.max_speed(means[mM[okM]], d)
                aP[okP] = law.max_speed(means[mP[okP]], d)
            for blk in grp["boundary"]:
                loc = blk["loc"]
                inner = (uM if blk["interior_minus"] else uP)[:, loc].transpose(1, 0, 2)
                ghost = ghost_state(self.boundary[blk["side"]], inner, blk["points"], d, t, law)
                (uP if blk["interior_minus"] else uM)[:, loc] = np.asarray(ghost).transpose(1, 0, 2)
                if need_alpha:
                    gmean = _edge_mean(ghost, sp)
                    (aP if blk["interior_minus"] else aM)[loc] = law.max_speed(gmean, d)
            if self.check and grp["boundary"]:
                for side_states in (uM, uP):
                    if self.pointwise:
                        law.check_admissible(side_states, cell_axis=1)
                    else:
                        _check_finite(side_states, None)
            alpha = np.maximum(aM, aP) if need_alpha else None
            F[:, grp["edges"]] = numerical_flux(self.flux, law, uM, uP, d, 1.0, alpha=alpha)
        return F

    def dg(self, u, t=0.0, stage=None):
        """DG divergence with numerical fluxes; boundary data evaluated at time ``t``."""
        sp, mesh = self.space, self.space.mesh
        n, _, nv = u.shape
        um = self._modes_major(u)
        out = self._volume_term(um, n, nv, stage)
        F = self.edge_fluxes(u, t, um)
        for d in range(sp.dim):
            Fd = F[:, mesh.cell_edges[:, 2 * d: 2 * d + 2].T]  # (nqe, 2, n, nv)
            Fd = Fd.transpose(1, 0, 2, 3)
            out += self._apply(sp.face_test_axis[d], Fd, out.shape) * sp.scale[None, :, d, None]
        return np.ascontiguousarray(out.transpose(1, 0, 2))


def _edge_mean(values, sp: DGSpace):
    if sp.dim == 1:
        return values[:, 0, :]
    w = sp.basis.edge_rule.weights
    return np.einsum("q,eqv->ev", w, values) / w.sum()


def dg_divergence(field, law, flux, boundary, time, space: DGSpace):
    return SpatialOperator(space, law, flux, boundary).dg(field, time)


def local_divergence(field, law, space: DGSpace):
    return SpatialOperator(space, law, "lax_friedrichs_local", _dummy_boundary(space)).local(field)


def _dummy_boundary(space):
    return {s: BoundaryCondition("outflow") for s in space.mesh.boundary_sides()}
