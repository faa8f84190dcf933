"""Interval and rectangular meshes with edge connectivity.

Every edge has a "minus" cell (on the low side along the edge axis) and a
"plus" cell (high side).  The reference normal of an edge is +e_axis, which is
the outward normal for the minus cell.  A boundary edge has one of the two
cells set to -1 and carries a side name (``left``, ``right``, ``bottom``,
``top``, ``step``) that boundary policies key on.  Periodic axes are wrapped
topologically, so they produce no boundary edges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

BOUNDARY_KINDS = ("periodic", "inflow", "outflow", "reflective", "double_mach_top",
                  "double_mach_bottom")


@dataclass(frozen=True, eq=False)
class MeshTopology:
    dim: int
    centers: np.ndarray  # (n_cells, dim)
    widths: np.ndarray  # (n_cells, dim)
    cell_edges: np.ndarray  # (n_cells, 2*dim) edge id per face
    edge_axis: np.ndarray  # (n_edges,)
    edge_cells: np.ndarray  # (n_edges, 2) [minus, plus], -1 on the boundary side
    edge_centers: np.ndarray  # (n_edges, dim)
    edge_lengths: np.ndarray  # (n_edges,) measure |e| (1 in 1D)
    edge_sides: np.ndarray  # (n_edges,) side name, "" for interior edges
    shape: tuple = ()  # (Nx,) or (Nx, Ny) of the underlying grid
    grid_index: np.ndarray | None = None  # (n_cells, dim) integer grid position
    nodes: np.ndarray | None = None  # 1D node coordinates

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    @property
    def n_edges(self) -> int:
        return len(self.edge_axis)

    @property
    def volumes(self) -> np.ndarray:
        return np.prod(self.widths, axis=1)

    @property
    def diameters(self) -> np.ndarray:
        """h_K: interval length in 1D, diagonal in 2D."""
        return np.sqrt(np.sum(self.widths ** 2, axis=1))

    @property
    def h(self) -> float:
        return float(self.diameters.max())

    @property
    def quasi_uniformity(self) -> float:
        d = self.diameters
        return float(d.max() / d.min())

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_sides != "")

    def outward_normal(self, cell: int, face: int) -> np.ndarray:
        axis, side = divmod(face, 2)
        nu = np.zeros(self.dim)
        nu[axis] = 1.0 if side else -1.0
        return nu

    def neighbor(self, cell: int, face: int) -> int:
        """Cell across ``face`` of ``cell`` (-1 on the boundary)."""
        e = self.cell_edges[cell, face]
        side = face % 2
        # a cell is the minus cell of the edge on its high-side face
        return int(self.edge_cells[e, 1 if side else 0])

    def boundary_sides(self) -> set:
        return set(self.edge_sides[self.boundary_edges].tolist())


def build_interval_mesh(a, b, N, perturbation="none", periodic=False) -> MeshTopology:
    """Mesh of [a, b] with N cells.

    ``perturbation="alternating"`` moves every interior node with odd index
    by +h/3 (boundary nodes stay fixed).
    """
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ParameterError(f"N must be an integer >= 2, got {N!r}")
    if not a < b:
        raise ParameterError(f"need a < b, got a={a}, b={b}")
    h = (b - a) / N
    nodes = a + h * np.arange(N + 1)
    nodes[-1] = b
    if perturbation == "alternating":
        odd = np.arange(1, N, 2)
        nodes[odd] += h / 3.0
    elif perturbation not in ("none", None):
        raise ParameterError(f"unknown perturbation {perturbation!r}")
    widths = np.diff(nodes)[:, None]
    centers = 0.5 * (nodes[:-1] + nodes[1:])[:, None]
    cells = np.arange(N)
    if periodic:
        # edge j sits at node j; edge 0 joins cell N-1 and cell 0
        n_edges = N
        minus = np.roll(cells, 1)
        plus = cells.copy()
        edge_x = nodes[:-1]
        sides = np.full(N, "", dtype=object)
        cell_edges = np.column_stack([cells, (cells + 1) % N])
    else:
        n_edges = N + 1
        minus = np.concatenate([[-1], cells])
        plus = np.concatenate([cells, [-1]])
        edge_x = nodes
        sides = np.full(N + 1, "", dtype=object)
        sides[0], sides[-1] = "left", "right"
        cell_edges = np.column_stack([cells, cells + 1])
    return MeshTopology(
        dim=1, centers=centers, widths=widths, cell_edges=cell_edges,
        edge_axis=np.zeros(n_edges, dtype=int),
        edge_cells=np.column_stack([minus, plus]),
        edge_centers=edge_x[:, None].copy(), edge_lengths=np.ones(n_edges),
        edge_sides=sides.astype(str), shape=(N,), grid_index=cells[:, None].copy(),
        nodes=nodes,
    )


def build_rect_mesh(x_range, y_range, Nx, Ny, periodic=(False, False), removed=None) -> MeshTopology:
    """Uniform axis-aligned grid; cell (ix, iy) has index iy*Nx + ix.

    ``removed`` is an optional predicate on cell centers (x, y) arrays; cells
    where it is true are deleted and the exposed edges get the side ``step``.
    """
    (x0, x1), (y0, y1) = x_range, y_range
    for n in (Nx, Ny):
        if not isinstance(n, (int, np.integer)) or n < 2:
            raise ParameterError(f"cell counts must be integers >= 2, got {n!r}")
    if not (x0 < x1 and y0 < y1):
        raise ParameterError("degenerate rectangle")
    dx, dy = (x1 - x0) / Nx, (y1 - y0) / Ny
    ix, iy = np.meshgrid(np.arange(Nx), np.arange(Ny), indexing="xy")
    ix, iy = ix.ravel(), iy.ravel()
    xc = x0 + (ix + 0.5) * dx
    yc = y0 + (iy + 0.5) * dy
    keep = np.ones(Nx * Ny, bool) if removed is None else ~np.asarray(removed(xc, yc), bool)
    new_id = -np.ones(Nx * Ny, dtype=int)
    new_id[keep] = np.arange(keep.sum())

    def cid(i, j):
        return new_id[j * Nx + i]

    edge_axis, edge_minus, edge_plus, ecent, elen, esides = [], [], [], [], [], []
    n_kept = int(keep.sum())
    cell_edges = -np.ones((n_kept, 4), dtype=int)

    def add_edge(axis, m, p, center, length, side):
        if m < 0 and p < 0:
            return
        if side == "" and (m < 0 or p < 0):
            side = "step"
        e = len(edge_axis)
        edge_axis.append(axis)
        edge_minus.append(m)
        edge_plus.append(p)
        ecent.append(center)
        elen.append(length)
        esides.append(side)
        if m >= 0:
            cell_edges[m, 2 * axis + 1] = e
        if p >= 0:
            cell_edges[p, 2 * axis] = e

    px, py = periodic
    # x-normal edges, then y-normal edges
    for j in range(Ny):
        y = y0 + (j + 0.5) * dy
        for i in range(0 if px else 0, Nx if px else Nx + 1):
            if px:
                m, p, side = cid((i - 1) % Nx, j), cid(i, j), ""
            else:
                m = cid(i - 1, j) if i > 0 else -1
                p = cid(i, j) if i < Nx else -1
                side = "left" if i == 0 else ("right" if i == Nx else "")
            add_edge(0, m, p, (x0 + i * dx, y), dy, side)
    for j in range(Ny if py else Ny + 1):
        for i in range(Nx):
            x = x0 + (i + 0.5) * dx
            if py:
                m, p, side = cid(i, (j - 1) % Ny), cid(i, j), ""
            else:
                m = cid(i, j - 1) if j > 0 else -1
                p = cid(i, j) if j < Ny else -1
                side = "bottom" if j == 0 else ("top" if j == Ny else "")
            add_edge(1, m, p, (x, y0 + j * dy), dx, side)

    return MeshTopology(
        dim=2,
        centers=np.column_stack([xc[keep], yc[keep]]),
        widths=np.tile([dx, dy], (n_kept, 1)),
        cell_edges=cell_edges,
        edge_axis=np.asarray(edge_axis, dtype=int),
        edge_cells=np.column_stack([edge_minus, edge_plus]).astype(int),
        edge_centers=np.asarray(ecent, float),
        edge_lengths=np.asarray(elen, float),
        edge_sides=np.asarray(esides, dtype=str),
        shape=(Nx, Ny),
        grid_index=np.column_stack([ix[keep], iy[keep]]),
    )


def forward_step_mesh(Nx=240, Ny=80) -> MeshTopology:
    """Wind tunnel [0,3]x[0,1] minus the step [0.6,3]x[0,0.2].

    Needs Nx divisible by 5 and Ny by 5 so the step corner is a mesh node.
    """
    if Nx % 5 or Ny % 5:
        raise ParameterError("forward-step mesh needs Nx and Ny divisible by 5")
    return build_rect_mesh((0.0, 3.0), (0.0, 1.0), Nx, Ny,
                           removed=lambda x, y: (x > 0.6) & (y < 0.2))
