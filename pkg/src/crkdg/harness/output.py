"""CSV emission: cell-average profiles, point samples, density grids and error tables.

Every writer produces a header row followed by rows in a fixed order
(cell index order for profiles, request order for samples, row-major from
the bottom row for grids) so identical runs give identical files.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, ParameterError
from ..physics import Euler

_FMT = "{:.16e}"


def _fmt(v):
    if v is None:
        return "nan"
    return _FMT.format(float(v))


def _write(path: Path, header, rows):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([c if isinstance(c, (int, np.integer, str)) else _fmt(c) for c in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def variable_names(law):
    if isinstance(law, Euler):
        return ["rho", "w", "p"] if law.dim == 1 else ["rho", "w1", "w2", "p"]
    return [f"u{i}" for i in range(law.n_var)] if law.n_var > 1 else ["u"]


def _display(law, states):
    """Primitive variables for Euler, conserved otherwise."""
    if isinstance(law, Euler):
        rho, vel, p = law.to_primitive(states)
        return np.column_stack([rho, vel, p])
    return np.asarray(states)


def write_profile(path, space, law, u):
    """One row per cell: center coordinates and cell-average variables."""
    centers = space.mesh.centers
    vals = _display(law, space.cell_means(u))
    coords = ["x", "y"][: space.dim]
    return _write(path, coords + variable_names(law), np.column_stack([centers, vals]))


def locate(mesh, points):
    """Cell index and reference coordinates of physical points; -1 outside the mesh."""
    pts = np.atleast_2d(np.asarray(points, float))
    if pts.shape[1] != mesh.dim:
        raise ParameterError(f"sample points must have {mesh.dim} coordinates")
    if mesh.dim == 1:
        nodes = mesh.nodes
        idx = np.clip(np.searchsorted(nodes, pts[:, 0], side="right") - 1, 0, mesh.n_cells - 1)
        inside = (pts[:, 0] >= nodes[0]) & (pts[:, 0] <= nodes[-1])
    else:
        nx, ny = mesh.shape
        lo = mesh.centers.min(axis=0) - 0.5 * mesh.widths[0]
        gi = np.floor((pts - lo) / mesh.widths[0]).astype(int)
        gi = np.clip(gi, 0, [nx - 1, ny - 1])
        lookup = -np.ones(nx * ny, int)
        lookup[mesh.grid_index[:, 1] * nx + mesh.grid_index[:, 0]] = np.arange(mesh.n_cells)
        idx = lookup[gi[:, 1] * nx + gi[:, 0]]
        hi = lo + mesh.widths[0] * np.array([nx, ny])
        inside = np.all((pts >= lo) & (pts <= hi), axis=1) & (idx >= 0)
    idx = np.where(inside, idx, -1)
    safe = np.maximum(idx, 0)
    ref = 2.0 * (pts - mesh.centers[safe]) / mesh.widths[safe]
    return idx, np.clip(ref, -1.0, 1.0)


def sample(space, u, points):
    """Point values of the DG polynomial; NaN rows for points outside the mesh."""
    idx, ref = locate(space.mesh, points)
    out = np.full((len(idx), u.shape[2]), np.nan)
    for i, (c, r) in enumerate(zip(idx, ref)):
        if c >= 0:
            out[i] = space.evaluate_at(u, [c], r[None, :])[0, 0]
    return out


def write_samples(path, space, law, u, points):
    pts = np.atleast_2d(np.asarray(points, float))
    vals = _display(law, sample(space, u, pts))
    coords = ["x", "y"][: space.dim]
    return _write(path, coords + variable_names(law), np.column_stack([pts, vals]))


def density_grid(space, u):
    """(Ny, Nx) array of cell-average density; NaN where the grid has no cell."""
    mesh = space.mesh
    if mesh.dim != 2:
        raise ConfigurationError("density grids need a 2D mesh")
    nx, ny = mesh.shape
    grid = np.full((ny, nx), np.nan)
    gi = mesh.grid_index
    grid[gi[:, 1], gi[:, 0]] = space.cell_means(u)[:, 0]
    return grid


def write_contour(path, space, u):
    """Row-major Ny x Nx grid of density averages, bottom row first, no header coordinates."""
    grid = density_grid(space, u)
    nx = grid.shape[1]
    return _write(path, [f"i{j}" for j in range(nx)], grid)


ERROR_COLUMNS = ["N", "h", "L1", "L1_order", "L2", "L2_order", "Linf", "Linf_order"]


def error_rows(report, length=1.0):
    for i, n in enumerate(report.cells):
        yield (int(n), length / n, report.l1[i], report.l1_orders[i], report.l2[i],
               report.l2_orders[i], report.linf[i], report.linf_orders[i])


def write_errors(path, report, length=1.0):
    """Error table: one row per mesh, 8 numeric columns, ``nan`` for undefined orders."""
    return _write(path, ERROR_COLUMNS, error_rows(report, length))


def write_table(path, header, rows):
    return _write(path, header, rows)


def read_csv(path):
    """Header and float rows of a file written by this module."""
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[math.nan if c == "nan" else float(c) for c in r] for r in rows[1:]]
