"""Fine-mesh reference solutions for problems without a closed form, cached on disk."""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError
from ..limiters import LimiterConfig
from .runner import run_scenario
from .scenarios import BL_MAX_SPEED, DtRule, get_scenario

log = logging.getLogger(__name__)

# name -> (degree, cells, scheme, overrides applied to the scenario)
REFERENCE_RUNS = {
    "blast_wave": dict(degree=2, cells=4000, scheme="crkdg"),
    "shu_osher": dict(degree=2, cells=4000, scheme="crkdg"),
    # first-order Godunov finite volumes
    "buckley_leverett": dict(degree=0, cells=20000, scheme="crkdg",
                             dt_rule=DtRule("fixed", 0.4 / BL_MAX_SPEED), limiter=LimiterConfig()),
}


def cache_dir() -> Path:
    return Path(os.environ.get("CRKDG_CACHE", Path.home() / ".cache" / "crkdg"))


def _key(name, variant, spec):
    blob = json.dumps({"name": name, "variant": variant,
                       **{k: repr(v) for k, v in sorted(spec.items())}}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def reference_solution(name, variant=None, refresh=False):
    """(cell centers, cell means) of the reference run, computed once and cached as .npz."""
    if name not in REFERENCE_RUNS:
        raise ConfigurationError(f"no reference run defined for {name!r}")
    spec = dict(REFERENCE_RUNS[name])
    path = cache_dir() / f"{name}-{variant or 'default'}-{_key(name, variant, spec)}.npz"
    if path.exists() and not refresh:
        data = np.load(path)
        return data["x"], data["means"]
    overrides = {k: spec.pop(k) for k in ("dt_rule", "limiter") if k in spec}
    scen = get_scenario(name, variant=variant, **spec)
    if overrides:
        scen = scen.replace(**overrides)
    log.info("computing reference for %s (%s cells)", name, scen.cells)
    res = run_scenario(scen)
    x, means = res.space.mesh.centers[:, 0], res.space.cell_means(res.u)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, x=x, means=means)
    return x, means


def l1_distance(space, u, x_ref, means_ref, component=0):
    """L1 distance between coarse cell means and reference means averaged per coarse cell."""
    nodes = space.mesh.nodes
    idx = np.clip(np.searchsorted(nodes, x_ref, side="right") - 1, 0, space.mesh.n_cells - 1)
    counts = np.bincount(idx, minlength=space.mesh.n_cells)
    if np.any(counts == 0):
        raise ConfigurationError("reference mesh is coarser than the solution mesh")
    ref = np.bincount(idx, weights=means_ref[:, component], minlength=space.mesh.n_cells) / counts
    mine = space.cell_means(u)[:, component]
    return float(np.sum(space.mesh.volumes * np.abs(mine - ref)))
