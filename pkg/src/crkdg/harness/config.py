"""INI run configurations.

Sections and keys (all optional except ``scenario.name``)::

    [scenario]        name, variant
    [discretization]  scheme, degree, tableau, flux, admissibility (quadrature | means),
                      initial_projection (l2 | means)
    [tableau]         A (rows split by ';'), b, c, order   -> custom Butcher tableau
    [mesh]            cells ("N" or "Nx, Ny"), perturbation
    [time]            end_time, dt_rule (fixed | cfl), dt_value
    [limiter]         kind, M, characteristic
    [convergence]     cells (comma list)
    [output]          profile, samples ("x" or "x y" points split by ';'), contour, errors
    [properties]      see PropertySpec

Unknown sections or keys raise ConfigurationError.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..errors import ConfigurationError, ParameterError
from ..limiters import LimiterConfig
from ..timestep import custom_tableau
from .scenarios import DtRule, Scenario, get_scenario


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _ints(s):
    return [int(v) for v in s.replace(",", " ").split()]


def _floats(s):
    return [float(v) for v in s.replace(",", " ").split()]


def _matrix(s):
    return [_floats(row) for row in s.split(";") if row.strip()]


def _points(s):
    return [_floats(p) for p in s.split(";") if p.strip()]


@dataclass
class OutputRequest:
    profile: bool = True
    samples: list | None = None
    contour: bool = False
    errors: bool = True


@dataclass
class PropertySpec:
    """Asserted properties; ``None`` disables a check."""

    positivity: bool = False  # min density and pressure > 0 at every step (Euler)
    conservation_tol: float | None = None  # relative drift per 100 steps
    density_max: float | None = None
    max_l2_error: float | None = None
    max_linf_error: float | None = None
    min_order: float | None = None  # every observed order from order_from on
    max_order: float | None = None
    order_norm: str = "l2"
    order_from: int = 0  # smallest N (finer mesh of the pair) whose order is checked
    max_tv_growth: float | None = None
    max_reference_l1: float | None = None


SCHEMA = {
    "scenario": {"name": str, "variant": str},
    "discretization": {"scheme": str, "degree": int, "tableau": str, "flux": str, "admissibility": str,
                       "initial_projection": str},
    "tableau": {"a": _matrix, "b": _floats, "c": _floats, "order": int},
    "mesh": {"cells": _ints, "perturbation": str},
    "time": {"end_time": float, "dt_rule": str, "dt_value": float},
    "limiter": {"kind": str, "m": float, "characteristic": _bool},
    "convergence": {"cells": _ints},
    "output": {"profile": _bool, "samples": _points, "contour": _bool, "errors": _bool},
    "properties": {f.name: (_bool if f.type in ("bool",) else str if f.name == "order_norm"
                            else int if f.name == "order_from" else float)
                   for f in fields(PropertySpec)},
}


@dataclass
class RunConfig:
    scenario: Scenario
    name: str
    variant: str | None = None
    convergence_cells: list | None = None
    output: OutputRequest = field(default_factory=OutputRequest)
    properties: PropertySpec = field(default_factory=PropertySpec)
    source: str = "<string>"


def _parse_sections(parser):
    values = {}
    for section in parser.sections():
        sec = section.lower()
        if sec not in SCHEMA:
            raise ConfigurationError(f"unknown section [{section}]")
        values[sec] = {}
        for key, raw in parser.items(section):
            if key not in SCHEMA[sec]:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")
            try:
                values[sec][key] = SCHEMA[sec][key](raw)
            except ValueError as exc:
                raise ConfigurationError(f"bad value for {section}.{key}: {exc}") from exc
    return values


def parse_config(text: str, source="<string>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc
    v = _parse_sections(parser)
    scen_sec = v.get("scenario", {})
    if "name" not in scen_sec:
        raise ConfigurationError("[scenario] name is required")
    disc = v.get("discretization", {})
    mesh = v.get("mesh", {})
    cells = mesh.get("cells")
    scen = get_scenario(scen_sec["name"], degree=disc.get("degree"), scheme=disc.get("scheme"),
                        variant=scen_sec.get("variant"))
    changes = {}
    if cells is not None:
        if len(cells) == scen.dim:
            changes["cells"] = tuple(cells)
        elif len(cells) == 1:
            scen = scen.with_cells(cells[0])
        else:
            raise ConfigurationError(f"mesh.cells needs 1 or {scen.dim} values")
    if "perturbation" in mesh:
        changes["perturbation"] = mesh["perturbation"]
    for key in ("flux", "admissibility", "initial_projection"):
        if key in disc:
            changes[key] = disc[key]
    if "tableau" in v:
        tab = v["tableau"]
        missing = {"a", "b", "c", "order"} - set(tab)
        if missing:
            raise ConfigurationError(f"[tableau] is missing {sorted(missing)}")
        try:
            changes["tableau"] = custom_tableau(tab["a"], tab["b"], tab["c"], tab["order"])
        except (ParameterError, ValueError) as exc:
            raise ConfigurationError(f"[tableau]: {exc}") from exc
        if "tableau" in disc:
            raise ConfigurationError("give either discretization.tableau or a [tableau] section")
    elif "tableau" in disc:
        changes["tableau"] = disc["tableau"]
    tsec = v.get("time", {})
    if "end_time" in tsec:
        changes["end_time"] = tsec["end_time"]
    if "dt_rule" in tsec or "dt_value" in tsec:
        if not {"dt_rule", "dt_value"} <= set(tsec):
            raise ConfigurationError("time.dt_rule and time.dt_value go together")
        changes["dt_rule"] = DtRule(tsec["dt_rule"], tsec["dt_value"])
    if "limiter" in v:
        lim = v["limiter"]
        base = scen.limiter
        changes["limiter"] = LimiterConfig(lim.get("kind", base.kind), lim.get("m", base.M),
                                           lim.get("characteristic", base.characteristic))
    try:
        scen = scen.replace(**changes)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc
    out = v.get("output", {})
    props = PropertySpec(**v.get("properties", {}))
    if props.order_norm not in ("l1", "l2", "linf"):
        raise ConfigurationError(f"unknown order norm {props.order_norm!r}")
    if props.density_max is None and scen.density_bound is not None:
        props.density_max = scen.density_bound
    return RunConfig(scenario=scen, name=scen_sec["name"], variant=scen_sec.get("variant"),
                     convergence_cells=v.get("convergence", {}).get("cells"),
                     output=OutputRequest(**out), properties=props, source=source)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path))
