"""JSON run-configuration parsing shared by the command-line tools.

One file drives every subcommand. Sections, all optional unless a
command needs them:

    model        preset name with parameters, or explicit interaction
                 terms (complex matrix entries written as [re, im])
    region       box extent, boundary condition, single-site state for
                 the product boundary
    beta         scalar, [re, im], or a grid {start, stop, points,
                 scale: linear|geometric}
    series       truncation and adaptivity for the cluster series
    radius       criterion and scan window for certified radii
    observable   site support and data for expectation values
    correlation  site list for reduced-correlation ratios
    ks           weight, tolerance, caps for the hierarchy solver
    table / park dimensions and scan parameters for the tabulations
    output       path and format (csv or json); default stdout json
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ConfigError
from .model import (
    CLASSICAL,
    QUANTUM,
    Hamiltonian,
    Interaction,
    LatticeModel,
    Region,
    assemble_hamiltonian,
    heisenberg_model,
    ising_model,
    potts_model,
    xy_model,
)

__all__ = [
    "load_config",
    "parse_scalar",
    "parse_array",
    "build_model",
    "build_region",
    "build_hamiltonian",
    "beta_values",
    "normalized_summary",
]

_PRESETS = {"ising", "potts", "heisenberg", "xy"}


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    return cfg


def parse_scalar(value, where: str = "value") -> complex:
    """A number, or a [re, im] pair."""
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise ConfigError(f"{where} must be a number or a [re, im] pair")


def parse_array(data, where: str = "data") -> np.ndarray:
    """Nested lists with scalar or [re, im] leaves."""

    def walk(node):
        if isinstance(node, (int, float)):
            return complex(node)
        if isinstance(node, list):
            if (
                len(node) == 2
                and all(isinstance(v, (int, float)) for v in node)
            ):
                return complex(node[0], node[1])
            return [walk(v) for v in node]
        raise ConfigError(f"{where} has a non-numeric entry")

    arr = np.array(walk(data), dtype=complex)
    if np.abs(arr.imag).max(initial=0.0) == 0.0:
        return arr.real.copy()
    return arr


def _site(v, where: str):
    if isinstance(v, int):
        return (v,)
    if isinstance(v, list) and all(isinstance(c, int) for c in v):
        return tuple(v)
    raise ConfigError(f"{where} must be an integer coordinate list")


def parse_sites(v, where: str = "sites"):
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where} must be a nonempty list of sites")
    return tuple(_site(s, where) for s in v)


def build_model(cfg: dict) -> LatticeModel:
    sec = cfg.get("model")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a 'model' object")
    preset = sec.get("preset")
    if preset is not None:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(_PRESETS)}")
        d = int(sec.get("dimension", 1))
        j = float(sec.get("coupling", 1.0))
        if preset == "ising":
            return ising_model(d, j, field_h=float(sec.get("field", 0.0)))
        if preset == "potts":
            return potts_model(int(sec.get("q", 3)), d, j)
        if preset == "heisenberg":
            return heisenberg_model(d, j)
        return xy_model(d, j)
    kind = sec.get("kind")
    if kind not in (CLASSICAL, QUANTUM):
        raise ConfigError("explicit model needs kind 'classical' or 'quantum'")
    q = sec.get("q")
    if not isinstance(q, int) or q < 2:
        raise ConfigError("explicit model needs integer q >= 2")
    d = sec.get("dimension")
    if not isinstance(d, int) or d < 1:
        raise ConfigError("explicit model needs integer dimension >= 1")
    terms = sec.get("terms")
    if not isinstance(terms, list) or not terms:
        raise ConfigError("explicit model needs a nonempty 'terms' list")
    parsed = []
    for k, t in enumerate(terms):
        if not isinstance(t, dict) or "sites" not in t or "data" not in t:
            raise ConfigError(f"terms[{k}] needs 'sites' and 'data'")
        parsed.append((parse_sites(t["sites"], f"terms[{k}].sites"),
                       parse_array(t["data"], f"terms[{k}].data")))
    try:
        return LatticeModel.from_templates(d, q, kind, parsed)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad model terms: {exc}") from exc


def build_region(cfg: dict, dimension: int):
    sec = cfg.get("region")
    if not isinstance(sec, dict):
        raise ConfigError("config needs a 'region' object")
    extent = sec.get("extent")
    if (
        not isinstance(extent, list)
        or len(extent) != dimension
        or not all(isinstance(x, int) and x >= 1 for x in extent)
    ):
        raise ConfigError(f"region.extent must list {dimension} positive integers")
    boundary = sec.get("boundary", "free")
    if boundary not in ("free", "periodic", "product"):
        raise ConfigError("region.boundary must be free, periodic, or product")
    theta = None
    if boundary == "product":
        if "theta" not in sec:
            raise ConfigError("product boundary needs region.theta")
        theta = parse_array(sec["theta"], "region.theta")
    return Region.box(tuple(extent)), boundary, theta


def build_hamiltonian(cfg: dict) -> Hamiltonian:
    model = build_model(cfg)
    region, boundary, theta = build_region(cfg, model.dimension)
    try:
        return assemble_hamiltonian(model, region, boundary=boundary, theta=theta)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot assemble the volume: {exc}") from exc


def beta_values(cfg: dict) -> list[complex]:
    sec = cfg.get("beta")
    if sec is None:
        raise ConfigError("config needs a 'beta' entry")
    if isinstance(sec, dict):
        try:
            start = float(sec["start"])
            stop = float(sec["stop"])
            points = int(sec["points"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("beta grid needs numeric start, stop, points") from exc
        if points < 1:
            raise ConfigError("beta grid needs points >= 1")
        scale = sec.get("scale", "linear")
        if scale == "linear":
            grid = np.linspace(start, stop, points)
        elif scale == "geometric":
            if start <= 0 or stop <= 0:
                raise ConfigError("geometric beta grid needs positive endpoints")
            grid = np.geomspace(start, stop, points)
        else:
            raise ConfigError("beta grid scale must be linear or geometric")
        return [complex(b) for b in grid]
    return [parse_scalar(sec, "beta")]


def scalar_out(z: complex):
    """JSON-friendly number: float when real, [re, im] otherwise."""
    z = complex(z)
    if z.imag == 0.0:
        return z.real
    return [z.real, z.imag]


def normalized_summary(cfg: dict) -> dict:
    """Parse everything present and echo a normalized view."""
    out: dict = {}
    if "model" in cfg:
        model = build_model(cfg)
        out["model"] = {
            "kind": model.kind,
            "q": model.q,
            "dimension": model.dimension,
            "templates": len(model.templates),
            "range": model.range(),
        }
        if "region" in cfg:
            ham = build_hamiltonian(cfg)
            out["region"] = {
                "sites": len(ham.sites),
                "bonds": len(ham.bonds),
                "boundary": ham.boundary,
                **{k: v for k, v in ham.meta.items()},
            }
    if "beta" in cfg:
        vals = beta_values(cfg)
        out["beta"] = {"points": len(vals), "values": [scalar_out(b) for b in vals[:8]]}
        if len(vals) > 8:
            out["beta"]["values_truncated"] = True
    for key in ("series", "radius", "observable", "correlation", "ks",
                "table", "park", "output"):
        if key in cfg:
            if not isinstance(cfg[key], dict):
                raise ConfigError(f"'{key}' must be an object")
            out[key] = dict(cfg[key])
    return out
