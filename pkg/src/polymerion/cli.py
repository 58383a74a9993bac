"""Command-line front end.

    polymerion exact    --config FILE   small-volume reference values
    polymerion series   --config FILE   cluster series on a finite volume
    polymerion radius   --config FILE   certified inverse-temperature scan
    polymerion table1                   closed-form radius table (d = 2, 3, 4)
    polymerion park     [--config FILE] comparison-criterion root scan
    polymerion ks       --config FILE   reduced-correlation hierarchy solve
    polymerion repro                    self-check battery of pinned values
    polymerion validate --config FILE   parse and echo a normalized config

Configs are JSON (see `config`); results go to stdout as JSON or to
`output.path` as CSV or JSON. Exit codes: 0 success, 2 bad config,
3 numerical failure. POLYMERION_THREADS sets the worker count for
grid scans.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import json
import math
import os
import sys

import numpy as np
from concurrent.futures import ThreadPoolExecutor

from . import config as cfgmod
from .convergence import (
    beta_radius,
    nn_radius,
    park_compare,
    park_table_value,
    universal_radius,
)
from .errors import ConfigError, NumericalError, PolymerionError
from .ks import ks_solve
from .model import Region, assemble_hamiltonian, ising_model
from .oracle import (
    Observable,
    Oracle,
    gibbs_expectation,
    partition_function,
    reduced_correlation_exact,
)
from .series import (
    correlation_series,
    expectation_series,
    free_energy_density,
    free_energy_series,
)

__all__ = ["main"]


def _thread_count() -> int:
    raw = os.environ.get("POLYMERION_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"POLYMERION_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


def _pmap(fn, items):
    items = list(items)
    n = _thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# output


def _json_cell(v):
    if isinstance(v, complex):
        return cfgmod.scalar_out(v)
    if isinstance(v, float) and math.isnan(v):
        return None
    return v


def _write_json(stream, rows, meta):
    doc = {}
    if meta:
        doc["meta"] = {k: _json_cell(v) for k, v in meta.items()}
    doc["rows"] = [{k: _json_cell(v) for k, v in r.items()} for r in rows]
    json.dump(doc, stream, indent=2)
    stream.write("\n")


def _write_csv(stream, rows, meta):
    if meta:
        for k, v in meta.items():
            stream.write(f"# {k} = {_json_cell(v)}\n")
    if not rows:
        return
    cols = list(rows[0].keys())
    split = {
        c: any(isinstance(r.get(c), complex) for r in rows) for c in cols
    }
    header = []
    for c in cols:
        header.extend([f"{c}_re", f"{c}_im"] if split[c] else [c])
    w = csv.writer(stream)
    w.writerow(header)
    for r in rows:
        cells = []
        for c in cols:
            v = r.get(c)
            if split[c]:
                v = complex(v) if v is not None else complex("nan")
                cells.extend([repr(v.real), repr(v.imag)])
            elif v is None or (isinstance(v, float) and math.isnan(v)):
                cells.append("")
            else:
                cells.append(v)
        w.writerow(cells)


def _emit(cfg: dict, args, rows, meta=None, default_format=None):
    out = cfg.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("'output' must be an object")
    path = getattr(args, "output", None) or out.get("path")
    fmt = getattr(args, "format", None) or out.get("format")
    if fmt is None:
        if path and str(path).endswith(".csv"):
            fmt = "csv"
        elif path and str(path).endswith(".json"):
            fmt = "json"
        else:
            fmt = default_format or "json"
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown output format {fmt!r}")
    writer = _write_csv if fmt == "csv" else _write_json
    if path:
        with open(path, "w", newline="") as fh:
            writer(fh, rows, meta or {})
    else:
        writer(sys.stdout, rows, meta or {})


# ---------------------------------------------------------------------------
# config fragments shared by handlers


def _observable(cfg: dict) -> Observable | None:
    sec = cfg.get("observable")
    if sec is None:
        return None
    if not isinstance(sec, dict) or "data" not in sec:
        raise ConfigError("'observable' needs 'sites' (or 'site') and 'data'")
    raw = sec.get("sites", sec.get("site"))
    if raw is None:
        raise ConfigError("'observable' needs 'sites' (or 'site')")
    if raw and isinstance(raw, list) and isinstance(raw[0], int):
        raw = [raw]
    sites = cfgmod.parse_sites(raw, "observable.sites")
    try:
        return Observable.make(sites, cfgmod.parse_array(sec["data"], "observable.data"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad observable: {exc}") from exc


def _correlation_sites(cfg: dict):
    sec = cfg.get("correlation")
    if sec is None:
        return None
    if not isinstance(sec, dict) or "sites" not in sec:
        raise ConfigError("'correlation' needs a 'sites' list")
    return cfgmod.parse_sites(sec["sites"], "correlation.sites")


def _beta_row(b: complex) -> dict:
    return {"beta": complex(b)}


# ---------------------------------------------------------------------------
# subcommands


def _cmd_exact(cfg, args) -> int:
    ham = cfgmod.build_hamiltonian(cfg)
    betas = cfgmod.beta_values(cfg)
    obs = _observable(cfg)
    corr = _correlation_sites(cfg)

    def one(b):
        orc = Oracle(ham, b)
        z = orc.z()
        row = _beta_row(b)
        row["z"] = complex(z)
        row["log_z"] = cmath.log(z)
        row["f"] = cmath.log(z) / len(ham.sites)
        if obs is not None:
            row["expectation"] = complex(orc.expectation(obs))
        if corr is not None:
            row["correlation"] = complex(orc.reduced_correlation(corr))
        return row

    rows = _pmap(one, betas)
    meta = {"sites": len(ham.sites), "bonds": len(ham.bonds), "boundary": ham.boundary}
    _emit(cfg, args, rows, meta)
    return 0


def _cmd_series(cfg, args) -> int:
    betas = cfgmod.beta_values(cfg)
    sec = cfg.get("series", {})
    if not isinstance(sec, dict):
        raise ConfigError("'series' must be an object")
    k = int(sec.get("max_total_bonds", 6))

    if "region" not in cfg:
        # No finite window: report the thermodynamic free-energy density
        # of the translation-invariant model instead.
        model = cfgmod.build_model(cfg)

        def one_density(b):
            s = free_energy_density(model, b, k)
            row = _beta_row(b)
            row["density"] = complex(s.value)
            row["n_clusters"] = s.n_clusters
            return row

        rows = _pmap(one_density, betas)
        meta = {"quantity": "free_energy_density", "max_total_bonds": k}
        _emit(cfg, args, rows, meta)
        return 0

    ham = cfgmod.build_hamiltonian(cfg)
    per_site = bool(sec.get("per_site", False))
    obs = _observable(cfg)
    corr = _correlation_sites(cfg)
    g_mode = sec.get("g_mode", "oracle")
    sweep = sec.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, list) or not sweep:
            raise ConfigError("'series.sweep' must be a non-empty list of orders")
        orders = [int(v) for v in sweep]
    else:
        orders = [k]

    def one(task):
        b, kk = task
        s = free_energy_series(ham, b, kk)
        row = _beta_row(b)
        row["truncation"] = kk
        row["log_z"] = complex(s.value)
        if per_site:
            row["per_site"] = complex(s.value / len(ham.sites))
        row["n_clusters"] = s.n_clusters
        if corr is not None:
            row["correlation"] = complex(correlation_series(ham, b, corr, kk).value)
        if obs is not None:
            row["expectation"] = complex(
                expectation_series(
                    ham, b, obs, g_mode=g_mode,
                    correlation_truncation=kk if g_mode == "series" else None,
                ).value
            )
        return row

    rows = _pmap(one, [(b, kk) for b in betas for kk in orders])
    meta = {
        "sites": len(ham.sites),
        "bonds": len(ham.bonds),
        "boundary": ham.boundary,
        "max_total_bonds": max(orders),
    }
    _emit(cfg, args, rows, meta)
    return 0


def _cmd_radius(cfg, args) -> int:
    sec = cfg.get("radius", {})
    if not isinstance(sec, dict):
        raise ConfigError("'radius' must be an object")
    criterion = sec.get("criterion", "tree")

    if criterion in ("nn", "park"):
        # Closed forms indexed by dimension; no model assembly needed.
        if "model" in cfg:
            model = cfgmod.build_model(cfg)
            d = int(sec.get("dimension", model.dimension))
        else:
            d = int(sec.get("dimension", 2))
        if criterion == "nn":
            r = nn_radius(d)
            rows = [{"dimension": d, "zeta": r.zeta, "bound": r.bound,
                     "beta_star": r.beta_star}]
            meta = {"criterion": "nn", "beta_radius": r.beta_star}
        else:
            val = park_table_value(d)
            rows = [{"dimension": d, "beta_star": val}]
            meta = {"criterion": "park", "beta_radius": val}
        _emit(cfg, args, rows, meta)
        return 0

    if "region" in cfg:
        source = cfgmod.build_hamiltonian(cfg)
    else:
        source = cfgmod.build_model(cfg)
    kw = {}
    if criterion == "gk":
        # Same certificate as "tree" but the weight exponent a is fixed
        # by the config instead of searched.
        criterion = "tree"
        if "a" in sec:
            kw["a"] = float(sec["a"])
    if criterion == "tree" and "form" in sec:
        kw["form"] = sec["form"]
    if criterion == "universal":
        kw["alpha"] = float(sec.get("alpha", 1.0))
        kw["gamma"] = float(sec.get("gamma", 0.5))
    if criterion == "fp":
        kw["max_bonds"] = int(sec.get("max_bonds", 4))
    scan = beta_radius(
        source,
        criterion=criterion,
        lo=float(sec.get("lo", 1e-4)),
        hi=float(sec.get("hi", 2.0)),
        per_decade=int(sec.get("per_decade", 64)),
        **kw,
    )
    rows = [{"beta": b, "certified": ok} for b, ok in scan.points]
    meta = {"criterion": scan.criterion, "beta_radius": scan.beta_radius}
    if criterion == "universal":
        u = universal_radius(source, **kw)
        meta.update(
            kappa=u.kappa, c_kappa=u.c_kappa, m_alpha=u.m_alpha,
            amplitude=u.amplitude, t_star=u.t_star, beta_star=u.beta_star,
        )
    _emit(cfg, args, rows, meta)
    return 0


def _cmd_table1(cfg, args) -> int:
    sec = cfg.get("table", {})
    dims = sec.get("dimensions", [2, 3, 4]) if isinstance(sec, dict) else [2, 3, 4]
    rows = []
    for d in dims:
        r = nn_radius(int(d))
        rows.append(
            {
                "dimension": r.dimension,
                "zeta": r.zeta,
                "bound": r.bound,
                "beta_star": r.beta_star,
                "park_bound": park_table_value(r.dimension),
            }
        )
    _emit(
        cfg, args, rows,
        {"objective": "zeta / ((1+2 d zeta)^2 (1+zeta)^(4d-2))"},
        default_format="csv",
    )
    return 0


def _cmd_park(cfg, args) -> int:
    sec = cfg.get("park", {})
    if not isinstance(sec, dict):
        raise ConfigError("'park' must be an object")
    d = int(sec.get("dimension", 2))
    alphas = sec.get("alphas")
    if alphas is not None:
        alphas = [float(a) for a in alphas]
        scans = _pmap(lambda a: park_compare(d, [a]), alphas)
        rows_nested = [s.rows[0] for s in scans]
        sup_y, sup_alpha = 0.0, math.nan
        for r in rows_nested:
            if r.y_star is not None and r.y_star > sup_y:
                sup_y, sup_alpha = r.y_star, r.alpha
        rows_src, meta_sup = rows_nested, (sup_y, sup_alpha)
    else:
        scan = park_compare(d)
        rows_src, meta_sup = scan.rows, (scan.sup_y, scan.sup_alpha)
    rows = [
        {"alpha": r.alpha, "y_star": r.y_star, "beta_star": r.beta_star}
        for r in rows_src
    ]
    meta = {"dimension": d, "sup_y": meta_sup[0], "sup_alpha": meta_sup[1]}
    _emit(cfg, args, rows, meta)
    return 0


def _cmd_ks(cfg, args) -> int:
    ham = cfgmod.build_hamiltonian(cfg)
    betas = cfgmod.beta_values(cfg)
    if len(betas) != 1:
        raise ConfigError("the hierarchy solver wants a single beta, not a grid")
    sec = cfg.get("ks", {})
    if not isinstance(sec, dict):
        raise ConfigError("'ks' must be an object")
    sol = ks_solve(
        ham,
        betas[0],
        a=float(sec.get("a", math.log(2.0))),
        tol=float(sec.get("tol", 1e-12)),
        max_iter=int(sec.get("max_iter", 500)),
        max_polymer_bonds=sec.get("max_polymer_bonds"),
    )
    cap = int(sec.get("max_subset_size", 2))
    rows = []
    for X in sorted(sol.g, key=lambda s: (len(s), sorted(s))):
        if len(X) > cap:
            continue
        label = ";".join(",".join(str(c) for c in site) for site in sorted(X))
        rows.append({"sites": label, "size": len(X), "g": complex(sol.g[X])})
    meta = {
        "beta": betas[0],
        "a": sol.a,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "norm_bound": sol.norm_bound,
        "contraction": sol.contraction,
        "converged": sol.converged,
        "n_polymers": sol.kernel.n_polymers,
    }
    _emit(cfg, args, rows, meta)
    return 0


def _cmd_validate(cfg, args) -> int:
    summary = cfgmod.normalized_summary(cfg)
    stream = sys.stdout
    json.dump(summary, stream, indent=2)
    stream.write("\n")
    return 0


# ---------------------------------------------------------------------------
# self-check battery


def _repro_checks():
    checks = []

    def table_block():
        printed = {2: (0.029, 0.015), 3: (0.018, 0.010), 4: (0.013, 0.008)}
        for d, (bound_ref, park_ref) in printed.items():
            r = nn_radius(d)
            yield (
                f"radius table d={d} bound {r.bound:.6f} ~ {bound_ref}",
                math.isclose(r.bound, bound_ref, rel_tol=0.02),
            )
            yield (
                f"radius table d={d} zeta stationarity",
                abs(r.zeta - r.quadratic_zeta) <= 1e-12,
            )
            yield (
                f"radius table d={d} comparison bound {park_table_value(d):.6f} ~ {park_ref}",
                math.isclose(park_table_value(d), park_ref, rel_tol=0.10),
            )

    checks.append(table_block)

    def park_block():
        scan = park_compare(2)
        yield f"comparison scan sup {scan.sup_y:.4f} in (0.03, 0.06)", 0.03 < scan.sup_y < 0.06
        tail = [r.y_star for r in scan.rows if r.alpha >= scan.sup_alpha and r.y_star is not None]
        mono = all(a >= b - 1e-12 for a, b in zip(tail, tail[1:]))
        yield "comparison scan tail decreasing", mono and len(tail) >= 3

    checks.append(park_block)

    def ring_block():
        n, beta = 5, 0.25
        ham = assemble_hamiltonian(ising_model(1, 1.0), Region.box((n,)), boundary="periodic")
        z = partition_function(ham, beta)
        ref = math.cosh(beta) ** n + math.sinh(beta) ** n
        yield f"ring partition function n={n}", abs(z - ref) <= 1e-12 * abs(ref)
        s = free_energy_series(ham, beta, 8)
        yield "ring series exponentiates to Z", abs(math.exp(s.value.real) - z.real) <= 1e-6

    checks.append(ring_block)

    def exactness_block():
        ham = assemble_hamiltonian(
            ising_model(1, 1.0, field_h=0.3), Region.box((4,)), boundary="free"
        )
        beta = 0.2
        x0 = ((0,), (3,))
        got = correlation_series(ham, beta, x0, 8).value
        want = reduced_correlation_exact(ham, beta, x0)
        yield "correlation series matches oracle", abs(got - want) <= 1e-8
        obs = Observable.make(((1,),), np.array([1.0, -1.0]))
        e_series = expectation_series(ham, beta, obs).value
        e_exact = gibbs_expectation(ham, beta, obs)
        yield "expectation identity is exact", abs(e_series - e_exact) <= 1e-12

    checks.append(exactness_block)

    def density_block():
        s = free_energy_density(ising_model(1, 1.0), 0.1, 6)
        ref = math.log(math.cosh(0.1))
        yield f"chain density {s.value.real:.12f} ~ log cosh", abs(s.value - ref) <= 1e-10

    checks.append(density_block)

    def ks_block():
        ham = assemble_hamiltonian(ising_model(1, 1.0), Region.box((4,)), boundary="free")
        sol = ks_solve(ham, 0.2, tol=1e-13)
        orc = Oracle(ham, 0.2)
        want = orc.reduced_correlation((0,))
        got = sol.g[frozenset({(0,)})]
        yield "hierarchy solve matches oracle", abs(got - want) <= 1e-10
        yield f"hierarchy norm bound {sol.norm_bound:.3f} < 1", sol.norm_bound < 1.0

    checks.append(ks_block)
    return checks


def _cmd_repro(cfg, args) -> int:
    failures = 0
    for block in _repro_checks():
        for label, ok in block():
            print(f"{'ok  ' if ok else 'FAIL'}  {label}")
            failures += 0 if ok else 1
    print(f"{'all checks passed' if failures == 0 else f'{failures} check(s) failed'}")
    if failures:
        raise NumericalError(f"{failures} reproduction check(s) failed")
    return 0


# ---------------------------------------------------------------------------
# entry point


_COMMANDS = {
    "exact": (_cmd_exact, True),
    "series": (_cmd_series, True),
    "radius": (_cmd_radius, True),
    "table1": (_cmd_table1, False),
    "park": (_cmd_park, False),
    "ks": (_cmd_ks, True),
    "repro": (_cmd_repro, False),
    "validate": (_cmd_validate, True),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polymerion",
        description="High-temperature cluster expansions for lattice spin systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, needs_cfg) in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument(
            "--config", required=needs_cfg, default=None, metavar="FILE",
            help="JSON run configuration",
        )
        p.add_argument("--output", default=None, metavar="PATH", help="write results here")
        p.add_argument("--format", default=None, choices=("csv", "json"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler, _ = _COMMANDS[args.command]
    try:
        cfg = cfgmod.load_config(args.config) if args.config else {}
        return handler(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except PolymerionError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
