"""Batch command-line front end.

Every command writes ``<output-dir>/<command>.json`` (and CSV traces where
relevant) atomically, and exits with

    0  all checks within tolerance
    1  a check failed
    2  configuration error
    3  numerical-domain error (a machine-readable record is written)

Options may also come from a ``key = value`` file passed with ``--config``;
command-line flags win over the file.  ``PARAKAHLER_OUTPUT_DIR`` overrides the
output directory unless ``--output-dir`` is given.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import adsgauss, lagrangian, models, product, surface, variation
from .errors import ConfigError, GeometryError

ENV_OUTPUT = "PARAKAHLER_OUTPUT_DIR"
ERROR_SCHEMA = "parakahler.error/1"
RUN_SCHEMA = "parakahler.run/1"

DEFAULTS = {
    "resolution": 64,
    "curvature_step": 1e-4,
    "seed": 0,
    "n_points": 20,
    "n_fields": 50,
    "length": 4.0,
    "step": 1e-3,
    "extent": 0.1,
    "d": 0.5,
    "eps": 1,
    "output_dir": "reports",
    "tol_scalar": 1e-5,
    "tol_einstein": 1e-5,
    "tol_weyl": 1e-4,
    "tol_nijenhuis": 1e-5,
    "tol_lagrangian": 1e-8,
    "tol_mean_curvature": 1e-6,
    "tol_h_minimal": 1e-5,
    "tol_stability": 1e-8,
    "tol_speed": 1e-6,
}

COMMANDS = (
    "curvature-report", "check-einstein", "check-conformally-flat", "nijenhuis", "curve",
    "lagrangian-report", "h-minimality", "second-variation", "h-stability", "ads-gauss-demo",
)


@dataclass
class RunConfig:
    command: str
    space: str = "desitter(1)xdesitter(1)"
    eps: int = 1
    chart: str = "minkowski"
    curves: str = ""
    causal: str = ""
    potential: str = ""
    point: str = ""
    start: str = "0,0"
    direction: str = "1,0"
    profile: str = "geodesic"
    table_row: int = 0
    d: float = 0.5
    resolution: int = 64
    curvature_step: float = 1e-4
    seed: int = 0
    n_points: int = 20
    n_fields: int = 50
    length: float = 4.0
    step: float = 1e-3
    extent: float = 0.1
    output_dir: str = "reports"
    tolerances: dict = field(default_factory=dict)

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.resolution < 8:
            raise ConfigError("resolution must be at least 8")
        if self.eps not in (1, -1):
            raise ConfigError("eps must be +1 or -1")
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        for name in ("length", "step", "curvature_step", "extent", "d"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        return self

    def tol(self, name):
        return self.tolerances[name]


# ---------------------------------------------------------------------------
# descriptor parsing

_MODEL = r"[a-z\-]+(?:\([^)]*\))?"
_SPACE = re.compile(rf"^\s*({_MODEL})\s*[x×]\s*({_MODEL})\s*$")
_CURVE = re.compile(r"^\s*([a-z]+)\s*(?:\(([^)]*)\))?\s*$")


def parse_space(descriptor: str, eps: int) -> product.ProductSpace:
    m = _SPACE.match(descriptor.lower())
    if not m:
        raise ConfigError(f"cannot parse space {descriptor!r}; expected e.g. desitter(1)xminkowski")
    return product.ProductSpace(models.chart_from_name(m.group(1)), models.chart_from_name(m.group(2)), eps)


def _space_names(descriptor: str):
    m = _SPACE.match(descriptor.lower())
    if not m:
        raise ConfigError(f"cannot parse space {descriptor!r}")
    return m.group(1), m.group(2)


def parse_eps(text) -> int:
    try:
        v = int(float(str(text)))
    except ValueError as exc:
        raise ConfigError(f"bad eps {text!r}") from exc
    if v not in (1, -1):
        raise ConfigError("eps must be +1 or -1")
    return v


def parse_profile(text: str) -> surface.CurvatureProfile:
    """``geodesic`` | ``cornu(lam, mu)`` | ``const(k)``."""
    m = _CURVE.match(text.lower())
    if not m:
        raise ConfigError(f"cannot parse curve {text!r}")
    name, args = m.group(1), m.group(2)
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError as exc:
        raise ConfigError(f"bad numbers in {text!r}") from exc
    if name == "geodesic" and not vals:
        return surface.CurvatureProfile.geodesic()
    if name == "cornu" and len(vals) == 2:
        return surface.CurvatureProfile.linear(*vals)
    if name == "const" and len(vals) == 1:
        return surface.CurvatureProfile.constant(vals[0])
    raise ConfigError(f"unknown curve {text!r}; use geodesic, cornu(lam,mu) or const(k)")


def split_top_level(text: str):
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += {"(": 1, ")": -1}.get(ch, 0)
        cur += ch
    out.append(cur)
    return [s.strip() for s in out if s.strip()]


def parse_vector(text: str, n: int):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad vector {text!r}") from exc
    if len(vals) != n:
        raise ConfigError(f"expected {n} components in {text!r}")
    return np.array(vals)


def _causals(cfg: RunConfig):
    if not cfg.causal:
        return ("spacelike", "spacelike")
    parts = split_top_level(cfg.causal)
    if len(parts) != 2 or any(p not in ("spacelike", "timelike") for p in parts):
        raise ConfigError("causal must be two of spacelike/timelike, comma separated")
    return tuple(parts)


# ---------------------------------------------------------------------------
# output

def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def _check(name, value, tol, below=True):
    ok = bool(value < tol) if below else bool(value > tol)
    return {"name": name, "value": float(value), "tolerance": float(tol),
            "relation": "<" if below else ">", "passed": ok}


# ---------------------------------------------------------------------------
# commands; each returns (report dict, {suffix: csv rows})

def _sample_points(space, n, seed, margin=0.5):
    rng = np.random.default_rng(seed)
    pts = []
    for chart in (space.first, space.second):
        (a0, a1), (b0, b1) = chart.domain
        lo = np.array([max(a0, -2.0), max(b0, -2.0)]) + margin
        hi = np.array([min(a1, 2.0), min(b1, 2.0)]) - margin
        pts.append(rng.uniform(lo, hi, size=(n, 2)))
    return np.hstack(pts)


def cmd_curvature_report(cfg):
    sp = parse_space(cfg.space, cfg.eps)
    x = parse_vector(cfg.point, 4) if cfg.point else _sample_points(sp, 1, cfg.seed)[0]
    rep = product.curvature_report(sp, x, cfg.curvature_step)
    closed = product.closed_form_scalar(sp, x)
    out = rep.to_dict()
    out["closed_form_scalar"] = closed
    out["checks"] = [_check("scalar_vs_closed_form", abs(rep.scalar - closed), cfg.tol("tol_scalar"))]
    return out, {}


def _curvature_sweep(cfg, fields):
    sp = parse_space(cfg.space, cfg.eps)
    pts = _sample_points(sp, cfg.n_points, cfg.seed)
    worst = {k: 0.0 for k in fields}
    for x in pts:
        rep = product.curvature_report(sp, x, cfg.curvature_step)
        worst["einstein_residual"] = max(worst.get("einstein_residual", 0.0), rep.einstein_residual)
        worst["weyl_norm"] = max(worst.get("weyl_norm", 0.0), rep.weyl_norm)
        worst["abs_scalar"] = max(worst.get("abs_scalar", 0.0), abs(rep.scalar))
    return sp, pts, worst


def cmd_check_einstein(cfg):
    sp, pts, worst = _curvature_sweep(cfg, ["einstein_residual"])
    return {"descriptor": sp.descriptor, "n_points": len(pts), "sup": worst,
            "checks": [_check("einstein_residual", worst["einstein_residual"], cfg.tol("tol_einstein"))]}, {}


def cmd_check_conformally_flat(cfg):
    sp, pts, worst = _curvature_sweep(cfg, ["weyl_norm", "abs_scalar"])
    return {"descriptor": sp.descriptor, "n_points": len(pts), "sup": worst,
            "checks": [_check("weyl_norm", worst["weyl_norm"], cfg.tol("tol_weyl")),
                       _check("abs_scalar", worst["abs_scalar"], cfg.tol("tol_weyl"))]}, {}


def cmd_nijenhuis(cfg):
    sp = parse_space(cfg.space, cfg.eps)
    pts = _sample_points(sp, cfg.n_points, cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)
    worst = 0.0
    for x in pts:
        X, Y = rng.normal(size=(2, 4))
        worst = max(worst, float(np.max(np.abs(product.nijenhuis(sp, x, X, Y).vector))))
    return {"descriptor": sp.descriptor, "n_points": len(pts), "sup_norm": worst,
            "checks": [_check("nijenhuis", worst, cfg.tol("tol_nijenhuis"))]}, {}


def cmd_curve(cfg):
    chart = models.chart_from_name(cfg.chart)
    prof = parse_profile(cfg.profile)
    init = surface.unit_state(chart, parse_vector(cfg.start, 2), parse_vector(cfg.direction, 2))
    tr = surface.integrate_curve(chart, init, prof, cfg.length, cfg.step)
    measured = tr.curvature()[2:-2]
    err = float(np.max(np.abs(measured - prof(tr.s[2:-2]))))
    every = max(1, (len(tr) - 1) // 512)
    return {"chart": chart.name, "profile": asdict(prof), "causal_sign": tr.causal_sign,
            "samples": len(tr), "speed_residual": tr.speed_residual(), "curvature_error": err,
            "checks": [_check("speed_residual", tr.speed_residual(), cfg.tol("tol_speed"))]}, \
        {"trace": list(tr.subsample(every).csv_rows())}


def _immersion(cfg):
    if cfg.potential:
        sp = parse_space(cfg.space, cfg.eps)
        pot = lagrangian.potential_from_name(cfg.potential)
        xs = np.linspace(-cfg.extent, cfg.extent, cfg.resolution)
        try:
            return lagrangian.graph_immersion(pot, sp, xs, xs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if not cfg.curves:
        raise ConfigError("give --curves or --potential")
    parts = split_top_level(cfg.curves)
    if len(parts) != 2:
        raise ConfigError("--curves needs two comma-separated curve specs")
    first, second = _space_names(cfg.space)
    profiles = tuple(parse_profile(p) for p in parts)
    return variation.curve_configuration(first, second, cfg.eps, profiles, _causals(cfg),
                                         cfg.length, cfg.resolution, cfg.step)


def cmd_lagrangian_report(cfg):
    grid = _immersion(cfg)
    lag_res = lagrangian.lagrangian_residual(grid)
    Hsup = lagrangian.mean_curvature_sup(grid)
    mid = (grid.shape[0] // 2, grid.shape[1] // 2)
    jac = lagrangian.associated_jacobian(grid, mid)
    C_sup = max(abs(lagrangian.associated_jacobian(grid, n).C) for n in grid.interior_nodes())
    out = {
        "kind": grid.kind,
        "descriptor": grid.space.descriptor,
        "shape": list(grid.shape),
        "lagrangian_residual": lag_res,
        "projected_rank_centre": list(lagrangian.projected_rank(grid, mid)),
        "mean_curvature_sup": Hsup,
        "jacobian_centre": {"C": jac.C, "C_second": jac.C_second, "eps1": jac.eps1},
        "jacobian_sup": C_sup,
        "h_minimality_residual": lagrangian.h_minimality_residual(grid),
        "checks": [_check("lagrangian_residual", lag_res, cfg.tol("tol_lagrangian"))],
    }
    if grid.kind == "graph":
        pot = grid.meta["potential"]
        try:
            out["lagrangian_angle_centre"] = lagrangian.lagrangian_angle(pot, (grid.s[mid[0]], grid.t[mid[1]]))
        except GeometryError as exc:
            out["lagrangian_angle_centre"] = f"undefined: {type(exc).__name__}"
    return out, {"grid": list(lagrangian.grid_csv_rows(grid, include_jacobian=False))}


def cmd_h_minimality(cfg):
    grid = _immersion(cfg)
    res = lagrangian.h_minimality_residual(grid)
    return {"descriptor": grid.space.descriptor, "curves": cfg.curves or cfg.potential, "residual": res,
            "checks": [_check("h_minimality_residual", res, cfg.tol("tol_h_minimal"))]}, {}


def _variation_grid(cfg):
    if cfg.curves:
        return _immersion(cfg)
    if not 1 <= cfg.table_row <= len(variation.STABLE_TABLE) and cfg.table_row != -1:
        raise ConfigError(f"table-row must be in 1..{len(variation.STABLE_TABLE)} or -1 (unstable example)")
    row = variation.UNSTABLE_EXAMPLE if cfg.table_row == -1 else variation.STABLE_TABLE[cfg.table_row - 1]
    return variation.geodesic_configuration(*row, length=cfg.length, resolution=cfg.resolution)


def _sweep_command(cfg, kind):
    grid = _variation_grid(cfg)
    seeds = range(cfg.seed, cfg.seed + cfg.n_fields)
    fam = variation.sweep(grid, kind, seeds)
    out = fam.to_dict()
    out["descriptor"] = grid.space.descriptor
    out["checks"] = [_check("max_value", fam.max_value, cfg.tol("tol_stability"))]
    return out, {"values": list(fam.csv_rows())}


def cmd_second_variation(cfg):
    if cfg.table_row == 0 and not cfg.curves:
        cfg.table_row = 1
    return _sweep_command(cfg, "normal")


def cmd_h_stability(cfg):
    if cfg.table_row == 0 and not cfg.curves:
        cfg.table_row = 1
    return _sweep_command(cfg, "hamiltonian")


def cmd_ads_gauss_demo(cfg):
    seeds = range(cfg.seed, cfg.seed + cfg.n_fields)
    rep = adsgauss.gauss_map_stability(cfg.d, seeds, cfg.resolution)
    out = rep.to_dict()
    t = rep.tube
    out["checks"] = [
        _check("frame_residual", t.frame_residual, 1e-9),
        _check("closed_form_residual", t.closed_form_residual, 1e-8),
        _check("dependence_residual", t.dependence_residual, 1e-8),
        _check("geodesic_residual", t.geodesic_residual, cfg.tol("tol_speed")),
        _check("hamiltonian_max", rep.hamiltonian.max_value, cfg.tol("tol_stability")),
        _check("instability_witness", rep.witness_value, 0.0, below=False),
    ]
    return out, {"traces": list(t.csv_rows()), "hamiltonian": list(rep.hamiltonian.csv_rows())}


HANDLERS = {
    "curvature-report": cmd_curvature_report,
    "check-einstein": cmd_check_einstein,
    "check-conformally-flat": cmd_check_conformally_flat,
    "nijenhuis": cmd_nijenhuis,
    "curve": cmd_curve,
    "lagrangian-report": cmd_lagrangian_report,
    "h-minimality": cmd_h_minimality,
    "second-variation": cmd_second_variation,
    "h-stability": cmd_h_stability,
    "ads-gauss-demo": cmd_ads_gauss_demo,
}


# ---------------------------------------------------------------------------
# argument handling

_FIELD_TYPES = {
    "space": str, "eps": parse_eps, "chart": str, "curves": str, "causal": str, "potential": str,
    "point": str, "start": str, "direction": str, "profile": str, "table_row": int, "d": float,
    "resolution": int, "curvature_step": float, "seed": int, "n_points": int, "n_fields": int,
    "length": float, "step": float, "extent": float, "output_dir": str,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="parakahler", description=__doc__.splitlines()[0])
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("--show-defaults", action="store_true", help="print the defaults table and exit")
    p.add_argument("--config", help="key = value file with the same fields as the flags")
    for name in _FIELD_TYPES:
        p.add_argument("--" + name.replace("_", "-"), dest=name, default=None)
    for name in (k for k in DEFAULTS if k.startswith("tol_")):
        p.add_argument("--" + name.replace("_", "-"), dest=name, default=None, type=float)
    return p


def _read_config_file(path) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_string("[run]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return {k.replace("-", "_"): v for k, v in parser["run"].items()}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_values = _read_config_file(args.config) if args.config else {}
    command = args.command or file_values.pop("command", None)
    file_values.pop("command", None)
    if command is None:
        raise ConfigError("no command given")
    known = set(_FIELD_TYPES) | {k for k in DEFAULTS if k.startswith("tol_")}
    unknown = set(file_values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    def pick(name):
        v = getattr(args, name)
        if v is not None:
            return v
        if name == "output_dir" and os.environ.get(ENV_OUTPUT):
            return os.environ[ENV_OUTPUT]
        if name in file_values:
            return file_values[name]
        return DEFAULTS.get(name)

    kwargs = {"command": command}
    try:
        for name, conv in _FIELD_TYPES.items():
            v = pick(name)
            if v is not None:
                kwargs[name] = conv(v)
        tols = {k: float(pick(k)) for k in DEFAULTS if k.startswith("tol_")}
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(tolerances=tols, **kwargs).validate()


def _config_echo(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("output_dir")
    return d


def run(cfg: RunConfig) -> int:
    out_dir = Path(cfg.output_dir)
    stem = cfg.command
    try:
        report, tables = HANDLERS[cfg.command](cfg)
    except GeometryError as exc:
        record = {"schema": ERROR_SCHEMA, "command": cfg.command, "error": type(exc).__name__,
                  "message": str(exc), "config": _config_echo(cfg)}
        atomic_write(out_dir / f"{stem}.error.json", _json_text(record))
        print(f"{cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    passed = all(c["passed"] for c in report.get("checks", []))
    report = dict(report, passed=passed, command=cfg.command, run_schema=RUN_SCHEMA, config=_config_echo(cfg))
    report.setdefault("schema", RUN_SCHEMA)
    atomic_write(out_dir / f"{stem}.json", _json_text(report))
    for suffix, rows in tables.items():
        atomic_write(out_dir / f"{stem}.{suffix}.csv", _csv_text(rows))
    for c in report.get("checks", []):
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']:.3e} {c['relation']} {c['tolerance']:.1e}")
    return 0 if passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.show_defaults:
        print(json.dumps(DEFAULTS, sort_keys=True, indent=2))
        return 0
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
