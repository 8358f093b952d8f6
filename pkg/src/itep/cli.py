"""Command-line front end: JSON config in, CSV tables plus a JSON summary
out, deterministic under a fixed seed.

Commands: eig (ray spectra with propagation verdicts), density (zero-count
slope against the travel-time law), tunnel (interface residual matrix), fit
(parametric profile recovery), field (mode pair samples along a ray)."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import SimpleDomain, intersect_ray
from .medium import (
    MediumField,
    restrict_to_ray,
    travel_time,
    NonUnitOriginIndexWarning,
)
from .determinant import determinant_function
from .spectra import SearchRectangle, density_estimate
from .tunneling import ray_intervals, full_spectrum, PROPAGATION_TOL
from .inverse import SpectrumSample, fit_profile, _ray_spectrum
from .radial_ode import solve_from_interface, solve_from_origin
from .specialfn import spherical_bessel_j, spherical_bessel_j_prime

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NONCONVERGENCE = 4

_TOP_KEYS = {
    "medium", "domain", "directions", "l_range", "rectangle",
    "tolerances", "output",
}
_MEDIUM_KINDS = {
    "uniform_ball", "radially_stratified", "union_of_balls", "tabulated",
    "background", "synthetic_sin",
}


class ConfigError(ValueError):
    pass


@dataclass
class Report:
    csv_path: Path | None
    summary_path: Path
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    missing = _TOP_KEYS - set(cfg)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    med = cfg["medium"]
    if not isinstance(med, dict) or med.get("kind") not in _MEDIUM_KINDS:
        raise ConfigError(f"medium.kind must be one of {sorted(_MEDIUM_KINDS)}")
    rect = cfg["rectangle"]
    if not (isinstance(rect, list) and len(rect) == 4):
        raise ConfigError("rectangle must be [re_min, re_max, im_min, im_max]")
    if not (rect[0] < rect[1] and rect[2] < rect[3]):
        raise ConfigError("rectangle must be nondegenerate")
    lr = cfg["l_range"]
    if not (isinstance(lr, list) and len(lr) == 2 and 0 <= lr[0] <= lr[1]):
        raise ConfigError("l_range must be [l_min, l_max] with 0 <= l_min <= l_max")
    dirs = cfg["directions"]
    if isinstance(dirs, dict):
        if set(dirs) != {"fibonacci"} or int(dirs["fibonacci"]) < 1:
            raise ConfigError('directions object must be {"fibonacci": count >= 1}')
    elif not (isinstance(dirs, list) and dirs and all(len(d) == 3 for d in dirs)):
        raise ConfigError("directions must be a list of [x,y,z] or a fibonacci spec")
    if not isinstance(cfg["tolerances"], dict):
        raise ConfigError("tolerances must be an object")
    if not isinstance(cfg["output"], dict):
        raise ConfigError("output must be an object")
    return cfg


def build_medium(med: dict) -> MediumField:
    kind = med["kind"]
    if kind == "uniform_ball":
        return MediumField.uniform_ball(
            med.get("center", [0.0, 0.0, 0.0]), med["radius"], med["n0"]
        )
    if kind == "union_of_balls":
        return MediumField.union_of_balls(
            [(b["center"], b["radius"], b["n0"]) for b in med["balls"]]
        )
    if kind == "radially_stratified":
        return MediumField.radially_stratified(med["radius"], med["coeffs"])
    if kind == "tabulated":
        return MediumField.tabulated(med["r_table"], med["n_table"])
    if kind == "background":
        return MediumField.background()
    raise ConfigError(f"medium kind {kind!r} is not a field")


def build_domain(cfg: dict, fld: MediumField) -> SimpleDomain:
    dom = cfg["domain"]
    if dom == "from_medium" or dom == {"from_medium": True}:
        if fld.kind in ("uniform_ball", "union_of_balls"):
            return SimpleDomain.from_balls(
                [(b.center, b.radius) for b in fld.balls]
            )
        radius = getattr(fld, "radius", None)
        if radius is None and getattr(fld, "r_table", None):
            radius = fld.r_table[-1]
        if radius is None:
            raise ConfigError("domain 'from_medium' needs a medium with support")
        return SimpleDomain.from_balls([((0.0, 0.0, 0.0), radius)])
    if isinstance(dom, dict) and "balls" in dom:
        return SimpleDomain.from_balls(
            [(b["center"], b["radius"]) for b in dom["balls"]]
        )
    raise ConfigError('domain must be "from_medium" or {"balls": [...]}')


def resolve_directions(dirs) -> list[np.ndarray]:
    if isinstance(dirs, dict):
        n = int(dirs["fibonacci"])
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        out = []
        for i in range(n):
            z = 1.0 - (2.0 * i + 1.0) / n
            rho = math.sqrt(max(0.0, 1.0 - z * z))
            phi = 2.0 * math.pi * i / golden
            out.append(np.array([rho * math.cos(phi), rho * math.sin(phi), z]))
        return out
    out = []
    for d in dirs:
        v = np.asarray(d, dtype=float)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ConfigError("zero direction vector")
        out.append(v / nrm)
    return out


def _rect(cfg: dict) -> SearchRectangle:
    a, b, c, d = cfg["rectangle"]
    return SearchRectangle(float(a), float(b), float(c), float(d))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    cell if isinstance(cell, str) else _fmt(cell) for cell in row
                )
                + "\n"
            )


def _write_summary(path: Path, cfg: dict, extra: dict) -> None:
    payload = {"config": cfg, "config_hash": _config_hash(cfg)}
    payload.update(extra)
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _out_paths(cfg: dict, out_dir: str, command: str) -> tuple[Path, Path]:
    prefix = cfg["output"].get("prefix", "itep")
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{prefix}_{command}.csv", base / f"{prefix}_{command}_summary.json"


def cmd_eig(cfg: dict, out_dir: str, seed: int = 0) -> Report:
    fld = build_medium(cfg["medium"])
    dom = build_domain(cfg, fld)
    rect = _rect(cfg)
    l_lo, l_hi = cfg["l_range"]
    rows = []
    notes = []
    rng = np.random.default_rng(seed)
    for d in resolve_directions(cfg["directions"]):
        ix = intersect_ray(dom, d)
        if not ix.radii:
            notes.append(f"direction {d.tolist()}: no intersections")
            continue
        prof = restrict_to_ray(fld, d)
        for l in range(l_lo, l_hi + 1):
            recs = full_spectrum(l, prof, ix, rect, rng=rng)
            if not recs:
                notes.append(f"direction {d.tolist()} l={l}: empty (degenerate or no zeros)")
            for rec in recs:
                rows.append(
                    [
                        str(rec.l), rec.k.real, rec.k.imag,
                        str(rec.multiplicity), rec.residual, rec.verdict,
                        max(rec.interface_residuals) if rec.interface_residuals else 0.0,
                    ]
                )
    rows.sort(key=lambda r: (int(r[0]), float(r[1]), float(r[2])))
    csv_path, sum_path = _out_paths(cfg, out_dir, "eig")
    header = ["l", "re_k", "im_k", "multiplicity", "residual", "verdict",
              "interface_residual_max"]
    _write_csv(csv_path, header, rows)
    _write_summary(sum_path, cfg, {"rows": len(rows), "notes": notes, "seed": seed})
    return Report(csv_path, sum_path, rows, {"notes": notes})


def _density_function(cfg: dict):
    """The function whose zeros are counted, its theoretical density, and a
    degenerate note if any. synthetic_sin is a test hook: f = sin(c k)
    normalized, with exact density c/pi."""
    med = cfg["medium"]
    if med["kind"] == "synthetic_sin":
        c = float(med.get("type_constant", 1.0))

        def f(ks):
            ks = np.asarray(ks, dtype=complex)
            return np.sin(c * ks) * np.exp(-c * np.abs(ks.imag))

        return f, c / math.pi
    fld = build_medium(med)
    d = resolve_directions(cfg["directions"])[0]
    dom = build_domain(cfg, fld)
    ix = intersect_ray(dom, d)
    if not ix.radii:
        raise ConfigError("density: direction misses the domain")
    r_hat = ix.radii[-1]
    prof = restrict_to_ray(fld, d)
    l = int(cfg["l_range"][0])
    df = determinant_function(l, prof, r_hat)
    theoretical = (r_hat + travel_time(prof, r_hat)) / math.pi
    return df, theoretical


def cmd_density(cfg: dict, out_dir: str, seed: int = 0) -> Report:
    radii = cfg.get("radii")
    if not (isinstance(radii, list) and len(radii) >= 3):
        raise ConfigError("density needs a 'radii' list with >= 3 entries")
    eps = float(cfg["tolerances"].get("sector_half_angle", 0.1))
    f, theoretical = _density_function(cfg)
    rng = np.random.default_rng(seed)
    report = density_estimate(f, -eps, eps, radii, theoretical, rng=rng)
    rows = []
    for R, N in zip(report.radii, report.counts):
        rows.append(
            [R, str(N), theoretical, report.slope, report.relative_deviation]
        )
    csv_path, sum_path = _out_paths(cfg, out_dir, "density")
    _write_csv(csv_path, ["R", "N", "theoretical", "estimate", "deviation"], rows)
    _write_summary(
        sum_path, cfg,
        {"slope": report.slope, "theoretical": theoretical,
         "deviation": report.relative_deviation,
         "degenerate": report.degenerate, "seed": seed},
    )
    return Report(csv_path, sum_path, rows, {"degenerate": report.degenerate})


def cmd_tunnel(cfg: dict, out_dir: str, seed: int = 0) -> Report:
    fld = build_medium(cfg["medium"])
    dom = build_domain(cfg, fld)
    rect = _rect(cfg)
    d = resolve_directions(cfg["directions"])[0]
    ix = intersect_ray(dom, d)
    rng = np.random.default_rng(seed)
    csv_path, sum_path = _out_paths(cfg, out_dir, "tunnel")
    if not ix.radii:
        _write_csv(csv_path, ["l", "re_k", "im_k", "verdict"], [])
        _write_summary(sum_path, cfg, {"rows": 0, "notes": ["no intersections"], "seed": seed})
        return Report(csv_path, sum_path, [], {"notes": ["no intersections"]})
    prof = restrict_to_ray(fld, d)
    l_lo, l_hi = cfg["l_range"]
    rows = []
    for l in range(l_lo, l_hi + 1):
        for rec in full_spectrum(l, prof, ix, rect, rng=rng):
            rows.append(
                [str(rec.l), rec.k.real, rec.k.imag, rec.verdict]
                + list(rec.interface_residuals)
            )
    rows.sort(key=lambda r: (int(r[0]), float(r[1]), float(r[2])))
    header = ["l", "re_k", "im_k", "verdict"] + [
        f"res_{j}" for j in range(len(ix.radii))
    ]
    _write_csv(csv_path, header, rows)
    propagating = sum(1 for r in rows if r[3] == "propagates")
    _write_summary(
        sum_path, cfg,
        {"rows": len(rows), "propagating": propagating,
         "radii": list(ix.radii), "seed": seed},
    )
    return Report(csv_path, sum_path, rows, {"propagating": propagating})


_FAMILIES = {
    "uniform_ball_n0": lambda med: (
        lambda p: MediumField.uniform_ball(
            med.get("center", [0.0, 0.0, 0.0]), med["radius"], p[0]
        )
    ),
    "two_shell": lambda med: (
        lambda p: MediumField.union_of_balls(
            [
                (med.get("center", [0.0, 0.0, 0.0]), med["r1"], p[0]),
                (med.get("center", [0.0, 0.0, 0.0]), med["radius"], p[1]),
            ]
        )
    ),
}


def cmd_fit(cfg: dict, out_dir: str, seed: int = 0) -> Report:
    fit_cfg = cfg.get("fit")
    if not isinstance(fit_cfg, dict):
        raise ConfigError("fit needs a 'fit' object")
    family_name = fit_cfg.get("family")
    if family_name not in _FAMILIES:
        raise ConfigError(f"fit.family must be one of {sorted(_FAMILIES)}")
    init = fit_cfg.get("init")
    bounds = fit_cfg.get("bounds")
    if not init or not bounds or len(init) != len(bounds):
        raise ConfigError("fit.init and fit.bounds must match in length")
    for lo, hi in bounds:
        if not lo < hi:
            raise ConfigError("infeasible fit bounds")
    rng = np.random.default_rng(seed)
    rect = _rect(cfg)
    d = resolve_directions(cfg["directions"])[0]
    l_list = list(range(cfg["l_range"][0], cfg["l_range"][1] + 1))
    target_fld = build_medium(cfg["medium"])
    target = _ray_spectrum(target_fld, d, l_list, rect, rng=rng)
    family = _FAMILIES[family_name](cfg["medium"])
    result = fit_profile(
        target, family, init, bounds,
        max_iter=int(fit_cfg.get("max_iter", 200)), rng=rng,
    )
    csv_path, sum_path = _out_paths(cfg, out_dir, "fit")
    rows = [[f"p{i}", p] for i, p in enumerate(result.parameters)]
    _write_csv(csv_path, ["parameter", "value"], rows)
    _write_summary(
        sum_path, cfg,
        {"parameters": result.parameters, "mismatch": result.mismatch,
         "iterations": result.iterations, "converged": result.converged,
         "seed": seed},
    )
    if not result.converged:
        raise _NonConvergenceSignal(Report(csv_path, sum_path, rows, {}))
    return Report(csv_path, sum_path, rows, {"parameters": result.parameters})


class _NonConvergenceSignal(Exception):
    def __init__(self, report):
        self.report = report


def cmd_field(cfg: dict, out_dir: str, seed: int = 0) -> Report:
    fld_cfg = cfg.get("field")
    if not isinstance(fld_cfg, dict) or "k" not in fld_cfg:
        raise ConfigError("field needs a 'field' object with 'k'")
    k = complex(float(fld_cfg["k"][0]), float(fld_cfg["k"][1]))
    l = int(fld_cfg.get("l", cfg["l_range"][0]))
    n_samples = int(fld_cfg.get("samples", 200))
    fld = build_medium(cfg["medium"])
    dom = build_domain(cfg, fld)
    d = resolve_directions(cfg["directions"])[0]
    ix = intersect_ray(dom, d)
    prof = restrict_to_ray(fld, d)
    r_max = ix.radii[-1] if ix.radii else dom.bounding_radius
    type_c = r_max + travel_time(prof, r_max)
    norm = math.exp(-type_c * abs(k.imag))
    # per inside interval: w from interface (or origin) matching, v the free
    # mode; outside intervals have w = v by definition
    sols = {}
    for iv in ray_intervals(ix, r_max):
        if not iv.inside:
            continue
        if iv.r_lo == 0.0:
            sols[iv.j] = (iv, solve_from_origin(l, k, prof, iv.r_hi))
        else:
            sols[iv.j] = (iv, solve_from_interface(l, k, prof, iv.r_lo, iv.r_hi))
    rows = []
    interface_mismatch = []
    rs = np.linspace(r_max / n_samples, r_max, n_samples)
    intervals = ray_intervals(ix, r_max)
    for r in rs:
        z = k * r
        j = spherical_bessel_j(l, z)
        jp = spherical_bessel_j_prime(l, z)
        v = j
        w, wp = j, None
        mism = 0.0
        for iv in intervals:
            if iv.r_lo <= r <= iv.r_hi and iv.inside and iv.j in sols:
                y, yv = sols[iv.j][1](float(r))
                w = y / r
                wp = yv / r - y / (r * r)
                mism = abs(-j * wp + k * jp * w) * norm
                break
        rows.append([r, v.real, v.imag, complex(w).real, complex(w).imag, mism])
    for iv in intervals:
        if iv.inside and iv.j in sols:
            y, yv = sols[iv.j][1](iv.r_hi)
            w = y / iv.r_hi
            wp = yv / iv.r_hi - y / iv.r_hi**2
            z = k * iv.r_hi
            det = -spherical_bessel_j(l, z) * wp + k * spherical_bessel_j_prime(l, z) * w
            interface_mismatch.append([iv.r_hi, abs(det) * norm])
    csv_path, sum_path = _out_paths(cfg, out_dir, "field")
    _write_csv(
        csv_path, ["r", "re_v", "im_v", "re_w", "im_w", "mismatch"], rows
    )
    _write_summary(
        sum_path, cfg,
        {"k": [k.real, k.imag], "l": l,
         "interface_mismatch": interface_mismatch, "seed": seed},
    )
    return Report(csv_path, sum_path, rows, {"interface_mismatch": interface_mismatch})


_COMMANDS = {
    "eig": cmd_eig,
    "density": cmd_density,
    "tunnel": cmd_tunnel,
    "fit": cmd_fit,
    "field": cmd_field,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="itep",
        description="Interior transmission eigenvalues of penetrable simple domains",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out-dir", default=".")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    import warnings

    warnings.simplefilter("ignore", NonUnitOriginIndexWarning)
    try:
        report = _COMMANDS[args.command](cfg, args.out_dir, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NonConvergenceSignal as sig:
        print("fit did not converge; partial result written", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except Exception as exc:  # numeric failure
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{args.command}: wrote {report.csv_path} and {report.summary_path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
