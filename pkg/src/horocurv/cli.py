"""Config-driven experiment runner.

One JSON config file per run plus flag overrides; no interactive mode.  Every
output CSV carries the config hash in a trailing column and gets a sidecar
``.meta.json`` with the full effective config and the tolerance set used.
Identical configs produce bit-identical outputs: fixed seeds, fixed summation
order, deterministic merge of worker results.

Exit codes: 0 success, 1 verification failure, 2 bad config, 3 a numerical
solve failed to converge (the failing cell is printed).
"""

import argparse
import csv
import hashlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from .acceptance import CRITERIA, run_all
from .errors import ConfigError, HorocurvError, NoConvergence
from .geodesics import DEFAULT_STEP
from .jacobi import (
    asymptotic_curvature,
    circle_curvature_profile,
    riccati_residual,
)
from .oscillatory import (
    LatticeEigenfunction,
    bump_window,
    closed_window,
    decay_fit,
    period_integral,
)
from .phase import (
    PhaseField,
    SHIPPED_CONFIGURATIONS,
    circle_curve,
    classify_critical,
    find_critical_points,
    line_curve,
    shipped_configuration,
    translation,
    y_shift,
)
from .surfaces import (
    conformal_surface,
    preset,
    random_unit_tangent,
    validate_nonpositive,
    warped_surface,
)

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "surface": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "preset": {"type": "string"},
                "a": {"type": "number"},
                "family": {"enum": ["warped", "conformal"]},
                "scale": {"type": "number"},
                "cosh_coeffs": {"type": "array", "items": {"type": "number"}},
                "poly_coeffs": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}},
                },
            },
        },
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "step": {"type": "number", "exclusiveMinimum": 0},
        "curvature_k": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s_max": {"type": "number", "exclusiveMinimum": 1},
                "count": {"type": "integer", "minimum": 1},
                "richardson": {"type": "boolean"},
                "box": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "circle": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "r_max": {"type": "number", "exclusiveMinimum": 0},
                "r_points": {"type": "integer", "minimum": 2},
                "count": {"type": "integer", "minimum": 1},
                "residual_range": {
                    "type": "array", "items": {"type": "number"},
                    "minItems": 2, "maxItems": 2,
                },
            },
        },
        "phase": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "configuration": {"enum": list(SHIPPED_CONFIGURATIONS)},
                "base": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["line", "circle"]},
                        "point": {"type": "array", "items": {"type": "number"}},
                        "direction": {"type": "array", "items": {"type": "number"}},
                        "center": {"type": "array", "items": {"type": "number"}},
                        "radius": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "isometry": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["translation", "y-shift"]},
                        "vector": {"type": "array", "items": {"type": "number"}},
                        "shift": {"type": "number"},
                    },
                },
                "window": {
                    "type": "array", "items": {"type": "number"},
                    "minItems": 2, "maxItems": 2,
                },
                "grid": {"type": "integer", "minimum": 8},
                "newton_tol": {"type": "number", "exclusiveMinimum": 0},
                "eps": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "torus_decay": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "curve": {"enum": ["circle", "line"]},
                "lambdas": {
                    "type": "array", "items": {"type": "integer", "minimum": 1},
                    "minItems": 3, "maxItems": 3,
                },
                "window": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["closed", "bump"]},
                        "center": {"type": "number"},
                        "halfwidth": {"type": "number", "exclusiveMinimum": 0},
                    },
                },
                "mode_direction": {"enum": ["transverse", "aligned"]},
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "criteria": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1, "maximum": 10},
                },
            },
        },
    },
}

VALIDATION_REGION = (-5.0, 5.0, -5.0, 5.0)
VALIDATION_GRID_STEP = 0.25


def _config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _fmt(x):
    return f"{x:.17g}"


def _write_csv(path, header, rows, cfg_hash):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(header) + ["config_sha256"])
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in row]
                       + [cfg_hash])


def _write_meta(path, cfg, cfg_hash, tolerances):
    with open(Path(str(path) + ".meta.json"), "w") as fh:
        json.dump({"config": cfg, "config_sha256": cfg_hash,
                   "tolerances": tolerances}, fh, indent=2, sort_keys=True)


def _build_surface(cfg):
    sc = cfg.get("surface", {"preset": "flat"})
    if "preset" in sc:
        return preset(sc["preset"], a=sc.get("a"))
    if sc.get("family") == "warped":
        return warped_surface(sc["cosh_coeffs"], scale=sc.get("scale", 1.0))
    if sc.get("family") == "conformal":
        return conformal_surface(sc["poly_coeffs"])
    raise ConfigError("surface must give a preset or a family spec")


def _ensure_nonpositive(surface):
    report = validate_nonpositive(surface, VALIDATION_REGION, VALIDATION_GRID_STEP)
    if not report.passed:
        raise ConfigError(
            f"surface {surface.name} has positive curvature on the validation "
            f"grid (max K = {report.max_k:.3e} at {report.violations[0][:2]}); "
            "refusing to run"
        )


def _run_curvature_k(cfg, surface, out_dir, args):
    block = cfg.get("curvature_k", {})
    s_max = block.get("s_max", 20.0)
    count = block.get("count", 20)
    box = block.get("box", 2.0)
    richardson = block.get("richardson", True)
    step = cfg.get("step", DEFAULT_STEP)
    rng = np.random.default_rng(cfg.get("seed", 0))
    tangents = [random_unit_tangent(surface, rng, box=box) for _ in range(count)]

    def cell(item):
        i, v = item
        ac = asymptotic_curvature(surface, v, s_max, richardson=richardson, step=step)
        return (i, v.point[0], v.point[1], v.vector[0], v.vector[1],
                float(s_max), ac.value, ac.guaranteed_upper_gap, ac.richardson)

    threads = cfg.get("threads", 1)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(cell, enumerate(tangents)))
    else:
        rows = [cell(item) for item in enumerate(tangents)]
    rows.sort(key=lambda r: r[0])

    cfg_hash = _config_hash(cfg)
    path = out_dir / "curvature_k.csv"
    _write_csv(path, ["idx", "x", "y", "v1", "v2", "s_max", "k",
                      "guaranteed_upper_gap", "k_richardson"], rows, cfg_hash)
    _write_meta(path, cfg, cfg_hash, {"step": step, "upper_gap": "1/s_max"})
    ks = [r[6] for r in rows]
    print(f"curvature-k: {count} tangents on {surface.name}, "
          f"k in [{min(ks):.9f}, {max(ks):.9f}], files in {out_dir}")
    return 0


def _run_circle(cfg, surface, out_dir, args):
    block = cfg.get("circle", {})
    r_max = block.get("r_max", 10.0)
    r_points = block.get("r_points", 100)
    count = block.get("count", 1)
    res_range = block.get("residual_range", [1.0, min(6.0, r_max)])
    step = cfg.get("step", DEFAULT_STEP)
    rng = np.random.default_rng(cfg.get("seed", 0))
    cfg_hash = _config_hash(cfg)

    rows = []
    residuals = {}
    for i in range(count):
        v = random_unit_tangent(surface, rng)
        r, kappa, ks = circle_curvature_profile(surface, v.point, v.vector, r_max,
                                                step=step)
        want = np.linspace(r[0], r_max, r_points)
        idx = np.minimum(np.searchsorted(r, want), len(r) - 1)
        for j in idx:
            rows.append((i, float(r[j]), float(kappa[j]), float(ks[j])))
        residuals[str(i)] = riccati_residual(surface, v, res_range, quantity="circle",
                                             step=step)
        if args.dump:
            from .geodesics import geodesic_span
            from .jacobi import jacobi_ivp

            path = geodesic_span(surface, v, 0.0, r_max, step=step)
            jacobi_ivp(surface, path, 0.0, 1.0).to_csv(
                out_dir / f"circle_jacobi_{i}.csv")

    path = out_dir / "circle.csv"
    _write_csv(path, ["tangent", "r", "kappa", "K"], rows, cfg_hash)
    _write_meta(path, cfg, cfg_hash,
                {"step": step, "residual_range": res_range,
                 "residual_tolerance": max(1e-6, 10.0 * step * step),
                 "riccati_residuals": residuals})
    worst = max(residuals.values())
    print(f"circle: {count} radial profiles to r = {r_max} on {surface.name}, "
          f"worst curvature-equation residual {worst:.3e}, files in {out_dir}")
    return 0


def _build_phase_field(cfg, surface):
    block = cfg.get("phase", {})
    if "configuration" in block:
        return shipped_configuration(block["configuration"]), block
    if "base" not in block or "isometry" not in block or "window" not in block:
        raise ConfigError("phase needs a shipped configuration name, or "
                          "base + isometry + window")
    b = block["base"]
    if b["kind"] == "line":
        base = line_curve(b.get("point", (0.0, 0.0)), b.get("direction", (1.0, 0.0)))
    else:
        base = circle_curve(b.get("center", (0.0, 0.0)), b.get("radius", 1.0))
    iso = block["isometry"]
    if iso["kind"] == "translation":
        isometry = translation(*iso.get("vector", (0.0, 1.0)))
    else:
        isometry = y_shift(iso.get("shift", 1.0))
    window = tuple(block["window"])
    return PhaseField.from_isometry(surface, base, isometry, window), block


def _run_phase(cfg, surface, out_dir, args):
    field, block = _build_phase_field(cfg, surface)
    grid = block.get("grid", 16)
    newton_tol = block.get("newton_tol", 1e-9)
    eps = block.get("eps")
    cfg_hash = _config_hash(cfg)

    search = find_critical_points(field, n=grid, newton_tol=newton_tol)
    payload = {
        "config_sha256": cfg_hash,
        "surface": field.surface.name,
        "degenerate_line": search.degenerate_line,
        "newton_tol": newton_tol,
        "points": [p.to_dict() for p in search.points],
    }
    if eps is not None:
        payload["classification"] = []
        for p in search.points:
            try:
                c = classify_critical(p, eps)
                payload["classification"].append(
                    {"s": p.s, "t": p.t, "kind": c.kind, "det": c.det,
                     "margin": c.margin})
            except HorocurvError as exc:
                payload["classification"].append(
                    {"s": p.s, "t": p.t, "kind": "error", "error": str(exc)})
    path = out_dir / "phase_report.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
    _write_meta(path, cfg, cfg_hash, {"newton_tol": newton_tol,
                                      "mixed_bound_tol": 1e-4})
    if args.dump:
        field.heatmap_csv(out_dir / "phase_heatmap.csv", n=64, config_hash=cfg_hash)
    print(f"phase: {len(search.points)} critical points "
          f"(degenerate line: {search.degenerate_line}), report in {out_dir}")
    return 0


def _run_torus_decay(cfg, surface, out_dir, args):
    block = cfg.get("torus_decay", {})
    lam_lo, lam_hi, lam_step = block.get("lambdas", [10, 200, 10])
    curve_kind = block.get("curve", "circle")
    direction = block.get("mode_direction", "transverse")
    wspec = block.get("window", {"kind": "closed"})
    cfg_hash = _config_hash(cfg)

    if curve_kind == "circle":
        curve = circle_curve((0.0, 0.0), 1.0)
        period = 2.0 * math.pi
    else:
        curve = line_curve((0.0, 0.0), (1.0, 0.0))
        period = 2.0 * math.pi
    if wspec.get("kind", "closed") == "closed":
        window = closed_window(period)
    else:
        window = bump_window(wspec.get("center", 0.5), wspec.get("halfwidth", 0.5))

    rows = []
    series = []
    for lam in range(lam_lo, lam_hi + 1, lam_step):
        mode = (0, lam) if direction == "aligned" else (lam, 0)
        res = period_integral(curve, window, LatticeEigenfunction.single_mode(mode))
        rows.append((lam, res.value.real, res.value.imag, abs(res.value),
                     res.nodes, res.err))
        if abs(res.value) > 0.0:
            series.append((lam, abs(res.value)))

    path = out_dir / "torus_decay.csv"
    _write_csv(path, ["lambda", "re", "im", "abs", "nodes", "err"], rows, cfg_hash)
    fit = decay_fit(series) if len(series) >= 4 else None
    fit_payload = {
        "config_sha256": cfg_hash,
        "fit": None if fit is None else
        {"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual},
    }
    with open(out_dir / "torus_decay_fit.json", "w") as fh:
        json.dump(fit_payload, fh, indent=2)
    _write_meta(path, cfg, cfg_hash,
                {"resolution_tol": 1e-6, "nodes_per_oscillation": 20})
    slope_txt = "n/a" if fit is None else f"{fit.slope:.4f}"
    print(f"torus-decay: {len(rows)} frequencies, fitted slope {slope_txt}, "
          f"files in {out_dir}")
    return 0


def _run_verify(cfg, surface, out_dir, args):
    ids = cfg.get("verify", {}).get("criteria") or sorted(CRITERIA)
    results = run_all(ids)
    passed = [r.cid for r in results if r.passed]
    failed = [r.cid for r in results if not r.passed]
    payload = {
        "passed": passed,
        "failed": failed,
        "details": {str(r.cid): {"name": r.name, "passed": r.passed,
                                 "runtime_s": r.runtime, "messages": r.details}
                    for r in results},
    }
    with open(out_dir / "verify.json", "w") as fh:
        json.dump(payload, fh, indent=2)
    print(f"verify: {len(passed)} passed, {len(failed)} failed; "
          f"summary in {out_dir / 'verify.json'}")
    return 0 if not failed else 1


RUNNERS = {
    "curvature-k": _run_curvature_k,
    "circle": _run_circle,
    "phase": _run_phase,
    "torus-decay": _run_torus_decay,
    "verify": _run_verify,
}


def _parser():
    p = argparse.ArgumentParser(
        prog="horocurv",
        description="Curvature of large circles, phase functions, and period "
                    "integrals on nonpositively curved planes.",
    )
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--surface", help="surface preset override")
    p.add_argument("--a", type=float, help="parameter for the hyperbolic-a preset")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--seed", type=int, help="random seed override")
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--dump", action="store_true", help="dump solution CSVs")
    sub = p.add_subparsers(dest="command", required=True)
    sk = sub.add_parser("curvature-k", help="curvature-at-infinity sweeps")
    sk.add_argument("--s-max", type=float)
    sk.add_argument("--count", type=int)
    sc = sub.add_parser("circle", help="circle curvature profiles and residuals")
    sc.add_argument("--r-max", type=float)
    sp = sub.add_parser("phase", help="critical points of a distance phase")
    sp.add_argument("--configuration", choices=SHIPPED_CONFIGURATIONS)
    sp.add_argument("--eps", type=float)
    st = sub.add_parser("torus-decay", help="period-integral frequency sweeps")
    st.add_argument("--curve", choices=["circle", "line"])
    st.add_argument("--lambda", dest="lambdas",
                    help="sweep as start:stop:step, e.g. 10:200:10")
    sv = sub.add_parser("verify", help="run the verification suite")
    sv.add_argument("--criteria", help="comma-separated criterion ids")
    return p


def _apply_overrides(cfg, args):
    if args.surface:
        cfg["surface"] = {"preset": args.surface}
        if args.a is not None:
            cfg["surface"]["a"] = args.a
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    if args.command == "curvature-k":
        block = cfg.setdefault("curvature_k", {})
        if args.s_max is not None:
            block["s_max"] = args.s_max
        if args.count is not None:
            block["count"] = args.count
    if args.command == "circle" and args.r_max is not None:
        cfg.setdefault("circle", {})["r_max"] = args.r_max
    if args.command == "phase":
        block = cfg.setdefault("phase", {})
        if args.configuration:
            block["configuration"] = args.configuration
        if args.eps is not None:
            block["eps"] = args.eps
    if args.command == "torus-decay":
        block = cfg.setdefault("torus_decay", {})
        if args.curve:
            block["curve"] = args.curve
        if args.lambdas:
            lo, hi, step = (int(v) for v in args.lambdas.split(":"))
            block["lambdas"] = [lo, hi, step]
    if args.command == "verify" and args.criteria:
        cfg.setdefault("verify", {})["criteria"] = [
            int(v) for v in args.criteria.split(",")]
    return cfg


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = {}
        if args.config:
            with open(args.config) as fh:
                cfg = json.load(fh)
        cfg = _apply_overrides(cfg, args)
        errors = sorted(Draft202012Validator(SCHEMA).iter_errors(cfg),
                        key=lambda e: list(e.path))
        if errors:
            for e in errors:
                loc = "/".join(str(p) for p in e.path) or "<root>"
                print(f"config error at {loc}: {e.message}", file=sys.stderr)
            return 2
        surface = _build_surface(cfg)
        if args.command != "verify":
            _ensure_nonpositive(surface)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[args.command](cfg, surface, out_dir, args)
    except (ConfigError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoConvergence as exc:
        print(f"numerical failure: {exc}" +
              (f" (cell {exc.cell})" if exc.cell else ""), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
