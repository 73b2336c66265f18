"""Command-line front end: ``transiso export | verify | sweep | tube``.

Every option can also come from a config file of ``key = value`` lines with
dotted sections (``surface.preset = miura``); command-line flags win.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import effective, isometries, meshexport, surface, tubular, verify
from .surface import AssumptionError

CONFIG_KEYS = {
    "surface.preset": "preset",
    "surface.theta": "theta",
    "mode.name": "mode",
    "grid.periods": "periods",
    "grid.res": "res",
    "deflection.eps": "eps",
    "output.path": "out",
    "output.format": "format",
    "tolerance.residual": "tol_residual",
    "tolerance.order": "tol_order",
    "tolerance.edge": "tol_edge",
    "sweep.theta_range": "theta_range",
    "sweep.samples": "samples",
    "tube.name": "tube",
    "debug.corrupt_w": "corrupt_w",
}

DEFAULTS = {
    "preset": None,
    "theta": None,
    "mode": "all",
    "periods": 2,
    "res": None,
    "eps": None,
    "out": None,
    "format": "obj",
    "tol_residual": 1e-9,
    "tol_order": 0.2,
    "tol_edge": 5e-6,
    "theta_range": "0.6,0.95",
    "samples": 36,
    "tube": "all",
    "corrupt_w": None,
}

EXPORT_MODES = ("stretch", "twist", "bend-oop", "bend-pbar")
VERIFY_MODES = ("twist", "stretch", "bend-s", "bend-p", "bend-pbar", "bend-oop")
TUBE_MODES = ("twist", "stretch", "bend-s", "bend-p", "bend-pbar")
VERIFY_EPS = 1e-3
SWEEP_COLUMNS = ("theta", "E11", "E22", "nu", "kappa_x", "kappa_y", "curvature_ratio", "flag")


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> dict:
    """``key = value`` lines with dotted keys; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[CONFIG_KEYS[key]] = value
    return out


def _float_or_pi(text) -> float:
    """Float literal, also accepting ``pi/4`` style fractions."""
    if isinstance(text, (int, float)):
        return float(text)
    t = str(text).strip().lower().replace(" ", "")
    if "pi" in t:
        num, _, den = t.partition("/")
        factor = num.replace("*", "").replace("pi", "") or "1"
        return float(factor) * math.pi / (float(den) if den else 1.0)
    return float(t)


_CASTS = {"theta": _float_or_pi, "periods": int, "res": int, "eps": float, "tol_residual": float,
          "tol_order": float, "tol_edge": float, "samples": int, "corrupt_w": float}


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags (in increasing priority)."""
    opts = dict(DEFAULTS)
    if getattr(args, "config", None):
        opts.update(parse_config(Path(args.config).read_text()))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    for key, cast in _CASTS.items():
        if opts.get(key) is not None:
            try:
                opts[key] = cast(opts[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {opts[key]!r}") from None
    return opts


# -- helpers -----------------------------------------------------------------
def _surface(name: str, theta, periods: int):
    base = surface.preset(name, theta=theta, validate=False)
    dom = surface.centered_domain(*base.periods_xy, periods=(periods, periods))
    return surface.preset(name, theta=theta, domain=dom)


def _field(surf, mode: str, corrupt_w=None):
    fld = isometries.mode_field(surf, mode)
    return fld.with_w_scaled(corrupt_w) if corrupt_w is not None else fld


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        meshexport.atomic_write_text(out, text)


def _modes(text: str, allowed) -> list[str]:
    return list(allowed) if text == "all" else [m.strip() for m in text.split(";") if m.strip()]


# -- subcommands --------------------------------------------------------------
def cmd_export(opts: dict) -> int:
    name = opts["preset"] or "eggbox"
    outdir = Path(opts["out"] or "meshes")
    outdir.mkdir(parents=True, exist_ok=True)
    fmt = opts["format"]
    if opts["tube"] not in (None, "all"):
        surf = tubular.tube_preset(opts["tube"])
        label = opts["tube"]
        mesh = meshexport.sample_mesh(surf, opts["res"] or meshexport.default_resolution(surf))
        modes = _modes(opts["mode"], TUBE_MODES[:2])
    else:
        surf = _surface(name, opts["theta"], opts["periods"])
        label = name if opts["theta"] is None else f"{name}-{opts['theta']:.6g}"
        mesh = meshexport.sample_mesh(surf, opts["res"] or meshexport.default_resolution(surf))
        modes = _modes(opts["mode"], EXPORT_MODES)
    written = [meshexport.write_mesh(mesh, outdir / f"{label}_reference.{fmt}", fmt)]
    for mode in modes:
        fld = _field(surf, mode, opts["corrupt_w"])
        deflected = meshexport.deflect(mesh, surf, fld, opts["eps"])
        written.append(meshexport.write_mesh(deflected, outdir / f"{label}_{mode}.{fmt}", fmt))
    for p in written:
        print(p)
    return 0


def _verify_one(name, mode, opts) -> tuple[dict, bool]:
    surf = _surface(name, opts["theta"] if name == "morph" else None, opts["periods"])
    fld = _field(surf, mode, opts["corrupt_w"])
    res = verify.isometry_residual(surf, fld, periods=(opts["periods"],) * 2,
                                   start=tuple(lo for lo, _ in surf.domain))
    crease = verify.crease_residual(surf, fld)
    residual = max(res.normalized, crease)
    order = verify.perturbation_order(surf, fld, periods=(opts["periods"],) * 2)
    mesh = meshexport.sample_mesh(surf, opts["res"] or meshexport.default_resolution(surf))
    grad = verify.chord_gradient(mesh, surf, fld)
    eps = opts["eps"] if opts["eps"] is not None else VERIFY_EPS
    # amplitude is free: measure edges at unit chord gradient
    edge = verify.edge_length_check(mesh, meshexport.deflect(mesh, surf, fld.scaled(1 / grad), eps)) if grad else 0.0
    tol_o = opts["tol_order"]
    ok_res = residual < opts["tol_residual"]
    ok_order = order.within(4 - tol_o, 4 + tol_o) or max(order.metric_change) == 0.0
    ok_edge = edge < opts["tol_edge"]
    key = f"{surf.name}.{mode}"
    rep = {
        f"{key}.residual": residual,
        f"{key}.worst_point": res.worst_point,
        f"{key}.order_ratios": order.ratios,
        f"{key}.edge_change": edge,
        f"{key}.chord_gradient": grad,
        f"{key}.status": "pass" if ok_res and ok_order and ok_edge else "FAIL",
    }
    return rep, ok_res and ok_order and ok_edge


def cmd_verify(opts: dict) -> int:
    names = [n for n in surface.PRESETS] if opts["preset"] in (None, "all") else [opts["preset"]]
    report, ok = {}, True
    for name in names:
        for mode in _modes(opts["mode"], VERIFY_MODES):
            rep, good = _verify_one(name, mode, opts)
            report.update(rep)
            ok &= good
    report["tolerance.residual"] = opts["tol_residual"]
    report["tolerance.order"] = opts["tol_order"]
    report["tolerance.edge"] = opts["tol_edge"]
    report["result"] = "pass" if ok else "FAIL"
    _emit(verify.format_report(report), opts["out"])
    return 0 if ok else 1


def sweep_rows(lo: float, hi: float, samples: int, name: str = "morph"):
    """Rows of the Poisson sweep; samples bracketing the transition are flagged."""
    thetas = np.linspace(lo, hi, samples)
    try:
        crit = effective.critical_theta(surface.preset(name, validate=False).beta)
    except effective.NoTransitionError:
        crit = math.nan
    rows = []
    for th in thetas:
        row = {"theta": float(th)}
        try:
            surf = surface.preset(name, theta=float(th))
            props = effective.effective_strain(surf)
            fit = effective.bending_curvatures(surf)
            row.update(E11=props.E11, E22=props.E22, nu=props.nu, kappa_x=fit.kappa_x,
                       kappa_y=fit.kappa_y, curvature_ratio=fit.curvature_ratio, flag="")
        except AssumptionError:
            row.update({k: math.nan for k in SWEEP_COLUMNS[1:-1]}, flag="transition")
        rows.append(row)
    hit = math.isfinite(crit) and any(abs(t - crit) <= 1e-12 for t in thetas)
    if math.isfinite(crit) and not hit:
        below = [i for i, t in enumerate(thetas) if t < crit]
        above = [i for i, t in enumerate(thetas) if t > crit]
        for idx in (below[-1:] + above[:1]):
            rows[idx]["flag"] = "transition"
    return rows


def cmd_sweep(opts: dict) -> int:
    name = opts["preset"] or "morph"
    if name != "morph":
        raise ConfigError("only the morph preset has a free inclination to sweep")
    parts = [p for p in str(opts["theta_range"]).split(",") if p.strip()]
    if len(parts) != 2:
        raise ConfigError("theta range must be 'lo,hi'")
    lo, hi = (_float_or_pi(p) for p in parts)
    rows = sweep_rows(lo, hi, opts["samples"], name)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in SWEEP_COLUMNS])
    _emit(buf.getvalue(), opts["out"])
    return 0


def cmd_tube(opts: dict) -> int:
    names = [n for n in tubular.TUBES] if opts["tube"] in (None, "all") else [opts["tube"]]
    report = {}
    for name in names:
        tube = tubular.tube_preset(name)
        report[f"{name}.closure"] = tubular.closure_defect(tube)
        for mode in _modes(opts["mode"], TUBE_MODES):
            j = tubular.seam_jump(tube, _field(tube, mode, opts["corrupt_w"]))
            report[f"{name}.{mode}.max_jump"] = j.max_jump
            report[f"{name}.{mode}.max_jump_nonrigid"] = j.max_jump_nonrigid
    _emit(verify.format_report(report), opts["out"])
    return 0


COMMANDS = {"export": cmd_export, "verify": cmd_verify, "sweep": cmd_sweep, "tube": cmd_tube}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--preset", choices=list(surface.PRESETS) + ["all"],
                        help="example surface (default: eggbox for export, all for verify)")
    common.add_argument("--theta", help="inclination of the morph preset, radians (pi/4 syntax accepted)")
    common.add_argument("--mode", help="mode name, 'all', a ';'-separated list or combine:w1,w2,w3")
    common.add_argument("--eps", type=float, help="deflection amplitude (export default: 0.1 x bbox diagonal)")
    common.add_argument("--periods", type=int, help="periods per direction, centred on the origin (default 2)")
    common.add_argument("--res", type=int, help="quads per period (default 8, 64 with smooth profiles)")
    common.add_argument("--out", help="output directory (export) or file (others); '-' is stdout")
    common.add_argument("--format", choices=meshexport.FORMATS, help="mesh format (default obj)")
    common.add_argument("--corrupt-w", dest="corrupt_w", type=float, metavar="FACTOR",
                        help="test hook: scale the w component by FACTOR to break isometry")

    p = argparse.ArgumentParser(prog="transiso",
                                description="Infinitesimal isometries of surfaces of translation.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("export", parents=[common], help="write reference and deflected meshes").add_argument(
        "--tube", help="export a tube instead of a preset surface")
    v = sub.add_parser("verify", parents=[common], help="check residuals, perturbation order and edge lengths")
    v.add_argument("--tol-residual", dest="tol_residual", type=float, help="normalized residual bound (1e-9)")
    v.add_argument("--tol-order", dest="tol_order", type=float,
                   help="allowed deviation of successive metric-change ratios from 4 (0.2)")
    v.add_argument("--tol-edge", dest="tol_edge", type=float, help="relative edge-length bound (5e-6)")
    s = sub.add_parser("sweep", parents=[common], help="effective properties across inclinations (CSV)")
    s.add_argument("--theta-range", dest="theta_range", help="lo,hi in radians (default 0.6,0.95)")
    s.add_argument("--samples", type=int, help="number of inclinations (default 36)")
    t = sub.add_parser("tube", parents=[common], help="seam jumps of the modes on tubular surfaces")
    t.add_argument("--tube", help=f"one of {', '.join(tubular.TUBES)} or all")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = resolve(args)
        return COMMANDS[args.command](opts)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"transiso {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
