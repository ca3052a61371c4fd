"""Command-line front end.

    wavelab dispersion|profile|paths|verify [--config FILE] [--out DIR] [--format csv,json,svg]

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 I/O error. Every file is written to a temporary name and renamed into
place, and no payload depends on the clock, so identical configs give
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import pathtrace, suite
from .config import ConfigError, RunConfig, load_config
from .errors import WavelabError
from .gerstner import GerstnerFlow, surface_profile

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

#: Fixed SVG canvas.
VIEWBOX = (800.0, 300.0)


class OutputError(WavelabError, OSError):
    """An output file could not be written."""


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------


def _fmt(v):
    return format(float(v), ".17g")


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    d = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(d, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def csv_text(header, columns):
    rows = [",".join(header)]
    for vals in zip(*columns):
        rows.append(",".join(_fmt(v) for v in vals))
    return "\n".join(rows) + "\n"


def json_text(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def svg_text(X, Z, title=""):
    W, H = VIEWBOX
    pad = 10.0
    x0, x1 = float(np.min(X)), float(np.max(X))
    z0, z1 = float(np.min(Z)), float(np.max(Z))
    sx = (W - 2 * pad) / (x1 - x0 if x1 > x0 else 1.0)
    sz = (H - 2 * pad) / (z1 - z0 if z1 > z0 else 1.0)
    pts = " ".join(f"{pad + (x - x0) * sx:.3f},{H - pad - (z - z0) * sz:.3f}" for x, z in zip(X, Z))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W:g} {H:g}">\n'
        f"  <title>{title}</title>\n"
        f'  <polyline fill="none" stroke="#1f5f8b" stroke-width="1.5" points="{pts}"/>\n'
        "</svg>\n"
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_dispersion(cfg: RunConfig, out=None):
    out = sys.stdout if out is None else out
    prm = cfg.gerstner()
    payload = {"k": prm.k, "omega": cfg.constants.omega, "g": cfg.constants.g,
               "c": prm.c, "alpha": prm.alpha, "A": prm.A, "m": prm.m}
    out.write(json_text(payload))
    return EXIT_OK


def cmd_profile(cfg: RunConfig, out=None):
    out = sys.stdout if out is None else out
    prm = cfg.gerstner()
    n = cfg.grid["profile_samples"]
    a = np.linspace(0.0, prm.wavelength, n, endpoint=False)
    sp = surface_profile(0.0, a, prm)
    order = np.argsort(sp.X, kind="stable")
    X, Z, cusp = sp.X[order], sp.Z[order], sp.cusp[order]
    meta = {
        "samples": n,
        "wavelength": prm.wavelength,
        "periodic": True,
        "crest_to_trough": float(np.max(Z) - np.min(Z)),
        "cusp_rows": [int(i) for i in np.flatnonzero(cusp)],
        "b0": prm.b0,
        "k": prm.k,
    }
    written = []
    if "csv" in cfg.formats:
        p = os.path.join(cfg.out_dir, "profile.csv")
        atomic_write(p, csv_text(("X", "Z"), (X, Z)))
        written.append(p)
    if "json" in cfg.formats:
        p = os.path.join(cfg.out_dir, "profile.json")
        atomic_write(p, json_text(meta))
        written.append(p)
    if "svg" in cfg.formats:
        p = os.path.join(cfg.out_dir, "profile.svg")
        atomic_write(p, svg_text(X, Z, f"surface, k={prm.k:g}, b0={prm.b0:g}"))
        written.append(p)
    out.write(json_text({"written": written, **meta}))
    return EXIT_OK


def cmd_paths(cfg: RunConfig, out=None):
    out = sys.stdout if out is None else out
    if not cfg.particles:
        raise ConfigError("particles: empty seed list")
    prm = cfg.gerstner()
    fl = GerstnerFlow(prm)
    summary = []
    for i, st in enumerate(suite.particle_starts(prm, cfg.particles)):
        entry = {"index": i, "start": list(st)}
        try:
            if not bool(fl.contains(np.array([st[0]]), np.array([st[1]]))[0]):
                raise WavelabError(f"start point {st} is not inside the fluid")
            ref = pathtrace.refine_path(st, 0.0, prm, tol=cfg.tolerances["closure"] / prm.k,
                                        steps_per_period=cfg.steps["steps_per_period"])
        except WavelabError as exc:
            entry["error"] = f"{type(exc).__name__}: {exc}"
            summary.append(entry)
            continue
        tr, d = ref.trajectory, ref.diagnostics
        entry.update(
            label={"a": float(tr.label.a), "b": float(tr.label.b)},
            closure=d.closure,
            radius=tr.radius,
            radial_deviation=d.radial_deviation,
            period=d.period,
            period_expected=prm.period,
            drift=d.drift,
            phase_residual=d.phase_residual,
            dt=ref.steps[-1],
        )
        if "csv" in cfg.formats:
            p = os.path.join(cfg.out_dir, f"path_{i:03d}.csv")
            atomic_write(p, csv_text(("t", "X", "Z"), (tr.t_grid, tr.points[:, 0], tr.points[:, 1])))
            entry["file"] = os.path.basename(p)
        summary.append(entry)
    doc = {"seed": cfg.seed, "particles": summary}
    atomic_write(os.path.join(cfg.out_dir, "paths.json"), json_text(doc))
    out.write(json_text({"particles": len(summary), "errors": sum("error" in e for e in summary)}))
    return EXIT_OK


def verify_report(cfg: RunConfig):
    reports = suite.run_suite(cfg)
    return {
        "seed": cfg.seed,
        "flow": cfg.flow,
        "config": {k: v for k, v in cfg.to_dict().items() if k != "output"},
        "passed": suite.all_passed(reports),
        "checks": [r.to_dict() for r in reports],
    }


def cmd_verify(cfg: RunConfig, out=None):
    out = sys.stdout if out is None else out
    rep = verify_report(cfg)
    text = json_text(rep)
    atomic_write(os.path.join(cfg.out_dir, "report.json"), text)
    failed = [c["name"] for c in rep["checks"] if c["passed"] is False]
    out.write(json_text({"passed": rep["passed"], "checks": len(rep["checks"]), "failed": failed}))
    return EXIT_OK if rep["passed"] else EXIT_FAIL


COMMANDS = {
    "dispersion": cmd_dispersion,
    "profile": cmd_profile,
    "paths": cmd_paths,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="wavelab", description="Gerstner-wave construction and verification.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON config file (defaults: canonical Gerstner wave)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--format", help="comma-separated subset of csv,json,svg")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    fmts = None if args.format is None else [f.strip() for f in args.format.split(",") if f.strip()]
    try:
        cfg = load_config(args.config, out_dir=args.out, formats=fmts)
    except ConfigError as exc:
        print(f"wavelab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"wavelab: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"wavelab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"wavelab: {exc}", file=sys.stderr)
        return EXIT_IO
    except WavelabError as exc:
        print(f"wavelab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
