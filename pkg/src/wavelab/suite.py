"""The named checks run by ``wavelab verify``.

Every check returns :class:`~wavelab.verify.ResidualReport` objects; a
check that raises is turned into a failed report carrying the error, so
one broken stage never hides the others.
"""

from __future__ import annotations

import math

import numpy as np

from . import gammaflow, hodograph, laminar, pathtrace, verify
from .config import RunConfig
from .core import GerstnerParams, dispersion_defect
from .errors import WavelabError
from .gerstner import GerstnerFlow, LagrangianLabel, position, stream_p
from .verify import ResidualReport

#: Particles deeper than this (in units of 1/k below the surface label) are not followed.
GAMMA_DEPTH = 8.0

GERSTNER_ONLY = (
    "dispersion",
    "hodograph",
    "gamma_chain",
    "orbits",
    "bed_violation",
)


def _rep(name, value, scale, tol, grid="", **extra):
    value = float(value)
    nd = value / scale
    return ResidualReport(name, grid, None, abs(value), True, nd, tol, bool(nd < tol), extra=extra)


def _na(name):
    return ResidualReport(name, "", None, 0.0, True, None, None, None, extra={"status": "n/a"})


def _failed(name, exc):
    return ResidualReport(
        name, "", None, 0.0, False, None, None, False,
        extra={"status": "error", "error": f"{type(exc).__name__}: {exc}"},
    )


# ---------------------------------------------------------------------------
# sample sets
# ---------------------------------------------------------------------------


def interior_grid(prm: GerstnerParams, nx=32, nz=32):
    """``nx x nz`` points over one wavelength, from just below the trough to ``3/k`` below it."""
    L = 1 / prm.k
    x = np.linspace(0.0, prm.wavelength, nx, endpoint=False)
    z = np.linspace(prm.trough - 3 * L, prm.trough - 0.05 * L, nz)
    return np.meshgrid(x, z)


def streamline_samples(prm: GerstnerParams, n_lines=8, n_points=32, depth=2.0):
    """``(x, z)`` on ``n_lines`` streamlines from the surface down to ``b0 - depth/k``."""
    bs = prm.b0 - np.linspace(0.0, depth / prm.k, n_lines)
    a = np.linspace(0.0, prm.wavelength, n_points, endpoint=False)
    out = []
    for b in bs:
        x, z = position(0.0, LagrangianLabel(a, np.full_like(a, b)), prm)
        out.append((x, z))
    return out


def laminar_grid(fl: laminar.LaminarFlow, nx=32, nz=32):
    d = fl.depth
    x = np.linspace(0.0, 2 * math.pi * d, nx, endpoint=False)
    z = np.linspace(-0.95 * d, fl.eta0 - 0.05 * d, nz)
    return np.meshgrid(x, z)


def laminar_streamlines(fl: laminar.LaminarFlow, n_lines=8, n_points=32):
    x = np.linspace(0.0, 2 * math.pi * fl.depth, n_points, endpoint=False)
    zs = np.linspace(fl.eta0, -fl.depth, n_lines)
    return [(x, np.full_like(x, z)) for z in zs]


# ---------------------------------------------------------------------------
# checks shared by both flow families
# ---------------------------------------------------------------------------


def euler_check(fld, pts, cfg: RunConfig):
    nx = cfg.grid["nx"]
    grid = f"{nx}x{cfg.grid['nz']} interior"
    return verify.residual_study(fld, pts, halvings=cfg.steps["halvings"], tol=cfg.tolerances["euler"], grid=grid)


def boundary_check(fld, cfg: RunConfig):
    t = cfg.tolerances
    return verify.boundary_residuals(
        fld, n=cfg.grid["surface_samples"],
        tols={"surface_pressure": t["surface_pressure"], "kinematic": t["kinematic"]},
    )


def isobaric_checks(fld, lines, cfg: RunConfig):
    c = cfg.constants
    L = fld.scales[1]
    sc = c.rho * c.g * L
    tol = cfg.tolerances["isobaric"]
    grid = f"{len(lines)} streamlines x {len(lines[0][0])} points"
    out = []
    target = fld
    eps_cfg = cfg.fault["pressure_shear"]
    if eps_cfg:
        target = verify.sheared_pressure(fld, eps_cfg * sc)
    res = verify.isobaric_check(target, lines, min_points=8)
    out.append(_rep("isobaric", res.worst, sc, tol, grid, spreads=[float(s) for s in res.spreads / sc],
                    injected_fault=eps_cfg))
    # the harness must notice a fault well above its tolerance
    eps = 1e-3 * sc
    bad = verify.isobaric_check(verify.sheared_pressure(fld, eps), lines, min_points=8)
    out.append(
        ResidualReport(
            "isobaric_fault_detection", grid, None, bad.worst, True, bad.worst / sc, 0.5e-3,
            bool(bad.worst > eps / 2), extra={"fault": 1e-3},
        )
    )
    return out


def head_check(fld, pts, gamma_profile, cfg: RunConfig, grid=""):
    U = fld.scales[0]
    H = verify.hydraulic_head(fld, pts, gamma_profile=gamma_profile)
    return [_rep("hydraulic_head", H.spread, U * U, cfg.tolerances["bernoulli"], grid, head=H.C)]


# ---------------------------------------------------------------------------
# Gerstner-only checks
# ---------------------------------------------------------------------------


def dispersion_check(prm: GerstnerParams):
    d = dispersion_defect(prm.k, prm.c, prm.consts)
    return [_rep("dispersion", d, 1.0, 1e-10, c=prm.c, alpha=prm.alpha, A=prm.A, m=prm.m)]


def hodograph_checks(fl: GerstnerFlow, cfg: RunConfig):
    prm = fl.prm
    U, L = fl.scales
    t = cfg.tolerances
    prof = hodograph.extract_profiles(fl, n=cfg.grid["extraction_samples"])
    gc = gammaflow.GammaConstants.from_profiles(prof)
    nq = cfg.grid["hodograph_q"]
    q = np.linspace(0.0, prm.wavelength, nq, endpoint=False)
    rec = hodograph.hodograph_records(q, prof, fl, constants=gc)
    grid = f"{nq} q x {prof.p.size} p"
    circ = hodograph.circle_identity(rec, gc)
    cub = hodograph.nondimensional_coefficients(hodograph.cubic_coefficients(prof), U, L)
    worst = max(float(np.max(np.abs(a))) for a in cub)
    out = [
        _rep("linear_Q", prof.fit_residual, U * U, t["has"], f"{prof.p.size} p", A=prof.A, B=prof.B),
        _rep("has", np.max(hodograph.check_has(rec, prof)), U, t["has"], grid),
        _rep("bernoulli", np.max(hodograph.bernoulli_residual(rec, prof)), U * U, t["bernoulli"], grid),
        _rep("circle", np.max(circ.radial_deviation), L, t["circle"], grid),
        _rep("cubic", worst, 1.0, t["cubic"], f"{prof.p.size} p",
             per_coefficient=[float(np.max(np.abs(a))) for a in cub]),
    ]
    return prof, gc, out


def gamma_checks(prm: GerstnerParams, prof, gc, cfg: RunConfig):
    """Integrate Gamma from the surface value extracted by the hodograph stage."""
    k, c = prm.k, prm.c
    t = cfg.tolerances
    b = np.linspace(prm.b0, prm.b0 - GAMMA_DEPTH / k, 1025)
    p = stream_p(b, prm)
    G0 = float(np.interp(0.0, prof.p, prof.Gamma))
    prof0 = gammaflow.integrate_gamma(G0, None, gc, p_out=p)
    C1, fi = gammaflow.implicit_residual(prof0, gc)
    g = prof0.gamma
    mono = bool(np.all(g < 0) and np.all(np.diff(g) > 0) and abs(g[-1]) < abs(g[0]) * 1e-6)
    K, T = gammaflow.K_and_T(prof0, gc, prm)
    Kerr = float(np.max(np.abs(K * k * np.exp(-k * b) - 1)))
    Terr = float(np.max(np.abs(T - b)) * k)
    gcal = gc.with_C1(C1)
    beta_lin = gammaflow.beta_of_p(prof0, gcal)
    beta_log = gammaflow.beta_log_form(prof0, gcal)
    # compare with the extracted vorticity on the extraction grid
    prof_x = gammaflow.integrate_gamma(G0, None, gc, p_out=prof.p[::-1])
    gdiff = float(np.max(np.abs(prof_x.gamma[::-1] - prof.gamma)))
    grid = f"{p.size} p to b0 - {GAMMA_DEPTH:g}/k"
    return [
        _rep("first_integral", fi, c * c, t["first_integral"], grid, C1=C1),
        ResidualReport("vorticity_monotone", grid, None, float(np.min(np.abs(g))), True, None, None, mono),
        _rep("orbit_radius_K", Kerr, 1.0, t["label_map"], grid),
        _rep("label_map_T", Terr, 1.0, t["label_map"], grid),
        _rep("beta_forms", np.max(np.abs(beta_lin - beta_log)), c, t["label_map"], grid),
        _rep("vorticity_vs_extracted", gdiff, k * c, t["label_map"], f"{prof.p.size} p"),
    ]


def particle_starts(prm: GerstnerParams, particles):
    out = []
    for spec in particles:
        if "kb" in spec:
            lbl = LagrangianLabel(float(spec.get("a", 0.0)), float(spec["kb"]) / prm.k)
            X, Z = position(0.0, lbl, prm)
            out.append((float(X), float(Z)))
        else:
            out.append((float(spec["X"]), float(spec["Z"])))
    return out


def orbit_checks(prm: GerstnerParams, cfg: RunConfig):
    k = prm.k
    t = cfg.tolerances
    out = []
    for i, st in enumerate(particle_starts(prm, cfg.particles)):
        name = f"orbit_{i}"
        try:
            ref = pathtrace.refine_path(st, 0.0, prm, tol=t["closure"] / k,
                                        steps_per_period=cfg.steps["steps_per_period"])
        except WavelabError as exc:
            out.append(_failed(name, exc))
            continue
        d, tr = ref.diagnostics, ref.trajectory
        nd = {
            "closure": d.closure * k,
            "radial_deviation": d.radial_deviation / tr.radius,
            "period": abs(d.period / prm.period - 1),
            "drift": abs(d.drift) * k,
            "phase": d.phase_residual,
        }
        ok = (nd["closure"] < t["closure"] and nd["drift"] < t["closure"]
              and nd["radial_deviation"] < t["orbit"] and nd["period"] < t["orbit"] and nd["phase"] < t["orbit"])
        out.append(
            ResidualReport(
                name, f"{len(tr.t_grid) - 1} steps", ref.steps[-1], d.closure, True, nd["closure"], t["closure"], ok,
                extra={**nd, "radius": tr.radius, "b": float(tr.label.b), "closures": ref.closures},
            )
        )
    return out


def bed_check(prm: GerstnerParams, kd=4.0):
    d = kd / prm.k - prm.h0
    bv = laminar.bed_violation_of_gerstner(prm, d)
    ratio = bv.max_w / bv.envelope
    return [
        ResidualReport(
            "bed_violation", f"{bv.x.size} samples at z = {-d:g}", None, bv.max_w, True, bv.max_w / prm.c, None,
            bool(0.5 <= ratio <= 2.0), extra={"envelope": bv.envelope, "ratio": ratio},
        )
    ]


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def _guard(name, fn, *args):
    try:
        return fn(*args)
    except WavelabError as exc:
        return [_failed(name, exc)]


def build_laminar_flow(cfg: RunConfig):
    lam = cfg.laminar
    kw = {"consts": cfg.constants, "c": lam["c"]}
    if lam["profile"] == "zero":
        return laminar.still_water(lam["eta0"], lam["d"], **kw)
    if lam["profile"] == "constant":
        return laminar.uniform_current(lam["U"], lam["eta0"], lam["d"], **kw)
    return laminar.linear_shear(lam["sigma"], lam["eta0"], lam["d"], **kw)


def run_gerstner(cfg: RunConfig):
    prm = cfg.gerstner()
    fl = GerstnerFlow(prm)
    g = cfg.grid
    reports = []
    reports += _guard("dispersion", dispersion_check, prm)
    reports += _guard("euler", euler_check, fl, interior_grid(prm, g["nx"], g["nz"]), cfg)
    reports += _guard("boundary", boundary_check, fl, cfg)
    lines = streamline_samples(prm, g["streamlines"], g["streamline_points"])
    reports += _guard("isobaric", isobaric_checks, fl, lines, cfg)
    try:
        prof, gc, hod = hodograph_checks(fl, cfg)
    except WavelabError as exc:
        reports.append(_failed("hodograph", exc))
        prof = None
    else:
        reports += hod
        pts = (np.concatenate([x for x, _ in lines]), np.concatenate([z for _, z in lines]))
        G0 = float(np.interp(0.0, prof.p, prof.Gamma))
        prim = gammaflow.vorticity_primitive(gc, G0, prof.C)
        reports += _guard("hydraulic_head", head_check, fl, pts, prim, cfg, "streamline samples")
        reports += _guard("gamma_chain", gamma_checks, prm, prof, gc, cfg)
    reports += orbit_checks(prm, cfg)
    reports += _guard("bed_violation", bed_check, prm)
    return reports


def run_laminar(cfg: RunConfig):
    try:
        fl = build_laminar_flow(cfg)
    except WavelabError as exc:
        return [_failed("laminar", exc)]
    g = cfg.grid
    reports = []
    reports += _guard("euler", euler_check, fl, laminar_grid(fl, g["nx"], g["nz"]), cfg)
    reports += _guard("boundary", boundary_check, fl, cfg)
    lines = laminar_streamlines(fl, g["streamlines"], g["streamline_points"])
    reports += _guard("isobaric", isobaric_checks, fl, lines, cfg)
    pts = (np.concatenate([x for x, _ in lines]), np.concatenate([z for _, z in lines]))
    reports += _guard("hydraulic_head", head_check, fl, pts, fl, cfg, "streamline samples")
    reports += [_na(n) for n in GERSTNER_ONLY]
    return reports


def run_suite(cfg: RunConfig):
    """All checks for the configured flow, in a fixed order."""
    return run_gerstner(cfg) if cfg.flow == "gerstner" else run_laminar(cfg)


def all_passed(reports):
    return all(r.passed is not False for r in reports)
