"""Residual harness for steady flows in the frame moving with the wave.

A *field* is any object exposing

``c``, ``consts``
    wave speed and :class:`~wavelab.core.PhysicalConstants`;
``scales``
    velocity and length scales ``(U, L)`` used to nondimensionalise;
``velocity(x, z)``, ``pressure(x, z)``
    Eulerian ``(u, w)`` and ``P``; an optional ``state(x, z)`` returning
    ``(u, w, P)`` in one go is used when present;
``surface(x)``
    free-surface elevation and slope ``(eta, eta_x)``;
``depth``
    bed depth ``d`` (bed at ``z = -d``) or ``None`` for deep water.

:class:`~wavelab.gerstner.GerstnerFlow` and
:class:`~wavelab.laminar.LaminarFlow` both qualify.

The momentum residuals are those of the full steady system in the moving
frame::

    r1 = (u - c) u_x + w u_z + 2 omega w + P_x / rho
    r2 = (u - c) w_x + w w_z - 2 omega u + P_z / rho + g
    r3 = u_x + w_z
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DependencyError, InsufficientDataError, StencilError

#: Acceptable band for the ratio of successive errors of a second-order stencil.
RATIO_BAND = (3.5, 4.5)
#: Nondimensional level below which a residual counts as exact (round-off only).
EXACT_FLOOR = 1e-11


@dataclass
class ResidualReport:
    """Outcome of one check.

    ``max_abs`` is in the SI unit of the checked equation and ``nondim``
    is the same number divided by the field's natural scale. For
    step-halving studies ``levels`` holds the nondimensional maxima per
    step, ``ratios`` their successive quotients and ``extrapolated`` the
    Richardson-extrapolated nondimensional residual.
    """

    name: str
    grid: str
    step: float | None
    max_abs: float
    converged: bool
    nondim: float | None = None
    tolerance: float | None = None
    passed: bool | None = None
    ratios: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    extrapolated: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.max_abs >= 0:
            raise ValueError(f"max_abs must be >= 0, got {self.max_abs}")

    def to_dict(self):
        return asdict(self)


class HydraulicHead(NamedTuple):
    E: np.ndarray
    C: float
    spread: float


class IsobaricResult(NamedTuple):
    spreads: np.ndarray
    worst: float


class SurfaceSamples(NamedTuple):
    x: np.ndarray
    eta: np.ndarray
    eta_x: np.ndarray


def _state(fld, x, z):
    if hasattr(fld, "state"):
        return fld.state(x, z)
    u, w = fld.velocity(x, z)
    return u, w, fld.pressure(x, z)


def _check_stencil(fld, x, z, step):
    eta, _ = fld.surface(x)
    bad = eta - z < 2 * step
    if fld.depth is not None:
        bad |= z + fld.depth < 2 * step
    if np.any(bad):
        raise StencilError(
            f"{int(np.count_nonzero(bad))} point(s) closer than 2*step = {2 * step:.3g} m to a boundary"
        )


def euler_residual(fld, pt, consts=None, step=None):
    """Residuals ``(r1, r2, r3)`` of the steady equations at ``pt = (x, z)``.

    Partials by centred differences of width ``2*step`` on the supplied
    field. ``step`` defaults to ``1e-5 L`` with ``L`` the field's length
    scale.

    Raises
    ------
    StencilError
        If a point is closer than ``2*step`` to the surface or the bed.
    """
    consts = fld.consts if consts is None else consts
    x, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in pt))
    h = 1e-5 * fld.scales[1] if step is None else float(step)
    _check_stencil(fld, x, z, h)

    xs = np.stack([x, x + h, x - h, x, x])
    zs = np.stack([z, z, z, z + h, z - h])
    u, w, P = (np.asarray(v, dtype=float).reshape(xs.shape) for v in _state(fld, xs, zs))
    ux, wx, Px = ((f[1] - f[2]) / (2 * h) for f in (u, w, P))
    uz, wz, Pz = ((f[3] - f[4]) / (2 * h) for f in (u, w, P))
    u0, w0 = u[0], w[0]
    c, om, rho, g = fld.c, consts.omega, consts.rho, consts.g
    r1 = (u0 - c) * ux + w0 * uz + 2 * om * w0 + Px / rho
    r2 = (u0 - c) * wx + w0 * wz - 2 * om * u0 + Pz / rho + g
    r3 = ux + wz
    return r1, r2, r3


def richardson(levels, band=RATIO_BAND, floor=EXACT_FLOOR):
    """Ratios of successive error levels and the convergence verdict.

    Converged means every ratio lies in ``band``, or every level is
    already below ``floor`` (nothing left but round-off).
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size < 2:
        raise InsufficientDataError("need at least two step levels")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = levels[:-1] / levels[1:]
    if np.all(levels <= floor):
        return ratios, True
    ok = np.all((ratios >= band[0]) & (ratios <= band[1]))
    return ratios, bool(ok)


def romberg(values):
    """Repeated Richardson elimination of the ``h**2, h**4, ...`` terms.

    ``values`` holds same-shaped arrays computed at steps ``h, h/2, h/4, ...``
    of a second-order method; returns the fully extrapolated array.
    """
    row = [np.asarray(v, dtype=float) for v in values]
    m = 1
    while len(row) > 1:
        f = 4.0**m
        row = [(f * row[i + 1] - row[i]) / (f - 1) for i in range(len(row) - 1)]
        m += 1
    return row[0]


def residual_study(fld, pt, step0=None, halvings=3, consts=None, tol=1e-8, grid=""):
    """Step-halving study of the three Euler residuals.

    Evaluates the residuals at ``step0 / 2**j`` for ``j = 0..halvings``,
    records the nondimensional worst case per level and extrapolates
    pointwise to zero step with :func:`romberg` over all levels.
    Momentum residuals are scaled by ``U**2/L`` and continuity by ``U/L``.
    """
    U, L = fld.scales
    step0 = 1e-2 * L if step0 is None else float(step0)
    steps = [step0 / 2**j for j in range(halvings + 1)]
    res = [euler_residual(fld, pt, consts, s) for s in steps]
    names = ("momentum_x", "momentum_z", "continuity")
    scales = (U * U / L, U * U / L, U / L)
    out = []
    for i, (name, sc) in enumerate(zip(names, scales)):
        per = [np.abs(r[i]) for r in res]
        levels = [float(np.max(v)) / sc for v in per]
        ratios, conv = richardson(levels)
        extrap = float(np.max(np.abs(romberg([r[i] for r in res])))) / sc
        out.append(
            ResidualReport(
                name=name,
                grid=grid,
                step=steps[-1],
                max_abs=float(np.max(per[-1])),
                converged=conv,
                nondim=levels[-1],
                tolerance=tol,
                passed=bool(conv and extrap < tol),
                ratios=[float(r) for r in ratios],
                levels=levels,
                extrapolated=extrap,
            )
        )
    return out


def default_surface(fld, n=64):
    """Surface samples over one period ``2 pi L`` of the field."""
    L = fld.scales[1]
    x = np.linspace(0.0, 2 * math.pi * L, n, endpoint=False)
    eta, eta_x = fld.surface(x)
    return SurfaceSamples(x, np.asarray(eta, dtype=float), np.asarray(eta_x, dtype=float))


def boundary_residuals(fld, surface=None, consts=None, probes=(2, 4, 8), n=64, tols=None):
    """Dynamic, kinematic and bed/decay conditions.

    ``surface`` holds samples ``(x, eta, eta_x)``; by default one period is
    sampled at ``n`` points. Deep-water fields are probed at
    ``z = z_ref - n L`` for each ``n`` in ``probes`` and the worst speed is
    compared with the field's ``decay_bound`` when it has one, otherwise
    with ``U exp(-n)``.
    """
    consts = fld.consts if consts is None else consts
    U, L = fld.scales
    tols = {} if tols is None else tols
    s = default_surface(fld, n) if surface is None else surface
    grid = f"{len(s.x)} surface samples"
    reports = []

    _, _, P = _state(fld, s.x, s.eta)
    dyn = np.abs(np.asarray(P) - consts.p_atm)
    sc = consts.rho * consts.g * L
    t = tols.get("surface_pressure", 1e-6)
    reports.append(
        ResidualReport("surface_pressure", grid, None, float(dyn.max()), True, float(dyn.max()) / sc, t,
                       bool(dyn.max() / sc < t))
    )

    u, w = fld.velocity(s.x, s.eta)
    kin = np.abs(np.asarray(w) - (np.asarray(u) - fld.c) * s.eta_x)
    t = tols.get("kinematic", 1e-8)
    reports.append(
        ResidualReport("kinematic", grid, None, float(kin.max()), True, float(kin.max()) / U, t,
                       bool(kin.max() / U < t))
    )

    xs = np.linspace(0.0, 2 * math.pi * L, n, endpoint=False)
    if fld.depth is not None:
        _, wb = fld.velocity(xs, np.full_like(xs, -fld.depth))
        bed = float(np.max(np.abs(wb)))
        t = tols.get("bed", 1e-12)
        reports.append(ResidualReport("bed", f"{n} bed samples", None, bed, True, bed / U, t, bool(bed / U < t)))
    else:
        zref = getattr(fld, "reference_level", 0.0)
        for m in probes:
            z = zref - m * L
            ub, wb = fld.velocity(xs, np.full_like(xs, z))
            speed = float(np.max(np.hypot(ub, wb)))
            naive = U * math.exp(-m)
            bound = float(fld.decay_bound(z)) if hasattr(fld, "decay_bound") else naive
            reports.append(
                ResidualReport(
                    f"decay_{m}",
                    f"{n} samples at z = {z:g}",
                    None,
                    speed,
                    True,
                    speed / U,
                    bound / U,
                    bool(speed <= bound * (1 + 1e-9)),
                    extra={"envelope": bound, "naive_envelope": naive, "ratio_to_naive": speed / naive},
                )
            )
    return reports


def _gamma_integral(gamma_profile):
    if gamma_profile is None:
        raise DependencyError("hydraulic head needs the vorticity profile gamma(p)")
    return getattr(gamma_profile, "gamma_integral", gamma_profile)


def hydraulic_head(fld, pts, consts=None, gamma_profile=None):
    """Hydraulic head at ``pts`` and its spread about the mean.

    ``E = ((u - c)**2 + w**2)/2 + (g - 2 omega c) z + P/rho - 2 omega psi
    + int_0^{-psi} gamma(s) ds``. ``gamma_profile`` is either a callable
    ``p -> int_0^p gamma`` or an object with a ``gamma_integral`` method.
    """
    G = _gamma_integral(gamma_profile)
    consts = fld.consts if consts is None else consts
    x, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in pts))
    u, w, P = _state(fld, x, z)
    psi = fld.psi(x, z)
    c, om = fld.c, consts.omega
    E = ((u - c) ** 2 + w**2) / 2 + (consts.g - 2 * om * c) * z + P / consts.rho - 2 * om * psi + G(-psi)
    E = np.asarray(E, dtype=float)
    C = float(np.mean(E))
    return HydraulicHead(E, C, float(np.max(np.abs(E - C))))


def isobaric_check(fld, streamline_samples, min_points=16):
    """Pressure spread ``max|P - mean P|`` along each sampled streamline.

    ``streamline_samples`` is a sequence of ``(x, z)`` arrays, one per
    streamline, each covering a period with at least ``min_points``
    samples.
    """
    spreads = []
    for xs, zs in streamline_samples:
        xs = np.asarray(xs, dtype=float)
        if xs.size < min_points:
            raise InsufficientDataError(f"streamline has {xs.size} samples, need {min_points}")
        P = np.asarray(fld.pressure(xs, np.asarray(zs, dtype=float)), dtype=float)
        spreads.append(float(np.max(np.abs(P - P.mean()))))
    spreads = np.asarray(spreads)
    return IsobaricResult(spreads, float(spreads.max()) if spreads.size else 0.0)


class PerturbedField:
    """A field with additive faults, for checking that the harness bites.

    ``du``, ``dw`` and ``dP`` are callables ``(x, z) -> increment``;
    everything else is delegated to ``base``.
    """

    def __init__(self, base, du=None, dw=None, dP=None):
        self._base = base
        self._du, self._dw, self._dP = du, dw, dP

    def __getattr__(self, name):
        return getattr(self._base, name)

    def velocity(self, x, z):
        u, w = self._base.velocity(x, z)
        if self._du is not None:
            u = u + self._du(x, z)
        if self._dw is not None:
            w = w + self._dw(x, z)
        return u, w

    def pressure(self, x, z):
        P = self._base.pressure(x, z)
        return P if self._dP is None else P + self._dP(x, z)

    def state(self, x, z):
        u, w = self.velocity(x, z)
        return u, w, self.pressure(x, z)


def sheared_pressure(fld, eps):
    """``fld`` with ``eps * x / L`` added to the pressure (a horizontal shear fault)."""
    L = fld.scales[1]
    return PerturbedField(fld, dP=lambda x, z: eps * np.asarray(x) / L)
