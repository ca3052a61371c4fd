"""The explicit Gerstner flow: Lagrangian map, its inverse and Eulerian fields.

Positions follow the Lagrangian description::

    X = a - exp(k b)/k * sin(k (a - c t))
    Z = h0 + b + exp(k b)/k * cos(k (a - c t))

with labels ``b <= b0``. Eulerian fields live in the frame ``x = X - c t``
moving with the wave, where the flow is steady.

Closed forms for the stream function, pressure and vorticity on each
streamline are provided alongside the numerical reconstructions so the
two can be compared.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kernels
from ._fd import gradient
from .core import GerstnerParams, PhysicalConstants
from .errors import AccuracyError, ConvergenceError, DomainError, OutOfDomainError

#: Finite-difference step for field partials, in units of 1/k.
FD_STEP = 1e-5
#: Points this close above the surface (units of 1/k) still count as on it.
SURFACE_TOL = 1e-9


class LagrangianLabel(NamedTuple):
    a: np.ndarray | float
    b: np.ndarray | float


class FlowSample(NamedTuple):
    u: np.ndarray | float
    w: np.ndarray | float
    P: np.ndarray | float
    psi: np.ndarray | float
    gamma: np.ndarray | float


class SurfaceProfile(NamedTuple):
    X: np.ndarray
    Z: np.ndarray
    X_a: np.ndarray
    Z_a: np.ndarray
    cusp: np.ndarray


def _phase(t, a, prm):
    return prm.k * (np.asarray(a, dtype=float) - prm.c * t)


def position(t, lbl: LagrangianLabel, prm: GerstnerParams):
    """Fixed-frame position ``(X, Z)`` of particle ``lbl`` at time ``t``."""
    a, b = np.asarray(lbl.a, dtype=float), np.asarray(lbl.b, dtype=float)
    th = _phase(t, a, prm)
    r = np.exp(prm.k * b) / prm.k
    return a - r * np.sin(th), prm.h0 + b + r * np.cos(th)


def velocity(t, lbl: LagrangianLabel, prm: GerstnerParams):
    """Fixed-frame particle velocity ``(u, w)``; its magnitude is ``c exp(k b)``."""
    a, b = np.asarray(lbl.a, dtype=float), np.asarray(lbl.b, dtype=float)
    th = _phase(t, a, prm)
    s = prm.c * np.exp(prm.k * b)
    return s * np.cos(th), s * np.sin(th)


def jacobian(t, lbl: LagrangianLabel, prm: GerstnerParams):
    """Matrix ``d(X, Z)/d(a, b)`` (shape ``(..., 2, 2)``) and its determinant.

    The determinant is ``1 - exp(2 k b)`` whatever ``t`` and ``a``.
    """
    a, b = np.asarray(lbl.a, dtype=float), np.asarray(lbl.b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    th = _phase(t, a, prm)
    e = np.exp(prm.k * b)
    s, co = np.sin(th), np.cos(th)
    J = np.empty(a.shape + (2, 2))
    J[..., 0, 0] = 1 - e * co
    J[..., 0, 1] = -e * s
    J[..., 1, 0] = -e * s
    J[..., 1, 1] = 1 + e * co
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    return J, det


def surface_label(x, prm: GerstnerParams):
    """Label ``a`` of the surface particle above moving-frame abscissa ``x``.

    Solves ``x = a - exp(k b0)/k sin(k a)`` by bracketed Newton; the left
    side is non-decreasing in ``a`` so the bracket ``x +- exp(k b0)/k``
    always holds the root.
    """
    return kernels.surface_label(x, prm.k, prm.b0)


def surface_height(x, prm: GerstnerParams):
    """Free-surface elevation ``eta(x)`` and slope ``eta_x`` in the moving frame."""
    a = surface_label(x, prm)
    th = prm.k * a
    e0 = np.exp(prm.k * prm.b0)
    eta = prm.h0 + prm.b0 + e0 / prm.k * np.cos(th)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = -e0 * np.sin(th) / (1 - e0 * np.cos(th))
    return eta, slope


def surface_profile(t, a_samples, prm: GerstnerParams) -> SurfaceProfile:
    """Surface curve traced by the labels ``(a, b0)`` at time ``t``.

    A trochoid for ``b0 < 0``; for ``b0 == 0`` the cycloid has cusps where
    ``X_a`` vanishes, reported in ``cusp``.
    """
    a = np.asarray(a_samples, dtype=float)
    if a.size == 0:
        raise DomainError("a_samples must be nonempty")
    X, Z = position(t, LagrangianLabel(a, prm.b0), prm)
    J, _ = jacobian(t, LagrangianLabel(a, np.full_like(a, prm.b0)), prm)
    X_a, Z_a = J[..., 0, 0], J[..., 1, 0]
    cusp = np.abs(X_a) <= 1e-12
    return SurfaceProfile(X, Z, X_a, Z_a, cusp)


def invert_map(t, pt, prm: GerstnerParams, tol=1e-12, maxiter=50, return_iterations=False):
    """Labels of the particles at fixed-frame points ``pt = (X, Z)`` at time ``t``.

    Damped Newton with the analytic Jacobian, started from ``(X, Z - h0)``.

    Raises
    ------
    OutOfDomainError
        If a point lies above the free surface.
    ConvergenceError
        If Newton fails to reach ``tol`` (metres) within ``maxiter`` steps.
    """
    X, Z = (np.asarray(v, dtype=float) for v in pt)
    X, Z = np.broadcast_arrays(X, Z)
    x = X - prm.c * t
    eta, _ = surface_height(x, prm)
    above = Z > eta + SURFACE_TOL / prm.k
    if np.any(above):
        raise OutOfDomainError(f"{int(np.count_nonzero(above))} point(s) lie above the free surface")
    a, b, iters, ok = kernels.invert_labels(x, Z, prm.k, prm.h0, prm.b0, tol, maxiter)
    if not np.all(ok):
        raise ConvergenceError(
            f"Newton inversion failed for {int(np.count_nonzero(~ok))} point(s) after {maxiter} iterations"
        )
    b = np.minimum(b, prm.b0)
    lbl = LagrangianLabel(a + prm.c * t, b)
    if return_iterations:
        return lbl, iters
    return lbl


# ---------------------------------------------------------------------------
# closed forms along streamlines (one streamline per label b)
# ---------------------------------------------------------------------------


def stream_p(b, prm: GerstnerParams):
    """Hodograph coordinate ``p = -psi`` of streamline ``b``; zero on the surface."""
    b = np.asarray(b, dtype=float)
    k, c = prm.k, prm.c
    # exp(2kb) - exp(2kb0) without cancellation
    de = np.exp(2 * k * prm.b0) * np.expm1(2 * k * (b - prm.b0))
    return c * (b - prm.b0) - c * de / (2 * k)


def label_of_p(p, prm: GerstnerParams):
    """Inverse of :func:`stream_p`: the label ``b`` whose streamline has value ``p``."""
    p = np.asarray(p, dtype=float)
    if np.any(p > 0):
        raise DomainError("p must be <= 0 (p = 0 is the surface)")
    k, c = prm.k, prm.c
    b = prm.b0 + p / c
    for _ in range(100):
        f = stream_p(b, prm) - p
        fp = -c * np.expm1(2 * k * b)
        step = f / fp
        b = np.minimum(b - step, prm.b0)
        if np.all(np.abs(step) <= 1e-15 * (np.abs(b) + 1.0 / k)):
            break
    return b


def streamline_pressure(b, prm: GerstnerParams, consts: PhysicalConstants):
    """Pressure on streamline ``b``: ``P0 - rho (g/c) p(b)``."""
    return consts.p_atm - consts.rho * consts.g / prm.c * stream_p(b, prm)


def vorticity_primitive(p, prm: GerstnerParams):
    """``int_0^p gamma(s) ds`` along the streamline family: ``-c^2 (exp(2kb) - exp(2kb0))``."""
    b = label_of_p(p, prm)
    k = prm.k
    return -prm.c**2 * np.exp(2 * k * prm.b0) * np.expm1(2 * k * (b - prm.b0))


def decay_bound(z, prm: GerstnerParams):
    """Largest particle speed found anywhere on the level ``z``.

    The highest label reaching depth ``z`` sits at a trough of its orbit,
    so ``k b* = k (z - h0) + exp(k b*)``; the bound is ``c exp(k b*)``
    (capped at the surface label). The plain ``c exp(k (z - h0))`` is a
    slight underestimate.
    """
    z = np.asarray(z, dtype=float)
    k = prm.k
    s = k * (z - prm.h0)
    kb = s.copy()
    for _ in range(200):
        new = np.minimum(s + np.exp(kb), k * prm.b0)
        if np.all(np.abs(new - kb) <= 1e-15 * (1 + np.abs(kb))):
            kb = new
            break
        kb = new
    return prm.c * np.exp(kb)


def streamline_vorticity(b, prm: GerstnerParams):
    """Vorticity ``-2 k c exp(2kb) / (1 - exp(2kb))`` on streamline ``b``."""
    b = np.asarray(b, dtype=float)
    return -2 * prm.k * prm.c / np.expm1(-2 * prm.k * b)


# ---------------------------------------------------------------------------
# Eulerian field in the moving frame
# ---------------------------------------------------------------------------


class GerstnerFlow:
    """Steady Eulerian view of a Gerstner wave in the frame moving with it.

    Every evaluation inverts the label map at the requested points.
    ``pressure`` uses the per-streamline closed form by default; pass
    ``pressure="integrated"`` to reconstruct it with :func:`pressure_field`
    instead.
    """

    def __init__(self, prm: GerstnerParams, consts: PhysicalConstants | None = None, pressure="streamline"):
        self.prm = prm
        self.consts = prm.consts if consts is None else consts
        if pressure not in ("streamline", "integrated"):
            raise ValueError(f"unknown pressure mode {pressure!r}")
        self.pressure_mode = pressure
        self.c = prm.c
        self.depth = None
        self.reference_level = prm.h0

    @property
    def scales(self):
        """Velocity and length scales ``(c, 1/k)``."""
        return self.prm.c, 1.0 / self.prm.k

    def labels(self, x, z):
        return invert_map(0.0, (x, z), self.prm)

    def surface(self, x):
        return surface_height(x, self.prm)

    def contains(self, x, z):
        eta, _ = self.surface(np.asarray(x, dtype=float))
        return np.asarray(z) <= eta + SURFACE_TOL / self.prm.k

    def velocity(self, x, z):
        lbl = self.labels(x, z)
        return velocity(0.0, lbl, self.prm)

    def psi(self, x, z):
        lbl = self.labels(x, z)
        return -stream_p(lbl.b, self.prm)

    def state(self, x, z):
        """``(u, w, P)`` with a single label inversion."""
        if self.pressure_mode == "integrated":
            u, w = self.velocity(x, z)
            return u, w, self.pressure(x, z)
        lbl = self.labels(x, z)
        u, w = velocity(0.0, lbl, self.prm)
        return u, w, streamline_pressure(lbl.b, self.prm, self.consts)

    def decay_bound(self, z):
        return decay_bound(z, self.prm)

    def pressure(self, x, z):
        if self.pressure_mode == "integrated":
            return pressure_field((x, z), self.prm, self.consts)
        lbl = self.labels(x, z)
        return streamline_pressure(lbl.b, self.prm, self.consts)

    def velocity_gradient(self, x, z, h=None):
        """``(u, w)``, ``(u_x, w_x)`` and ``(u_z, w_z)`` by finite differences."""
        h = FD_STEP / self.prm.k if h is None else h
        return gradient(lambda xx, zz: np.stack(self.velocity(xx, zz)), x, z, h, surface=self.surface)

    def vorticity(self, x, z, h=None):
        _, fx, fz = self.velocity_gradient(x, z, h)
        return fz[0] - fx[1]


def fixed_frame_velocity(t, X, Z, prm: GerstnerParams):
    """Eulerian velocity at fixed-frame points ``(X, Z)`` and time ``t``."""
    return velocity(t, invert_map(t, (X, Z), prm), prm)


def eulerian_field(pt, prm: GerstnerParams, consts: PhysicalConstants | None = None, pressure="integrated"):
    """Full Eulerian state at moving-frame points ``pt = (x, z)``.

    Velocities come from the inverted labels, ``psi`` from the streamline
    identification ``psi = -p(b)``, ``P`` from :func:`pressure_field`
    (or the streamline closed form with ``pressure="streamline"``) and the
    vorticity from finite differences ``u_z - w_x``.
    """
    consts = prm.consts if consts is None else consts
    flow = GerstnerFlow(prm, consts, pressure=pressure)
    x, z = (np.asarray(v, dtype=float) for v in pt)
    lbl = flow.labels(x, z)
    u, w = velocity(0.0, lbl, prm)
    return FlowSample(u=u, w=w, P=flow.pressure(x, z), psi=-stream_p(lbl.b, prm), gamma=flow.vorticity(x, z))


# ---------------------------------------------------------------------------
# pressure reconstruction by line integrals of the momentum balance
# ---------------------------------------------------------------------------


def _pressure_gradient(flow: GerstnerFlow, x, z, h):
    (u, w), (ux, wx), (uz, wz) = flow.velocity_gradient(x, z, h)
    rho, om, g, c = flow.consts.rho, flow.consts.omega, flow.consts.g, flow.c
    Px = -rho * ((u - c) * ux + w * uz + 2 * om * w)
    Pz = -rho * ((u - c) * wx + w * wz - 2 * om * u + g)
    return Px, Pz


def _simpson_label_path(flow, a_fixed, b_fixed, s0, s1, along, h, atol, n0=16, max_n=1 << 14):
    """Integrate ``grad P . d(x, z)`` along a straight label-space segment.

    ``along == "b"`` walks ``b`` from ``s0`` to ``s1`` at fixed ``a``;
    ``along == "a"`` walks ``a`` at fixed ``b``. Composite Simpson with
    the node count doubled until successive estimates agree to ``atol``.
    """
    prm = flow.prm
    k = prm.k
    s0 = np.atleast_1d(np.asarray(s0, dtype=float))
    s1 = np.atleast_1d(np.asarray(s1, dtype=float))
    fixed = np.atleast_1d(np.asarray(a_fixed if along == "b" else b_fixed, dtype=float))
    s0, s1, fixed = np.broadcast_arrays(s0, s1, fixed)

    def integrand(tau):
        s = s0[None, :] + tau[:, None] * (s1 - s0)[None, :]
        if along == "b":
            a, b = np.broadcast_to(fixed, s.shape), s
        else:
            a, b = s, np.broadcast_to(fixed, s.shape)
        e = np.exp(k * b)
        th = k * a
        x = a - e / k * np.sin(th)
        z = prm.h0 + b + e / k * np.cos(th)
        Px, Pz = _pressure_gradient(flow, x, z, h)
        if along == "b":
            dx, dz = -e * np.sin(th), 1 + e * np.cos(th)
        else:
            dx, dz = 1 - e * np.cos(th), -e * np.sin(th)
        return (Px * dx + Pz * dz) * (s1 - s0)[None, :]

    n = n0
    prev = None
    while n <= max_n:
        tau = np.linspace(0.0, 1.0, n + 1)
        f = integrand(tau)
        wts = np.ones(n + 1)
        wts[1:-1:2] = 4.0
        wts[2:-1:2] = 2.0
        est = (wts[:, None] * f).sum(axis=0) / (3.0 * n)
        if prev is not None and np.all(np.abs(est - prev) < atol):
            return est
        prev = est
        n *= 2
    raise AccuracyError("pressure line integral did not converge")


def pressure_field(pt, prm: GerstnerParams, consts: PhysicalConstants | None = None, via_a=None, rtol=1e-9, step=None):
    """Pressure reconstructed from the momentum equations by line integration.

    The path starts on the free surface (where ``P = P0``) and descends in
    label space at fixed ``a`` down to the target streamline. By default it
    starts directly above the target label; with ``via_a`` it descends at
    ``a = via_a`` and then follows the target streamline to the target.
    ``grad P`` is evaluated from the steady momentum balance
    ``P_x = -rho[(u - c) u_x + w u_z + 2 omega w]`` and
    ``P_z = -rho[(u - c) w_x + w w_z - 2 omega u + g]`` with
    finite-difference partials of the Eulerian velocity.
    """
    consts = prm.consts if consts is None else consts
    flow = GerstnerFlow(prm, consts)
    x, z = (np.asarray(v, dtype=float) for v in pt)
    x, z = np.broadcast_arrays(x, z)
    shape = x.shape
    lbl = invert_map(0.0, (x.ravel(), z.ravel()), prm)
    a, b = np.atleast_1d(lbl.a), np.atleast_1d(lbl.b)
    h = FD_STEP / prm.k if step is None else step
    atol = rtol * consts.rho * consts.g / prm.k
    a_start = a if via_a is None else np.broadcast_to(np.asarray(via_a, dtype=float), a.shape)

    P = np.full(a.shape, float(consts.p_atm))
    deep = b < prm.b0
    if np.any(deep):
        P[deep] += _simpson_label_path(flow, a_start[deep], None, prm.b0, b[deep], "b", h, atol)
    if via_a is not None:
        moved = a != a_start
        if np.any(moved):
            P[moved] += _simpson_label_path(flow, None, b[moved], a_start[moved], a[moved], "a", h, atol)
    return P.reshape(shape)
