"""Flat-surface shear flows over a flat bed, and the bed test for Gerstner waves.

A laminar flow has ``w = 0``, a level surface ``z = eta0`` and ``u, P``
depending on ``z`` alone. The horizontal momentum and continuity equations
then hold identically; the vertical one fixes the pressure::

    P(z) = P0 + rho * int_z^eta0 (g - 2 omega u(s)) ds

The shear ``u(z)`` is stored as a cubic spline through samples, and the
integral is the spline's own antiderivative, so ``P`` is exact for the
interpolated profile.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .core import FreeSurfaceSpec, GerstnerParams, PhysicalConstants
from .errors import DomainError, OutOfDomainError
from .gerstner import GerstnerFlow

#: Samples used when the shear is given as a callable.
PROFILE_SAMPLES = 257


class LaminarFlow:
    """A laminar flow, usable wherever the verification harness expects a field."""

    def __init__(self, spline: CubicSpline, eta0, d, c, consts: PhysicalConstants):
        self.u_profile = spline
        self.eta0 = float(eta0)
        self.depth = float(d)
        self.c = float(c)
        self.consts = consts
        self.reference_level = self.eta0
        self._U = spline.antiderivative()
        self._U_top = float(self._U(self.eta0))
        self.spec = FreeSurfaceSpec(self.eta0, self.depth, float(self.psi(0.0, -self.depth)))

    @property
    def scales(self):
        """``(c, d)``: the wave speed and the depth."""
        return self.c, self.depth

    def _z(self, x, z):
        x, z = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(z, dtype=float))
        return x, z

    def contains(self, x, z):
        _, z = self._z(x, z)
        return (z >= -self.depth) & (z <= self.eta0)

    def surface(self, x):
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.eta0), np.zeros_like(x)

    def velocity(self, x, z):
        x, z = self._z(x, z)
        return self.u_profile(z), np.zeros_like(z)

    def pressure(self, x, z):
        x, z = self._z(x, z)
        k = self.consts
        lift = self._U_top - self._U(z)
        return k.p_atm + k.rho * (k.g * (self.eta0 - z) - 2 * k.omega * lift)

    def state(self, x, z):
        u, w = self.velocity(x, z)
        return u, w, self.pressure(x, z)

    def psi(self, x, z):
        """``psi = int_eta0^z (u - c) ds``, zero on the surface."""
        x, z = self._z(x, z)
        return self._U(z) - self._U_top - self.c * (z - self.eta0)

    def vorticity(self, x, z):
        x, z = self._z(x, z)
        return self.u_profile(z, 1)

    def z_of_p(self, p, tol=1e-13, maxiter=60):
        """Height of the streamline ``p = -psi``, from 0 on the surface to ``-p0`` on the bed."""
        p = np.asarray(p, dtype=float)
        if np.any((p > 0) | (p < -self.spec.p0 * (1 + 1e-12))):
            raise OutOfDomainError(f"p outside [{-self.spec.p0:.6g}, 0]")
        # dp/dz = c - u > 0: safeguarded Newton
        lo = np.full_like(p, -self.depth)
        hi = np.full_like(p, self.eta0)
        z = np.clip(self.eta0 + p / self.c, lo, hi)
        for _ in range(maxiter):
            f = -self.psi(0.0, z) - p
            lo = np.where(f < 0, z, lo)
            hi = np.where(f >= 0, z, hi)
            zn = z - f / (self.c - self.u_profile(z))
            out = (zn <= lo) | (zn >= hi)
            zn = np.where(out, 0.5 * (lo + hi), zn)
            if np.all(np.abs(zn - z) <= tol * self.depth):
                return zn
            z = zn
        return z

    def gamma_integral(self, p):
        """``int_0^p gamma = c (u - u_top) - (u^2 - u_top^2)/2``."""
        u = self.u_profile(self.z_of_p(p))
        u0 = float(self.u_profile(self.eta0))
        return self.c * (u - u0) - (u * u - u0 * u0) / 2


def _spline(u_profile, eta0, d):
    if isinstance(u_profile, CubicSpline):
        return u_profile
    if callable(u_profile):
        z = np.linspace(-d, eta0, PROFILE_SAMPLES)
        u = np.broadcast_to(np.asarray(u_profile(z), dtype=float), z.shape)
        return CubicSpline(z, u)
    z, u = (np.asarray(v, dtype=float) for v in u_profile)
    if z.size < 2 or z.shape != u.shape:
        raise DomainError("shear samples need matching z and u arrays of length >= 2")
    order = np.argsort(z)
    z, u = z[order], u[order]
    if z[0] > -d or z[-1] < eta0:
        raise DomainError(f"shear samples must cover [{-d}, {eta0}]")
    return CubicSpline(z, u)


def build_laminar(u_profile, eta0, d, consts: PhysicalConstants | None = None, c=None):
    """Laminar flow with shear ``u_profile`` between the bed ``z = -d`` and ``z = eta0``.

    ``u_profile`` is a callable, a ``CubicSpline`` or a pair ``(z, u)`` of
    samples. ``c`` defaults to the deep-water Gerstner speed for ``k = 1/d``.

    Raises
    ------
    DomainError
        If ``d <= 0`` or ``u`` reaches ``c`` somewhere (stagnation).
    """
    consts = PhysicalConstants() if consts is None else consts
    if not d > 0:
        raise DomainError(f"bed depth must be positive, got {d}")
    if c is None:
        c = GerstnerParams.from_wavenumber(1.0 / d, consts=consts).c
    spl = _spline(u_profile, eta0, d)
    # sup over the pieces: a dense sample plus the spline's own extrema
    zz = np.linspace(-d, eta0, 4 * PROFILE_SAMPLES)
    crit = spl.derivative().roots(extrapolate=False)
    crit = crit[(crit >= -d) & (crit <= eta0)]
    umax = float(np.max(spl(np.concatenate([zz, crit]))))
    if not umax < c:
        raise DomainError(f"stagnation: sup u = {umax:.6g} is not below c = {c:.6g}")
    return LaminarFlow(spl, eta0, d, c, consts)


def still_water(eta0, d, **kw):
    return build_laminar(lambda z: np.zeros_like(z), eta0, d, **kw)


def uniform_current(U, eta0, d, **kw):
    return build_laminar(lambda z: np.full_like(z, U), eta0, d, **kw)


def linear_shear(sigma, eta0, d, **kw):
    """``u(z) = sigma (z + d)``: at rest on the bed."""
    return build_laminar(lambda z: sigma * (z + d), eta0, d, **kw)


class BedViolation(NamedTuple):
    max_w: float
    envelope: float
    x: np.ndarray
    w: np.ndarray


def bed_violation_of_gerstner(prm: GerstnerParams, d, n=256) -> BedViolation:
    """Largest vertical speed of a Gerstner wave on the level ``z = -d``.

    ``envelope`` is ``c exp(k (-d - h0))``, the speed of the particles whose
    orbit centre sits on that level; they cross it moving vertically.

    Raises
    ------
    DomainError
        If ``-d`` is not below the trough.
    """
    if not -d < prm.trough:
        raise DomainError(f"bed z = {-d:g} is not below the trough at {prm.trough:g}")
    fl = GerstnerFlow(prm)
    x = np.linspace(0.0, prm.wavelength, n, endpoint=False)
    _, w = fl.velocity(x, np.full_like(x, -d))
    w = np.asarray(w, dtype=float)
    env = prm.c * math.exp(prm.k * (-d - prm.h0))
    return BedViolation(float(np.max(np.abs(w))), env, x, w)
