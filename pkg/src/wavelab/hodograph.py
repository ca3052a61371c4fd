"""Stream function, height function and the identities they satisfy.

In the hodograph variables ``(q, p) = (x, -psi)`` the fluid occupies a
strip ``p <= 0`` (``p = 0`` on the free surface) and each streamline is
the graph ``z = h(q, p)`` of the height function. For flows with
isobaric streamlines the following are checked here::

    1/h_p = Q'(p) h + beta(p)                                  (has)
    (1 + h_q^2)/(2 h_p^2) + alpha h + Q(p) + Gamma(p) = 0      (Bernoulli)
    (1 + h_q^2) h_pp - 2 h_p h_q h_pq + h_p^2 h_qq - Gamma' h_p^3 = 0
    a3 h^3 + a2 h^2 + a1 h + a0 = 0                            (cubic)

with ``alpha = g - 2 omega c`` and ``Q = P/rho + 2 omega p``. Profiles
``Q, beta, Gamma`` are extracted from a field along one vertical line and
the identities are then tested on others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from ._fd import grid_derivative
from .errors import (
    AccuracyError,
    ConvergenceError,
    DependencyError,
    DomainError,
    InsufficientDataError,
    ModelViolationError,
)

# Gauss-Legendre rule used on every panel of the stream-function quadrature.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class HodographRecord(NamedTuple):
    q: np.ndarray
    p: np.ndarray
    h: np.ndarray
    h_q: np.ndarray
    h_p: np.ndarray
    Q: np.ndarray
    beta: np.ndarray
    Gamma: np.ndarray
    gamma: np.ndarray
    K: np.ndarray
    delta: np.ndarray
    E: np.ndarray
    C: float


class CubicCoeffs(NamedTuple):
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray


class HeightSample(NamedTuple):
    h: np.ndarray
    h_q: np.ndarray
    h_p: np.ndarray


def _alpha(fld):
    return fld.consts.g - 2.0 * fld.consts.omega * fld.c


# ---------------------------------------------------------------------------
# stream function and height function
# ---------------------------------------------------------------------------


def stream_function(pt, fld, surface=None, rtol=1e-12, max_panels=256):
    """``psi = int_z^eta(x) (c - u(x, s)) ds`` by composite Gauss-Legendre.

    The panel count doubles until successive estimates agree to
    ``rtol * U * L``. ``surface`` defaults to ``fld.surface``.

    Raises
    ------
    DomainError
        If a point lies above the free surface.
    AccuracyError
        If the quadrature has not settled at ``max_panels`` panels.
    """
    surface = fld.surface if surface is None else surface
    x, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in pt))
    shape = x.shape
    x, z = x.ravel(), z.ravel()
    eta = np.asarray(surface(x)[0], dtype=float)
    U, L = fld.scales
    if np.any(z > eta + 1e-9 * L):
        raise DomainError("point above the free surface")
    span = np.maximum(eta - z, 0.0)
    atol = rtol * U * L

    def estimate(m):
        edges = np.linspace(0.0, 1.0, m + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        half = 0.5 / m
        tau = (mid[:, None] + half * _GL_X[None, :]).ravel()
        wts = np.tile(_GL_W * half, m)
        s = z[None, :] + tau[:, None] * span[None, :]
        u, _ = fld.velocity(np.broadcast_to(x, s.shape), s)
        return span * (wts[:, None] * (fld.c - np.asarray(u))).sum(axis=0)

    m = 1
    prev = estimate(m)
    while m < max_panels:
        m *= 2
        cur = estimate(m)
        if np.all(np.abs(cur - prev) <= atol):
            return cur.reshape(shape)
        prev = cur
    raise AccuracyError(f"stream-function quadrature unsettled after {max_panels} panels")


def _psi(fld, surface):
    if hasattr(fld, "psi"):
        return fld.psi
    return lambda x, z: stream_function((x, z), fld, surface)


def height_function(q, p, fld, surface=None, maxiter=60):
    """Height ``h(q, p)`` of streamline ``p`` above abscissa ``q`` and its partials.

    Solves ``psi(q, h) = -p`` by safeguarded Newton (``psi_z = u - c``);
    ``h_p = 1/(c - u)`` and ``h_q = w/(u - c)`` come from the field at the
    root.

    Raises
    ------
    DomainError
        If ``p > 0`` or no bracketing interval is found above the bed.
    ConvergenceError
        If the iteration does not settle.
    """
    surface = fld.surface if surface is None else surface
    psi = _psi(fld, surface)
    q, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (q, p)))
    shape = q.shape
    q, p = q.ravel().copy(), p.ravel().copy()
    if np.any(p > 0):
        raise DomainError("p must be <= 0 (p = 0 is the surface)")
    U, L = fld.scales
    eta = np.asarray(surface(q)[0], dtype=float)
    floor = -np.inf if fld.depth is None else -fld.depth

    # bracket [lo, hi] with F(lo) >= 0 >= F(hi), F(z) = psi(q, z) + p
    hi = eta.copy()
    lo = eta + 2 * p / fld.c - 1e-3 * L
    for _ in range(60):
        lo = np.maximum(lo, floor)
        F_lo = psi(q, lo) + p
        need = F_lo < 0
        if not np.any(need):
            break
        if np.any(need & (lo <= floor)):
            raise DomainError("no bracketing interval above the bed for the requested p")
        lo = np.where(need, eta - 2 * (eta - lo), lo)
    else:
        raise DomainError("no bracketing interval for the requested p")

    h = np.clip(eta + p / fld.c, lo, hi)
    tol = 4 * np.finfo(float).eps * (np.abs(h) + L)
    for _ in range(maxiter):
        F = psi(q, h) + p
        u, _ = fld.velocity(q, h)
        lo = np.where(F >= 0, h, lo)
        hi = np.where(F <= 0, h, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = h - F / (np.asarray(u) - fld.c)
        ok = (trial >= lo) & (trial <= hi) & np.isfinite(trial)
        new = np.where(ok, trial, 0.5 * (lo + hi))
        done = np.abs(new - h) <= tol
        h = new
        if np.all(done):
            break
    else:
        raise ConvergenceError("height-function iteration did not settle")
    u, w = fld.velocity(q, h)
    u, w = np.asarray(u), np.asarray(w)
    return HeightSample(h.reshape(shape), (w / (u - fld.c)).reshape(shape), (1 / (fld.c - u)).reshape(shape))


# ---------------------------------------------------------------------------
# profile extraction
# ---------------------------------------------------------------------------


def depth_p_grid(fld, n, depth, q0=0.0, surface=None):
    """``n`` streamline values below ``q0``, clustered towards ``p = 0``.

    Evenly spaced heights ``z`` from ``eta(q0)`` down to ``eta(q0) - depth``
    are mapped to ``p = -psi(q0, z)``. Streamlines crowd together near
    the surface, so the samples crowd towards ``p = 0`` by exactly the
    amount the flow requires.
    """
    surface = fld.surface if surface is None else surface
    psi = _psi(fld, surface)
    eta = float(np.asarray(surface(np.array([q0]))[0])[0])
    z = eta - np.linspace(0.0, depth, n)
    p = -np.asarray(psi(np.full_like(z, q0), z), dtype=float)
    p[0] = 0.0
    return p


@dataclass(frozen=True)
class Profiles:
    """Per-streamline functions extracted on the grid ``p`` (ascending order)."""

    p: np.ndarray
    Q: np.ndarray
    Q_p: np.ndarray
    Q_pp: np.ndarray
    beta: np.ndarray
    beta_p: np.ndarray
    Gamma: np.ndarray
    gamma: np.ndarray
    A: float
    B: float
    C: float
    C0: float
    alpha: float
    fit_residual: float
    q0: float

    def gamma_integral(self, p):
        """``int_0^p gamma(s) ds = Gamma(p) + C``, interpolated on the grid."""
        spline = CubicSpline(self.p, self.Gamma)
        return spline(np.asarray(p, dtype=float)) + self.C


def crest_abscissa(fld, surface=None, n=256):
    """Abscissa of the highest surface sample over one period ``2 pi L``."""
    surface = fld.surface if surface is None else surface
    L = fld.scales[1]
    x = np.linspace(0.0, 2 * math.pi * L, n, endpoint=False)
    return float(x[int(np.argmax(np.asarray(surface(x)[0])))])


def extract_profiles(fld, surface=None, p_samples=None, q0=None, n=128, depth=None, lin_tol=1e-8, width=7):
    """Extract ``Q, beta, Gamma, gamma`` along the vertical line ``q = q0``.

    ``q0`` defaults to the crest. Streamlines there are spread apart in
    ``z`` (at the trough they bunch up under the surface), so a uniform
    grid in ``z`` resolves every profile evenly.

    The default samples come from :func:`depth_p_grid` down to ``depth``
    (``3 L``). ``Q = P/rho + 2 omega p`` is read from the field's pressure on each
    streamline and fitted by a line ``A p + B``; ``beta = 1/h_p - Q' h``;
    ``Gamma`` from the Bernoulli relation, which fixes
    ``C = -Gamma(0)``. Derivatives in ``p`` (``Q', Q'', beta'`` and
    ``gamma = Gamma'``) are ``width``-point finite differences in ``z``
    along the line times the exact ``h_p = 1/(c - u)``.
    ``C0`` is the mean of ``beta - (A/(2 alpha)) Gamma - (A^2/alpha) p``.

    Raises
    ------
    InsufficientDataError
        Fewer than 8 samples.
    ModelViolationError
        ``Q`` departs from its line fit by more than ``lin_tol * U**2``
        (pass ``lin_tol=None`` to skip the check).
    """
    U, L = fld.scales
    q0 = crest_abscissa(fld, surface) if q0 is None else float(q0)
    if p_samples is None:
        depth = 3.0 * L if depth is None else depth
        p_samples = depth_p_grid(fld, n, depth, q0, surface)
    p = np.sort(np.asarray(p_samples, dtype=float))
    if p.size < 8:
        raise InsufficientDataError(f"need at least 8 p samples, got {p.size}")
    if p[-1] > 0:
        raise DomainError("p samples must be <= 0")
    rho, om = fld.consts.rho, fld.consts.omega
    alpha = _alpha(fld)

    qq = np.full_like(p, q0)
    hs = height_function(qq, p, fld, surface)
    P = np.asarray(fld.pressure(qq, hs.h), dtype=float)
    Q = P / rho + 2 * om * p
    A, B = np.polyfit(p, Q, 1)
    fit_res = float(np.max(np.abs(Q - (A * p + B))))
    if lin_tol is not None and fit_res > lin_tol * U * U:
        raise ModelViolationError(
            f"Q(p) is not linear: fit residual {fit_res:.3e} exceeds {lin_tol * U * U:.3e}"
        )
    # derivatives along the vertical line, where every profile is smooth,
    # converted with d/dp = h_p d/dz
    z, hp = hs.h, hs.h_p
    d = lambda f: hp * grid_derivative(z, f, 1, width)  # noqa: E731
    Q_p = d(Q)
    Q_pp = d(Q_p)
    beta = 1 / hp - Q_p * z
    Gamma = -((1 + hs.h_q**2) / (2 * hp**2) + alpha * z + Q)
    gamma = d(Gamma)
    beta_p = d(beta)
    C = -float(CubicSpline(p, Gamma)(0.0))
    C0 = float(np.mean(beta - A / (2 * alpha) * Gamma - A * A / alpha * p))
    return Profiles(p, Q, Q_p, Q_pp, beta, beta_p, Gamma, gamma, float(A), float(B), C, C0, alpha, fit_res, q0)


def hodograph_records(q, prof: Profiles, fld, surface=None, constants=None):
    """Records on the grid ``q x prof.p`` (shape ``(len(q), len(p))``).

    ``K`` and ``delta`` need ``constants`` (a
    :class:`~wavelab.gammaflow.GammaConstants`); without them they are NaN.
    """
    q = np.asarray(q, dtype=float)
    Qg, Pg = np.meshgrid(q, prof.p, indexing="ij")
    hs = height_function(Qg, Pg, fld, surface)
    row = lambda v: np.broadcast_to(v, Qg.shape)  # noqa: E731
    if constants is not None:
        K = row(-np.sqrt(-(prof.Gamma + constants.c3 / constants.c2)) / constants.A)
    else:
        K = np.full(Qg.shape, np.nan)
    delta = np.full(Qg.shape, np.nan)
    E = (1 + hs.h_q**2) / (2 * hs.h_p**2) + prof.alpha * hs.h + row(prof.Q) + row(prof.Gamma) + prof.C
    return HodographRecord(
        Qg, Pg, hs.h, hs.h_q, hs.h_p, row(prof.Q), row(prof.beta), row(prof.Gamma), row(prof.gamma), K, delta, E,
        prof.C,
    )


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def _need(prof):
    if prof is None:
        raise DependencyError("extracted profiles are required")


def check_has(rec: HodographRecord, prof: Profiles):
    """``|1/h_p - Q' h - beta|`` on every record."""
    _need(prof)
    return np.abs(1 / rec.h_p - prof.Q_p * rec.h - rec.beta)


def beta_spread(rec: HodographRecord, prof: Profiles):
    """Spread over ``q`` of ``beta = 1/h_p - Q' h`` per streamline."""
    _need(prof)
    b = 1 / rec.h_p - prof.Q_p * rec.h
    return np.max(b, axis=0) - np.min(b, axis=0)


def bernoulli_residual(rec: HodographRecord, prof: Profiles):
    """``|(1 + h_q^2)/(2 h_p^2) + alpha h + Q + Gamma|`` on every record."""
    _need(prof)
    return np.abs((1 + rec.h_q**2) / (2 * rec.h_p**2) + prof.alpha * rec.h + rec.Q + rec.Gamma)


def height_pde_residual(q, p, hfun, Gamma_p, dq, dp):
    """First equation of the height-function system by finite differences.

    ``hfun(q, p)`` evaluates the height function; ``Gamma_p`` is
    ``Gamma'(p)`` (a number or array broadcastable with ``q, p``). The
    partials come from centred 9-point stencils with steps ``dq, dp``.
    """
    q, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (q, p)))
    offs = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
    qs = np.stack([q + i * dq for i, _ in offs])
    ps = np.stack([p + j * dp for _, j in offs])
    if np.any(ps > 0):
        raise DomainError("stencil reaches above the surface streamline p = 0")
    H = np.asarray(hfun(qs, ps), dtype=float).reshape(qs.shape)
    h0, hqp, hqm, hpp_, hpm = H[0], H[1], H[2], H[3], H[4]
    h_q = (hqp - hqm) / (2 * dq)
    h_p = (hpp_ - hpm) / (2 * dp)
    h_qq = (hqp - 2 * h0 + hqm) / dq**2
    h_pp = (hpp_ - 2 * h0 + hpm) / dp**2
    h_qp = (H[5] - H[6] - H[7] + H[8]) / (4 * dq * dp)
    return (1 + h_q**2) * h_pp - 2 * h_p * h_q * h_qp + h_p**2 * h_qq - Gamma_p * h_p**3


def cubic_coefficients(prof: Profiles, alpha=None) -> CubicCoeffs:
    """Coefficients of the cubic satisfied by ``h`` on each streamline.

    ``a3 h^3 + a2 h^2 + a1 h + a0 = (Q' h + beta) (b2 h^2 + b1 h + b0)``
    where the quadratic factor is :func:`reduced_coefficients`; all
    coefficients vanish for non-laminar flows with isobaric streamlines.
    """
    _need(prof)
    al = prof.alpha if alpha is None else alpha
    Q, Qp, Qpp = prof.Q, prof.Q_p, prof.Q_pp
    b, bp, G, Gp = prof.beta, prof.beta_p, prof.Gamma, prof.gamma
    a0 = -al * b + 2 * b * bp * (Q + G) - Qp * b**2 - b**2 * (Qp + Gp)
    a1 = (
        -al * Qp
        - 2 * Qp * b * (Qp + Gp)
        + 2 * (Q + G) * (Qpp * b + Qp * bp)
        - 2 * Qp**2 * b
        + 2 * al * b * bp
    )
    a2 = -(Qp**3) - (Qp + Gp) * Qp**2 + 2 * al * (Qpp * b + Qp * bp) + 2 * Qp * Qpp * (Q + G)
    a3 = 2 * al * Qp * Qpp
    return CubicCoeffs(a0, a1, a2, a3)


def reduced_coefficients(prof: Profiles, alpha=None):
    """``(b0, b1, b2)`` of the quadratic ``b2 h^2 + b1 h + b0 = 0``."""
    _need(prof)
    al = prof.alpha if alpha is None else alpha
    Q, Qp, Qpp = prof.Q, prof.Q_p, prof.Q_pp
    b, bp, G, Gp = prof.beta, prof.beta_p, prof.Gamma, prof.gamma
    b2 = 2 * al * Qpp
    b1 = -(2 * Qp + Gp) * Qp + 2 * al * bp + 2 * (Q + G) * Qpp
    b0 = -al - (2 * Qp + Gp) * b + 2 * (Q + G) * bp
    return b0, b1, b2


def nondimensional_coefficients(coeffs: CubicCoeffs, U, L) -> CubicCoeffs:
    """Scale ``a_j`` by ``L**(j+1) / U**3``, its natural unit."""
    return CubicCoeffs(*(np.asarray(a) * L ** (j + 1) / U**3 for j, a in enumerate(coeffs)))


class CircleCheck(NamedTuple):
    residual: np.ndarray
    radius: np.ndarray
    K: np.ndarray
    radial_deviation: np.ndarray


def circle_identity(rec: HodographRecord, constants) -> CircleCheck:
    """Residual of ``(h + beta/A)^2 h_q^2 + (h + beta/A + alpha/A^2)^2 = K^2``.

    ``K = -(1/A) sqrt(-Gamma - c3/c2)``; ``radius`` is the square root of
    the left side, so ``radial_deviation = |radius - K|``.
    """
    if constants is None:
        raise DependencyError("circle identity needs the gamma-chain constants")
    A, al = constants.A, constants.alpha
    e = rec.h + rec.beta / A
    lhs = e**2 * rec.h_q**2 + (e + al / A**2) ** 2
    gap = -(rec.Gamma + constants.c3 / constants.c2)
    residual = np.abs(lhs - gap / A**2)
    radius = np.sqrt(lhs)
    K = -np.sqrt(np.maximum(gap, 0.0)) / A
    return CircleCheck(residual, radius, K, np.abs(radius - K))


def crest_shift(p, fld, surface=None, wavelength=None, n=64):
    """Shift ``delta(p)``: minus the abscissa of the crest of streamline ``p``.

    The crest is the maximum of ``h(., p)`` over one wavelength, refined as
    the zero of ``h_q``. Returned in ``(-wavelength/2, wavelength/2]``.
    """
    U, L = fld.scales
    lam = 2 * math.pi * L if wavelength is None else wavelength
    p = np.atleast_1d(np.asarray(p, dtype=float))
    qs = np.linspace(-lam / 2, lam / 2, n, endpoint=False)
    out = np.empty_like(p)
    for i, pi in enumerate(p):
        hs = height_function(qs, np.full_like(qs, pi), fld, surface)
        j = int(np.argmax(hs.h))
        lo, hi = qs[j] - lam / n, qs[j] + lam / n

        def slope(qq, pi=pi):
            return float(height_function(np.array([qq]), np.array([pi]), fld, surface).h_q[0])

        if slope(lo) * slope(hi) > 0:
            qc = qs[j]
        else:
            qc = brentq(slope, lo, hi, xtol=1e-12 * L)
        out[i] = -(((qc + lam / 2) % lam) - lam / 2)
    return out
