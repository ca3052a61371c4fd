"""The vorticity primitive Gamma(p) and the quantities built from it.

With ``Q(p) = A p + B`` and ``beta(p) = (A/(2 alpha)) Gamma + (A^2/alpha) p + C0``
the primitive of the vorticity satisfies::

    (c0 Gamma + c1) Gamma' = -(c2 Gamma + c3)

    c0 = A^2/(2 alpha)       c1 = A^2 B/alpha - A C0
    c2 = A^3/alpha           c3 = 2 A^3 B/alpha - alpha A - 2 A^2 C0

whose first integral is ``Gamma + (alpha^2/A^2) ln(-Gamma - c3/c2) + 2 A p = C1``.
The solution is integrated in terms of the gap ``y = -Gamma - c3/c2``,
which obeys ``y' = -2 A y / (d - y)`` with ``d = c1/c0 - c3/c2``; near the
equilibrium ``y -> 0`` it keeps full relative precision where ``Gamma``
itself would not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import kernels
from .core import GerstnerParams, PhysicalConstants
from .errors import BlowUpError, BracketError, DomainError, ValidationError

#: Default RK4 sub-steps per unit of nondimensional p.
STEPS_PER_UNIT = 2048


def ode_coefficients(A, B, C0, alpha):
    """``(c0, c1, c2, c3)`` of the Gamma equation.

    Raises
    ------
    DomainError
        If ``alpha == 0`` (excluded for non-laminar flows) or ``A == 0``.
    """
    if alpha == 0:
        raise DomainError("alpha = g - 2 omega c must be nonzero")
    if A == 0:
        raise DomainError("slope A of Q(p) must be nonzero")
    c0 = A * A / (2 * alpha)
    c1 = A * A * B / alpha - A * C0
    c2 = A**3 / alpha
    c3 = 2 * A**3 * B / alpha - alpha * A - 2 * A * A * C0
    return c0, c1, c2, c3


@dataclass(frozen=True)
class GammaConstants:
    """Constants of the Gamma chain; ``C1`` stays NaN until calibrated."""

    A: float
    B: float
    C0: float
    alpha: float
    c0: float
    c1: float
    c2: float
    c3: float
    C1: float = math.nan

    @classmethod
    def build(cls, A, B, C0, alpha, C1=math.nan):
        return cls(A, B, C0, alpha, *ode_coefficients(A, B, C0, alpha), C1)

    @classmethod
    def from_profiles(cls, prof):
        return cls.build(prof.A, prof.B, prof.C0, prof.alpha)

    @property
    def lower(self):
        """Lower end ``-c1/c0`` of the admissible bracket for Gamma."""
        return -self.c1 / self.c0

    @property
    def upper(self):
        """Upper end ``-c3/c2`` (the equilibrium)."""
        return -self.c3 / self.c2

    @property
    def width(self):
        """``d = c1/c0 - c3/c2``, the bracket width."""
        return self.c1 / self.c0 - self.c3 / self.c2

    @property
    def k(self):
        return self.A * self.A / self.alpha

    @property
    def p_scale(self):
        """Natural unit of ``p``: ``alpha^2/|A|^3`` (``c/k`` for Gerstner)."""
        return self.alpha**2 / abs(self.A) ** 3

    def with_C1(self, C1):
        return replace(self, C1=float(C1))


def gerstner_constants(prm: GerstnerParams, consts: PhysicalConstants | None = None) -> GammaConstants:
    """Closed-form constants of a Gerstner wave (for cross-checks)."""
    consts = prm.consts if consts is None else consts
    k, c, b0, h0 = prm.k, prm.c, prm.b0, prm.h0
    E0sq = math.exp(2 * k * b0)
    B = consts.p_atm / consts.rho
    C = B + c * c / 2 + c * c * E0sq / 2 + k * c * c * (h0 + b0)
    C0 = c + k * c * (h0 + b0) - C / (2 * c)
    C1 = -C + 2 * c * c * math.log(c) + 2 * k * c * c * b0
    return GammaConstants.build(prm.A, B, C0, prm.alpha, C1)


class GammaProfile(NamedTuple):
    p_grid: np.ndarray
    Gamma: np.ndarray
    gamma: np.ndarray
    K: np.ndarray
    T: np.ndarray
    gap: np.ndarray


def _check_bracket(y, gc: GammaConstants, closed_upper=True):
    y = np.asarray(y, dtype=float)
    low_ok = y >= 0 if closed_upper else y > 0
    if not np.all(low_ok & (y < gc.width)):
        raise BracketError(
            f"Gamma outside the bracket ({gc.lower:.6g}, {gc.upper:.6g})"
        )


def integrate_gamma(Gamma0, p_range, gc: GammaConstants, n_out=513, max_step=None, p_out=None, gap0=None):
    """Integrate the Gamma equation from ``p_range[0]`` down to ``p_range[1]``.

    Classical RK4 on the gap ``y = -Gamma - c3/c2``, sub-steps no longer than
    ``max_step`` (default ``p_scale / 2048``), output on ``n_out`` uniform
    nodes or on ``p_out``. ``gap0`` may be passed instead of ``Gamma0`` when
    it is known more precisely.

    Raises
    ------
    BracketError
        If ``Gamma0`` lies outside ``(-c1/c0, -c3/c2]``.
    BlowUpError
        If the solution leaves the bracket during integration.
    """
    if gc.width <= 0:
        raise BracketError(f"empty bracket: -c1/c0 = {gc.lower:.6g} is not below -c3/c2 = {gc.upper:.6g}")
    y0 = -Gamma0 - gc.c3 / gc.c2 if gap0 is None else gap0
    _check_bracket(y0, gc)
    if p_out is None:
        p_out = np.linspace(p_range[0], p_range[1], n_out)
    p_out = np.asarray(p_out, dtype=float)
    step = gc.p_scale / STEPS_PER_UNIT if max_step is None else max_step
    y, j = kernels.rk4_gap(y0, p_out, -2 * gc.A, gc.width, step)
    if j >= 0:
        raise BlowUpError(f"Gamma left its bracket near p = {p_out[j]:.6g}")
    return _profile(p_out, y, gc)


def _profile(p, y, gc):
    Gamma = -y - gc.c3 / gc.c2
    gamma = 2 * gc.A * y / (gc.width - y)
    K = -np.sqrt(y) / gc.A
    with np.errstate(divide="ignore"):
        T = np.log(gc.k * K) / gc.k
    return GammaProfile(p, Gamma, gamma, K, T, y)


def first_integral(profile: GammaProfile, gc: GammaConstants):
    """``Gamma + (alpha^2/A^2) ln(-Gamma - c3/c2) + 2 A p`` on the grid."""
    y = profile.gap
    if np.any(~(y > 0)):
        raise BracketError("first integral needs -Gamma - c3/c2 > 0 (equilibrium reached)")
    r = (gc.alpha / gc.A) ** 2
    return -y - gc.c3 / gc.c2 + r * np.log(y) + 2 * gc.A * profile.p_grid


def implicit_residual(profile: GammaProfile, gc: GammaConstants):
    """Calibrate ``C1`` at the first node and return ``(C1, max |F - C1|)`` over the rest."""
    F = first_integral(profile, gc)
    C1 = float(F[0])
    return C1, float(np.max(np.abs(F[1:] - C1))) if F.size > 1 else 0.0


def vorticity_of_gamma(Gamma, gc: GammaConstants):
    """``gamma = -2 A (Gamma + c3/c2) / (Gamma + c1/c0)``."""
    Gamma = np.asarray(Gamma, dtype=float)
    y = -Gamma - gc.c3 / gc.c2
    _check_bracket(y, gc)
    return 2 * gc.A * y / (gc.width - y)


def K_and_T(profile: GammaProfile, gc: GammaConstants, prm: GerstnerParams | None = None):
    """Orbit radius ``K(p)`` and label ``T(p) = ln(k K)/k`` with ``k = A^2/alpha``.

    When ``prm`` is given its wavenumber must agree with ``A^2/alpha``.

    Raises
    ------
    DomainError
        If some ``K`` vanishes (degenerate streamline).
    """
    if prm is not None and not math.isclose(prm.k, gc.k, rel_tol=1e-6):
        raise ValidationError(f"wavenumber {prm.k!r} disagrees with A^2/alpha = {gc.k!r}")
    if np.any(profile.K <= 0):
        raise DomainError("K(p) vanishes: degenerate streamline")
    return profile.K, profile.T


def T_prime(profile: GammaProfile, gc: GammaConstants):
    """``T'(p) = -(alpha/(2 A^4)) gamma / K^2``."""
    return -gc.alpha / (2 * gc.A**4) * profile.gamma / profile.K**2


def beta_of_p(profile: GammaProfile, gc: GammaConstants, alpha=None):
    """``beta = (A/(2 alpha)) Gamma + (A^2/alpha) p + C0``."""
    al = gc.alpha if alpha is None else alpha
    return gc.A / (2 * al) * profile.Gamma + gc.A**2 / al * profile.p_grid + gc.C0


def beta_log_form(profile: GammaProfile, gc: GammaConstants):
    """``beta = -(alpha/(2A)) ln(A^2 K^2) + A C1/(2 alpha) + C0``.

    Equivalent to :func:`beta_of_p` once ``C1`` is calibrated.
    """
    if math.isnan(gc.C1):
        raise DomainError("C1 not calibrated; use GammaConstants.with_C1")
    A, al = gc.A, gc.alpha
    return -al / (2 * A) * np.log(A * A * profile.K**2) + A * gc.C1 / (2 * al) + gc.C0


def vorticity_primitive(gc: GammaConstants, Gamma0, C):
    """Callable ``p -> int_0^p gamma = Gamma(p) + C`` for ``p <= 0``.

    Each call integrates from ``p = 0`` (where ``Gamma = Gamma0``) through
    the requested points in decreasing order.
    """

    def G(p):
        p = np.asarray(p, dtype=float)
        flat = p.ravel()
        if np.any(flat > 0):
            raise DomainError("primitive defined for p <= 0 only")
        uniq, inv = np.unique(flat, return_inverse=True)
        nodes = np.concatenate([[0.0], uniq[::-1]])
        prof = integrate_gamma(Gamma0, None, gc, p_out=nodes)
        vals = prof.Gamma[1:][::-1]
        return (vals[inv] + C).reshape(p.shape)

    return G
