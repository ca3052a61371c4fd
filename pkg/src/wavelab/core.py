"""Physical constants, wave parameters and the f-plane dispersion relation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, ValidationError

#: Relative tolerance used when checking that (k, c) satisfy the dispersion relation.
CONSISTENCY_RTOL = 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    """Rotation rate, gravity, density and atmospheric pressure (SI units)."""

    omega: float = 7.3e-5
    g: float = 9.8
    rho: float = 1000.0
    p_atm: float = 101325.0

    def __post_init__(self):
        if not self.g > 0:
            raise DomainError(f"gravitational acceleration must be positive, got {self.g}")
        if not self.rho > 0:
            raise DomainError(f"density must be positive, got {self.rho}")
        if not self.omega >= 0:
            raise DomainError(f"angular speed must be non-negative, got {self.omega}")

    def alpha(self, c: float) -> float:
        """Reduced gravity ``g - 2*omega*c`` felt in the frame moving at speed ``c``."""
        return self.g - 2.0 * self.omega * c


def dispersion_speed(k: float, consts: PhysicalConstants) -> float:
    """Speed of a Gerstner wave of wavenumber ``k`` on the rotating f-plane.

    Positive root of ``k c**2 + 2 omega c - g = 0``. The rationalised form
    ``g / (omega + sqrt(omega**2 + g k))`` is used; it equals
    ``(-omega + sqrt(omega**2 + g k)) / k`` but does not cancel when
    ``omega**2 >> g k``.
    """
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    w = consts.omega
    return consts.g / (w + math.sqrt(w * w + consts.g * k))


def dispersion_defect(k: float, c: float, consts: PhysicalConstants) -> float:
    """Signed value of ``k c**2 + 2 omega c - g``."""
    return k * c * c + 2.0 * consts.omega * c - consts.g


def derive_constants(k: float, c: float, consts: PhysicalConstants) -> tuple[float, float, float]:
    """Hodograph-side constants ``(A, alpha, m)`` of a Gerstner wave.

    ``alpha = g - 2 omega c``, ``A = -k c`` and ``m = -alpha / A``. These are
    the values for which ``k = A**2/alpha`` and ``m = c``.
    """
    if not k > 0:
        raise DomainError("wavenumber must be positive")
    defect = dispersion_defect(k, c, consts)
    if abs(defect) > CONSISTENCY_RTOL * consts.g:
        raise ValidationError(
            f"(k, c) = ({k!r}, {c!r}) violates the dispersion relation by {defect:.3e}"
        )
    alpha = consts.alpha(c)
    A = -k * c
    m = -alpha / A
    return A, alpha, m


@dataclass(frozen=True)
class GerstnerParams:
    """Parameters of one Gerstner wave.

    Build with :meth:`from_wavenumber`; the direct constructor checks that
    ``c`` and the derived constants are consistent.

    Attributes
    ----------
    k : float
        Wavenumber (1/m).
    b0 : float
        Label of the free surface, ``b0 <= 0`` (m). ``b0 == 0`` is the
        cusped cycloid; it is accepted but :attr:`is_cusped` flags it.
    h0 : float
        Vertical offset of the orbit centres (m).
    c : float
        Wave speed (m/s).
    A, alpha, m : float
        Slope of ``Q(p)``, reduced gravity and the speed recovered from them.
    """

    k: float
    b0: float
    h0: float
    c: float
    A: float
    alpha: float
    m: float
    consts: PhysicalConstants = field(default_factory=PhysicalConstants, compare=False)

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError("wavenumber must be positive")
        if not self.b0 <= 0:
            raise DomainError(f"surface label b0 must be <= 0, got {self.b0}")
        A, alpha, m = derive_constants(self.k, self.c, self.consts)
        for name, got, want in (("A", self.A, A), ("alpha", self.alpha, alpha), ("m", self.m, m)):
            if not math.isclose(got, want, rel_tol=CONSISTENCY_RTOL, abs_tol=0.0):
                raise ValidationError(f"{name}={got!r} is inconsistent with (k, c); expected {want!r}")

    @classmethod
    def from_wavenumber(
        cls, k: float, b0: float = 0.0, h0: float = 0.0, consts: PhysicalConstants | None = None
    ) -> "GerstnerParams":
        consts = PhysicalConstants() if consts is None else consts
        c = dispersion_speed(k, consts)
        A, alpha, m = derive_constants(k, c, consts)
        return cls(k=k, b0=b0, h0=h0, c=c, A=A, alpha=alpha, m=m, consts=consts)

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.k

    @property
    def period(self) -> float:
        return 2.0 * math.pi / (self.k * self.c)

    @property
    def is_cusped(self) -> bool:
        return self.b0 == 0.0

    @property
    def surface_radius(self) -> float:
        """Orbit radius ``exp(k b0)/k`` of the surface particles."""
        return math.exp(self.k * self.b0) / self.k

    @property
    def trough(self) -> float:
        return self.h0 + self.b0 - self.surface_radius

    @property
    def crest(self) -> float:
        return self.h0 + self.b0 + self.surface_radius


@dataclass(frozen=True)
class FreeSurfaceSpec:
    """Flat-surface level, bed depth and bed stream-function value.

    Any field may be ``None`` when it does not apply (deep water has no
    ``d`` or ``p0``).
    """

    eta0: float | None = None
    d: float | None = None
    p0: float | None = None

    def __post_init__(self):
        if self.d is not None and not self.d > 0:
            raise DomainError(f"bed depth must be positive, got {self.d}")
        if self.p0 is not None and not self.p0 > 0:
            raise DomainError(f"bed stream-function value must be positive, got {self.p0}")
