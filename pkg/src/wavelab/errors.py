"""Exception hierarchy shared by the wavelab modules."""


class WavelabError(Exception):
    """Base class for every error raised by wavelab."""


class DomainError(WavelabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ValidationError(WavelabError, ValueError):
    """A parameter set is internally inconsistent."""


class OutOfDomainError(DomainError):
    """A point lies outside the fluid region."""


class StencilError(DomainError):
    """A finite-difference stencil would leave the fluid region."""


class ConvergenceError(WavelabError, RuntimeError):
    """An iterative method failed to reach its tolerance."""


class AccuracyError(ConvergenceError):
    """Adaptive quadrature did not converge."""


class ModelViolationError(WavelabError):
    """Extracted data contradicts the structure expected of the flow."""


class BracketError(DomainError):
    """A value of the vorticity primitive left its admissible bracket."""


class EscapeError(WavelabError, RuntimeError):
    """A traced particle left the fluid region."""


class InsufficientDataError(WavelabError, ValueError):
    """Not enough samples to compute a diagnostic."""


class DependencyError(WavelabError, ValueError):
    """A required upstream quantity was not supplied."""


class BlowUpError(ConvergenceError):
    """An ODE solution left its admissible region during integration."""
