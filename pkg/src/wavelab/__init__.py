"""Gerstner waves on the rotating f-plane: construction and verification.

Modules
-------
core        physical constants, dispersion relation, wave parameters
gerstner    Lagrangian map, its inverse and the Eulerian fields
verify      residual harness for steady flows in the moving frame
hodograph   height function, per-streamline profiles and their identities
gammaflow   the vorticity primitive and the label map built from it
laminar     flat-surface shear flows over a bed
pathtrace   particle paths and orbit diagnostics
cli         the ``wavelab`` command
"""

from .core import GerstnerParams, PhysicalConstants, dispersion_speed
from .gerstner import GerstnerFlow
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "GerstnerFlow", "GerstnerParams", "PhysicalConstants", "dispersion_speed", "__version__"]
