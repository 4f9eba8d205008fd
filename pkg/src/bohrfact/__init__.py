"""Spectral factorization of positive trigonometric polynomials and
square approximations on lattice strips."""

__version__ = "0.1.0"

from bohrfact.errors import BohrFactError, PreconditionError  # noqa: E402
from bohrfact.trigpoly import TrigPoly1, TrigPoly2  # noqa: E402

__all__ = ["BohrFactError", "PreconditionError", "TrigPoly1", "TrigPoly2", "__version__"]
