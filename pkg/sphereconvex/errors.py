"""
Exception hierarchy for sphereconvex.
"""
from typing import Optional

import numpy as np


class SphereConvexError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SphereConvexError, ValueError):
    """An argument lies outside the range where the quantity is defined."""


class AuditError(SphereConvexError):
    """A body failed the C2+ or properness audit."""

    def __init__(self, message: str, min_eigenvalue: Optional[float] = None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class RadialError(SphereConvexError):
    """Radial refinement did not converge."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class FitError(SphereConvexError):
    """A least-squares refit left a residual above tolerance."""

    def __init__(self, residual: float, bandwidth: int):
        super().__init__(
            f"refit residual {residual:.3e} above tolerance at bandwidth {bandwidth}; "
            f"raise the bandwidth"
        )
        self.residual = residual
        self.bandwidth = bandwidth


class CenterError(SphereConvexError):
    """A center search failed; carries the best iterate found."""

    def __init__(self, message: str, best_center: Optional[np.ndarray] = None, residual: float = float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.best_center = best_center
        self.residual = residual


class RepresentationError(SphereConvexError):
    """The operation is not supported for this representation or dimension."""


class SpecError(SphereConvexError):
    """A body, family or run document is malformed."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
