"""
Exception hierarchy shared by all dualchart packages.
"""
from typing import Optional, Sequence


class DualChartError(Exception):
    """Base exception for dualchart errors."""
    pass


class DimensionError(DualChartError):
    """Raised when array lengths or matrix shapes do not agree."""
    pass


class NumericalError(DualChartError):
    """Raised when a function evaluation produces a non-finite value."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class DivergenceError(DualChartError):
    """Raised when an integrator produces a non-finite state."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class AxisError(DualChartError):
    """Raised when a lattice axis index is out of range."""
    pass


class DegenerateTestFieldError(DualChartError):
    """Raised when the curvature test field (nearly) vanishes at a needed point."""

    def __init__(self, message: str, point: Sequence[int]):
        super().__init__(message)
        self.point = tuple(int(i) for i in point)


class PlaquetteOutOfGridError(DualChartError):
    """Raised when a plaquette or loop leaves the lattice."""
    pass


class TruncationError(DualChartError):
    """Raised when a truncated Hilbert space is too small for the request."""
    pass


class NonHermitianError(DualChartError):
    """Raised when an operator that must be hermitian is not."""
    pass


class NonCommutingError(DualChartError):
    """Raised when a pair of operators fails the commutation precondition."""

    def __init__(self, message: str, defect: float):
        super().__init__(message)
        self.defect = defect
