"""
Small numerical helpers shared by the classical, gauge and quantum packages.
"""
from typing import Callable, Sequence

import numpy as np

from dualchart.exceptions import NumericalError


def central_gradient(func: Callable[[np.ndarray], float], x: np.ndarray, h: float) -> np.ndarray:
    """
    Gradient of a scalar function by second-order central differences.

    Args:
        func: Scalar function of a flat vector.
        x: Point at which to differentiate.
        h: Finite-difference step.

    Returns:
        The gradient vector, same length as x.

    Raises:
        NumericalError: If an evaluation is not finite; carries the coordinate index.
    """
    if h <= 0:
        raise ValueError(f"Finite-difference step must be positive, got {h}")
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = h
        f_plus = func(x + step)
        f_minus = func(x - step)
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NumericalError(f"Non-finite evaluation while differentiating along coordinate {i}", index=i)
        grad[i] = (f_plus - f_minus) / (2.0 * h)
    return grad


def convergence_order(spacings: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(spacing)."""
    spacings = np.asarray(spacings, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(spacings) != len(errors) or len(spacings) < 2:
        raise ValueError("Need at least two (spacing, error) pairs of equal length")
    if np.any(errors <= 0):
        # exact results carry no order information
        return float("inf")
    slope, _ = np.polyfit(np.log(spacings), np.log(errors), 1)
    return float(slope)
