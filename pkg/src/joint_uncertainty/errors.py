"""Numerical failure types.

Bad input raises plain ``ValueError``; the classes below mark failures of a
numerical procedure on valid input. The CLI maps them to exit status 2.
"""

from typing import Optional, Tuple


class NumericalError(RuntimeError):
    """Base class for numerical procedures that did not reach their target."""


class EigensolverError(NumericalError):
    """Iterative eigensolver hit its iteration cap."""

    def __init__(self, message: str, residual_norm: float, iterations: int):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.iterations = iterations

    def __reduce__(self):
        return type(self), (str(self), self.residual_norm, self.iterations)


class QuadratureError(NumericalError):
    """Quadrature grid too coarse (grid-doubling check failed)."""


class TruncationError(NumericalError):
    """Schmidt mode cap reached before the tail criterion was met."""


class RootFindingError(NumericalError):
    """Gain root finder failed."""

    def __init__(self, message: str, bracket: Optional[Tuple[float, float]] = None):
        super().__init__(message)
        self.bracket = bracket

    def __reduce__(self):
        return type(self), (str(self), self.bracket)
