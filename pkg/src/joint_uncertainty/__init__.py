"""Joint Uncertainty - minimum time-delay / sum-frequency products of multiphoton states."""

__version__ = "0.1.0"

from .config import RunConfig
from .minimizer import GroundStateResult, minimize_over_xi

__all__ = ["RunConfig", "GroundStateResult", "minimize_over_xi", "__version__"]
