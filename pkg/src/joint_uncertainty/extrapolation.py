"""Infinite-basis extrapolation of R_n^(m).

R_n^(m) ~ R_inf + sum_{i=1..order} a_i m^-i is fitted by linear least
squares in x = 1/m. The fit itself runs in a Chebyshev basis on the sampled
x-range; the intercept is its value at x = 0. The reported condition number
is that of the column-scaled monomial design {1, m^-1, ..., m^-order}.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 6


@dataclass(frozen=True)
class ConvergenceSeries:
    """R values for one photon number over increasing mode counts."""

    n: int
    points: Tuple[Tuple[int, float], ...]

    def __post_init__(self) -> None:
        modes = [m for m, _ in self.points]
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise ValueError(f"mode counts must be strictly increasing, got {modes}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[Tuple[int, float]]) -> "ConvergenceSeries":
        return cls(n=n, points=tuple((int(m), float(r)) for m, r in pairs))

    @property
    def modes(self) -> np.ndarray:
        return np.array([m for m, _ in self.points], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([r for _, r in self.points], dtype=float)

    def monotonicity_violations(self, slack: float = 1e-9) -> List[Tuple[int, int]]:
        """Consecutive (m, m') pairs where R grows by more than ``slack``."""
        return [
            (m0, m1)
            for (m0, r0), (m1, r1) in zip(self.points, self.points[1:])
            if r1 > r0 + slack
        ]


@dataclass(frozen=True)
class ExtrapolationFit:
    """Least-squares fit of a convergence series."""

    n: int
    order: int
    r_inf: float
    coefficients: Tuple[float, ...]
    rms_residual: float
    condition_number: float
    point_count: int

    @property
    def lower_bound(self) -> float:
        return 1.0 - 2.0 / self.n

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "order": self.order,
            "r_inf": self.r_inf,
            "coefficients": list(self.coefficients),
            "rms_residual": self.rms_residual,
            "condition_number": self.condition_number,
            "point_count": self.point_count,
            "lower_bound": self.lower_bound,
        }


def design_condition_number(modes: np.ndarray, order: int) -> float:
    """Condition number of the monomial design in 1/m after unit-norm column scaling."""
    design = np.vander(1.0 / modes, order + 1, increasing=True)
    design = design / np.linalg.norm(design, axis=0)
    return float(np.linalg.cond(design))


def fit_series(series: ConvergenceSeries, order: int = DEFAULT_ORDER) -> ExtrapolationFit:
    """Fit R(m) = R_inf + sum a_i m^-i and return the intercept.

    Needs at least order + 2 points.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    count = len(series.points)
    if count < order + 2:
        raise ValueError(
            f"underdetermined: order {order} needs at least {order + 2} points, got {count}"
        )

    violations = series.monotonicity_violations()
    if violations:
        logger.warning(f"n={series.n}: R increases with m at {violations}")

    x = 1.0 / series.modes
    values = series.values
    chebyshev = Chebyshev.fit(x, values, order)
    residuals = values - chebyshev(x)
    monomial = chebyshev.convert(kind=Polynomial)
    coefficients = np.zeros(order + 1)
    coefficients[: monomial.coef.size] = monomial.coef

    fit = ExtrapolationFit(
        n=series.n,
        order=order,
        r_inf=float(chebyshev(0.0)),
        coefficients=tuple(float(c) for c in coefficients[1:]),
        rms_residual=float(np.sqrt(np.mean(residuals**2))),
        condition_number=design_condition_number(series.modes, order),
        point_count=count,
    )
    logger.info(
        f"n={series.n}: R_inf={fit.r_inf:.6f} (order {order}, rms {fit.rms_residual:.2e}, "
        f"cond {fit.condition_number:.2e})"
    )
    return fit


def order_stability(series: ConvergenceSeries, order: int = DEFAULT_ORDER) -> float:
    """|R_inf(order) - R_inf(order - 1)|."""
    return abs(fit_series(series, order).r_inf - fit_series(series, order - 1).r_inf)
