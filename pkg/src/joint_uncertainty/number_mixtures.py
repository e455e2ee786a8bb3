"""Photon-number mixtures: pair-weighted averages and lower bounds on dtau dOmega.

Two-photon observables are diagonal in the photon number, so a mixed state
contributes sector by sector, each weighted by its pair count n(n-1). With
S_k = sum_{n>=3} p_n n^k the bound chain for dtau dOmega reads

    full product  >=  <n(n-1) dtau_n dOmega_n> / <n(n-1)>          (Cauchy-Schwarz)
                  >=  <n(n-1) sqrt(1 - 2/n)> / <n(n-1)>            (subspace bound)
                  >=  sqrt(1 - 2 S_1/S_2) (S_2 - S_1) / <n(n-1)>    (Jensen, weights p_n n)
                  >=  sqrt(1 - 2 S_0/S_1) (S_2 - S_1) / <n(n-1)>    (general bound)
                  >=  sqrt(1 - 2/<n>) (1 - 2 p_2 / <n(n-1)>)        (<n> >= 2 only)
"""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.special import gammaln

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-12
TAIL_MASS = 1e-12
CHAIN_SLACK = 1e-12

SubspaceValues = Union[Mapping[int, float], Sequence[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class PhotonNumberDistribution:
    """Probabilities p_0..p_N of measuring n photons."""

    probabilities: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1-D sequence")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and nonnegative")
        total = float(p.sum())
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @classmethod
    def from_weights(cls, weights: Sequence[float], label: str = "") -> "PhotonNumberDistribution":
        """Normalize nonnegative weights into a distribution."""
        w = np.asarray(weights, dtype=float)
        total = w.sum()
        if total <= 0:
            raise ValueError("weights must have positive total")
        return cls(w / total, label)

    @property
    def cutoff(self) -> int:
        return self.probabilities.size - 1

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.arange(self.probabilities.size, dtype=float)

    def p(self, n: int) -> float:
        return float(self.probabilities[n]) if 0 <= n <= self.cutoff else 0.0

    @property
    def mean(self) -> float:
        return float(self.probabilities @ self.photon_numbers)

    @property
    def pair_mean(self) -> float:
        """<n(n-1)>."""
        n = self.photon_numbers
        return float(self.probabilities @ (n * (n - 1)))

    def upper_moment(self, power: int) -> float:
        """S_power = sum_{n>=3} p_n n^power."""
        n = self.photon_numbers[3:]
        return float(self.probabilities[3:] @ n**power)


# =============================================================================
# Generators
# =============================================================================


def poisson(mean: float, tail: float = TAIL_MASS) -> PhotonNumberDistribution:
    """Coherent-state statistics."""
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    cutoff = int(stats.poisson.isf(tail, mean)) + 1
    pmf = stats.poisson.pmf(np.arange(cutoff + 1), mean)
    return PhotonNumberDistribution.from_weights(pmf, f"poisson:{mean:g}")


def thermal(mean: float, tail: float = TAIL_MASS) -> PhotonNumberDistribution:
    """Bose-Einstein statistics p_n = mean^n / (1 + mean)^(n+1)."""
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    ratio = mean / (1.0 + mean)
    cutoff = int(math.ceil(math.log(tail) / math.log(ratio))) + 1
    pmf = (1.0 - ratio) * ratio ** np.arange(cutoff + 1)
    return PhotonNumberDistribution.from_weights(pmf, f"thermal:{mean:g}")


def squeezed_vacuum(mean: float, tail: float = TAIL_MASS) -> PhotonNumberDistribution:
    """Single-mode squeezed vacuum with sinh^2(r) = mean; odd p_n vanish."""
    if mean <= 0:
        raise ValueError(f"mean must be positive, got {mean}")
    r = math.asinh(math.sqrt(mean))
    log_ratio = 2.0 * math.log(math.tanh(r))
    pairs = int(math.ceil(math.log(tail) / log_ratio)) + 1
    k = np.arange(pairs + 1)
    log_p = (
        gammaln(2 * k + 1)
        - 2.0 * gammaln(k + 1)
        - 2 * k * math.log(2.0)
        + k * log_ratio
        - math.log(math.cosh(r))
    )
    pmf = np.zeros(2 * pairs + 1)
    pmf[0::2] = np.exp(log_p)
    return PhotonNumberDistribution.from_weights(pmf, f"bsv:{mean:g}")


def from_file(path: Path) -> PhotonNumberDistribution:
    """One probability per line, or ``n,p`` rows; ``#`` starts a comment."""
    path = Path(path)
    weights: Dict[int, float] = {}
    with open(path, newline="") as f:
        rows = [row for row in csv.reader(f) if row and not row[0].strip().startswith("#")]
    for position, row in enumerate(rows):
        cells = [c.strip() for c in row if c.strip()]
        if not cells:
            continue
        try:
            if len(cells) == 1:
                weights[position] = float(cells[0])
            elif len(cells) == 2:
                weights[int(cells[0])] = float(cells[1])
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"{path}: cannot parse row {position + 1}: {row}") from None
    if not weights:
        raise ValueError(f"{path}: no probabilities found")
    pmf = np.zeros(max(weights) + 1)
    for n, value in weights.items():
        pmf[n] = value
    total = pmf.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"{path}: probabilities sum to {total:.9g}")
    return PhotonNumberDistribution.from_weights(pmf, f"file:{path}")


def parse_distribution(text: str) -> PhotonNumberDistribution:
    """``poisson:<mean>``, ``thermal:<mean>``, ``bsv:<mean>`` or ``file:<path>``."""
    kind, _, argument = text.partition(":")
    kind = kind.strip().lower()
    if not argument:
        raise ValueError(f"distribution {text!r} must look like kind:value")
    if kind == "file":
        return from_file(Path(argument))
    generators = {"poisson": poisson, "thermal": thermal, "bsv": squeezed_vacuum}
    if kind not in generators:
        raise ValueError(f"unknown distribution kind {kind!r}; use poisson, thermal, bsv or file")
    try:
        mean = float(argument)
    except ValueError:
        raise ValueError(f"distribution mean must be a number, got {argument!r}") from None
    return generators[kind](mean)


def random_distribution(
    rng: np.random.Generator, max_cutoff: int = 40, min_mean: float = 2.0
) -> PhotonNumberDistribution:
    """Random Dirichlet distribution with <n> >= min_mean."""
    while True:
        cutoff = int(rng.integers(3, max_cutoff + 1))
        weights = rng.dirichlet(np.full(cutoff + 1, 0.5))
        dist = PhotonNumberDistribution.from_weights(weights, "random")
        if dist.mean >= min_mean:
            return dist


def random_subspace_values(
    dist: PhotonNumberDistribution, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Random dtau_n, dOmega_n with dtau_n dOmega_n >= sqrt(1 - 2/n)."""
    n = dist.photon_numbers
    floor = np.sqrt(np.clip(1.0 - 2.0 / np.maximum(n, 2.0), 0.0, None))
    product = floor * (1.0 + rng.exponential(0.5, n.size)) + rng.uniform(0.0, 0.1, n.size)
    tau = np.exp(rng.normal(0.0, 0.5, n.size))
    return tau, product / tau


# =============================================================================
# Averages and bounds
# =============================================================================


def _values_by_n(values: SubspaceValues, cutoff: int) -> Dict[int, float]:
    if isinstance(values, Mapping):
        return {int(k): float(v) for k, v in values.items()}
    array = np.asarray(values, dtype=float)
    return {n: float(array[n]) for n in range(min(array.size, cutoff + 1))}


def pair_weighted_average(dist: PhotonNumberDistribution, subspace_values: SubspaceValues) -> float:
    """<n(n-1) E_n> / <n(n-1)>."""
    pairs = dist.pair_mean
    if pairs <= 0:
        raise ValueError("distribution has no photon pairs (all weight on n <= 1)")
    values = _values_by_n(subspace_values, dist.cutoff)
    total = 0.0
    for n in range(2, dist.cutoff + 1):
        weight = dist.p(n) * n * (n - 1)
        if weight == 0:
            continue
        if n not in values:
            raise ValueError(f"missing subspace value for n={n}")
        total += weight * values[n]
    return total / pairs


def simplified_bound(mean_n: float) -> float:
    """sqrt(1 - 2/<n>), valid for <n> >= 2."""
    if mean_n < 2:
        raise ValueError(f"simplified bound needs <n> >= 2, got {mean_n}")
    if math.isinf(mean_n):
        return 1.0
    return math.sqrt(1.0 - 2.0 / mean_n)


def jensen_kernel(n: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """f(n) = (n - 1) sqrt(1 - 2/n); strictly convex for n >= 3."""
    n = np.asarray(n, dtype=float)
    value = (n - 1.0) * np.sqrt(1.0 - 2.0 / n)
    return float(value) if value.ndim == 0 else value


def auxiliary_ratio(dist: PhotonNumberDistribution) -> float:
    """(<n> - p_1 - 2 p_2) / (1 - p_0 - p_1 - p_2); infinite without mass at n >= 3."""
    upper_mass = dist.upper_moment(0)
    if upper_mass == 0:
        return math.inf
    return dist.upper_moment(1) / upper_mass


@dataclass(frozen=True)
class GeneralBound:
    """Closed-form mixture bound on dtau dOmega.

    ``degenerate`` marks distributions with no mass above n = 2, where the
    radicand is the empty-sum limit 1, or a negative radicand clipped to 0.
    """

    value: float
    radicand: float
    pair_factor: float
    degenerate: bool = False


def general_bound(dist: PhotonNumberDistribution) -> GeneralBound:
    """sqrt(1 - 2(1-p_0-p_1-p_2)/(<n>-p_1-2p_2)) (1 - 2 p_2/<n(n-1)>)."""
    pairs = dist.pair_mean
    if pairs <= 0:
        raise ValueError("distribution has no photon pairs (all weight on n <= 1)")
    s0, s1, s2 = (dist.upper_moment(k) for k in range(3))
    pair_factor = (s2 - s1) / pairs
    if s0 == 0:
        return GeneralBound(value=0.0, radicand=1.0, pair_factor=0.0, degenerate=True)
    radicand = 1.0 - 2.0 * s0 / s1
    if radicand < 0:
        logger.warning(f"negative radicand {radicand:.3e} for {dist.label or 'distribution'}")
        return GeneralBound(value=0.0, radicand=radicand, pair_factor=pair_factor, degenerate=True)
    return GeneralBound(value=math.sqrt(radicand) * pair_factor, radicand=radicand,
                        pair_factor=pair_factor)


@dataclass
class ChainReport:
    """Every intermediate of the mixture bound chain and whether each link holds."""

    values: Dict[str, float] = field(default_factory=dict)
    links: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.links.values())

    def failed_links(self) -> List[str]:
        return [name for name, ok in self.links.items() if not ok]


CHAIN_STEPS = ("full", "cauchy_schwarz", "subspace", "jensen", "general", "final")


def verify_chain(
    dist: PhotonNumberDistribution,
    subspace_tau: SubspaceValues,
    subspace_omega: SubspaceValues,
) -> ChainReport:
    """Evaluate each step of the chain and check that it dominates the next.

    ``subspace_tau`` and ``subspace_omega`` hold dtau_n and dOmega_n (not
    squared). Values below the per-subspace bound sqrt(1 - 2/n) are rejected.
    """
    pairs = dist.pair_mean
    if pairs <= 0:
        raise ValueError("distribution has no photon pairs (all weight on n <= 1)")
    tau = _values_by_n(subspace_tau, dist.cutoff)
    omega = _values_by_n(subspace_omega, dist.cutoff)

    for n in range(2, dist.cutoff + 1):
        if dist.p(n) == 0:
            continue
        if n not in tau or n not in omega:
            raise ValueError(f"missing subspace values for n={n}")
        if tau[n] < 0 or omega[n] < 0:
            raise ValueError(f"subspace values must be nonnegative at n={n}")
        if tau[n] * omega[n] < math.sqrt(1.0 - 2.0 / n) - CHAIN_SLACK:
            raise ValueError(
                f"dtau_n dOmega_n = {tau[n] * omega[n]:.6g} violates sqrt(1 - 2/n) at n={n}"
            )

    def tau2(n: int) -> float:
        return tau.get(n, 0.0) ** 2

    def omega2(n: int) -> float:
        return omega.get(n, 0.0) ** 2

    support = [n for n in range(2, dist.cutoff + 1) if dist.p(n) > 0]
    full = math.sqrt(
        pair_weighted_average(dist, {n: tau2(n) for n in support})
        * pair_weighted_average(dist, {n: omega2(n) for n in support})
    )
    cauchy = pair_weighted_average(dist, {n: tau[n] * omega[n] for n in support})
    subspace = sum(dist.p(n) * n * jensen_kernel(n) for n in support if n >= 3) / pairs

    s1, s2 = dist.upper_moment(1), dist.upper_moment(2)
    jensen = math.sqrt(1.0 - 2.0 * s1 / s2) * (s2 - s1) / pairs if s1 > 0 else 0.0
    general = general_bound(dist).value

    report = ChainReport()
    report.values.update(
        full=full, cauchy_schwarz=cauchy, subspace=subspace, jensen=jensen, general=general
    )
    steps = list(CHAIN_STEPS[:-1])
    if dist.mean >= 2:
        report.values["final"] = simplified_bound(dist.mean) * (1.0 - 2.0 * dist.p(2) / pairs)
        report.values["auxiliary_ratio"] = auxiliary_ratio(dist)
        report.links["auxiliary_ratio>=mean"] = (
            report.values["auxiliary_ratio"] >= dist.mean - CHAIN_SLACK
        )
        steps.append("final")

    for upper, lower in zip(steps, steps[1:]):
        slack = CHAIN_SLACK * max(1.0, abs(report.values[upper]))
        report.links[f"{upper}>={lower}"] = report.values[upper] >= report.values[lower] - slack
    if not report.passed:
        logger.warning(f"chain failed for {dist.label or 'distribution'}: {report.failed_links()}")
    return report


def pair_counts(max_photons: int) -> Tuple[int, int]:
    """Correlated and uncorrelated pairs in a superposition of fully entangled 2..n states.

    Pairs within one number state are correlated; pairs formed across two
    different number states are not.
    """
    if max_photons < 2:
        raise ValueError(f"max_photons must be >= 2, got {max_photons}")
    sizes = range(2, max_photons + 1)
    correlated = sum(k * (k - 1) // 2 for k in sizes)
    total = sum(sizes)
    uncorrelated = (total * total - sum(k * k for k in sizes)) // 2
    return correlated, uncorrelated


def bound_for(dist: PhotonNumberDistribution) -> Dict[str, Optional[float]]:
    """Summary used by the mixture-bound command."""
    bound = general_bound(dist)
    return {
        "mean": dist.mean,
        "pair_mean": dist.pair_mean,
        "p0": dist.p(0),
        "p1": dist.p(1),
        "p2": dist.p(2),
        "general_bound": bound.value,
        "degenerate": bound.degenerate,
        "simplified_bound": simplified_bound(dist.mean) if dist.mean >= 2 else None,
        "final_bound": (
            simplified_bound(dist.mean) * (1.0 - 2.0 * dist.p(2) / dist.pair_mean)
            if dist.mean >= 2
            else None
        ),
    }
