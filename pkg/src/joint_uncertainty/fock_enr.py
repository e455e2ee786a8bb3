"""Excitation-number-restricted (ENR) Fock basis.

The basis holds every occupation vector of ``mode_count`` modes with exactly
``photon_number`` photons, in descending lexicographic order:

    n=2, m=2  ->  (2,0), (1,1), (0,2)

Occupations are packed into one integer key in base n+1, which preserves the
order, so vectorized index lookup is a binary search over the keys. A dict on
the occupation tuple gives O(1) scalar lookup.

Ladder terms a^dag_j a^dag_k a_l a_q and a^dag_j a_k conserve the photon
number, so their targets always lie in the same basis.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

_INT64_BITS = 63


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Occupation tuples summing to ``total``, descending lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, eq=False)
class EnrBasis:
    """Fixed-photon-number Fock basis over ``mode_count`` modes."""

    photon_number: int
    mode_count: int
    states: np.ndarray
    keys: Optional[np.ndarray] = None
    _index: Dict[Tuple[int, ...], int] = field(default_factory=dict, repr=False)

    @property
    def dimension(self) -> int:
        return int(self.states.shape[0])

    def index_of(self, occupation: Sequence[int]) -> int:
        """Position of ``occupation`` in the basis."""
        try:
            return self._index[tuple(int(v) for v in occupation)]
        except KeyError:
            raise ValueError(
                f"occupation {tuple(occupation)} is not in the "
                f"n={self.photon_number}, m={self.mode_count} basis"
            ) from None

    def lookup(self, occupations: np.ndarray) -> np.ndarray:
        """Vectorized ``index_of`` for an array of occupation rows."""
        occupations = np.asarray(occupations)
        if occupations.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        if self.keys is None:
            return np.array([self.index_of(row) for row in occupations], dtype=np.int64)

        packed = _pack(occupations, self.photon_number)
        ascending = self.keys[::-1]
        positions = np.searchsorted(ascending, packed)
        positions = np.clip(positions, 0, ascending.size - 1)
        if not np.array_equal(ascending[positions], packed):
            raise ValueError("lookup received occupations outside the basis")
        return (self.dimension - 1 - positions).astype(np.int64)

    def label(self, index: int) -> str:
        """Ket label such as ``|1,0,1>``."""
        return "|" + ",".join(str(int(v)) for v in self.states[index]) + ">"


def _packable(photon_number: int, mode_count: int) -> bool:
    return mode_count * math.log2(photon_number + 1) < _INT64_BITS


def _pack(occupations: np.ndarray, photon_number: int) -> np.ndarray:
    base = photon_number + 1
    weights = base ** np.arange(occupations.shape[1] - 1, -1, -1, dtype=np.int64)
    return occupations.astype(np.int64) @ weights


@lru_cache(maxsize=32)
def enumerate_enr(photon_number: int, mode_count: int) -> EnrBasis:
    """Enumerate the n-photon, m-mode ENR basis.

    Raises ``ValueError`` for n < 2 (two-photon observables undefined) or m < 2.
    """
    if int(photon_number) != photon_number or photon_number < 2:
        raise ValueError(f"photon_number must be an integer >= 2, got {photon_number}")
    if int(mode_count) != mode_count or mode_count < 2:
        raise ValueError(f"mode_count must be an integer >= 2, got {mode_count}")

    dtype = np.int16 if photon_number < np.iinfo(np.int16).max else np.int64
    states = np.array(list(_compositions(photon_number, mode_count)), dtype=dtype)
    states.setflags(write=False)
    index = {tuple(int(v) for v in row): i for i, row in enumerate(states)}

    keys = None
    if _packable(photon_number, mode_count):
        keys = _pack(states, photon_number)
        keys.setflags(write=False)
    else:
        logger.debug(f"n={photon_number}, m={mode_count}: keys do not fit int64, dict lookup")

    expected = math.comb(photon_number + mode_count - 1, mode_count - 1)
    assert states.shape[0] == expected
    logger.debug(f"ENR basis n={photon_number}, m={mode_count}: dimension {expected}")
    return EnrBasis(
        photon_number=photon_number,
        mode_count=mode_count,
        states=states,
        keys=keys,
        _index=index,
    )


def _check_modes(basis: EnrBasis, modes: Sequence[int]) -> None:
    for mode in modes:
        if not 0 <= mode < basis.mode_count:
            raise ValueError(f"mode index {mode} outside [0, {basis.mode_count})")


# =============================================================================
# Ladder action
# =============================================================================


def apply_quartic_term(
    basis: EnrBasis,
    creators: Tuple[int, int],
    annihilators: Tuple[int, int],
    state_index: int,
) -> List[Tuple[int, float]]:
    """Act with a^dag_j a^dag_k a_l a_q on one basis state.

    ``creators`` is (j, k), ``annihilators`` is (l, q); a_q acts first. Returns
    ``[(target_index, amplitude)]`` or ``[]`` when an annihilated mode is empty.
    """
    j, k = creators
    l, q = annihilators
    _check_modes(basis, (j, k, l, q))

    occupation = [int(v) for v in basis.states[state_index]]
    amplitude = 1.0
    for mode in (q, l):
        if occupation[mode] == 0:
            return []
        amplitude *= math.sqrt(occupation[mode])
        occupation[mode] -= 1
    for mode in (k, j):
        occupation[mode] += 1
        amplitude *= math.sqrt(occupation[mode])
    return [(basis.index_of(occupation), amplitude)]


def apply_quartic_term_all(
    basis: EnrBasis,
    creators: Tuple[int, int],
    annihilators: Tuple[int, int],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``apply_quartic_term`` over every basis state.

    Returns (sources, targets, amplitudes) for the states the term does not
    annihilate.
    """
    j, k = creators
    l, q = annihilators
    _check_modes(basis, (j, k, l, q))
    return _apply_ladder(basis, (j, k), (l, q))


def apply_quadratic_term_all(
    basis: EnrBasis, creator: int, annihilator: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized a^dag_j a_k over every basis state."""
    _check_modes(basis, (creator, annihilator))
    return _apply_ladder(basis, (creator,), (annihilator,))


def _apply_ladder(
    basis: EnrBasis, creators: Tuple[int, ...], annihilators: Tuple[int, ...]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    occupation = basis.states.astype(np.int64)
    amplitude = np.ones(basis.dimension)
    for mode in reversed(annihilators):
        amplitude *= np.sqrt(np.clip(occupation[:, mode], 0, None))
        occupation[:, mode] -= 1

    alive = amplitude > 0
    sources = np.flatnonzero(alive)
    occupation = occupation[alive]
    amplitude = amplitude[alive]

    for mode in reversed(creators):
        occupation[:, mode] += 1
        amplitude *= np.sqrt(occupation[:, mode])

    return sources, basis.lookup(occupation), amplitude
