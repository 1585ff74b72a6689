"""User grouping for two-user superposition: NOMA pairing rules and LPMA round-robin."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

import numpy as np

from lpma_sim.config import config

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class UserPopulation:
    """Users of one scheduling round as (user_id, |h|²) entries."""

    users: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        users = tuple((int(uid), float(gain)) for uid, gain in self.users)
        ids = [uid for uid, _ in users]
        if len(set(ids)) != len(ids):
            raise ValueError(f"user ids must be unique, got {ids}")
        if any(gain < 0 for _, gain in users):
            raise ValueError("channel gains must be non-negative")
        object.__setattr__(self, "users", users)

    @classmethod
    def from_gains(cls, gains: Mapping[int, float]) -> "UserPopulation":
        return cls(tuple(gains.items()))

    @classmethod
    def default(cls) -> "UserPopulation":
        """Two similar weak users (1, 3) and two similar strong users (2, 4)."""
        return cls.from_gains(config.DEFAULT_POPULATION_GAINS)

    @property
    def ids(self) -> List[int]:
        return [uid for uid, _ in self.users]

    @property
    def gains(self) -> Dict[int, float]:
        return dict(self.users)

    def __len__(self) -> int:
        return len(self.users)


@dataclass(frozen=True)
class Pairing:
    """A partition of user ids into pairs; each pair is stored sorted."""

    groups: Tuple[Pair, ...]

    def __post_init__(self):
        groups = tuple(sorted(tuple(sorted(g)) for g in self.groups))
        members = [uid for g in groups for uid in g]
        if any(len(g) != 2 for g in groups) or len(set(members)) != len(members):
            raise ValueError(f"groups {groups} are not a partition into pairs")
        object.__setattr__(self, "groups", groups)

    def __str__(self) -> str:
        return ", ".join("{" + f"{a},{b}" + "}" for a, b in self.groups)


def noma_pair_valid(gains: Sequence[float], threshold: float = config.PAIRING_GAIN_RATIO_THRESHOLD) -> bool:
    """A pair is NOMA-schedulable when max/min gain reaches the threshold."""
    if threshold <= 1:
        raise ValueError(f"gain-ratio threshold must exceed 1, got {threshold}")
    low, high = min(gains), max(gains)
    if high == 0:
        raise ValueError("gain ratio undefined: both gains are zero")
    if low == 0:
        return True
    return high / low >= threshold


def noma_group_valid(gains, threshold: float = config.PAIRING_GAIN_RATIO_THRESHOLD) -> np.ndarray:
    """Vectorized noma_pair_valid over gains of shape (..., 2)."""
    if threshold <= 1:
        raise ValueError(f"gain-ratio threshold must exceed 1, got {threshold}")
    gains = np.asarray(gains, dtype=np.float64)
    low, high = gains.min(axis=-1), gains.max(axis=-1)
    if np.any(high == 0):
        raise ValueError("gain ratio undefined: both gains are zero")
    return high >= threshold * low


def _perfect_matchings(ids: Sequence[int]) -> List[Tuple[Pair, ...]]:
    if not ids:
        return [()]
    first, rest = ids[0], ids[1:]
    matchings = []
    for partner in rest:
        remaining = [uid for uid in rest if uid != partner]
        for tail in _perfect_matchings(remaining):
            matchings.append(((first, partner),) + tail)
    return matchings


def enumerate_pairings(pop: UserPopulation) -> List[Pairing]:
    """The three perfect matchings of a four-user population."""
    if len(pop) != 4:
        raise ValueError(f"pairing enumeration needs exactly 4 users, got {len(pop)}")
    return [Pairing(m) for m in _perfect_matchings(sorted(pop.ids))]


def pairing_valid(pop: UserPopulation, pairing: Pairing, pair_valid: Callable[[Sequence[float]], bool]) -> bool:
    gains = pop.gains
    return all(pair_valid((gains[a], gains[b])) for a, b in pairing.groups)


def random_pairing_degradation_rate(
    pop: UserPopulation,
    threshold: float,
    trials: int,
    rng: np.random.Generator,
    pair_valid: Callable[[Sequence[float]], bool] = None,
) -> float:
    """
    Frequency of uniformly random pairings that contain an invalid pair.

    Args:
        pop: Four-user population
        threshold: NOMA gain-ratio threshold
        trials: Number of random pairings drawn
        rng: Random stream
        pair_valid: Validity rule for one pair; defaults to the NOMA gain-ratio rule

    Returns:
        Degraded fraction in [0, 1]
    """
    if pair_valid is None:
        def pair_valid(gains):
            return noma_pair_valid(gains, threshold)
    pairings = enumerate_pairings(pop)
    degraded = np.array([not pairing_valid(pop, p, pair_valid) for p in pairings])
    if trials <= 0:
        return 0.0
    draws = rng.integers(0, len(pairings), size=trials)
    rate = float(degraded[draws].mean())
    logger.debug(f"{degraded.sum()}/{len(pairings)} matchings degraded, drawn frequency {rate:.4f} over {trials} trials")
    return rate


def lpma_round_robin_pairing(pop: UserPopulation, rng: np.random.Generator) -> Pairing:
    """Uniformly random perfect matching with no validity filter."""
    if len(pop) % 2:
        raise ValueError(f"round-robin pairing needs an even population, got {len(pop)}")
    order = rng.permutation(len(pop))
    ids = [pop.ids[i] for i in order]
    return Pairing(tuple((ids[i], ids[i + 1]) for i in range(0, len(ids), 2)))


def exact_degradation_rate(pop: UserPopulation, threshold: float) -> float:
    """Fraction of the three matchings with an invalid NOMA pair."""
    pairings = enumerate_pairings(pop)
    degraded = sum(not pairing_valid(pop, p, lambda g: noma_pair_valid(g, threshold)) for p in pairings)
    return degraded / len(pairings)
