"""Structural power assignment: which user gets which prime."""

import logging
import math
from typing import Callable, Dict, List, Mapping, Sequence, Tuple

from lpma_sim.config import config
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.lpma_codec import LevelConfig
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime, are_coprime

logger = logging.getLogger(__name__)


def candidate_primes(domain: RingDomain) -> List[RingPrime]:
    """Configured prime table of a ring, validated."""
    return [RingPrime.from_coordinates(domain, a, b) for a, b in config.PRIME_TABLES[domain.value]]


def _weakest_first(user_snrs: Mapping[int, float]) -> List[Tuple[int, float]]:
    return sorted(user_snrs.items(), key=lambda item: (item[1], item[0]))


def order_levels_by_channel(
    user_snrs: Mapping[int, float],
    level_specs: Sequence[Tuple[RingPrime, LinearCode]],
) -> List[LevelConfig]:
    """
    Pair users with (prime, code) specs so the weakest user owns the smallest prime.

    The smallest own-prime leaves the largest co-factor, which is the
    largest share of the constellation's energy.

    Args:
        user_snrs: Mean SNR per user id
        level_specs: (prime, code) pairs in configured order

    Returns:
        Level configurations in channel order, level 1 first
    """
    if len(user_snrs) != len(level_specs):
        raise ValueError(f"{len(user_snrs)} users but {len(level_specs)} primes")
    users = _weakest_first(user_snrs)
    specs = sorted(enumerate(level_specs), key=lambda item: (item[1][0].norm_q, item[0]))
    return [
        LevelConfig(user_id=user_id, theta=theta, code=code)
        for (user_id, _), (_, (theta, code)) in zip(users, specs)
    ]


def select_primes(
    user_snrs: Mapping[int, float],
    table: Callable[[float], float],
    candidates: Sequence[RingPrime],
) -> Dict[int, RingPrime]:
    """
    Pick one prime per user from the SINR → throughput look-up.

    Users are served weakest first. Each takes the unused candidate with the
    largest log2(q) not above its looked-up throughput that is coprime with
    every prime already taken, or the smallest such candidate when none fits.

    Args:
        user_snrs: Mean linear SNR per user id
        table: Throughput look-up (bits/symbol as a function of linear SINR)
        candidates: Prime table to choose from

    Returns:
        Prime per user id
    """
    chosen: Dict[int, RingPrime] = {}
    for user_id, snr in _weakest_first(user_snrs):
        target = float(table(snr))
        available = [
            p for p in candidates
            if p not in chosen.values() and all(are_coprime(p.value, c.value) for c in chosen.values())
        ]
        if not available:
            raise ValueError(f"prime table exhausted before user {user_id}")
        fitting = [p for p in available if math.log2(p.norm_q) <= target]
        if fitting:
            pick = max(fitting, key=lambda p: p.norm_q)
        else:
            pick = min(available, key=lambda p: p.norm_q)
        chosen[user_id] = pick
        logger.debug(f"user {user_id}: SNR {snr:.3g}, target {target:.3f} bits -> θ = {pick} (q = {pick.norm_q})")
    return chosen
