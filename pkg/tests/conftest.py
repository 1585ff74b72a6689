"""Shared fixtures for the simulator tests."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from lpma_sim.config import config
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.lpma_codec import LevelConfig, LpmaConfig
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime

CONFIG_DIR = config.CONFIG_DIR


def uncoded(domain, coords, n=1, power=1.0):
    levels = []
    for user_id, (a, b) in enumerate(coords, 1):
        theta = RingPrime.from_coordinates(domain, a, b)
        levels.append(LevelConfig(user_id, theta, LinearCode.identity(theta.norm_q, n)))
    return LpmaConfig.build(levels, power=power)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def z_2_7():
    """θ = (2, 7) over Z, uncoded, one symbol per block."""
    return uncoded(RingDomain.RATIONAL, [(2, 0), (7, 0)])


@pytest.fixture
def eisenstein_pair():
    """θ = (2+3ω, 3+2ω): two primes of equal norm 7."""
    return uncoded(RingDomain.EISENSTEIN, [(2, 3), (3, 2)])
