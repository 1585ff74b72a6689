"""Tests for prime selection and channel-ordered level assignment."""

import pytest

from lpma_sim.baselines.throughput_table import ThroughputTable
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.prime_assignment import candidate_primes, order_levels_by_channel, select_primes
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime, are_coprime


def coords(prime):
    return (prime.value.a, prime.value.b)


@pytest.mark.parametrize("domain", list(RingDomain))
def test_candidate_tables_are_primes(domain):
    primes = candidate_primes(domain)
    assert primes
    assert all(p.domain is domain for p in primes)


class TestSelectPrimes:
    def test_eisenstein_two_users(self):
        chosen = select_primes({1: 10.0, 2: 1000.0}, ThroughputTable.shannon(), candidate_primes(RingDomain.EISENSTEIN))
        assert coords(chosen[1]) == (2, 3)
        assert coords(chosen[2]) == (2, 5)

    def test_chosen_primes_are_pairwise_coprime(self):
        snrs = {uid: 10.0 ** (uid / 2) for uid in range(1, 5)}
        chosen = select_primes(snrs, ThroughputTable.shannon(), candidate_primes(RingDomain.GAUSSIAN))
        values = list(chosen.values())
        for i, x in enumerate(values):
            for y in values[i + 1:]:
                assert are_coprime(x.value, y.value)

    def test_low_snr_falls_back_to_smallest_prime(self):
        chosen = select_primes({7: 0.1}, ThroughputTable.shannon(), candidate_primes(RingDomain.EISENSTEIN))
        assert coords(chosen[7]) == (2, 1)

    def test_stronger_user_never_gets_smaller_field(self):
        chosen = select_primes({1: 3.0, 2: 300.0}, ThroughputTable.lte_cqi(), candidate_primes(RingDomain.RATIONAL))
        assert chosen[2].norm_q >= chosen[1].norm_q

    def test_table_exhausted(self):
        snrs = {uid: 100.0 for uid in range(1, 8)}
        with pytest.raises(ValueError, match="exhausted"):
            select_primes(snrs, ThroughputTable.shannon(), candidate_primes(RingDomain.RATIONAL))


class TestOrderLevels:
    def test_weakest_user_gets_smallest_prime(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        p7 = RingPrime.from_coordinates(RingDomain.RATIONAL, 7)
        specs = [(p7, LinearCode.identity(7, 1)), (p2, LinearCode.identity(2, 1))]
        levels = order_levels_by_channel({10: 5.0, 20: 1.0}, specs)
        assert [(lv.user_id, lv.theta.norm_q) for lv in levels] == [(20, 2), (10, 7)]

    def test_snr_ties_break_on_user_id(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        p3 = RingPrime.from_coordinates(RingDomain.RATIONAL, 3)
        specs = [(p3, LinearCode.identity(3, 1)), (p2, LinearCode.identity(2, 1))]
        levels = order_levels_by_channel({5: 1.0, 4: 1.0}, specs)
        assert [lv.user_id for lv in levels] == [4, 5]
        assert levels[0].theta.norm_q == 2

    def test_count_mismatch(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        with pytest.raises(ValueError):
            order_levels_by_channel({1: 1.0, 2: 2.0}, [(p2, LinearCode.identity(2, 1))])
