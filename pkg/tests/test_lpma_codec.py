"""Tests for the superposition encoder and the SIC / PIC / hybrid receivers."""

from itertools import product

import numpy as np
import pytest

from conftest import uncoded
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.lpma_codec import (
    DecoderKind,
    LevelConfig,
    LpmaConfig,
    channel_compensate,
    derive_scaling_and_dither,
    extract_level,
    hybrid_decode,
    lpma_encode,
    map_pi_a,
    mlo_pic_decode,
    mlo_sic_decode,
    reconstruct_level,
    representative_set,
)
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime, embed, embed_array, mod_ring_array


def all_tuples(cfg):
    tuples = np.array(list(product(*[range(level.theta.norm_q) for level in cfg.levels])))
    return [tuples[:, [i]] for i in range(cfg.num_levels)]


class TestConfig:
    def test_derived_quantities(self, z_2_7):
        assert z_2_7.modulus.a == 14
        assert [c.a for c in z_2_7.cofactors] == [7, 2]
        assert z_2_7.descale == (1, 4)
        assert z_2_7.block_length == 1

    def test_level_field_must_match_prime(self):
        theta = RingPrime.from_coordinates(RingDomain.RATIONAL, 7)
        with pytest.raises(ValueError):
            LevelConfig(1, theta, LinearCode.identity(5, 2))

    def test_rejects_common_prime(self):
        with pytest.raises(ValueError):
            uncoded(RingDomain.RATIONAL, [(7, 0), (7, 0)])

    def test_rejects_associated_primes(self):
        # 2+3ω times the unit ω is −3−ω
        with pytest.raises(ValueError):
            uncoded(RingDomain.EISENSTEIN, [(2, 3), (-3, -1)])

    def test_rejects_mixed_block_lengths(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        p7 = RingPrime.from_coordinates(RingDomain.RATIONAL, 7)
        with pytest.raises(ValueError):
            LpmaConfig.build([
                LevelConfig(1, p2, LinearCode.identity(2, 3)),
                LevelConfig(2, p7, LinearCode.identity(7, 4)),
            ])

    def test_rejects_duplicate_users(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        p7 = RingPrime.from_coordinates(RingDomain.RATIONAL, 7)
        with pytest.raises(ValueError):
            LpmaConfig.build([
                LevelConfig(1, p2, LinearCode.identity(2, 1)),
                LevelConfig(1, p7, LinearCode.identity(7, 1)),
            ])

    def test_level_lookup(self, z_2_7):
        assert z_2_7.level_of_user(2) == 2
        with pytest.raises(ValueError):
            z_2_7.level(3)


class TestScalingAndDither:
    def test_binary_example(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        beta, dither = derive_scaling_and_dither(RingDomain.RATIONAL, [p2], power=1.0)
        assert dither == pytest.approx(0.5)
        assert beta == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "domain, coords",
        [
            (RingDomain.RATIONAL, [(2, 0), (7, 0)]),
            (RingDomain.GAUSSIAN, [(1, 1), (2, 1)]),
            (RingDomain.EISENSTEIN, [(2, 3), (3, 2)]),
        ],
    )
    def test_centred_constellation_meets_power(self, domain, coords):
        thetas = [RingPrime.from_coordinates(domain, *c) for c in coords]
        power = 4.0
        beta, dither = derive_scaling_and_dither(domain, thetas, power)
        points = embed_array(*representative_set(domain, thetas), domain)
        assert abs(np.mean(points + dither)) < 1e-12
        assert np.mean(np.abs(beta * (points + dither)) ** 2) == pytest.approx(power, abs=1e-9)

    def test_rejects_non_positive_power(self):
        p2 = RingPrime.from_coordinates(RingDomain.RATIONAL, 2)
        with pytest.raises(ValueError):
            derive_scaling_and_dither(RingDomain.RATIONAL, [p2], 0.0)


class TestMapPiA:
    def test_worked_instance(self, z_2_7):
        word = map_pi_a(z_2_7, [np.array([1]), np.array([3])])
        assert (int(word.a[0]), int(word.b[0])) == (-1, 0)

    def test_zero_codewords(self, eisenstein_pair):
        word = map_pi_a(eisenstein_pair, [np.array([0]), np.array([0])])
        assert (int(word.a[0]), int(word.b[0])) == (0, 0)

    def test_single_level_is_the_code_symbol(self):
        cfg = uncoded(RingDomain.RATIONAL, [(2, 0)])
        word = map_pi_a(cfg, [np.array([1])])
        # 1 and −1 are the same class mod 2
        assert int(word.a[0]) % 2 == 1

    @pytest.mark.parametrize("fixture, size", [("z_2_7", 14), ("eisenstein_pair", 49)])
    def test_crt_bijection(self, fixture, size, request):
        cfg = request.getfixturevalue(fixture)
        word = map_pi_a(cfg, all_tuples(cfg))
        images = set(zip(word.a[:, 0].tolist(), word.b[:, 0].tolist()))
        assert len(images) == size
        ref = representative_set(cfg.domain, [level.theta for level in cfg.levels])
        assert images == set(zip(ref[0].tolist(), ref[1].tolist()))

    def test_linearity(self, eisenstein_pair, rng):
        cfg = eisenstein_pair
        v = [rng.integers(0, 7, (200, 1)) for _ in range(2)]
        w = [rng.integers(0, 7, (200, 1)) for _ in range(2)]
        total = map_pi_a(cfg, [(x + y) % 7 for x, y in zip(v, w)])
        a = map_pi_a(cfg, v)
        b = map_pi_a(cfg, w)
        sa, sb = mod_ring_array(a.a + b.a, a.b + b.b, cfg.modulus)
        np.testing.assert_array_equal(sa, total.a)
        np.testing.assert_array_equal(sb, total.b)

    def test_rejects_wrong_inputs(self, z_2_7):
        with pytest.raises(ValueError):
            map_pi_a(z_2_7, [np.array([1])])
        with pytest.raises(ValueError):
            map_pi_a(z_2_7, [np.array([2]), np.array([3])])
        with pytest.raises(ValueError):
            map_pi_a(z_2_7, [np.array([1, 0]), np.array([3, 0])])


class TestEncode:
    def test_zero_messages_without_dither(self):
        cfg = uncoded(RingDomain.GAUSSIAN, [(1, 1), (2, 1)])
        signal = lpma_encode(cfg, [np.array([0]), np.array([0])])
        assert abs(signal.samples[0] - cfg.beta * cfg.dither) < 1e-12

    def test_exhaustive_energy(self, eisenstein_pair):
        cfg = LpmaConfig.build(eisenstein_pair.levels, power=2.5)
        signal = lpma_encode(cfg, all_tuples(cfg))
        assert np.mean(np.abs(signal.samples) ** 2) == pytest.approx(2.5, abs=1e-9)

    def test_random_codeword_energy(self, rng):
        cfg = uncoded(RingDomain.RATIONAL, [(2, 0), (7, 0)], n=64)
        messages = [rng.integers(0, level.code.q, (500, 64)) for level in cfg.levels]
        samples = lpma_encode(cfg, messages).samples
        assert np.mean(np.abs(samples) ** 2) == pytest.approx(cfg.power, rel=0.05)


class TestCompensate:
    def test_noiseless_inversion(self, eisenstein_pair, rng):
        signal = lpma_encode(eisenstein_pair, all_tuples(eisenstein_pair))
        for h in np.exp(2j * np.pi * rng.uniform(size=5)):
            y_tilde = channel_compensate(eisenstein_pair, h * signal.samples, h)
            np.testing.assert_allclose(y_tilde, signal.word.embed(), atol=1e-9)

    def test_zero_gain(self, z_2_7):
        with pytest.raises(ZeroDivisionError):
            channel_compensate(z_2_7, np.array([1.0]), 0.0)


class TestReceivers:
    def test_worked_instance_levels(self, z_2_7):
        y_tilde = np.array([-1.0 + 0j])
        first = extract_level(z_2_7, y_tilde, 1)
        assert int(first.v_hat[0]) == 1
        second = extract_level(z_2_7, y_tilde, 2, residual=y_tilde - 7.0)
        assert int(second.v_hat[0]) == 3
        result = mlo_sic_decode(z_2_7, y_tilde, 2)
        assert [int(result.decisions[i].w_hat[0]) for i in (1, 2)] == [1, 3]
        assert result.decoder_kind is DecoderKind.SIC

    def test_all_zero_transmission(self, eisenstein_pair):
        signal = lpma_encode(eisenstein_pair, [np.zeros((1, 1), int)] * 2)
        y_tilde = channel_compensate(eisenstein_pair, signal.samples, 1.0)
        result = mlo_sic_decode(eisenstein_pair, y_tilde, 2)
        assert all(int(d.w_hat.sum()) == 0 for d in result.decisions.values())

    @pytest.mark.parametrize(
        "domain, coords",
        [
            (RingDomain.RATIONAL, [(2, 0), (7, 0)]),
            (RingDomain.EISENSTEIN, [(2, 3), (3, 2)]),
            (RingDomain.GAUSSIAN, [(1, 1), (2, 1), (3, 2)]),
            (RingDomain.EISENSTEIN, [(2, 1), (2, 3), (1, 4)]),
        ],
    )
    def test_noiseless_round_trip_every_receiver(self, domain, coords):
        cfg = uncoded(domain, coords)
        truth = all_tuples(cfg)
        y_tilde = channel_compensate(cfg, lpma_encode(cfg, truth).samples, 1.0)
        L = cfg.num_levels
        sic = mlo_sic_decode(cfg, y_tilde, L)
        for level in range(1, L + 1):
            pic = mlo_pic_decode(cfg, y_tilde, level)
            np.testing.assert_array_equal(sic.decisions[level].w_hat, truth[level - 1])
            np.testing.assert_array_equal(pic.decisions[level].w_hat, truth[level - 1])
            assert sic.block_correct(level, truth[level - 1]).all()
        for split in range(L + 1):
            hybrid = hybrid_decode(cfg, y_tilde, range(1, split + 1), list(range(split + 1, L + 1)))
            for level in range(1, L + 1):
                np.testing.assert_array_equal(hybrid.decisions[level].w_hat, truth[level - 1])

    def test_coded_round_trip(self, rng):
        thetas = [RingPrime.from_coordinates(RingDomain.GAUSSIAN, 1, 1),
                  RingPrime.from_coordinates(RingDomain.GAUSSIAN, 2, 1)]
        cfg = LpmaConfig.build([
            LevelConfig(1, thetas[0], LinearCode.repetition(2, 4)),
            LevelConfig(2, thetas[1], LinearCode.single_parity_check(5, 3)),
        ])
        messages = [rng.integers(0, 2, (50, 1)), rng.integers(0, 5, (50, 3))]
        y_tilde = channel_compensate(cfg, lpma_encode(cfg, messages).samples, 0.3 - 0.4j)
        result = mlo_sic_decode(cfg, y_tilde, 2)
        for level in (1, 2):
            np.testing.assert_array_equal(result.decisions[level].w_hat, messages[level - 1])

    def test_reconstruction_re_encodes_the_message(self, rng):
        thetas = [RingPrime.from_coordinates(RingDomain.GAUSSIAN, 1, 1),
                  RingPrime.from_coordinates(RingDomain.GAUSSIAN, 2, 1)]
        cfg = LpmaConfig.build([
            LevelConfig(1, thetas[0], LinearCode.repetition(2, 4)),
            LevelConfig(2, thetas[1], LinearCode.single_parity_check(5, 3)),
        ])
        messages = [rng.integers(0, 2, (10, 1)), rng.integers(0, 5, (10, 3))]
        signal = lpma_encode(cfg, messages)
        for level in (1, 2):
            expected = signal.codewords[level - 1] * embed(cfg.cofactors[level - 1])
            np.testing.assert_allclose(reconstruct_level(cfg, level, messages[level - 1]), expected)

    def test_equal_norm_users_separate(self, eisenstein_pair):
        truth = all_tuples(eisenstein_pair)
        y_tilde = lpma_encode(eisenstein_pair, truth).word.embed()
        for level in (1, 2):
            decision = mlo_pic_decode(eisenstein_pair, y_tilde, level).decisions[level]
            np.testing.assert_array_equal(decision.w_hat, truth[level - 1])

    def test_first_level_matches_single_extraction(self, z_2_7, rng):
        y_tilde = rng.normal(size=20) * 4 + 0j
        sic = mlo_sic_decode(z_2_7, y_tilde.reshape(20, 1), 1)
        single = extract_level(z_2_7, y_tilde.reshape(20, 1), 1)
        np.testing.assert_array_equal(sic.decisions[1].v_hat, single.v_hat)
        assert list(sic.decisions) == [1]

    def test_degenerate_hybrid_splits(self, eisenstein_pair, rng):
        noisy = rng.normal(size=(40, 1)) * 3 + 1j * rng.normal(size=(40, 1)) * 3
        all_pic = hybrid_decode(eisenstein_pair, noisy, [1, 2], [])
        all_sic = hybrid_decode(eisenstein_pair, noisy, [], [1, 2])
        sic = mlo_sic_decode(eisenstein_pair, noisy, 2)
        for level in (1, 2):
            pic = mlo_pic_decode(eisenstein_pair, noisy, level)
            np.testing.assert_array_equal(all_pic.decisions[level].v_hat, pic.decisions[level].v_hat)
            np.testing.assert_array_equal(all_sic.decisions[level].v_hat, sic.decisions[level].v_hat)

    def test_hybrid_split_errors(self, eisenstein_pair):
        y = np.zeros((1, 1), complex)
        with pytest.raises(ValueError):
            hybrid_decode(eisenstein_pair, y, [1], [1, 2])
        with pytest.raises(ValueError):
            hybrid_decode(eisenstein_pair, y, [], [2, 2])
        with pytest.raises(ValueError):
            hybrid_decode(eisenstein_pair, y, [1], [], target_level=2)
        with pytest.raises(ValueError):
            hybrid_decode(eisenstein_pair, y, [3], [])

    def test_sic_target_out_of_range(self, z_2_7):
        with pytest.raises(ValueError):
            mlo_sic_decode(z_2_7, np.zeros((1, 1), complex), 3)

    def test_high_snr_symbol_errors_are_rare(self, rng):
        cfg = uncoded(RingDomain.RATIONAL, [(2, 0), (7, 0)], n=100)
        messages = [rng.integers(0, q, (1000, 100)) for q in (2, 7)]
        signal = lpma_encode(cfg, messages)
        h = np.sqrt(10 ** 3.0)
        noise = (rng.standard_normal(signal.samples.shape) + 1j * rng.standard_normal(signal.samples.shape)) / np.sqrt(2)
        y_tilde = channel_compensate(cfg, h * signal.samples + noise, h)
        result = mlo_sic_decode(cfg, y_tilde, 2)
        for level in (1, 2):
            ser = np.mean(result.decisions[level].v_hat != signal.codewords[level - 1])
            assert ser < 1e-3
