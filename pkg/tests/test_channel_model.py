"""Tests for the link budget, fading and noise models."""

import numpy as np
import pytest
from scipy import stats

from lpma_sim.channel.channel_model import (
    ChannelRealization,
    LinkBudget,
    apply_channel,
    complex_noise,
    pathloss_db,
    rayleigh_sample,
    realization_from_snr,
    snr_db_from_budget,
    snr_from_budget,
)


class TestLinkBudget:
    @pytest.mark.parametrize("distance, expected", [(1.0, 21.5), (0.5, 10.4525), (10.0, 58.2)])
    def test_pathloss(self, distance, expected):
        assert pathloss_db(distance) == pytest.approx(expected, abs=1e-3)

    def test_pathloss_vectorized(self):
        loss = pathloss_db(np.array([0.1, 1.0, 10.0]))
        np.testing.assert_allclose(np.diff(loss), [36.7, 36.7])

    @pytest.mark.parametrize("distance", [0.0, -1.0])
    def test_non_positive_distance(self, distance):
        with pytest.raises(ValueError):
            pathloss_db(distance)

    def test_noise_power(self):
        assert LinkBudget().noise_power_dbm == pytest.approx(-99.0)

    def test_snr_at_quarter_km(self):
        assert snr_db_from_budget(LinkBudget(), 0.25) == pytest.approx(145.6, abs=0.01)
        assert snr_from_budget(LinkBudget(), 1.0) == pytest.approx(10.0 ** 12.35)

    def test_halving_bandwidth_raises_snr(self):
        wide = snr_db_from_budget(LinkBudget(), 1.0)
        narrow = snr_db_from_budget(LinkBudget(bandwidth_hz=5e6), 1.0)
        assert narrow - wide == pytest.approx(3.0103, abs=1e-4)

    def test_budget_is_frozen(self):
        with pytest.raises(Exception):
            LinkBudget().tx_power_dbm = 40.0


class TestFadingAndNoise:
    def test_rayleigh_moments(self):
        h = rayleigh_sample(np.random.default_rng(1), size=1_000_000)
        assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.01)
        assert abs(np.mean(h)) < 0.01
        # |h|² is unit exponential
        assert np.var(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)

    def test_scalar_sample(self):
        assert isinstance(rayleigh_sample(np.random.default_rng(2)), complex)

    def test_noise_variance_and_gaussianity(self):
        z = complex_noise(np.random.default_rng(3), 2.0, 500_000)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.01)
        assert abs(stats.kurtosis(z.real)) < 0.05
        assert abs(stats.kurtosis(z.imag)) < 0.05
        assert abs(np.mean(z.real * z.imag)) < 0.01

    def test_apply_channel(self):
        rng = np.random.default_rng(4)
        x = np.ones(200_000, dtype=complex)
        y = apply_channel(x, ChannelRealization(h=0.5 - 0.5j, sigma2=0.25), rng)
        assert np.mean(y) == pytest.approx(0.5 - 0.5j, abs=0.01)
        assert np.var(y) == pytest.approx(0.25, rel=0.02)

    def test_apply_channel_with_drawn_noise(self):
        x = np.arange(6, dtype=complex).reshape(2, 3)
        link = ChannelRealization(h=np.array([[2.0], [1j]]))
        noise = np.full((2, 3), 0.25 + 0.0j)
        y = apply_channel(x, link, noise=noise)
        np.testing.assert_allclose(y, link.h * x + 0.25)

    def test_apply_channel_needs_noise_source(self):
        with pytest.raises(ValueError):
            apply_channel(np.ones(3), ChannelRealization(h=1.0))

    def test_vectorized_realization(self):
        fade = np.array([[1.0, 1j], [0.5, -1.0]])
        link = realization_from_snr(np.array([4.0, 9.0]), fade=fade)
        np.testing.assert_allclose(link.h, [[2.0, 3j], [1.0, -3.0]])
        np.testing.assert_allclose(link.snr, [[4.0, 9.0], [1.0, 9.0]])

    def test_vectorized_realization_draws_per_entry(self):
        link = realization_from_snr(np.full(50_000, 2.0), np.random.default_rng(6))
        assert link.h.shape == (50_000,)
        assert np.mean(link.snr) == pytest.approx(2.0, rel=0.03)

    def test_realization_snr(self):
        assert realization_from_snr(30.0, fading=False).snr == pytest.approx(30.0)
        faded = [realization_from_snr(4.0, np.random.default_rng(k)).snr for k in range(2000)]
        assert np.mean(faded) == pytest.approx(4.0, rel=0.1)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            ChannelRealization(h=1.0, sigma2=0.0)
        with pytest.raises(ValueError):
            realization_from_snr(-1.0, fading=False)
        with pytest.raises(ValueError):
            realization_from_snr(np.array([1.0, -0.5]), fading=False)
