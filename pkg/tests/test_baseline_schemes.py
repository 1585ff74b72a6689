"""Tests for the NOMA and OMA throughput baselines."""

import numpy as np
import pytest
from pydantic import ValidationError

from lpma_sim.baselines.baseline_schemes import (
    NomaConfig,
    noma_rates,
    noma_sinrs,
    noma_sum_rate,
    noma_throughput,
    oma_rates,
    oma_throughput,
)
from lpma_sim.baselines.throughput_table import ThroughputTable


class TestNomaConfig:
    def test_alias_and_field_name(self):
        assert NomaConfig(P=4.0, alpha=[0.5, 0.5]).power == 4.0
        assert NomaConfig(power=4.0, alpha=[0.5, 0.5]).power == 4.0

    @pytest.mark.parametrize("alpha", [[0.5, 0.6], [1.2, -0.2], []])
    def test_invalid_fractions(self, alpha):
        with pytest.raises(ValidationError):
            NomaConfig(P=1.0, alpha=alpha)

    def test_negative_power(self):
        with pytest.raises(ValidationError):
            NomaConfig(P=-1.0, alpha=[1.0])


class TestNomaRates:
    def test_two_user_example(self):
        cfg = NomaConfig(P=4.0, alpha=[0.75, 0.25])
        np.testing.assert_allclose(noma_sinrs(cfg, [2.0, 4.0]), [2.0, 4.0])
        np.testing.assert_allclose(noma_rates(cfg, [2.0, 4.0]), [np.log2(3.0), np.log2(5.0)])

    def test_all_power_to_weak_user(self):
        cfg = NomaConfig(P=10.0, alpha=[1.0, 0.0])
        rates = noma_rates(cfg, [0.5, 2.0])
        assert rates[0] == pytest.approx(np.log2(6.0))
        assert rates[1] == 0.0

    def test_zero_power(self):
        cfg = NomaConfig(P=0.0, alpha=[0.5, 0.5])
        assert noma_sum_rate(cfg, [1.0, 2.0]) == 0.0

    @pytest.mark.parametrize("alpha", [[0.5, 0.5], [0.9, 0.1], [0.6, 0.3, 0.1]])
    def test_equal_gains_give_single_user_capacity(self, alpha):
        cfg = NomaConfig(P=7.0, alpha=alpha)
        g = 1.3
        assert noma_sum_rate(cfg, [g] * len(alpha)) == pytest.approx(np.log2(1.0 + 7.0 * g))

    def test_batch_shape(self):
        cfg = NomaConfig(P=2.0, alpha=[0.8, 0.2])
        gains = np.sort(np.random.default_rng(0).exponential(size=(10, 2)), axis=-1)
        assert noma_rates(cfg, gains).shape == (10, 2)
        assert noma_sum_rate(cfg, gains).shape == (10,)

    def test_rejects_unsorted_gains(self):
        cfg = NomaConfig(P=1.0, alpha=[0.8, 0.2])
        with pytest.raises(ValueError, match="sorted"):
            noma_rates(cfg, [2.0, 1.0])

    def test_rejects_wrong_user_count(self):
        cfg = NomaConfig(P=1.0, alpha=[0.8, 0.2])
        with pytest.raises(ValueError):
            noma_rates(cfg, [1.0, 2.0, 3.0])

    def test_weak_and_strong_user_example(self):
        cfg = NomaConfig(P=10.0, alpha=[0.8, 0.2])
        np.testing.assert_allclose(noma_rates(cfg, [0.5, 2.0]), [np.log2(3.0), np.log2(5.0)])

    def test_rates_non_decreasing_in_power(self):
        gains = [0.3, 1.7, 4.0]
        powers = np.linspace(0.0, 50.0, 26)
        rates = np.array([noma_rates(NomaConfig(P=p, alpha=[0.6, 0.3, 0.1]), gains) for p in powers])
        assert np.all(np.diff(rates, axis=0) >= -1e-12)

    def test_some_split_beats_equal_share_oma(self):
        gains = [0.5, 2.0]
        oma_sum = oma_rates(10.0, gains, [0.5, 0.5]).sum()
        noma_sums = [noma_sum_rate(NomaConfig(P=10.0, alpha=[a, 1.0 - a]), gains) for a in np.linspace(0.5, 1.0, 11)]
        assert max(noma_sums) > oma_sum

    def test_sum_rate_scalar_for_single_group(self):
        cfg = NomaConfig(P=10.0, alpha=[0.8, 0.2])
        assert isinstance(noma_sum_rate(cfg, [0.5, 2.0]), float)
        assert noma_sum_rate(cfg, [0.5, 2.0]) == pytest.approx(np.log2(15.0))


class TestNomaThroughput:
    def test_valid_group_uses_table_per_user(self):
        cfg = NomaConfig(P=4.0, alpha=[0.75, 0.25])
        out = noma_throughput(cfg, [2.0, 4.0], ThroughputTable.shannon(), valid=True)
        np.testing.assert_allclose(out, [np.log2(3.0), np.log2(5.0)])

    def test_invalid_group_collapses_to_weakest_gain(self):
        cfg = NomaConfig(P=4.0, alpha=[0.75, 0.25])
        out = noma_throughput(cfg, [1.0, 1.5], ThroughputTable.shannon(), valid=False)
        assert out.sum() == pytest.approx(np.log2(5.0))
        equalized = noma_rates(cfg, [1.0, 1.0])
        np.testing.assert_allclose(out / out.sum(), equalized / equalized.sum())

    def test_mixed_validity_per_group(self):
        cfg = NomaConfig(P=4.0, alpha=[0.75, 0.25])
        gains = np.array([[2.0, 4.0], [2.0, 4.0]])
        out = noma_throughput(cfg, gains, ThroughputTable.shannon(), valid=[True, False])
        assert out[0].sum() == pytest.approx(np.log2(15.0))
        assert out[1].sum() == pytest.approx(np.log2(9.0))


class TestOma:
    def test_equal_shares(self):
        np.testing.assert_allclose(oma_rates(3.0, [1.0, 1.0], [0.5, 0.5]), [1.0, 1.0])

    def test_half_shares_with_unequal_gains(self):
        np.testing.assert_allclose(oma_rates(10.0, [0.5, 2.0], [0.5, 0.5]), [0.5 * np.log2(6.0), 0.5 * np.log2(21.0)])

    def test_table_throughput(self):
        out = oma_throughput(100.0, [1.0, 10.0], [0.25, 0.75], ThroughputTable.lte_cqi())
        np.testing.assert_allclose(out, [0.25 * 4.5234, 0.75 * 5.5547])

    @pytest.mark.parametrize("shares", [[0.5, 0.6], [1.5, -0.5], [1.0]])
    def test_invalid_shares(self, shares):
        with pytest.raises(ValueError):
            oma_rates(1.0, [1.0, 2.0], shares)
