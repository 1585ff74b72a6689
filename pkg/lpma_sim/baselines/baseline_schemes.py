"""Power-domain NOMA and OMA time-sharing throughput baselines."""

import logging
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from lpma_sim.baselines.throughput_table import ThroughputTable

logger = logging.getLogger(__name__)


class NomaConfig(BaseModel):
    """Total power P and power fractions α_i, weakest user first."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    power: float = Field(alias="P", ge=0.0)
    alpha: Sequence[float]

    @field_validator("alpha")
    @classmethod
    def _fractions(cls, alpha):
        alpha = tuple(float(a) for a in alpha)
        if not alpha:
            raise ValueError("alpha must not be empty")
        if any(a < 0 for a in alpha):
            raise ValueError(f"power fractions must be non-negative, got {alpha}")
        if abs(sum(alpha) - 1.0) > 1e-9:
            raise ValueError(f"power fractions must sum to 1, got {sum(alpha)}")
        return alpha


def _sorted_gains(gains, users: int) -> np.ndarray:
    gains = np.asarray(gains, dtype=np.float64)
    if gains.shape[-1] != users:
        raise ValueError(f"expected {users} gains, got shape {gains.shape}")
    if np.any(gains < 0):
        raise ValueError("channel gains must be non-negative")
    if np.any(np.diff(gains, axis=-1) < 0):
        raise ValueError("gains must be sorted ascending (weakest user first)")
    return gains


def noma_sinrs(cfg: NomaConfig, gains) -> np.ndarray:
    """
    Per-user SINR of the degraded broadcast SIC chain.

    User i decodes after cancelling the weaker users and treats the power of
    the stronger users as noise: Pα_i g_i / (P g_i Σ_{j>i} α_j + 1).
    """
    alpha = np.asarray(cfg.alpha)
    gains = _sorted_gains(gains, len(alpha))
    stronger = np.cumsum(alpha[::-1])[::-1] - alpha
    return cfg.power * alpha * gains / (cfg.power * gains * stronger + 1.0)


def noma_rates(cfg: NomaConfig, gains) -> np.ndarray:
    """Rates in bits/symbol, weakest user first (the two-user region for L = 2)."""
    return np.log2(1.0 + noma_sinrs(cfg, gains))


def noma_sum_rate(cfg: NomaConfig, gains) -> Union[float, np.ndarray]:
    """Sum rate; equals log2(1 + P·g) whenever all gains equal g."""
    rates = noma_rates(cfg, gains)
    total = rates.sum(axis=-1)
    return float(total) if np.ndim(total) == 0 else total


def noma_throughput(cfg: NomaConfig, gains, table: ThroughputTable, valid=True) -> np.ndarray:
    """
    NOMA per-user throughput through a look-up table.

    Groups flagged invalid by the scheduler (similar gains) collapse to the
    single-user throughput table(P·g_min), split across users in proportion
    to their rates at equalized gains.

    Args:
        cfg: Power and power fractions
        gains: Sorted gains, shape (..., L)
        table: SINR → throughput look-up
        valid: Scheduler validity per group, broadcastable to gains[..., 0]

    Returns:
        Throughput per user, shape (..., L)
    """
    gains = _sorted_gains(gains, len(cfg.alpha))
    separated = table(noma_sinrs(cfg, gains))

    weakest = gains[..., :1]
    equalized = noma_rates(cfg, np.broadcast_to(weakest, gains.shape))
    total = equalized.sum(axis=-1, keepdims=True)
    share = np.divide(equalized, total, out=np.zeros_like(equalized), where=total > 0)
    collapsed = share * np.asarray(table(cfg.power * weakest))

    valid = np.asarray(valid, dtype=bool)[..., None]
    return np.where(valid, separated, collapsed)


def _check_shares(shares, users: int) -> np.ndarray:
    shares = np.asarray(shares, dtype=np.float64)
    if shares.shape != (users,):
        raise ValueError(f"expected {users} time shares, got {shares.shape}")
    if np.any(shares < 0) or abs(shares.sum() - 1.0) > 1e-9:
        raise ValueError(f"time shares must be non-negative and sum to 1, got {shares.tolist()}")
    return shares


def oma_rates(power: float, gains, time_shares) -> np.ndarray:
    """R_i = share_i · log2(1 + P|h_i|²)."""
    gains = np.asarray(gains, dtype=np.float64)
    shares = _check_shares(time_shares, gains.shape[-1])
    return shares * np.log2(1.0 + power * gains)


def oma_throughput(power: float, gains, time_shares, table: ThroughputTable) -> np.ndarray:
    gains = np.asarray(gains, dtype=np.float64)
    shares = _check_shares(time_shares, gains.shape[-1])
    return shares * table(power * gains)
