"""Single-cell downlink channel: link budget, path loss, Rayleigh fading, AWGN.

Noise variance is normalized to 1 and the signal is scaled to the link SNR,
so a realization's |h|² is the instantaneous SNR at unit transmit power.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from lpma_sim.config import config

logger = logging.getLogger(__name__)


class LinkBudget(BaseModel):
    """Downlink link budget; defaults follow the macro-cell evaluation setup."""

    model_config = ConfigDict(frozen=True)

    tx_power_dbm: float = config.TX_POWER_DBM
    noise_density_dbm_hz: float = config.NOISE_DENSITY_DBM_HZ
    noise_figure_db: float = config.NOISE_FIGURE_DB
    bandwidth_hz: float = Field(default=config.BANDWIDTH_HZ, gt=0.0)
    pathloss_intercept_db: float = config.PATHLOSS_INTERCEPT_DB
    pathloss_slope: float = config.PATHLOSS_SLOPE

    @property
    def noise_power_dbm(self) -> float:
        return self.noise_density_dbm_hz + 10.0 * np.log10(self.bandwidth_hz) + self.noise_figure_db


@dataclass(frozen=True)
class ChannelRealization:
    """Complex gain of one user (or an array of per-trial gains) and the noise variance per complex symbol."""

    h: Union[complex, np.ndarray]
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"noise variance must be positive, got {self.sigma2}")

    @property
    def snr(self) -> Union[float, np.ndarray]:
        snr = np.abs(self.h) ** 2 / self.sigma2
        return float(snr) if np.ndim(snr) == 0 else snr


def pathloss_db(distance_km, budget: Optional[LinkBudget] = None):
    """intercept + slope·log10(D), D in km."""
    budget = budget or LinkBudget()
    distance_km = np.asarray(distance_km, dtype=np.float64)
    if np.any(distance_km <= 0):
        raise ValueError("distance must be positive")
    loss = budget.pathloss_intercept_db + budget.pathloss_slope * np.log10(distance_km)
    return float(loss) if loss.ndim == 0 else loss


def snr_db_from_budget(budget: LinkBudget, distance_km):
    return budget.tx_power_dbm - pathloss_db(distance_km, budget) - budget.noise_power_dbm


def snr_from_budget(budget: LinkBudget, distance_km):
    """Linear SNR at distance D: Tx power − path loss − noise power, from dB."""
    return 10.0 ** (snr_db_from_budget(budget, distance_km) / 10.0)


def rayleigh_sample(rng: np.random.Generator, size=None) -> Union[complex, np.ndarray]:
    """Circularly-symmetric complex Gaussian with unit mean-square magnitude."""
    h = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    return complex(h) if size is None else h


def complex_noise(rng: np.random.Generator, sigma2: float, size) -> np.ndarray:
    return np.sqrt(sigma2 / 2.0) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def apply_channel(
    x,
    realization: ChannelRealization,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    y = h·x + z with z ~ CN(0, σ²) per symbol.

    Pass `noise` to reuse a block drawn earlier (it must already carry the
    variance σ²); otherwise it is drawn from `rng`. `h` broadcasts against `x`.
    """
    x = np.asarray(x, dtype=np.complex128)
    faded = realization.h * x
    if noise is None:
        if rng is None:
            raise ValueError("apply_channel needs either an rng or a pre-drawn noise block")
        noise = complex_noise(rng, realization.sigma2, faded.shape)
    return faded + noise


def realization_from_snr(
    snr,
    rng: Optional[np.random.Generator] = None,
    fading: bool = True,
    fade=None,
) -> ChannelRealization:
    """
    Realization with mean SNR `snr` (linear, scalar or array), optionally Rayleigh faded.

    A pre-drawn `fade` is used as given; otherwise one is drawn from `rng`
    per SNR entry when `fading` is on.
    """
    snr = np.asarray(snr, dtype=np.float64)
    if np.any(snr < 0):
        raise ValueError(f"SNR must be non-negative, got {snr}")
    if fade is None:
        fade = rayleigh_sample(rng, None if snr.ndim == 0 else snr.shape) if fading else 1.0
    h = np.sqrt(snr) * np.asarray(fade, dtype=np.complex128)
    return ChannelRealization(h=complex(h) if h.ndim == 0 else h, sigma2=1.0)
