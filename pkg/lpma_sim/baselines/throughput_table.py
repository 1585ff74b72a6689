"""SINR → throughput look-up used for baseline accounting and prime selection."""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from lpma_sim.config import config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThroughputTable:
    """
    Throughput in bits/symbol as a function of linear SINR.

    The Shannon table is log2(1 + SINR). Step tables return the efficiency of
    the highest row whose SINR threshold (dB) is met, and 0 below the first row.
    """

    name: str
    thresholds_db: Tuple[float, ...] = ()
    efficiencies: Tuple[float, ...] = ()

    @classmethod
    def shannon(cls) -> "ThroughputTable":
        return cls("shannon")

    @classmethod
    def lte_cqi(cls) -> "ThroughputTable":
        thresholds, efficiencies = zip(*config.LTE_CQI_TABLE)
        return cls("lte-cqi", tuple(thresholds), tuple(efficiencies))

    @classmethod
    def from_name(cls, name: str) -> "ThroughputTable":
        builders = {"shannon": cls.shannon, "lte-cqi": cls.lte_cqi}
        if name not in builders:
            raise ValueError(f"unknown throughput table '{name}', expected one of {sorted(builders)}")
        return builders[name]()

    @property
    def peak(self) -> float:
        return float("inf") if self.name == "shannon" else max(self.efficiencies)

    def __call__(self, sinr) -> Union[float, np.ndarray]:
        sinr = np.asarray(sinr, dtype=np.float64)
        if self.name == "shannon":
            out = np.log2(1.0 + sinr)
        else:
            with np.errstate(divide="ignore"):
                sinr_db = 10.0 * np.log10(sinr)
            row = np.searchsorted(np.asarray(self.thresholds_db), sinr_db, side="right") - 1
            table = np.asarray(self.efficiencies)
            out = np.where(row >= 0, table[np.clip(row, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out
