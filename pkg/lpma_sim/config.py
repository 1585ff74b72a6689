"""Configuration settings for the LPMA link simulator."""

from pathlib import Path
from typing import Dict, List, Tuple


class Config:
    """Main configuration class."""

    # Paths
    BASE_DIR: Path = Path(__file__).parent.parent
    CONFIG_DIR: Path = BASE_DIR / "configs"
    DATA_DIR: Path = BASE_DIR / "data"
    LOG_DIR: Path = DATA_DIR / "logs"
    RESULTS_DIR: Path = DATA_DIR / "results"

    # Reproducibility
    DEFAULT_SEED: int = 20170521
    DEFAULT_TRIALS: int = 1000
    TRIAL_BATCH_SIZE: int = 512

    # Statistics
    CONFIDENCE_LEVEL: float = 0.95

    # FEC
    MAX_CODEBOOK_SIZE: int = 100_000

    # Link budget (single cell, downlink)
    TX_POWER_DBM: float = 46.0
    NOISE_DENSITY_DBM_HZ: float = -174.0
    NOISE_FIGURE_DB: float = 5.0
    BANDWIDTH_HZ: float = 10e6
    PATHLOSS_INTERCEPT_DB: float = 21.5
    PATHLOSS_SLOPE: float = 36.7

    # Scheduling
    PAIRING_GAIN_RATIO_THRESHOLD: float = 2.0
    DEFAULT_POPULATION_GAINS: Dict[int, float] = {
        1: 0.10,
        2: 1.00,
        3: 0.12,
        4: 1.10,
    }
    PAIRING_TRIALS: int = 100_000

    # Candidate primes per ring, as (a, b) coordinates in the ring basis
    PRIME_TABLES: Dict[str, List[Tuple[int, int]]] = {
        "rational-integers": [(2, 0), (3, 0), (5, 0), (7, 0), (11, 0), (13, 0)],
        "gaussian-integers": [(1, 1), (2, 1), (1, 2), (3, 2), (2, 3)],
        "eisenstein-integers": [(2, 1), (2, 3), (3, 2), (1, 4), (4, 1), (2, 5), (5, 2)],
    }

    # LTE 4-bit CQI table: (SINR threshold dB, efficiency bits/symbol)
    LTE_CQI_TABLE: List[Tuple[float, float]] = [
        (-6.7, 0.1523),
        (-4.7, 0.2344),
        (-2.3, 0.3770),
        (0.2, 0.6016),
        (2.4, 0.8770),
        (4.3, 1.1758),
        (5.9, 1.4766),
        (8.1, 1.9141),
        (10.3, 2.4063),
        (11.7, 2.7305),
        (14.1, 3.3223),
        (16.3, 3.9023),
        (18.7, 4.5234),
        (21.0, 5.1152),
        (22.7, 5.5547),
    ]

    # Logging
    LOG_LEVEL: str = "INFO"

# Global config instance
config = Config()

# Ensure directories exist
config.DATA_DIR.mkdir(exist_ok=True)
config.LOG_DIR.mkdir(exist_ok=True)
