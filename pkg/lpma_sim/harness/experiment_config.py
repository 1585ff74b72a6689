"""Experiment configuration: JSON documents validated into pydantic models."""

import hashlib
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lpma_sim.baselines.baseline_schemes import NomaConfig
from lpma_sim.baselines.throughput_table import ThroughputTable
from lpma_sim.channel.channel_model import LinkBudget, snr_from_budget
from lpma_sim.config import config
from lpma_sim.lattice.finite_field_codes import LinearCode
from lpma_sim.lattice.lpma_codec import DecoderKind, LevelConfig, LpmaConfig
from lpma_sim.lattice.prime_assignment import candidate_primes, order_levels_by_channel, select_primes
from lpma_sim.lattice.ring_arithmetic import RingDomain, RingPrime

logger = logging.getLogger(__name__)


# fields that change where or how a run executes, not what it computes
RUN_FIELDS = {"output", "parallel"}


class ConfigError(ValueError):
    """Experiment configuration is well-formed but internally inconsistent."""


class Scheme(str, Enum):
    LPMA = "lpma"
    NOMA = "noma"
    OMA = "oma"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CodeSpec(_Strict):
    """Per-level FEC code; the block length comes from the experiment."""

    kind: Literal["identity", "repetition", "single-parity-check", "generator"] = "identity"
    generator: Optional[List[List[int]]] = None

    @model_validator(mode="after")
    def _generator_only_for_generator_kind(self):
        if (self.kind == "generator") != (self.generator is not None):
            raise ValueError("a generator matrix is given exactly when kind is 'generator'")
        return self

    def build(self, q: int, n: int) -> LinearCode:
        if self.kind == "identity":
            return LinearCode.identity(q, n)
        if self.kind == "repetition":
            return LinearCode.repetition(q, n)
        if self.kind == "single-parity-check":
            if n < 2:
                raise ValueError("single-parity-check codes need n >= 2")
            return LinearCode.single_parity_check(q, n - 1)
        code = LinearCode.from_generator(q, self.generator)
        if code.n != n:
            raise ValueError(f"generator has n = {code.n}, experiment block length is {n}")
        # generator codes decode by exhaustive search; build the codebook now so oversize codes fail here
        code.codebook
        return code


class UserModel(_Strict):
    """Mean channel of each user: exactly one of gains, distances or SNRs."""

    ids: Optional[List[int]] = None
    gains: Optional[List[float]] = None
    distances_km: Optional[List[float]] = None
    snr_db: Optional[List[float]] = None
    link_budget: LinkBudget = LinkBudget()

    @model_validator(mode="after")
    def _one_mode(self):
        given = [name for name in ("gains", "distances_km", "snr_db") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of gains, distances_km, snr_db must be set, got {given or 'none'}")
        values = getattr(self, given[0])
        if not values:
            raise ValueError(f"{given[0]} must not be empty")
        if self.gains is not None and any(g < 0 for g in self.gains):
            raise ValueError("gains must be non-negative")
        if self.distances_km is not None and any(d <= 0 for d in self.distances_km):
            raise ValueError("distances must be positive")
        if self.ids is not None:
            if len(self.ids) != len(values):
                raise ValueError(f"{len(self.ids)} ids for {len(values)} users")
            if len(set(self.ids)) != len(self.ids):
                raise ValueError(f"user ids must be unique, got {self.ids}")
        return self

    @property
    def count(self) -> int:
        return len(self.gains or self.distances_km or self.snr_db)

    @property
    def user_ids(self) -> List[int]:
        return list(self.ids) if self.ids is not None else list(range(1, self.count + 1))

    def mean_gains(self, power: float) -> np.ndarray:
        """Mean |h|² per user, so that the mean SNR is power·gain at unit noise."""
        if self.gains is not None:
            return np.asarray(self.gains, dtype=np.float64)
        if self.distances_km is not None:
            snr = snr_from_budget(self.link_budget, np.asarray(self.distances_km, dtype=np.float64))
        else:
            snr = 10.0 ** (np.asarray(self.snr_db, dtype=np.float64) / 10.0)
        return np.atleast_1d(snr) / power


class DecoderSpec(_Strict):
    kind: DecoderKind = DecoderKind.SIC
    pic_levels: List[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def _pic_levels_for_hybrid(self):
        if self.pic_levels and self.kind is not DecoderKind.HYBRID:
            raise ValueError("pic_levels only apply to the hybrid decoder")
        return self

    def split(self, level: int) -> Tuple[List[int], List[int]]:
        """
        (PIC set, SIC order) a user at `level` runs with the hybrid decoder.

        A configured PIC level is extracted directly. Otherwise the PIC levels
        below it are cancelled first and the rest are decoded successively.
        """
        if level in self.pic_levels:
            return [level], []
        pic = sorted(p for p in set(self.pic_levels) if p < level)
        sic = [s for s in range(1, level + 1) if s not in pic]
        return pic, sic


class PairingSpec(_Strict):
    """Random-pairing study over a four-user population."""

    gains: Dict[int, float] = Field(default_factory=lambda: dict(config.DEFAULT_POPULATION_GAINS))
    threshold: float = Field(default=config.PAIRING_GAIN_RATIO_THRESHOLD, gt=1.0)
    trials: int = Field(default=config.PAIRING_TRIALS, ge=0)
    power: float = Field(default=100.0, gt=0.0)
    alpha: Tuple[float, float] = (0.8, 0.2)
    domain: RingDomain = RingDomain.EISENSTEIN
    throughput_table: Literal["shannon", "lte-cqi"] = "shannon"

    @field_validator("domain", mode="before")
    @classmethod
    def _parse_domain(cls, value):
        return RingDomain.parse(value)


class ExperimentConfig(_Strict):
    """One Monte Carlo campaign."""

    name: str = "experiment"
    schemes: List[Scheme] = Field(default_factory=lambda: [Scheme.LPMA, Scheme.NOMA, Scheme.OMA])
    domain: RingDomain = RingDomain.RATIONAL
    primes: Union[Literal["auto"], List[Tuple[int, int]]] = "auto"
    codes: List[CodeSpec] = Field(default_factory=lambda: [CodeSpec()])
    users: UserModel
    power: float = Field(default=1.0, gt=0.0)
    alpha: Optional[List[float]] = None
    oma_shares: Optional[List[float]] = None
    noma_threshold: float = Field(default=config.PAIRING_GAIN_RATIO_THRESHOLD, gt=1.0)
    decoder: DecoderSpec = DecoderSpec()
    trials: int = Field(default=config.DEFAULT_TRIALS, ge=0)
    block_length: int = Field(default=64, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0)
    fading: bool = True
    noise: bool = True
    throughput_table: Literal["shannon", "lte-cqi"] = "shannon"
    pairing: PairingSpec = PairingSpec()
    output: Optional[str] = None
    parallel: int = Field(default=1, ge=1)

    @field_validator("domain", mode="before")
    @classmethod
    def _parse_domain(cls, value):
        return RingDomain.parse(value)

    @field_validator("primes", mode="before")
    @classmethod
    def _rational_primes_as_ints(cls, value):
        # Z primes may be written as plain integers
        if isinstance(value, list):
            return [(p, 0) if isinstance(p, int) else p for p in value]
        return value

    @field_validator("codes")
    @classmethod
    def _codes_not_empty(cls, value):
        if not value:
            raise ValueError("at least one code spec is required")
        return value

    @property
    def user_count(self) -> int:
        return self.users.count

    def table(self) -> ThroughputTable:
        return ThroughputTable.from_name(self.throughput_table)

    def mean_gains(self) -> np.ndarray:
        return self.users.mean_gains(self.power)

    def noma_config(self) -> NomaConfig:
        alpha = self.alpha or [1.0 / self.user_count] * self.user_count
        return NomaConfig(P=self.power, alpha=alpha)

    def shares(self) -> np.ndarray:
        shares = self.oma_shares or [1.0 / self.user_count] * self.user_count
        return np.asarray(shares, dtype=np.float64)

    def provenance(self) -> Dict:
        """JSON-ready config echo without the run plumbing (output path, worker count)."""
        return self.model_dump(mode="json", exclude=RUN_FIELDS)

    def digest(self) -> str:
        """sha256 of the canonical JSON dump; runs differing only in output path or workers share a digest."""
        return hashlib.sha256(self.model_dump_json(exclude=RUN_FIELDS).encode("utf-8")).hexdigest()


def check_consistency(cfg: ExperimentConfig):
    """Cross-field checks that the schema alone cannot express."""
    count = cfg.user_count
    if cfg.primes != "auto" and len(cfg.primes) != count:
        raise ConfigError(f"{len(cfg.primes)} primes configured for {count} users")
    if len(cfg.codes) not in (1, count):
        raise ConfigError(f"give one code spec or one per user, got {len(cfg.codes)} for {count} users")
    if cfg.alpha is not None and len(cfg.alpha) != count:
        raise ConfigError(f"{len(cfg.alpha)} power fractions for {count} users")
    if cfg.oma_shares is not None:
        if len(cfg.oma_shares) != count:
            raise ConfigError(f"{len(cfg.oma_shares)} time shares for {count} users")
        if any(s < 0 for s in cfg.oma_shares) or abs(sum(cfg.oma_shares) - 1.0) > 1e-9:
            raise ConfigError(f"time shares must be non-negative and sum to 1, got {cfg.oma_shares}")
    bad_levels = [p for p in cfg.decoder.pic_levels if not 1 <= p <= count]
    if bad_levels:
        raise ConfigError(f"hybrid PIC levels {bad_levels} outside 1..{count}")
    if Scheme.NOMA in cfg.schemes:
        try:
            cfg.noma_config()
        except ValueError as e:
            raise ConfigError(f"invalid NOMA power fractions: {e}") from e


def build_lpma_config(cfg: ExperimentConfig) -> LpmaConfig:
    """
    Turn the experiment's primes, codes and user model into an LpmaConfig.

    Configured primes are assigned by channel order (weakest user gets the
    smallest prime). With primes "auto", each user's prime is looked up from
    its mean SNR through the throughput table.

    Raises:
        ConfigError: Primes or codes are inconsistent
    """
    check_consistency(cfg)
    ids = cfg.users.user_ids
    snrs = dict(zip(ids, (cfg.power * cfg.mean_gains()).tolist()))
    n = cfg.block_length
    codes = cfg.codes * cfg.user_count if len(cfg.codes) == 1 else cfg.codes

    try:
        if cfg.primes == "auto":
            chosen = select_primes(snrs, cfg.table(), candidate_primes(cfg.domain))
            code_of = dict(zip(ids, codes))
            order = sorted(ids, key=lambda uid: (snrs[uid], uid))
            levels = [
                LevelConfig(uid, chosen[uid], code_of[uid].build(chosen[uid].norm_q, n))
                for uid in order
            ]
        else:
            specs = []
            for (a, b), code in zip(cfg.primes, codes):
                theta = RingPrime.from_coordinates(cfg.domain, a, b)
                specs.append((theta, code.build(theta.norm_q, n)))
            levels = order_levels_by_channel(snrs, specs)
        lpma = LpmaConfig.build(levels, power=cfg.power)
    except ValueError as e:
        logger.error(f"Invalid LPMA configuration in '{cfg.name}': {e}")
        raise ConfigError(str(e)) from e

    logger.debug(
        "levels: " + ", ".join(f"user {lv.user_id} θ={lv.theta} ({lv.code.name})" for lv in lpma.levels)
    )
    return lpma


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a JSON experiment file, then run the consistency checks."""
    path = Path(path)
    cfg = ExperimentConfig.model_validate_json(path.read_text(encoding="utf-8"))
    check_consistency(cfg)
    logger.info(f"Loaded experiment '{cfg.name}' from {path} ({cfg.user_count} users, {cfg.trials} trials)")
    return cfg
