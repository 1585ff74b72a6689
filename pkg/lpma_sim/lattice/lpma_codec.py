"""Multilevel lattice superposition encoder and modulo-lattice receivers.

Each user ℓ owns a prime θ_ℓ and a linear code C_ℓ over F_q with q the
residue-field size of θ_ℓ. The encoder weights user ℓ's codeword by the
product of every other user's prime and reduces the sum modulo M = Πθ_ℓ, so
a receiver can strip all other users with one fold modulo θ_ℓ.

Levels are numbered 1..L in channel order (level 1 is the weakest user).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from lpma_sim.lattice.finite_field_codes import LinearCode, fec_decode, fec_encode, reencode
from lpma_sim.lattice.ring_arithmetic import (
    RingDomain,
    RingElement,
    RingPrime,
    are_coprime,
    embed,
    embed_array,
    fold_array,
    inverse_mod,
    mod_ring_array,
    mul,
    quantize_array,
)

logger = logging.getLogger(__name__)


class DecoderKind(str, Enum):
    SIC = "sic"
    PIC = "pic"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class LevelConfig:
    """One code level: the user it serves, its prime and its code."""

    user_id: int
    theta: RingPrime
    code: LinearCode

    def __post_init__(self):
        if self.code.q != self.theta.norm_q:
            raise ValueError(
                f"user {self.user_id}: code over F_{self.code.q} does not match "
                f"residue field F_{self.theta.norm_q} of θ = {self.theta}"
            )


@dataclass(frozen=True)
class LatticeWord:
    """Canonical representatives mod M of one block, as coordinate arrays."""

    domain: RingDomain
    a: np.ndarray
    b: np.ndarray

    def embed(self) -> np.ndarray:
        return embed_array(self.a, self.b, self.domain)


@dataclass(frozen=True)
class TransmitSignal:
    samples: np.ndarray
    word: LatticeWord
    codewords: Tuple[np.ndarray, ...]


@dataclass(frozen=True)
class LevelDecision:
    level: int
    user_id: int
    w_hat: np.ndarray
    v_hat: np.ndarray


@dataclass
class DecodeResult:
    """Decoded levels of one receiver, keyed by level number."""

    decoder_kind: DecoderKind
    decisions: Dict[int, LevelDecision] = field(default_factory=dict)

    def block_correct(self, level: int, truth: np.ndarray) -> np.ndarray:
        """Per-block success flag of a level against the sent message."""
        w_hat = self.decisions[level].w_hat
        return np.all(w_hat == np.asarray(truth), axis=-1)


def _product(elements: Iterable[RingElement], domain: RingDomain) -> RingElement:
    return reduce(mul, elements, RingElement.one(domain))


def _cofactors(thetas: Sequence[RingPrime], domain: RingDomain) -> Tuple[RingElement, ...]:
    return tuple(
        _product((t.value for j, t in enumerate(thetas) if j != i), domain)
        for i in range(len(thetas))
    )


def representative_set(domain: RingDomain, thetas: Sequence[RingPrime]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Coordinates of every class of R/MR, enumerated through the CRT map.

    Row order follows the lexicographic order of the field tuples
    (s_1, ..., s_L).
    """
    modulus = _product((t.value for t in thetas), domain)
    cofactors = _cofactors(thetas, domain)
    grids = np.meshgrid(*[np.arange(t.norm_q, dtype=np.int64) for t in thetas], indexing="ij")
    tuples = [g.ravel() for g in grids]
    raw_a = sum(s * c.a for s, c in zip(tuples, cofactors))
    raw_b = sum(s * c.b for s, c in zip(tuples, cofactors))
    return mod_ring_array(raw_a, raw_b, modulus)


def derive_scaling_and_dither(domain: RingDomain, thetas: Sequence[RingPrime], power: float) -> Tuple[float, complex]:
    """
    Dither centering the constellation and the scale meeting the power budget.

    Args:
        domain: Ring of the lattice
        thetas: Level primes
        power: Average transmit energy per symbol

    Returns:
        (beta, u) where u is the negated constellation mean and
        beta = sqrt(P / E|W + u|²) over the full representative set
    """
    if power <= 0:
        raise ValueError(f"transmit power must be positive, got {power}")
    a, b = representative_set(domain, thetas)
    points = embed_array(a, b, domain)
    dither = -complex(points.mean())
    energy = float(np.mean(np.abs(points + dither) ** 2))
    beta = float(np.sqrt(power / energy))
    logger.debug(f"{len(points)} constellation points, energy {energy:.4f}, beta {beta:.4f}, dither {dither:.4f}")
    return beta, dither


@dataclass(frozen=True, eq=False)
class LpmaConfig:
    """Immutable encoder/decoder description shared by every receiver."""

    domain: RingDomain
    levels: Tuple[LevelConfig, ...]
    block_length: int
    power: float
    beta: float
    dither: complex
    modulus: RingElement
    cofactors: Tuple[RingElement, ...]
    descale: Tuple[int, ...]

    @classmethod
    def build(cls, levels: Sequence[LevelConfig], power: float = 1.0) -> "LpmaConfig":
        """
        Validate the levels and derive M, co-factors, descaling factors, β and u.

        Args:
            levels: Level configurations in channel order (weakest first)
            power: Average transmit energy per symbol

        Returns:
            A ready-to-use configuration
        """
        levels = tuple(levels)
        if not levels:
            raise ValueError("at least one level is required")

        domain = levels[0].theta.domain
        for level in levels:
            if level.theta.domain is not domain:
                raise ValueError(f"user {level.user_id}: prime {level.theta} is not in {domain.value}")

        lengths = {level.code.n for level in levels}
        if len(lengths) != 1:
            raise ValueError(f"all codes must share one block length, got {sorted(lengths)}")

        user_ids = [level.user_id for level in levels]
        if len(set(user_ids)) != len(user_ids):
            raise ValueError(f"user ids must be unique, got {user_ids}")

        for x, y in combinations(levels, 2):
            if not are_coprime(x.theta.value, y.theta.value):
                raise ValueError(f"primes {x.theta} and {y.theta} are not coprime")

        thetas = [level.theta for level in levels]
        cofactors = _cofactors(thetas, domain)
        descale = tuple(
            t.to_field(inverse_mod(c, t)) for t, c in zip(thetas, cofactors)
        )
        beta, dither = derive_scaling_and_dither(domain, thetas, power)

        return cls(
            domain=domain,
            levels=levels,
            block_length=lengths.pop(),
            power=power,
            beta=beta,
            dither=dither,
            modulus=_product((t.value for t in thetas), domain),
            cofactors=cofactors,
            descale=descale,
        )

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    def level(self, index: int) -> LevelConfig:
        self._check_level(index)
        return self.levels[index - 1]

    def _check_level(self, index: int):
        if not 1 <= index <= self.num_levels:
            raise ValueError(f"level {index} outside 1..{self.num_levels}")

    def level_of_user(self, user_id: int) -> int:
        for i, level in enumerate(self.levels, 1):
            if level.user_id == user_id:
                return i
        raise KeyError(f"user {user_id} has no level")


def map_pi_a(cfg: LpmaConfig, codewords: Sequence[np.ndarray]) -> LatticeWord:
    """
    Symbol-wise CRT map: Σ_ℓ lift(v_ℓ)·Π_{ℓ'≠ℓ}θ_ℓ' reduced mod M.

    Args:
        cfg: LPMA configuration
        codewords: One codeword array per level, shape (..., n)

    Returns:
        The lattice word of canonical representatives
    """
    if len(codewords) != cfg.num_levels:
        raise ValueError(f"expected {cfg.num_levels} codewords, got {len(codewords)}")

    raw_a = 0
    raw_b = 0
    for level, cofactor, v in zip(cfg.levels, cfg.cofactors, codewords):
        v = np.asarray(v, dtype=np.int64)
        if v.shape[-1] != cfg.block_length:
            raise ValueError(f"user {level.user_id}: codeword length {v.shape[-1]} != n = {cfg.block_length}")
        if np.any(v < 0) or np.any(v >= level.theta.norm_q):
            raise ValueError(f"user {level.user_id}: codeword symbols outside F_{level.theta.norm_q}")
        raw_a = raw_a + v * cofactor.a
        raw_b = raw_b + v * cofactor.b

    a, b = mod_ring_array(raw_a, raw_b, cfg.modulus)
    return LatticeWord(cfg.domain, a, b)


def lpma_encode(cfg: LpmaConfig, messages: Sequence[np.ndarray]) -> TransmitSignal:
    """x = β·(W(C_1(w_1), ..., C_L(w_L)) + u)."""
    if len(messages) != cfg.num_levels:
        raise ValueError(f"expected {cfg.num_levels} messages, got {len(messages)}")
    codewords = tuple(fec_encode(level.code, w) for level, w in zip(cfg.levels, messages))
    word = map_pi_a(cfg, codewords)
    samples = cfg.beta * (word.embed() + cfg.dither)
    return TransmitSignal(samples=samples, word=word, codewords=codewords)


def channel_compensate(cfg: LpmaConfig, y, h) -> np.ndarray:
    """ỹ = y/(h·β) − u, bringing the block back to unit lattice scale."""
    h = np.asarray(h, dtype=np.complex128)
    if np.any(h == 0):
        raise ZeroDivisionError("channel gain h must be nonzero")
    return np.asarray(y, dtype=np.complex128) / (h * cfg.beta) - cfg.dither


def reconstruct_level(cfg: LpmaConfig, level: int, w_hat: np.ndarray) -> np.ndarray:
    """Complex contribution of a decoded level: its message re-encoded, lifted and weighted by the co-factor."""
    v_hat = reencode(cfg.level(level).code, w_hat)
    return np.asarray(v_hat, dtype=np.float64) * embed(cfg.cofactors[level - 1])


def extract_level(cfg: LpmaConfig, y_tilde, level: int, residual=None) -> LevelDecision:
    """
    Peel one level off with a single fold modulo θ_ℓ.

    The folded block is quantized to the ring, mapped into F_q, descaled by
    the inverse of the level's co-factor and handed to the FEC decoder.

    Args:
        cfg: LPMA configuration
        y_tilde: Compensated received block, shape (..., n)
        level: Level number 1..L
        residual: y_tilde minus already reconstructed levels (defaults to y_tilde)

    Returns:
        The level's decoded message and codeword
    """
    spec = cfg.level(level)
    source = y_tilde if residual is None else residual
    folded = fold_array(source, spec.theta.value)
    a, b = quantize_array(folded, cfg.domain)
    q = spec.theta.norm_q
    symbols = (spec.theta.to_field_array(a, b) * cfg.descale[level - 1]) % q
    w_hat, v_hat = fec_decode(spec.code, symbols)
    return LevelDecision(level=level, user_id=spec.user_id, w_hat=w_hat, v_hat=v_hat)


def mlo_sic_decode(cfg: LpmaConfig, y_tilde, target_level: int) -> DecodeResult:
    """Successive decoding of levels 1..t, subtracting each re-encoded level."""
    cfg._check_level(target_level)
    y_tilde = np.asarray(y_tilde, dtype=np.complex128)
    result = DecodeResult(DecoderKind.SIC)
    residual = y_tilde
    for level in range(1, target_level + 1):
        decision = extract_level(cfg, y_tilde, level, residual)
        result.decisions[level] = decision
        residual = residual - reconstruct_level(cfg, level, decision.w_hat)
    return result


def mlo_pic_decode(cfg: LpmaConfig, y_tilde, level: int) -> DecodeResult:
    """Parallel decoding: one fold of the compensated block, no subtraction."""
    result = DecodeResult(DecoderKind.PIC)
    result.decisions[level] = extract_level(cfg, y_tilde, level)
    return result


def hybrid_decode(
    cfg: LpmaConfig,
    y_tilde,
    pic_levels: Iterable[int],
    sic_levels: Sequence[int],
    target_level: Optional[int] = None,
) -> DecodeResult:
    """
    PIC-decode a set of levels, cancel them, then run SIC over the rest.

    Args:
        cfg: LPMA configuration
        y_tilde: Compensated received block
        pic_levels: Levels decoded in parallel from y_tilde
        sic_levels: Levels decoded successively, in order, after cancellation
        target_level: Optional level that the split must cover

    Returns:
        Decisions for every level in either set
    """
    pic = sorted(set(pic_levels))
    sic = list(sic_levels)
    overlap = set(pic) & set(sic)
    if overlap:
        raise ValueError(f"levels {sorted(overlap)} are in both the PIC and SIC sets")
    if len(set(sic)) != len(sic):
        raise ValueError(f"SIC levels repeat: {sic}")
    for level in pic + sic:
        cfg._check_level(level)
    if target_level is not None and target_level not in pic and target_level not in sic:
        raise ValueError(f"target level {target_level} is in neither the PIC nor the SIC set")

    y_tilde = np.asarray(y_tilde, dtype=np.complex128)
    result = DecodeResult(DecoderKind.HYBRID)
    residual = y_tilde
    for level in pic:
        decision = extract_level(cfg, y_tilde, level)
        result.decisions[level] = decision
        residual = residual - reconstruct_level(cfg, level, decision.w_hat)
    for level in sic:
        decision = extract_level(cfg, y_tilde, level, residual)
        result.decisions[level] = decision
        residual = residual - reconstruct_level(cfg, level, decision.w_hat)
    return result
