"""Linear block codes over prime fields: the per-user FEC encoders and decoders."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import product
from typing import Tuple

import numpy as np

from lpma_sim.config import config
from lpma_sim.lattice.ring_arithmetic import is_rational_prime

logger = logging.getLogger(__name__)


class CodeKind(str, Enum):
    IDENTITY = "identity"
    REPETITION = "repetition"
    SINGLE_PARITY_CHECK = "single-parity-check"
    GENERATOR = "generator"


def _rank_mod_q(matrix: np.ndarray, q: int) -> int:
    """Rank over F_q by Gaussian elimination."""
    m = matrix.copy() % q
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, col] != 0), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = (m[rank] * pow(int(m[rank, col]), -1, q)) % q
        for r in range(rows):
            if r != rank and m[r, col] != 0:
                m[r] = (m[r] - m[r, col] * m[rank]) % q
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True, eq=False)
class LinearCode:
    """
    An (n, k) linear code over F_q given by its generator matrix G (k×n).

    Messages and codewords are int64 arrays whose last axis has length k
    and n respectively; leading axes are batch dimensions.
    """

    q: int
    generator: np.ndarray
    kind: CodeKind = CodeKind.GENERATOR
    name: str = field(default="")

    def __post_init__(self):
        if not is_rational_prime(self.q):
            raise ValueError(f"code alphabet size {self.q} is not a prime")
        g = np.atleast_2d(np.asarray(self.generator, dtype=np.int64))
        object.__setattr__(self, "generator", g)
        k, n = g.shape
        if k > n:
            raise ValueError(f"k = {k} exceeds n = {n}")
        if np.any(g < 0) or np.any(g >= self.q):
            raise ValueError(f"generator entries must lie in F_{self.q}")
        if _rank_mod_q(g, self.q) != k:
            raise ValueError(f"generator matrix does not have full rank {k} over F_{self.q}")
        if not self.name:
            object.__setattr__(self, "name", f"{self.kind.value}({n},{k}) over F_{self.q}")

    @classmethod
    def identity(cls, q: int, n: int) -> "LinearCode":
        return cls(q, np.eye(n, dtype=np.int64), CodeKind.IDENTITY)

    @classmethod
    def repetition(cls, q: int, n: int) -> "LinearCode":
        return cls(q, np.ones((1, n), dtype=np.int64), CodeKind.REPETITION)

    @classmethod
    def single_parity_check(cls, q: int, k: int) -> "LinearCode":
        # v = (w, −Σw) so every codeword sums to zero
        parity = np.full((k, 1), q - 1, dtype=np.int64)
        return cls(q, np.hstack([np.eye(k, dtype=np.int64), parity]), CodeKind.SINGLE_PARITY_CHECK)

    @classmethod
    def from_generator(cls, q: int, rows) -> "LinearCode":
        return cls(q, np.asarray(rows, dtype=np.int64), CodeKind.GENERATOR)

    @property
    def k(self) -> int:
        return self.generator.shape[0]

    @property
    def n(self) -> int:
        return self.generator.shape[1]

    @property
    def rate(self) -> float:
        return self.k / self.n

    @cached_property
    def codebook(self) -> Tuple[np.ndarray, np.ndarray]:
        """All (message, codeword) pairs with messages in lexicographic order."""
        size = self.q ** self.k
        if size > config.MAX_CODEBOOK_SIZE:
            raise ValueError(
                f"codebook of {self.name} has {size} words, above the exhaustive "
                f"decoding limit {config.MAX_CODEBOOK_SIZE}"
            )
        messages = np.array(list(product(range(self.q), repeat=self.k)), dtype=np.int64).reshape(size, self.k)
        return messages, (messages @ self.generator) % self.q

    def _check_symbols(self, x: np.ndarray, length: int, what: str) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.ndim == 0 or x.shape[-1] != length:
            raise ValueError(f"{what} length mismatch: expected {length}, got shape {x.shape}")
        if np.any(x < 0) or np.any(x >= self.q):
            raise ValueError(f"{what} symbols must lie in F_{self.q}")
        return x

    def encode(self, w) -> np.ndarray:
        w = self._check_symbols(w, self.k, "message")
        return (w @ self.generator) % self.q

    def decode(self, r) -> Tuple[np.ndarray, np.ndarray]:
        """
        Minimum Hamming distance decoding.

        Ties go to the lexicographically smallest message. Identity,
        repetition and single-parity-check codes use closed forms that agree
        with the exhaustive search; other codes search the codebook.

        Args:
            r: Received symbols, shape (..., n)

        Returns:
            (w_hat, v_hat) with shapes (..., k) and (..., n)
        """
        r = self._check_symbols(r, self.n, "received word")
        batch_shape = r.shape[:-1]
        flat = r.reshape(-1, self.n)

        if self.kind is CodeKind.IDENTITY:
            w = flat.copy()
        elif self.kind is CodeKind.REPETITION:
            w = self._decode_repetition(flat)
        elif self.kind is CodeKind.SINGLE_PARITY_CHECK:
            w = self._decode_single_parity(flat)
        else:
            w = self.exhaustive_decode(flat)[0]

        w = w.reshape(batch_shape + (self.k,))
        return w, self.encode(w)

    def _decode_repetition(self, flat: np.ndarray) -> np.ndarray:
        counts = (flat[:, :, None] == np.arange(self.q)).sum(axis=1)
        # argmax returns the first maximum: the smallest symbol wins ties
        return np.argmax(counts, axis=1).astype(np.int64)[:, None]

    def _decode_single_parity(self, flat: np.ndarray) -> np.ndarray:
        k = self.k
        syndrome = flat.sum(axis=1) % self.q
        w = flat[:, :k].copy()
        # With a nonzero syndrome the k+1 nearest codewords each fix one
        # position; the smallest message lowers the earliest possible symbol.
        lowered = (w - syndrome[:, None]) % self.q
        improves = (lowered < w) & (syndrome[:, None] != 0)
        rows = np.flatnonzero(improves.any(axis=1))
        cols = np.argmax(improves[rows], axis=1)
        w[rows, cols] = lowered[rows, cols]
        return w

    def exhaustive_decode(self, r, chunk: int = 2048) -> Tuple[np.ndarray, np.ndarray]:
        """Brute-force search of the whole codebook."""
        r = self._check_symbols(r, self.n, "received word")
        flat = r.reshape(-1, self.n)
        messages, codewords = self.codebook
        picks = []
        for start in range(0, flat.shape[0], chunk):
            block = flat[start:start + chunk]
            distance = (block[:, None, :] != codewords[None, :, :]).sum(axis=2)
            picks.append(np.argmin(distance, axis=1))
        pick = np.concatenate(picks) if picks else np.zeros(0, dtype=np.int64)
        w = messages[pick].reshape(r.shape[:-1] + (self.k,))
        v = codewords[pick].reshape(r.shape)
        return w, v

    @cached_property
    def minimum_distance(self) -> int:
        _, codewords = self.codebook
        weights = np.count_nonzero(codewords, axis=1)
        return int(weights[weights > 0].min())


def fec_encode(code: LinearCode, w) -> np.ndarray:
    """v = w·G over F_q."""
    return code.encode(w)


def fec_decode(code: LinearCode, r) -> Tuple[np.ndarray, np.ndarray]:
    return code.decode(r)


def reencode(code: LinearCode, w_hat) -> np.ndarray:
    """Rebuild the codeword of a decoded message for interference subtraction."""
    return code.encode(w_hat)
