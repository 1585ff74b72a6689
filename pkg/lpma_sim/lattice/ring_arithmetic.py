"""Exact arithmetic over Z, Z[i] and Z[ω] plus nearest-point quantization.

Scalar operations work on `RingElement` values with Python integers, so they
never overflow. The `*_array` variants are the vectorized counterparts used by
the codec on whole blocks of symbols; they run on int64/complex128 numpy
arrays and refuse inputs that could leave the safe int64 range.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

SQRT3_2 = math.sqrt(3.0) / 2.0
_INT64_SAFE = 2 ** 62

ComplexSample = complex


class RingDomain(str, Enum):
    """The three principal ideal domains a lattice can be built over."""

    RATIONAL = "rational-integers"
    GAUSSIAN = "gaussian-integers"
    EISENSTEIN = "eisenstein-integers"

    @classmethod
    def parse(cls, text: Union[str, "RingDomain"]) -> "RingDomain":
        """Accept the canonical tag or the short names Z, Z[i], Z[w]."""
        if isinstance(text, RingDomain):
            return text
        aliases = {
            "z": cls.RATIONAL,
            "z[i]": cls.GAUSSIAN,
            "z[w]": cls.EISENSTEIN,
            "z[omega]": cls.EISENSTEIN,
            "z[ω]": cls.EISENSTEIN,
        }
        key = str(text).strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class RingElement:
    """Element a + b·e of R where e is 1, i or ω depending on the domain."""

    domain: RingDomain
    a: int
    b: int = 0

    def __post_init__(self):
        object.__setattr__(self, "domain", RingDomain.parse(self.domain))
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))
        if self.domain is RingDomain.RATIONAL and self.b != 0:
            raise ValueError(f"rational integer must have b = 0, got b = {self.b}")

    @classmethod
    def zero(cls, domain: RingDomain) -> "RingElement":
        return cls(domain, 0, 0)

    @classmethod
    def one(cls, domain: RingDomain) -> "RingElement":
        return cls(domain, 1, 0)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __add__(self, other: "RingElement") -> "RingElement":
        return add(self, other)

    def __sub__(self, other: "RingElement") -> "RingElement":
        return add(self, -other)

    def __neg__(self) -> "RingElement":
        return RingElement(self.domain, -self.a, -self.b)

    def __mul__(self, other: Union["RingElement", int]) -> "RingElement":
        if isinstance(other, (int, np.integer)):
            return RingElement(self.domain, self.a * int(other), self.b * int(other))
        return mul(self, other)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if self.domain is RingDomain.RATIONAL:
            return str(self.a)
        symbol = "i" if self.domain is RingDomain.GAUSSIAN else "ω"
        return f"{self.a}{self.b:+d}{symbol}"


def is_rational_prime(n: int) -> bool:
    """Deterministic primality test by trial division (small moduli only)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _check_same_domain(x: RingElement, y: RingElement):
    if x.domain is not y.domain:
        raise ValueError(f"domain mismatch: {x.domain.value} vs {y.domain.value}")


def _mul_coords(domain: RingDomain, a, b, c, d):
    """Product of (a + b·e)(c + d·e); works on ints and numpy arrays alike."""
    if domain is RingDomain.GAUSSIAN:
        return a * c - b * d, a * d + b * c
    if domain is RingDomain.EISENSTEIN:
        # ω² = −1 − ω
        return a * c - b * d, a * d + b * c - b * d
    return a * c, b * 0


def _norm_coords(domain: RingDomain, a, b):
    if domain is RingDomain.GAUSSIAN:
        return a * a + b * b
    if domain is RingDomain.EISENSTEIN:
        return a * a - a * b + b * b
    return a * a


def add(x: RingElement, y: RingElement) -> RingElement:
    _check_same_domain(x, y)
    return RingElement(x.domain, x.a + y.a, x.b + y.b)


def mul(x: RingElement, y: RingElement) -> RingElement:
    _check_same_domain(x, y)
    a, b = _mul_coords(x.domain, x.a, x.b, y.a, y.b)
    return RingElement(x.domain, a, b)


def conjugate(x: RingElement) -> RingElement:
    """Complex conjugate, expressed back in the ring basis."""
    if x.domain is RingDomain.GAUSSIAN:
        return RingElement(x.domain, x.a, -x.b)
    if x.domain is RingDomain.EISENSTEIN:
        # conj(ω) = ω² = −1 − ω
        return RingElement(x.domain, x.a - x.b, -x.b)
    return x


def norm(x: RingElement) -> int:
    """Algebraic norm; a² for rational integers so Euclidean division is uniform."""
    return _norm_coords(x.domain, x.a, x.b)


def is_unit(x: RingElement) -> bool:
    return norm(x) == 1


def _round_nearest(num: int, den: int) -> int:
    """Nearest integer to num/den (den > 0), ties towards the smaller value."""
    return -((den - 2 * num) // (2 * den))


def _quotient_offsets(domain: RingDomain):
    if domain is RingDomain.RATIONAL:
        return [(-1, 0), (0, 0), (1, 0)]
    return [(da, db) for da in (-1, 0, 1) for db in (-1, 0, 1)]


def divmod_nearest(x: RingElement, m: RingElement) -> Tuple[RingElement, RingElement]:
    """
    Euclidean division with the remainder in the Voronoi region of mR.

    The exact quotient x/m is rounded coordinate-wise, then the rounded
    point and its neighbours (the six hexagonal neighbours for Z[ω]) are
    searched for the remainder of minimal norm. Ties between remainders of
    equal norm go to the smaller a, then the smaller b.

    Args:
        x: Dividend
        m: Nonzero modulus

    Returns:
        (quotient, remainder) with x = quotient·m + remainder
    """
    _check_same_domain(x, m)
    if m.is_zero:
        raise ZeroDivisionError("divmod_nearest: modulus must be nonzero")

    numerator = mul(x, conjugate(m))
    den = norm(m)
    qa = _round_nearest(numerator.a, den)
    qb = _round_nearest(numerator.b, den)

    best_key = None
    best = None
    for da, db in _quotient_offsets(x.domain):
        q = RingElement(x.domain, qa + da, qb + db)
        r = x - mul(q, m)
        key = (norm(r), r.a, r.b)
        if best_key is None or key < best_key:
            best_key = key
            best = (q, r)
    return best


def mod_ring(x: RingElement, m: RingElement) -> RingElement:
    """Canonical (centered) representative of x mod mR."""
    return divmod_nearest(x, m)[1]


def gcd(x: RingElement, y: RingElement) -> RingElement:
    """Greatest common divisor up to units, by the Euclidean algorithm."""
    _check_same_domain(x, y)
    if x.is_zero and y.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    while not y.is_zero:
        x, y = y, mod_ring(x, y)
    return x


def extended_gcd(x: RingElement, y: RingElement) -> Tuple[RingElement, RingElement, RingElement]:
    """Return (g, s, t) with g = s·x + t·y."""
    _check_same_domain(x, y)
    zero = RingElement.zero(x.domain)
    old_r, r = x, y
    old_s, s = RingElement.one(x.domain), zero
    old_t, t = zero, RingElement.one(x.domain)
    while not r.is_zero:
        q, rem = divmod_nearest(old_r, r)
        old_r, r = r, rem
        old_s, s = s, old_s - mul(q, s)
        old_t, t = t, old_t - mul(q, t)
    return old_r, old_s, old_t


def are_coprime(x: RingElement, y: RingElement) -> bool:
    return is_unit(gcd(x, y))


@dataclass(frozen=True)
class RingPrime:
    """
    A prime θ of R whose residue field R/θR is the prime field F_q.

    `basis_residue` is the image of the second basis element (i or ω) in
    F_q, which makes the isomorphism R/θR → F_q a one-liner:
    a + b·e ↦ (a + b·basis_residue) mod q.
    """

    value: RingElement
    norm_q: int
    basis_residue: int = 0

    @classmethod
    def from_element(cls, value: RingElement) -> "RingPrime":
        if value.domain is RingDomain.RATIONAL:
            q = abs(value.a)
            if not is_rational_prime(q):
                raise ValueError(f"{value} is not a rational prime")
            return cls(value, q, 0)

        q = norm(value)
        if not is_rational_prime(q):
            raise ValueError(
                f"{value} (norm {q}) does not have a prime residue field; "
                f"only primes of prime norm are accepted"
            )
        if value.b % q == 0:
            raise ValueError(f"{value} has no invertible second coordinate mod {q}")
        # θ = c + d·e ≡ 0  ⇒  e ≡ −c·d⁻¹ (mod q)
        residue = (-value.a * pow(value.b, -1, q)) % q
        return cls(value, q, residue)

    @classmethod
    def from_coordinates(cls, domain: RingDomain, a: int, b: int = 0) -> "RingPrime":
        return cls.from_element(RingElement(domain, a, b))

    @property
    def domain(self) -> RingDomain:
        return self.value.domain

    def to_field(self, x: RingElement) -> int:
        """Image of x in F_q under R/θR ≅ F_q."""
        if x.domain is not self.domain:
            raise ValueError(f"domain mismatch: {x.domain.value} vs {self.domain.value}")
        return (x.a + x.b * self.basis_residue) % self.norm_q

    def to_field_array(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64) * self.basis_residue) % self.norm_q

    def lift(self, k: int) -> RingElement:
        """Integer representative 0..q−1 of a field symbol."""
        return RingElement(self.domain, int(k) % self.norm_q, 0)

    def __str__(self) -> str:
        return str(self.value)


def inverse_mod(x: RingElement, theta: RingPrime) -> RingElement:
    """
    Inverse of x modulo θ, returned as its integer representative in 0..q−1.

    Args:
        x: Element coprime to θ
        theta: Prime modulus

    Returns:
        y with x·y ≡ 1 (mod θ)
    """
    modulus = theta.value
    _check_same_domain(x, modulus)
    if mod_ring(x, modulus).is_zero:
        raise ValueError(f"{x} is not invertible modulo {modulus}")
    g, s, _ = extended_gcd(x, modulus)
    if not is_unit(g):
        raise ValueError(f"gcd({x}, {modulus}) = {g} is not a unit")
    # units have norm 1, so conj(g) = g⁻¹
    y = mul(s, conjugate(g))
    return theta.lift(theta.to_field(y))


def embed(x: RingElement) -> ComplexSample:
    """Complex point of a ring element."""
    if x.domain is RingDomain.EISENSTEIN:
        return complex(x.a - 0.5 * x.b, SQRT3_2 * x.b)
    if x.domain is RingDomain.GAUSSIAN:
        return complex(x.a, x.b)
    return complex(x.a, 0.0)


def embed_array(a, b, domain: RingDomain) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if domain is RingDomain.EISENSTEIN:
        return (a - 0.5 * b) + 1j * (SQRT3_2 * b)
    if domain is RingDomain.GAUSSIAN:
        return a + 1j * b
    return a + 0j


def _basis_coordinates(samples: np.ndarray, domain: RingDomain):
    """Real coordinates (α, β) with samples = α + β·e."""
    if domain is RingDomain.EISENSTEIN:
        beta = samples.imag / SQRT3_2
        return samples.real + 0.5 * beta, beta
    if domain is RingDomain.GAUSSIAN:
        return samples.real, samples.imag
    return samples.real, np.zeros_like(samples.real)


# Corners of the enclosing basis cell in lexicographic order, so argmin's
# first-hit rule yields the smaller a, then the smaller b on ties.
_CELL_CORNERS = np.array([(0, 0), (0, 1), (1, 0), (1, 1)], dtype=np.int64)


def quantize_array(samples, domain: RingDomain) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nearest ring element to every sample.

    Z and Z[i] round each coordinate (ties to the smaller integer). Z[ω]
    checks the four corners of the enclosing (1, ω) cell: the cell splits
    into two equilateral triangles and the nearest lattice point of any
    point is a vertex of its triangle.

    Args:
        samples: Complex array of any shape
        domain: Ring to quantize to

    Returns:
        Integer coordinate arrays (a, b) with the shape of samples
    """
    samples = np.asarray(samples, dtype=np.complex128)
    if not np.all(np.isfinite(samples)):
        raise ValueError("quantize: samples must be finite")

    if domain is not RingDomain.EISENSTEIN:
        alpha, beta = _basis_coordinates(samples, domain)
        a = np.ceil(alpha - 0.5).astype(np.int64)
        b = np.ceil(beta - 0.5).astype(np.int64)
        return a, b

    alpha, beta = _basis_coordinates(samples, domain)
    a0 = np.floor(alpha).astype(np.int64)
    b0 = np.floor(beta).astype(np.int64)
    cand_a = a0[..., None] + _CELL_CORNERS[:, 0]
    cand_b = b0[..., None] + _CELL_CORNERS[:, 1]
    dist = np.abs(samples[..., None] - embed_array(cand_a, cand_b, domain)) ** 2
    pick = np.argmin(dist, axis=-1)[..., None]
    a = np.take_along_axis(cand_a, pick, axis=-1)[..., 0]
    b = np.take_along_axis(cand_b, pick, axis=-1)[..., 0]
    return a, b


def quantize_to_ring(s: ComplexSample, domain: RingDomain) -> RingElement:
    """Nearest ring element to a single complex sample."""
    a, b = quantize_array(np.array([s]), domain)
    return RingElement(domain, int(a[0]), int(b[0]))


def fold_array(samples, m: RingElement) -> np.ndarray:
    """Vectorized s mod mR: subtract the nearest point of the scaled lattice."""
    if m.is_zero:
        raise ZeroDivisionError("mod_fold: modulus must be nonzero")
    samples = np.asarray(samples, dtype=np.complex128)
    scale = embed(m)
    qa, qb = quantize_array(samples / scale, m.domain)
    return samples - scale * embed_array(qa, qb, m.domain)


def mod_fold(s: ComplexSample, m: RingElement) -> ComplexSample:
    """s − embed(m·Q(s/m)), the fold of s into the Voronoi region of mR."""
    return complex(fold_array(np.array([s]), m)[0])


def mod_ring_array(a, b, m: RingElement) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized mod_ring on integer coordinate arrays.

    Uses the same candidate set and tie-break as divmod_nearest, so both
    paths return identical representatives.
    """
    if m.is_zero:
        raise ZeroDivisionError("mod_ring: modulus must be nonzero")
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)

    largest = int(np.max(np.abs(a), initial=0)) + int(np.max(np.abs(b), initial=0)) + 1
    bound = 8 * largest * (abs(m.a) + abs(m.b) + 1) ** 2
    if bound >= _INT64_SAFE:
        raise OverflowError(f"mod_ring_array: coordinates up to {largest} overflow int64 for modulus {m}")

    domain = m.domain
    mc = conjugate(m)
    den = norm(m)
    na, nb = _mul_coords(domain, a, b, mc.a, mc.b)
    qa0 = -((den - 2 * na) // (2 * den))
    qb0 = -((den - 2 * nb) // (2 * den))

    offsets = np.array(_quotient_offsets(domain), dtype=np.int64)
    qa = qa0[..., None] + offsets[:, 0]
    qb = qb0[..., None] + offsets[:, 1]
    pa, pb = _mul_coords(domain, qa, qb, m.a, m.b)
    ra = a[..., None] - pa
    rb = b[..., None] - pb
    nr = _norm_coords(domain, ra, rb)

    pick = np.lexsort((rb, ra, nr), axis=-1)[..., :1]
    return (
        np.take_along_axis(ra, pick, axis=-1)[..., 0],
        np.take_along_axis(rb, pick, axis=-1)[..., 0],
    )
