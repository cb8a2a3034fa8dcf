"""Symmetric PSK constellations and their difference-constellation algebra.

A symmetric M-PSK signal set places its points at exp(j(2k+1)pi/M), which
keeps decision boundaries on the coordinate axes (BPSK becomes {+j, -j}).
The difference constellation of a signal set, i.e. every pairwise difference
s_l - s_m, is what controls where the relay's minimum distance collapses, so
it carries explicit (k, n) indexing: n is the ring (magnitude 2*sin(n*pi/M))
and k the phase slot on that ring.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PskConstellation",
    "DifferencePoint",
    "DifferenceConstellation",
    "SchemePair",
    "make_psk",
    "make_scheme",
    "map_bits",
    "bit_patterns",
    "difference_constellation",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PskConstellation:
    """A symmetric M-PSK signal set with natural index order."""

    order: int
    bits_per_symbol: int
    points: tuple[complex, ...]

    def point(self, k: int) -> complex:
        return self.points[k % self.order]

    def array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=complex)


def make_psk(order: int) -> PskConstellation:
    """Build the symmetric constellation {exp(j(2k+1)pi/M)}, k = 0..M-1."""
    if not isinstance(order, int) or isinstance(order, bool):
        raise ValueError(f"PSK order must be an integer, got {order!r}")
    if order < 2 or not _is_power_of_two(order):
        raise ValueError(f"PSK order must be a power of two >= 2, got {order}")
    pts = tuple(cmath.exp(1j * (2 * k + 1) * math.pi / order) for k in range(order))
    return PskConstellation(order=order, bits_per_symbol=order.bit_length() - 1, points=pts)


def map_bits(bits: tuple[int, ...], c: PskConstellation) -> complex:
    """Map a tuple of bits (MSB first, natural binary) to a symbol."""
    if len(bits) != c.bits_per_symbol:
        raise ValueError(f"expected {c.bits_per_symbol} bits, got {len(bits)}")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        index = (index << 1) | b
    return c.points[index]


def bit_patterns(order: int, labeling: str = "natural") -> np.ndarray:
    """Per-symbol-index bit patterns, shape (M, log2 M), MSB first.

    "natural" assigns index k the binary digits of k; "gray" assigns the
    digits of k ^ (k >> 1) so angularly adjacent symbols differ in one bit.
    """
    if not _is_power_of_two(order) or order < 2:
        raise ValueError(f"order must be a power of two >= 2, got {order}")
    lam = order.bit_length() - 1
    idx = np.arange(order)
    if labeling == "natural":
        labels = idx
    elif labeling == "gray":
        labels = idx ^ (idx >> 1)
    else:
        raise ValueError(f"unknown labeling {labeling!r}")
    shifts = np.arange(lam - 1, -1, -1)
    return ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


@dataclass(frozen=True)
class DifferencePoint:
    """A nonzero element of a difference constellation.

    value = 2*sin(n*pi/M) * exp(j*phase) with the phase slot convention
      n odd  -> phase = 2k*pi/M
      n even -> phase = (2k+1)*pi/M
    except for M = 2, whose single ring sits on (2k+1)*pi/2 (i.e. {2j, -2j}).
    """

    value: complex
    k: int
    n: int

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class DifferenceConstellation:
    order: int
    points: tuple[DifferencePoint, ...]  # nonzero elements, (n, k) order
    values: tuple[complex, ...] = field(init=False)  # zero plus all nonzero

    def __post_init__(self):
        object.__setattr__(self, "values", (0j,) + tuple(p.value for p in self.points))

    def nonzero_values(self) -> np.ndarray:
        return np.asarray([p.value for p in self.points], dtype=complex)

    def ring(self, n: int) -> tuple[DifferencePoint, ...]:
        return tuple(p for p in self.points if p.n == n)


def difference_constellation(c: PskConstellation) -> DifferenceConstellation:
    """All pairwise differences s_l - s_m of a symmetric M-PSK set.

    Closed form: rings n = 1..M/2 of magnitude 2*sin(n*pi/M), M phase slots
    each.  The slot offset below reproduces the brute-force set exactly for
    every power-of-two M; only M = 2 needs the odd-ring offset pi/2 because
    pi/2 is not a multiple of its slot spacing.
    """
    m = c.order
    pts = []
    for n in range(1, m // 2 + 1):
        mag = 2.0 * math.sin(n * math.pi / m)
        for k in range(m):
            if m == 2 or n % 2 == 0:
                phase = (2 * k + 1) * math.pi / m
            else:
                phase = 2 * k * math.pi / m
            pts.append(DifferencePoint(value=mag * cmath.exp(1j * phase), k=k, n=n))
    return DifferenceConstellation(order=m, points=tuple(pts))


@dataclass(frozen=True)
class SchemePair:
    """User constellations for one relaying scheme; user A never uses the
    smaller set (M1 >= M2)."""

    user_a: PskConstellation
    user_b: PskConstellation

    @property
    def m1(self) -> int:
        return self.user_a.order

    @property
    def m2(self) -> int:
        return self.user_b.order

    @property
    def delta(self) -> int:
        return self.m1.bit_length() - self.m2.bit_length()

    def label(self) -> str:
        return f"{self.m1}x{self.m2}"


def make_scheme(m1: int, m2: int) -> SchemePair:
    a = make_psk(m1)
    b = make_psk(m2)
    if m1 < m2:
        raise ValueError(f"user A's order must be >= user B's, got ({m1}, {m2})")
    return SchemePair(user_a=a, user_b=b)
