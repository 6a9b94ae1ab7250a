"""Pythagorean triple generators and exact verification oracles.

Four classic families are provided:

* ``stifel(n)``    -> (2n+1, 2n(n+1), 2n(n+1)+1), hypotenuse exceeds the long
  leg by exactly 1 for every n >= 1.
* ``euclid(m, k)`` -> (m^2-k^2, 2mk, m^2+k^2) for m > k >= 1.
* ``plato(n)``     -> (2n, n^2-1, n^2+1), hypotenuse gap of exactly 2.
* ``fibonacci_triple(i)`` -> built from four consecutive Fibonacci numbers,
  hypotenuse gap of F_i^2.

All arithmetic is exact; nothing here ever touches floating point. Components
are emitted in each family's natural order (plato gives (4, 3, 5) at n=2),
so no ordering of legs may be assumed anywhere downstream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True, slots=True)
class Triple:
    a: int
    b: int
    c: int

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1 or self.c < 1:
            raise DomainError(f"triple components must be >= 1: {(self.a, self.b, self.c)}")


class Label(enum.Enum):
    POS = "pos"
    NEG_FAMILY = "neg_family"
    NEG_EQ = "neg_eq"


_FAMILIES = ("stifel", "euclid", "plato", "fibonacci")


@dataclass(frozen=True, slots=True)
class GenParams:
    """Provenance of a generated triple: family plus its index or (m, k) pair."""

    family: str
    n: int | None = None
    m: int | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown family: {self.family}")
        if self.family == "euclid":
            if self.m is None or self.k is None:
                raise DomainError("euclid provenance needs (m, k)")
        elif self.n is None:
            raise DomainError(f"{self.family} provenance needs n")

    @property
    def index(self) -> int | None:
        """Single generator index, or None for the two-parameter euclid family."""
        return self.n


def stifel(n: int) -> Triple:
    """Triple (2n+1, 2n(n+1), 2n(n+1)+1) for n >= 1."""
    if n < 1:
        raise DomainError(f"stifel index must be >= 1: {n}")
    b = 2 * n * (n + 1)
    return Triple(2 * n + 1, b, b + 1)


def euclid(m: int, k: int) -> Triple:
    """Triple (m^2-k^2, 2mk, m^2+k^2) for m > k >= 1."""
    if k < 1 or m <= k:
        raise DomainError(f"euclid parameters need m > k >= 1: m={m}, k={k}")
    m2, k2 = m * m, k * k
    return Triple(m2 - k2, 2 * m * k, m2 + k2)


def plato(n: int) -> Triple:
    """Triple (2n, n^2-1, n^2+1) for n >= 2 (n=1 gives a zero leg)."""
    if n < 2:
        raise DomainError(f"plato index must be >= 2: {n}")
    n2 = n * n
    return Triple(2 * n, n2 - 1, n2 + 1)


def _fib_pair(i: int) -> tuple[int, int]:
    """(F_i, F_{i+1}) with F_1 = F_2 = 1, by fast doubling."""
    if i == 0:
        return (0, 1)
    a, b = _fib_pair(i >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    if i & 1:
        return (d, c + d)
    return (c, d)


def fibonacci_triple(i: int) -> Triple:
    """Triple from four consecutive Fibonacci numbers F_i..F_{i+3}, i >= 1.

    Returns (F_i * F_{i+3}, 2 * F_{i+1} * F_{i+2}, F_{i+1}^2 + F_{i+2}^2);
    the hypotenuse gap c - b equals F_i^2, so i = 1, 2 land on gap 1.
    """
    if i < 1:
        raise DomainError(f"fibonacci index must be >= 1: {i}")
    f1, f2 = _fib_pair(i)
    f3 = f1 + f2
    f4 = f2 + f3
    return Triple(f1 * f4, 2 * f2 * f3, f2 * f2 + f3 * f3)


def verify_equation(t: Triple) -> bool:
    """True iff a^2 + b^2 = c^2 in exact integer arithmetic."""
    return t.a * t.a + t.b * t.b == t.c * t.c


def classify(t: Triple) -> Label:
    """Ground-truth label: equation plus the c - b = 1 structural constraint.

    ``POS`` iff the equation holds and c - b = 1; ``NEG_FAMILY`` iff the
    equation holds with any other gap; ``NEG_EQ`` iff the equation fails.
    """
    if not verify_equation(t):
        return Label.NEG_EQ
    if t.c - t.b == 1:
        return Label.POS
    return Label.NEG_FAMILY
