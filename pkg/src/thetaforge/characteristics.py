"""Exact rational characteristics and root-of-unity phases.

Characteristics are kept as exact :class:`fractions.Fraction` vectors.  Upper
characteristics may be freely reduced mod 1 (the theta series is invariant
under integer shifts of the upper characteristic), but lower characteristics
may not: ``theta[a, b + m] = e(a . m) * theta[a, b]`` for integral ``m``.  For
that reason a :class:`RationalVector` stores the exact representative it was
built from and only reduces when asked to via :meth:`RationalVector.mod1`.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Iterator

import numpy as np

from .errors import CharacteristicOrderError

_EXACT_QUARTERS = {
    Fraction(0): complex(1.0, 0.0),
    Fraction(1, 4): complex(0.0, 1.0),
    Fraction(1, 2): complex(-1.0, 0.0),
    Fraction(3, 4): complex(0.0, -1.0),
}


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"characteristic entries must be exact rationals, got {x!r}")


@dataclass(frozen=True)
class RationalVector:
    """Length-g vector of exact rationals."""

    entries: tuple[Fraction, ...]

    def __init__(self, entries: Iterable):
        object.__setattr__(self, "entries", tuple(_to_fraction(x) for x in entries))

    @classmethod
    def zeros(cls, g: int) -> RationalVector:
        return cls([0] * g)

    @classmethod
    def parse(cls, text: str) -> RationalVector:
        """Parse ``"1/4,0,1/2"``."""
        return cls(part for part in text.split(",") if part.strip())

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> Fraction:
        return self.entries[i]

    def _check(self, other: RationalVector) -> None:
        if len(other) != len(self):
            raise ValueError(f"length mismatch: {len(self)} vs {len(other)}")

    def __add__(self, other: RationalVector) -> RationalVector:
        self._check(other)
        return RationalVector(x + y for x, y in zip(self, other))

    def __sub__(self, other: RationalVector) -> RationalVector:
        self._check(other)
        return RationalVector(x - y for x, y in zip(self, other))

    def __neg__(self) -> RationalVector:
        return RationalVector(-x for x in self)

    def __mul__(self, scalar) -> RationalVector:
        s = _to_fraction(scalar)
        return RationalVector(x * s for x in self)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> RationalVector:
        s = _to_fraction(scalar)
        return RationalVector(x / s for x in self)

    def dot(self, other: RationalVector) -> Fraction:
        self._check(other)
        return sum((x * y for x, y in zip(self, other)), Fraction(0))

    def mod1(self) -> RationalVector:
        """Representative with every entry in [0, 1)."""
        return RationalVector(x - math.floor(x) for x in self)

    def key(self) -> tuple[Fraction, ...]:
        """Hashable class of the vector modulo Z^g."""
        return self.mod1().entries

    def equiv(self, other: RationalVector) -> bool:
        return self.key() == other.key()

    @property
    def order(self) -> int:
        """Least common multiple of the denominators (1 for the zero vector)."""
        return reduce(math.lcm, (x.denominator for x in self), 1)

    def in_lattice(self, m: int) -> bool:
        """True when every entry lies in (1/m)Z."""
        return all((x * m).denominator == 1 for x in self)

    def is_half_integral(self) -> bool:
        return self.in_lattice(2)

    def as_float(self) -> np.ndarray:
        return np.array([float(x) for x in self], dtype=float)

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self) + ")"


def cexp(t) -> complex:
    """e(t) = exp(2 pi i t).

    Exact rationals are reduced mod 1 before any floating call, so integers
    give exactly 1 and quarter turns give exact units.
    """
    if isinstance(t, (Fraction, int, np.integer)) or isinstance(t, Rational):
        r = _to_fraction(t)
        r -= math.floor(r)
        exact = _EXACT_QUARTERS.get(r)
        if exact is not None:
            return exact
        return cmath.exp(2j * math.pi * float(r))
    return complex(np.exp(2j * np.pi * t))


def grid(m: int, g: int) -> list[RationalVector]:
    """All of ((1/m)Z/Z)^g in lexicographic order."""
    if m < 1 or g < 1:
        raise ValueError("m and g must be positive")
    axis = [Fraction(k, m) for k in range(m)]
    return [RationalVector(t) for t in itertools.product(axis, repeat=g)]


def half_characteristics(g: int) -> list[RationalVector]:
    """(1/2 Z/Z)^g with representatives in {0, 1/2}, lexicographic."""
    return grid(2, g)


def is_odd_pair(eps: RationalVector, delta: RationalVector) -> bool:
    """Parity of a half-integral characteristic pair: 4 eps.delta odd."""
    if not (eps.is_half_integral() and delta.is_half_integral()):
        raise CharacteristicOrderError("parity is defined for half-integral pairs only")
    return (4 * eps.dot(delta)) % 2 == 1
