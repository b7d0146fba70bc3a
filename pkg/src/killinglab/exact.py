"""Small exact-arithmetic carriers.

Irrationality is never inferred from a float.  A quantity is irrational only
when the caller says so with an :class:`Irrational` token; everything else is
rational (``Fraction``) or a rational multiple of a power of pi
(:class:`PiMonomial`).  Since pi is transcendental, ``c * pi**k`` with c != 0
is a rational number exactly when k == 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

__all__ = [
    "Irrational",
    "PiMonomial",
    "Turns",
    "lcm",
    "to_fraction",
]


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"{x!r} is not an exact rational; pass a Fraction, int or string")


@dataclass(frozen=True)
class Irrational:
    """A real number the caller certifies to be irrational."""

    name: str
    value: float

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class PiMonomial:
    """coef * pi**power with rational coef."""

    coef: Fraction
    power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coef", to_fraction(self.coef))
        if self.coef == 0:
            object.__setattr__(self, "power", 0)

    @classmethod
    def of(cls, x) -> "PiMonomial":
        if isinstance(x, PiMonomial):
            return x
        return cls(to_fraction(x), 0)

    def __mul__(self, other) -> "PiMonomial":
        other = PiMonomial.of(other)
        return PiMonomial(self.coef * other.coef, self.power + other.power)

    __rmul__ = __mul__

    def __float__(self):
        return float(self.coef) * math.pi**self.power

    def is_zero(self) -> bool:
        return self.coef == 0

    def turns(self):
        """self / (2 pi) as a Fraction, or None when that ratio is irrational."""
        if self.coef == 0:
            return Fraction(0)
        if self.power == 1:
            return self.coef / 2
        return None

    def is_multiple_of_2pi(self) -> bool:
        t = self.turns()
        return t is not None and t.denominator == 1

    def __repr__(self):
        if self.power == 0:
            return f"{self.coef}"
        return f"{self.coef}*pi^{self.power}"


@dataclass(frozen=True)
class Turns:
    """An angle measured in full turns: rational part plus integer-free irrational parts.

    ``irrational`` maps token names to rational coefficients; distinct tokens
    are assumed linearly independent over Q together with 1.
    """

    rational: Fraction = Fraction(0)
    irrational: tuple = field(default=())
    values: tuple = field(default=(), compare=False)

    @classmethod
    def of(cls, x) -> "Turns":
        if isinstance(x, Turns):
            return x
        if isinstance(x, Irrational):
            return cls(Fraction(0), ((x.name, Fraction(1)),), ((x.name, x.value),))
        return cls(to_fraction(x) % 1)

    def __post_init__(self):
        object.__setattr__(self, "rational", to_fraction(self.rational) % 1)
        parts = tuple(sorted((n, c) for n, c in self.irrational if c != 0))
        object.__setattr__(self, "irrational", parts)

    def __add__(self, other) -> "Turns":
        other = Turns.of(other)
        coeffs = dict(self.irrational)
        for n, c in other.irrational:
            coeffs[n] = coeffs.get(n, Fraction(0)) + c
        vals = dict(self.values)
        vals.update(dict(other.values))
        return Turns(self.rational + other.rational, tuple(coeffs.items()), tuple(sorted(vals.items())))

    def __neg__(self) -> "Turns":
        return Turns(-self.rational, tuple((n, -c) for n, c in self.irrational), self.values)

    def __mul__(self, k: int) -> "Turns":
        return Turns(self.rational * k, tuple((n, c * k) for n, c in self.irrational), self.values)

    __rmul__ = __mul__

    @property
    def is_rational(self) -> bool:
        return not self.irrational

    def order(self):
        """Least k >= 1 with k * self an integer, or None if no such k exists."""
        if not self.is_rational:
            return None
        return self.rational.denominator

    def __float__(self):
        vals = dict(self.values)
        return float(self.rational) + sum(float(c) * vals[n] for n, c in self.irrational)

    def radians(self) -> float:
        return 2.0 * math.pi * float(self)
