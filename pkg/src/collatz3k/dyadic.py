"""Exact rationals of the form ``numerator / 2**den_exp``."""

from __future__ import annotations

from fractions import Fraction

from .errors import NonIntegerResult


class DyadicRational:
    """Immutable dyadic rational kept in lowest terms.

    Canonical form: ``den_exp == 0`` or ``numerator`` odd (zero is ``0/2^0``).
    Sums and products only ever shift exponents; no gcd is computed.

    >>> DyadicRational(3, 3) + DyadicRational(1, 1)
    DyadicRational(7, 3)
    >>> DyadicRational(12, 3)
    DyadicRational(3, 1)
    """

    __slots__ = ("numerator", "den_exp")

    def __init__(self, numerator: int = 0, den_exp: int = 0):
        if den_exp < 0:
            numerator <<= -den_exp
            den_exp = 0
        if numerator == 0:
            den_exp = 0
        elif den_exp:
            tz = (numerator & -numerator).bit_length() - 1
            if tz:
                shift = min(tz, den_exp)
                numerator >>= shift
                den_exp -= shift
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "den_exp", den_exp)

    def __setattr__(self, name, value):
        raise AttributeError("DyadicRational is immutable")

    @classmethod
    def coerce(cls, value) -> "DyadicRational":
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        raise TypeError(f"cannot make a dyadic rational from {type(value).__name__}")

    def __repr__(self):
        return f"DyadicRational({self.numerator}, {self.den_exp})"

    def __str__(self):
        if self.den_exp == 0:
            return str(self.numerator)
        return f"{self.numerator}/2^{self.den_exp}"

    def __eq__(self, other):
        if isinstance(other, (DyadicRational, int)):
            other = DyadicRational.coerce(other)
            return self.numerator == other.numerator and self.den_exp == other.den_exp
        if isinstance(other, Fraction):
            return self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __lt__(self, other):
        return self.to_fraction() < DyadicRational.coerce(other).to_fraction()

    def __add__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except TypeError:
            return NotImplemented
        e1, e2 = self.den_exp, other.den_exp
        if e1 >= e2:
            return DyadicRational(self.numerator + (other.numerator << (e1 - e2)), e1)
        return DyadicRational((self.numerator << (e2 - e1)) + other.numerator, e2)

    __radd__ = __add__

    def __neg__(self):
        return DyadicRational(-self.numerator, self.den_exp)

    def __sub__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return DyadicRational.coerce(other) - self

    def __mul__(self, other):
        try:
            other = DyadicRational.coerce(other)
        except TypeError:
            return NotImplemented
        return DyadicRational(self.numerator * other.numerator, self.den_exp + other.den_exp)

    __rmul__ = __mul__

    def shift(self, e: int) -> "DyadicRational":
        """Multiply by ``2**e`` (``e`` may be negative)."""
        return DyadicRational(self.numerator, self.den_exp - e)

    def is_integer(self) -> bool:
        return self.den_exp == 0

    def to_int(self) -> int:
        if self.den_exp:
            raise NonIntegerResult(f"{self} is not an integer")
        return self.numerator

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.den_exp)
