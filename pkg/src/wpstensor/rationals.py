"""Exact scalars: rationals parsed from "p/q" strings and Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction, "QComplex"]


def q(value) -> Fraction:
    """Coerce ``value`` (int, Fraction, or a "p/q" string) to a Fraction.

    Floats are rejected on purpose: documents and internal state never carry
    binary floating point.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def qstr(value: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class QComplex:
    """A complex number with exact rational real and imaginary parts.

    Mixed arithmetic with ints and Fractions stays exact; mixing with a
    Python ``complex`` or ``float`` degrades to ``complex``.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = q(re)
        self.im = q(im)

    @classmethod
    def coerce(cls, value) -> "QComplex":
        if isinstance(value, QComplex):
            return value
        return cls(value, 0)

    def conjugate(self) -> "QComplex":
        return QComplex(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"QComplex({qstr(self.re)}, {qstr(self.im)})"

    def __eq__(self, other) -> bool:
        if isinstance(other, QComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __neg__(self) -> "QComplex":
        return QComplex(-self.re, -self.im)

    def __pos__(self) -> "QComplex":
        return self

    def __add__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) + other
        o = QComplex.coerce(other)
        return QComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) - other
        o = QComplex.coerce(other)
        return QComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) * other
        o = QComplex.coerce(other)
        return QComplex(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) / other
        o = QComplex.coerce(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("QComplex division by zero")
        num = self * o.conjugate()
        return QComplex(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return QComplex.coerce(other) / self

    def __pow__(self, n: int) -> "QComplex":
        if not isinstance(n, int):
            return complex(self) ** n
        if n < 0:
            return QComplex(1) / (self ** (-n))
        out = QComplex(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


def conj(value):
    """Complex conjugate that leaves real rationals untouched."""
    if isinstance(value, (int, Fraction)):
        return value
    return value.conjugate()


def abs2(value):
    """Squared modulus; exact for rationals and QComplex."""
    if isinstance(value, (int, Fraction)):
        return Fraction(value) * value
    if isinstance(value, QComplex):
        return value.abs2()
    return abs(value) ** 2


def real_part(value):
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, QComplex):
        return value.re
    return value.real


def show(x) -> str:
    """Readable form of points and edges (``(0, 1/2)`` rather than Fraction reprs)."""
    if isinstance(x, Fraction):
        return qstr(x)
    if isinstance(x, tuple):
        return "(" + ", ".join(show(v) for v in x) + ")"
    return str(x)
