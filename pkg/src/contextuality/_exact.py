"""Exact scalars over Q(sqrt 2) and its complex extension.

Coordinates of the standard ray sets live in {0, +-1, +-sqrt2}, so every inner
product lands in Q(sqrt2)[i].  Keeping those values exact makes orthogonality
a question of equality rather than tolerance.
"""

from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction

__all__ = ["QSqrt2", "ExactComplex", "to_exact", "parse_token", "format_real"]

_SQRT2 = math.sqrt(2.0)


def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float) and value.is_integer():
        return Fraction(int(value))
    raise TypeError(f"not an exact rational: {value!r}")


class QSqrt2:
    """A real number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _frac(a))
        object.__setattr__(self, "b", _frac(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @classmethod
    def coerce(cls, value) -> QSqrt2:
        if isinstance(value, QSqrt2):
            return value
        return cls(_frac(value), 0)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def conj2(self) -> QSqrt2:
        """Galois conjugate ``a - b*sqrt2``."""
        return QSqrt2(self.a, -self.b)

    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        den = o.a * o.a - 2 * o.b * o.b
        if den == 0:
            # a^2 = 2 b^2 has no rational solution except 0
            raise ZeroDivisionError("division by zero in Q(sqrt2)")
        num = self * o.conj2()
        return QSqrt2(num.a / den, num.b / den)

    def __rtruediv__(self, other):
        return QSqrt2.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, ExactComplex):
            return other == self
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * _SQRT2

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        return format_real(self)


class ExactComplex:
    """Complex number with real and imaginary parts in Q(sqrt2)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", QSqrt2.coerce(re))
        object.__setattr__(self, "im", QSqrt2.coerce(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    @classmethod
    def coerce(cls, value) -> ExactComplex:
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, complex):
            return cls(_frac(value.real), _frac(value.imag))
        return cls(QSqrt2.coerce(value), 0)

    @property
    def real(self) -> QSqrt2:
        return self.re

    @property
    def imag(self) -> QSqrt2:
        return self.im

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def conjugate(self) -> ExactComplex:
        return ExactComplex(self.re, -self.im)

    def abs2(self) -> QSqrt2:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactComplex(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        den = o.abs2()
        num = self * o.conjugate()
        return ExactComplex(num.re / den, num.im / den)

    def __eq__(self, other):
        try:
            o = ExactComplex.coerce(other)
        except TypeError:
            if isinstance(other, numbers.Number):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im.is_zero():
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __repr__(self):
        return f"ExactComplex({self.re!r}, {self.im!r})"


def to_exact(value) -> ExactComplex | None:
    """Exact form of ``value`` or None when it is only known approximately.

    Integers, fractions and Q(sqrt2) values are exact.  Floats count as exact
    only when integral, since a non-integral float is usually a rounded surd.
    """
    if isinstance(value, (ExactComplex, QSqrt2, Fraction, int)):
        return ExactComplex.coerce(value)
    if isinstance(value, numbers.Integral):
        return ExactComplex(int(value))
    if isinstance(value, numbers.Real):
        v = float(value)
        return ExactComplex(int(v)) if v.is_integer() else None
    if isinstance(value, numbers.Complex):
        c = complex(value)
        if c.real.is_integer() and c.imag.is_integer():
            return ExactComplex(int(c.real), int(c.imag))
        return None
    raise TypeError(f"unsupported scalar: {value!r}")


_RAT = r"[+-]?\d+(?:/\d+)?"
_TOKEN = re.compile(
    rf"^(?:(?P<a>{_RAT})(?=$|[+-]))?"
    rf"(?:(?P<b>[+-]?(?:\d+(?:/\d+)?)?)\*?sqrt2)?$"
)


def parse_token(token: str):
    """Parse one coordinate token.

    Accepted forms: integers (``-3``), rationals (``1/2``), surds
    (``sqrt2``, ``-sqrt2``, ``1/2*sqrt2``, ``1+2*sqrt2``) and decimal or
    exponent floats (``0.7071``), which stay inexact.
    """
    t = token.strip()
    if not t:
        raise ValueError("empty coordinate")
    if "sqrt2" in t or "/" in t or re.fullmatch(r"[+-]?\d+", t):
        m = _TOKEN.match(t.replace(" ", ""))
        if m is None or (m.group("a") is None and "sqrt2" not in t):
            raise ValueError(f"malformed number: {token!r}")
        a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
        b = Fraction(0)
        if "sqrt2" in t:
            bs = m.group("b") or ""
            b = Fraction(bs + "1") if bs in ("", "+", "-") else Fraction(bs)
        if b == 0:
            return int(a) if a.denominator == 1 else a
        return QSqrt2(a, b)
    try:
        v = float(t)
    except ValueError:
        raise ValueError(f"malformed number: {token!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"non-finite number: {token!r}")
    return int(v) if v.is_integer() else v


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_real(value) -> str:
    """Inverse of :func:`parse_token` for real values."""
    if isinstance(value, QSqrt2):
        if value.b == 0:
            return _fmt_frac(value.a)
        if value.b == 1:
            tail = "sqrt2"
        elif value.b == -1:
            tail = "-sqrt2"
        else:
            tail = f"{_fmt_frac(value.b)}*sqrt2"
        if value.a == 0:
            return tail
        sign = "" if tail.startswith("-") else "+"
        return f"{_fmt_frac(value.a)}{sign}{tail}"
    if isinstance(value, Fraction):
        return _fmt_frac(value)
    if isinstance(value, int):
        return str(value)
    return repr(float(value))
