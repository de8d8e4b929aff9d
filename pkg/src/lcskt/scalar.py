"""Exact scalars: Gaussian rationals and the quadratic field Q(sqrt 2)."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _new(re: Fraction, im: Fraction) -> Scalar:
    """Construct from values already known to be Fractions."""
    z = object.__new__(Scalar)
    object.__setattr__(z, "re", re)
    object.__setattr__(z, "im", im)
    return z


class Scalar:
    """An element ``re + im*i`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar):
            re, im = re.re, re.im + _frac(im)
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    def __reduce__(self):
        return (Scalar, (self.re, self.im))

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x)

    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conjugate(self) -> Scalar:
        return Scalar(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return _new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Scalar):
            return _new(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Rational)):
            return _new(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Scalar):
            return _new(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Rational)):
            return _new(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Scalar):
            if other.im == 0:
                return _new(self.re * other.re, self.im * other.re)
            if self.im == 0:
                return _new(self.re * other.re, self.re * other.im)
            return _new(self.re * other.re - self.im * other.im,
                          self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Rational)):
            return _new(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return _new(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("Scalar division by zero")
            return _new(self.re / other, self.im / other)
        if isinstance(other, Scalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im != 0:
            raise TypeError("non-real Scalar has no float value")
        return float(self.re)

    def __repr__(self):
        return f"Scalar({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_scalar(self)


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)


def _fmt_q(q: Fraction) -> str:
    return str(q)


def format_scalar(z: Scalar) -> str:
    """Compact text form: ``3/2``, ``-i``, ``(1,-2)`` for mixed values."""
    if z.im == 0:
        return _fmt_q(z.re)
    if z.re == 0:
        if z.im == 1:
            return "i"
        if z.im == -1:
            return "-i"
        return f"{_fmt_q(z.im)}i"
    return f"({_fmt_q(z.re)},{_fmt_q(z.im)})"


def rational_circle_point(t) -> Scalar:
    """Point of the unit circle ``((1 - t^2) + 2 i t) / (1 + t^2)``."""
    t = _frac(t)
    d = 1 + t * t
    return Scalar((1 - t * t) / d, 2 * t / d)


class QSqrt2:
    """Element ``a + b*sqrt(2)`` of Q(sqrt 2)."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _frac(a)
        self.b = _frac(b)

    @classmethod
    def coerce(cls, x) -> QSqrt2:
        if isinstance(x, QSqrt2):
            return x
        if isinstance(x, Scalar):
            if x.im != 0:
                raise TypeError("Q(sqrt 2) is real")
            return cls(x.re)
        return cls(x)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Rational, Scalar)):
            other = QSqrt2.coerce(other)
        if isinstance(other, QSqrt2):
            return self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b))

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __add__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-QSqrt2.coerce(other))

    def __rsub__(self, other):
        return QSqrt2.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QSqrt2.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QSqrt2.coerce(other)
        n = o.a * o.a - 2 * o.b * o.b
        if n == 0:
            raise ZeroDivisionError("QSqrt2 division by zero")
        return self * QSqrt2(o.a / n, -o.b / n)

    def __rtruediv__(self, other):
        return QSqrt2.coerce(other) / self

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __repr__(self):
        return f"QSqrt2({self.a!s}, {self.b!s})"


SQRT2 = QSqrt2(0, 1)
