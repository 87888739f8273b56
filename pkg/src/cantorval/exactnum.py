"""Exact arithmetic over the rationals and real quadratic fields Q(sqrt d).

Every comparison made by the classifier and the certifier goes through
:func:`sign`, which is decided with integer arithmetic only.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from numbers import Rational as _RationalABC
from typing import Union

Rational = Fraction

Number = Union[int, Fraction, "QuadValue"]


class RadicandMismatch(ValueError):
    """Two quadratic values with different radicands met in one expression."""


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``f`` maximal."""
    if n <= 0:
        raise ValueError(f"radicand must be positive, got {n}")
    s, f = 1, 1
    p = 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            f *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return s * n, f


def is_squarefree(n: int) -> bool:
    return n >= 1 and _squarefree_part(n)[1] == 1


class QuadValue:
    """The number ``a + b*sqrt(d)`` with rational ``a``, ``b``.

    Values are immutable and kept canonical: a pure rational always carries
    ``d == 1`` so equal numbers have identical ``(a, b, d)`` triples.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if b == 0:
            d = 1
        elif d < 2 or not is_squarefree(d):
            raise ValueError(f"radicand {d} is not a square-free integer >= 2")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, name, value):
        raise AttributeError("QuadValue is immutable")

    def __reduce__(self):
        return (QuadValue, (self.a, self.b, self.d))

    @classmethod
    def sqrt(cls, n: int) -> QuadValue:
        """Exact square root of a positive integer."""
        s, f = _squarefree_part(int(n))
        if s == 1:
            return cls(f)
        return cls(0, f, s)

    # -- coercion -------------------------------------------------------

    @staticmethod
    def coerce(x) -> QuadValue:
        if isinstance(x, QuadValue):
            return x
        if isinstance(x, (int, _RationalABC)):
            return QuadValue(x)
        raise TypeError(f"cannot use {type(x).__name__} as an exact value")

    def _common_d(self, other: QuadValue) -> int:
        if self.d == other.d or other.b == 0:
            return self.d
        if self.b == 0:
            return other.d
        raise RadicandMismatch(f"sqrt({self.d}) and sqrt({other.d}) in one expression")

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def conjugate(self) -> QuadValue:
        return QuadValue(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        return QuadValue(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadValue(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        d = self._common_d(other)
        return QuadValue(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = QuadValue.coerce(other)
        except TypeError:
            return NotImplemented
        if other.b == 0:
            if other.a == 0:
                raise ZeroDivisionError("division by exact zero")
            return QuadValue(self.a / other.a, self.b / other.a, self.d)
        self._common_d(other)
        n = other.norm()
        num = self * other.conjugate()
        return QuadValue(num.a / n, num.b / n, num.d)

    def __rtruediv__(self, other):
        return QuadValue.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QuadValue(1) / self ** (-k)
        result = QuadValue(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, QuadValue):
            return self.a == other.a and self.b == other.b and self.d == other.d
        if isinstance(other, (int, _RationalABC)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def _cmp(self, other) -> int:
        return sign(self - QuadValue.coerce(other))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __abs__(self):
        return -self if sign(self) < 0 else self

    def __float__(self):
        # diagnostics only; never used to decide an inequality
        return float(self.a) + float(self.b) * self.d ** 0.5

    # -- text -----------------------------------------------------------

    def __repr__(self):
        if self.b == 0:
            return f"QuadValue({_frac_str(self.a)})"
        return f"QuadValue({_frac_str(self.a)}, {_frac_str(self.b)}, {self.d})"

    def __str__(self):
        if self.b == 0:
            return _frac_str(self.a)
        op = "+" if self.b > 0 else "-"
        return f"{_frac_str(self.a)} {op} {_frac_str(abs(self.b))}*sqrt({self.d})"

    def to_json(self):
        return encode(self)


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def sign(x: Number) -> int:
    """Exact sign of ``a + b*sqrt(d)``.

    When ``a`` and ``b`` have opposite signs the larger of ``a**2`` and
    ``b**2 * d`` wins; they cannot be equal because ``sqrt(d)`` is irrational.
    """
    x = QuadValue.coerce(x)
    sa, sb = _sgn(x.a), _sgn(x.b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if x.a * x.a > x.b * x.b * x.d else sb


def add(x: Number, y: Number) -> QuadValue:
    return QuadValue.coerce(x) + y


def mul(x: Number, y: Number) -> QuadValue:
    return QuadValue.coerce(x) * y


def div(x: Number, y: Number) -> QuadValue:
    return QuadValue.coerce(x) / y


def floor(x: Number) -> int:
    """Exact floor of a quadratic value."""
    x = QuadValue.coerce(x)
    if x.b == 0:
        return x.a.numerator // x.a.denominator
    # integer estimate of b*sqrt(d), then fix up with exact signs
    num, den = x.b.numerator, x.b.denominator
    root = isqrt(num * num * x.d)
    guess = x.a + Fraction(root if num > 0 else -root, den)
    n = guess.numerator // guess.denominator
    while sign(x - n) < 0:
        n -= 1
    while sign(x - (n + 1)) >= 0:
        n += 1
    return n


def to_decimal(x: Number, digits: int) -> str:
    """Correctly rounded decimal expansion with ``digits`` places (ties to even)."""
    if digits < 1:
        raise ValueError("digits must be >= 1")
    y = QuadValue.coerce(x) * 10**digits
    half = y + Fraction(1, 2)
    n = floor(half)
    if half == n and n % 2:
        n -= 1
    neg = n < 0
    s = str(abs(n)).rjust(digits + 1, "0")
    body = f"{s[:-digits]}.{s[-digits:]}"
    return "-" + body if neg else body


def parse(obj) -> QuadValue:
    """Decode ``"p/q"``, ``"n"``, an int, or ``{"a": .., "b": .., "d": n}``."""
    if isinstance(obj, QuadValue):
        return obj
    if isinstance(obj, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(obj, int):
        return QuadValue(obj)
    if isinstance(obj, str):
        try:
            return QuadValue(Fraction(obj.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {obj!r}") from exc
    if isinstance(obj, dict):
        unknown = set(obj) - {"a", "b", "d"}
        if unknown:
            raise ValueError(f"unknown keys in quadratic value: {sorted(unknown)}")
        a = parse(obj.get("a", "0"))
        b = parse(obj.get("b", "0"))
        if not (a.is_rational and b.is_rational):
            raise ValueError("components of a quadratic value must be rational")
        d = obj.get("d", 1)
        if not isinstance(d, int) or isinstance(d, bool):
            raise ValueError(f"radicand must be an integer, got {d!r}")
        return QuadValue(a.a, b.a, d)
    raise ValueError(f"cannot decode exact value from {obj!r}")


def encode(x: Number):
    x = QuadValue.coerce(x)
    if x.b == 0:
        return _frac_str(x.a)
    return {"a": _frac_str(x.a), "b": _frac_str(x.b), "d": x.d}
