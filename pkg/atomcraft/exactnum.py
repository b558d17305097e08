"""
Exact numbers for atomcraft.

Rationals are ``fractions.Fraction``. ``QuadRat`` is the field Q(sqrt2) with
exact sign determination, ``MixedQuad`` adds a rational multiple of sqrt3 so
that thresholds of the form q + c*sqrt3 can be ordered without approximation.
Decimal rendering goes through mpmath and is only ever used for display.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from itertools import islice
from typing import Any, Iterator, List, Optional, Union

import mpmath

Rational = Union[int, Fraction]


def as_fraction(value: Any) -> Fraction:
    """Coerce an exact rational (int, Fraction, 'p/q' string) to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("Expected an exact rational, got bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ValueError(f"Invalid rational literal: {value!r}") from e
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"Expected an exact rational, got {type(value).__name__}")


def _sign(value: Rational) -> int:
    return (value > 0) - (value < 0)


@total_ordering
@dataclass(frozen=True, eq=False)
class QuadRat:
    """The real number a + b*sqrt2 with rational a, b."""
    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", as_fraction(self.a))
        object.__setattr__(self, "b", as_fraction(self.b))

    @classmethod
    def coerce(cls, value: Any) -> "QuadRat":
        if isinstance(value, QuadRat):
            return value
        if isinstance(value, str):
            raise TypeError("Use parse_quad() for string input")
        return cls(as_fraction(value))

    def conjugate(self) -> "QuadRat":
        return QuadRat(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def sign(self) -> int:
        return quad_sign(self)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other: Any) -> bool:
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other: Any) -> bool:
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return quad_sign(self - other) < 0

    def __neg__(self) -> "QuadRat":
        return QuadRat(-self.a, -self.b)

    def __abs__(self) -> "QuadRat":
        return -self if quad_sign(self) < 0 else self

    def __add__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return QuadRat(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return QuadRat(self.a - other.a, self.b - other.b)

    def __rsub__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return QuadRat(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("QuadRat division by zero")
        numerator = self * other.conjugate()
        norm = other.norm()
        return QuadRat(numerator.a / norm, numerator.b / norm)

    def __rtruediv__(self, other: Any) -> "QuadRat":
        other = _coerce_quad(other)
        if other is None:
            return NotImplemented
        return other / self

    def __str__(self) -> str:
        op = "-" if self.b < 0 else "+"
        return f"{self.a} {op} {abs(self.b)}*sqrt2"


def _coerce_quad(value: Any) -> Optional[QuadRat]:
    try:
        return QuadRat.coerce(value)
    except (TypeError, ValueError):
        return None


SQRT2 = QuadRat(0, 1)


def quad_sign(x: Any) -> int:
    """
    Sign of a + b*sqrt2, decided exactly.

    When a and b disagree in sign the answer is the sign of a^2 - 2b^2,
    flipped if a is the negative part.
    """
    x = QuadRat.coerce(x)
    a_sign = _sign(x.a)
    b_sign = _sign(x.b)
    if a_sign >= 0 and b_sign >= 0:
        return 1 if (a_sign or b_sign) else 0
    if a_sign <= 0 and b_sign <= 0:
        return -1
    diff = _sign(x.a * x.a - 2 * x.b * x.b)
    return diff if a_sign > 0 else -diff


def cmp_sqrt3(x: Any, k: Any) -> int:
    """
    Sign of (a + b*sqrt2) - k*sqrt3.

    Never zero unless both sides vanish: sqrt3 is not in Q(sqrt2).
    """
    x = QuadRat.coerce(x)
    k = as_fraction(k)
    left = quad_sign(x)
    right = -_sign(k)
    if left == 0 and right == 0:
        return 0
    if left >= 0 and right >= 0:
        return 1
    if left <= 0 and right <= 0:
        return -1
    diff = quad_sign(x * x - 3 * k * k)
    return diff if left > 0 else -diff


def quad_floor(x: Any) -> int:
    """Greatest integer n with n <= a + b*sqrt2."""
    x = QuadRat.coerce(x)
    numerator, denominator = x.b.numerator, x.b.denominator
    root = math.isqrt(2 * numerator * numerator)
    n = math.floor(x.a + Fraction(root if numerator >= 0 else -root, denominator))
    while quad_sign(x - n) < 0:
        n -= 1
    while quad_sign(x - (n + 1)) >= 0:
        n += 1
    return n


def quad_ceil(x: Any) -> int:
    """Least integer n with n >= a + b*sqrt2."""
    return -quad_floor(-QuadRat.coerce(x))


@total_ordering
@dataclass(frozen=True, eq=False)
class MixedQuad:
    """The real number quad + sqrt3 * sqrt(3), quad in Q(sqrt2)."""
    quad: QuadRat
    sqrt3: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "quad", QuadRat.coerce(self.quad))
        object.__setattr__(self, "sqrt3", as_fraction(self.sqrt3))

    @classmethod
    def coerce(cls, value: Any) -> "MixedQuad":
        if isinstance(value, MixedQuad):
            return value
        return cls(QuadRat.coerce(value))

    def sign(self) -> int:
        return cmp_sqrt3(self.quad, -self.sqrt3)

    def __eq__(self, other: Any) -> bool:
        other = _coerce_mixed(other)
        if other is None:
            return NotImplemented
        return self.quad == other.quad and self.sqrt3 == other.sqrt3

    def __hash__(self) -> int:
        if self.sqrt3 == 0:
            return hash(self.quad)
        return hash((self.quad, self.sqrt3))

    def __lt__(self, other: Any) -> bool:
        other = _coerce_mixed(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    def __neg__(self) -> "MixedQuad":
        return MixedQuad(-self.quad, -self.sqrt3)

    def __add__(self, other: Any) -> "MixedQuad":
        other = _coerce_mixed(other)
        if other is None:
            return NotImplemented
        return MixedQuad(self.quad + other.quad, self.sqrt3 + other.sqrt3)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "MixedQuad":
        other = _coerce_mixed(other)
        if other is None:
            return NotImplemented
        return MixedQuad(self.quad - other.quad, self.sqrt3 - other.sqrt3)

    def __rsub__(self, other: Any) -> "MixedQuad":
        other = _coerce_mixed(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, scalar: Any) -> "MixedQuad":
        try:
            scalar = as_fraction(scalar)
        except TypeError:
            return NotImplemented
        return MixedQuad(self.quad * scalar, self.sqrt3 * scalar)

    __rmul__ = __mul__

    def __str__(self) -> str:
        op = "-" if self.sqrt3 < 0 else "+"
        return f"{self.quad} {op} {abs(self.sqrt3)}*sqrt3"


def _coerce_mixed(value: Any) -> Optional[MixedQuad]:
    try:
        return MixedQuad.coerce(value)
    except (TypeError, ValueError):
        return None


# ============================================================================
# Continued fractions of sqrt2
# ============================================================================

@dataclass(frozen=True)
class Convergent:
    """The index-th continued-fraction convergent p/q of sqrt2."""
    p: int
    q: int
    index: int

    @property
    def error(self) -> QuadRat:
        """p - q*sqrt2 (alternates in sign, shrinks in size)."""
        return QuadRat(self.p, -self.q)


def iter_sqrt2_convergents() -> Iterator[Convergent]:
    """Endless stream of convergents of sqrt2 = [1; 2, 2, 2, ...]."""
    p_prev, q_prev = 1, 0
    p, q = 1, 1
    index = 0
    while True:
        yield Convergent(p, q, index)
        p_prev, q_prev, p, q = p, q, 2 * p + p_prev, 2 * q + q_prev
        index += 1


def sqrt2_convergents(count: int) -> List[Convergent]:
    """First ``count`` convergents of sqrt2."""
    if count < 1:
        raise ValueError(f"Invalid count: {count}. Must be >= 1")
    return list(islice(iter_sqrt2_convergents(), count))


# ============================================================================
# Parsing and rendering
# ============================================================================

def parse_quad(text: str) -> QuadRat:
    """
    Parse a Q(sqrt2) literal.

    Accepts "a,b" (meaning a + b*sqrt2) or the canonical "a + b*sqrt2" /
    "a - b*sqrt2" rendering produced by ``str(QuadRat)``.
    """
    cleaned = text.strip()
    if "sqrt2" in cleaned:
        body = cleaned.replace("*sqrt2", "").replace(" ", "")
        for idx in range(len(body) - 1, 0, -1):
            if body[idx] in "+-" and body[idx - 1] not in "/+-":
                return QuadRat(as_fraction(body[:idx]), as_fraction(body[idx:]))
        return QuadRat(0, as_fraction(body))
    if "," in cleaned:
        a, b = cleaned.split(",", 1)
        return QuadRat(as_fraction(a), as_fraction(b))
    return QuadRat(as_fraction(cleaned))


def mp_value(value: Any) -> mpmath.mpf:
    """Evaluate an exact number in the current mpmath context."""
    if isinstance(value, MixedQuad):
        return mp_value(value.quad) + mp_value(value.sqrt3) * mpmath.sqrt(3)
    if isinstance(value, QuadRat):
        return mp_value(value.a) + mp_value(value.b) * mpmath.sqrt(2)
    value = as_fraction(value)
    return mpmath.mpf(value.numerator) / value.denominator


def decimal_str(value: Any, digits: int = 12) -> str:
    """Decimal approximation with ``digits`` significant digits (display only)."""
    with mpmath.workdps(digits + 20):
        return mpmath.nstr(mp_value(value), digits)


def render(value: Any) -> Any:
    """Convert exact values to JSON-ready data ("p/q" strings, lists, dicts)."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (QuadRat, MixedQuad)):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, dict):
        return {str(key): render(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(item) for item in value]
    return str(value)
