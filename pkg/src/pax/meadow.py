"""Exact arithmetic in the signed cancellation meadow of the rationals.

The carrier is :class:`fractions.Fraction`, which already keeps values in
canonical form (positive denominator, coprime parts), so structural equality
decides equality.  What the meadow adds on top of a field is totality: the
multiplicative inverse of zero is zero, and ``x / 0`` is therefore ``0``.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class Order(Enum):
    LT = -1
    EQ = 0
    GT = 1


def rational(x: RationalLike) -> Fraction:
    """Coerce ``x`` to a canonical rational.

    Strings use the ``p/q`` serialization; floats are rejected because they
    would smuggle binary rounding into an exact model.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def add(a: Fraction, b: Fraction) -> Fraction:
    return a + b


def mul(a: Fraction, b: Fraction) -> Fraction:
    return a * b


def neg(a: Fraction) -> Fraction:
    return -a


def sub(a: Fraction, b: Fraction) -> Fraction:
    return a + neg(b)


def inv(a: Fraction) -> Fraction:
    """Zero-totalized multiplicative inverse: ``inv(0) == 0``."""
    if a == 0:
        return ZERO
    return 1 / a


def div(a: Fraction, b: Fraction) -> Fraction:
    return a * inv(b)


def arith(op: str, a: Fraction, b: Fraction | None = None) -> Fraction:
    """Dispatch ``add``/``mul``/``neg`` by name (``b`` unused for ``neg``)."""
    if op == "add":
        return add(a, b)
    if op == "mul":
        return mul(a, b)
    if op == "neg":
        return neg(a)
    raise ValueError(f"unknown meadow operation {op!r}")


def sign(a: Fraction) -> Fraction:
    if a > 0:
        return ONE
    if a < 0:
        return -ONE
    return ZERO


def compare(a: Fraction, b: Fraction) -> Order:
    """Order derived from the signum: ``a < b`` iff ``sign(b - a) == 1``."""
    s = sign(sub(b, a))
    if s == 1:
        return Order.LT
    if s == 0:
        return Order.EQ
    return Order.GT


def less_equal(a: Fraction, b: Fraction) -> bool:
    return sign(sign(sub(b, a)) + 1) == 1


def is_probability(a: Fraction) -> bool:
    """``0 <= a <= 1`` evaluated with the signum formula only."""
    return mul(sign(sign(a) + 1), sign(sign(sub(ONE, a)) + 1)) == 1


def prob(x: RationalLike) -> Fraction:
    """Return ``x`` as a rational after checking that it is a probability."""
    p = rational(x)
    if not is_probability(p):
        raise ValueError(f"{format_rational(p)} is not a probability")
    return p


def format_rational(a: Fraction) -> str:
    if a.denominator == 1:
        return str(a.numerator)
    return f"{a.numerator}/{a.denominator}"


def parse(text: str) -> Fraction:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        if not sep:
            return Fraction(int(num))
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}") from exc
