"""Exact rationals and intervals with per-end closedness.

Rationals are :class:`fractions.Fraction` values, which are always kept in
lowest terms with a positive denominator.  Nothing in this package touches
floating point.
"""

from __future__ import annotations

import enum
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

Rational = Fraction

if hasattr(sys, "set_int_max_str_digits"):
    # exact values easily exceed the default 4300-digit conversion limit
    sys.set_int_max_str_digits(0)

# Bits of the integer part of an ordering key; see ``order_key``.
_KEY_BITS = 128


class Order(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def rat(num, den=1) -> Fraction:
    if den == 0:
        raise ZeroDivisionError("rational with zero denominator")
    return Fraction(num, den)


def rat_compare(a: Fraction, b: Fraction) -> Order:
    if a < b:
        return Order.LESS
    if a > b:
        return Order.GREATER
    return Order.EQUAL


def order_key(x: Fraction) -> tuple[int, Fraction]:
    """Exact sort key that is cheap to compare for huge denominators.

    The first component is ``floor(x * 2**128)``; ties fall through to an
    exact comparison of the fractions themselves, so ordering by the key is
    identical to ordering by value.
    """
    return ((x.numerator << _KEY_BITS) // x.denominator, x)


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


_RAT_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    m = _RAT_RE.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    return rat(int(m.group(1)), den)


def is_dyadic(x: Fraction) -> Optional[tuple[int, int]]:
    """Return ``(i, e)`` with ``x == i / 2**e`` in lowest terms, else None."""
    den = x.denominator
    if den & (den - 1):
        return None
    return x.numerator, den.bit_length() - 1


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = self.lo, self.hi
        if type(lo) is not Fraction:
            lo = Fraction(lo)
            object.__setattr__(self, "lo", lo)
        if type(hi) is not Fraction:
            hi = Fraction(hi)
            object.__setattr__(self, "hi", hi)
        if lo > hi or (lo == hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty interval {self._text(lo, hi)}")

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_open(self) -> bool:
        return not (self.lo_closed or self.hi_closed)

    def interior(self) -> "Interval":
        return Interval.open(self.lo, self.hi)

    def __contains__(self, x) -> bool:
        return interval_contains(self, x)

    def _text(self, lo, hi) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{format_rational(lo)},{format_rational(hi)}{right}"

    def __str__(self) -> str:
        return self._text(self.lo, self.hi)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        text = text.strip()
        if len(text) < 5 or text[0] not in "[(" or text[-1] not in "])":
            raise ValueError(f"not an interval: {text!r}")
        body = text[1:-1].split(",")
        if len(body) != 2:
            raise ValueError(f"not an interval: {text!r}")
        return cls(
            parse_rational(body[0]),
            parse_rational(body[1]),
            text[0] == "[",
            text[-1] == "]",
        )


def interval_contains(interval: Interval, x) -> bool:
    if x < interval.lo or x > interval.hi:
        return False
    if x == interval.lo and not interval.lo_closed:
        return False
    if x == interval.hi and not interval.hi_closed:
        return False
    return True


def interval_subset(inner: Interval, outer: Interval) -> bool:
    if inner.lo == inner.hi:
        return interval_contains(outer, inner.lo)
    if inner.lo < outer.lo or (
        inner.lo == outer.lo and inner.lo_closed and not outer.lo_closed
    ):
        return False
    if inner.hi > outer.hi or (
        inner.hi == outer.hi and inner.hi_closed and not outer.hi_closed
    ):
        return False
    return True


def equal_partition(interval: Interval, j: int) -> list[Interval]:
    """Split an open interval into ``j`` open pieces of equal length."""
    if not interval.is_open:
        raise ValueError("equal_partition needs an open interval")
    if j < 1:
        raise ValueError("piece count must be positive")
    width = interval.length / j
    lo = interval.lo
    return [Interval.open(lo + m * width, lo + (m + 1) * width) for m in range(j)]
