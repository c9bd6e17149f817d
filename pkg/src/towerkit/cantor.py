"""The Cantor-Lebesgue map ``lambda(Y) = sum_{n in Y} 2^-(n+1)`` and its interval calculus."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Collection, Optional

from .errors import MintError, PreconditionError
from .exactnum import Interval, is_dyadic
from .setalg import UPSet


def lambda_value(y: UPSet) -> Fraction:
    """Exact value of the binary expansion ``0.y(0)y(1)y(2)...``."""
    # prefix/2^p + period/((2^q - 1) 2^p)
    q1 = (1 << y.qlen) - 1
    return Fraction(y.pbits * q1 + y.qbits, q1 << y.plen)


@dataclass(frozen=True, order=True)
class GoodInterval:
    """The closed interval ``[(2i+1)/2^(n+1), (2i+2)/2^(n+1)]``."""

    n: int
    i: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.i < (1 << self.n):
            raise PreconditionError(f"good({self.n},{self.i}): index out of range 0 <= i < 2^{self.n}")

    @property
    def lo(self) -> Fraction:
        return Fraction(2 * self.i + 1, 1 << (self.n + 1))

    @property
    def hi(self) -> Fraction:
        return Fraction(2 * self.i + 2, 1 << (self.n + 1))

    def interval(self) -> Interval:
        return Interval.closed(self.lo, self.hi)

    def __str__(self) -> str:
        return f"good({self.n},{self.i})"

    @classmethod
    def parse(cls, text: str) -> "GoodInterval":
        m = re.fullmatch(r"\s*good\((\d+),(\d+)\)\s*", text)
        if not m:
            raise ValueError(f"not a good interval: {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))


def good_interval(g: GoodInterval) -> Interval:
    return g.interval()


def cylinder_image(n: int) -> list[GoodInterval]:
    """Image of the cylinder ``[x(n) = 1]``, as its 2^n good-at-n pieces in increasing order."""
    return [GoodInterval(n, i) for i in range(1 << n)]


def _check_unit_open(x: Fraction) -> None:
    if not 0 < x < 1:
        raise PreconditionError(f"{x} is not in (0,1)")


def locate(x: Fraction, n: int) -> Optional[int]:
    """Index ``i`` with ``x`` in good(n,i), or None when ``x`` is in no good-at-n interval."""
    _check_unit_open(x)
    if is_dyadic(x) is not None:
        raise PreconditionError(f"{x} is dyadic, so its level-{n} bit is ambiguous")
    m = (x.numerator << (n + 1)) // x.denominator
    return (m - 1) >> 1 if m & 1 else None


def expansion_bit(x: Fraction, n: int) -> int:
    """Bit ``n`` of the binary expansion of ``x``, without the checks done by :func:`locate`.

    Callers must know ``x`` is a non-dyadic point of (0,1).
    """
    return ((x.numerator << (n + 1)) // x.denominator) & 1


def bit_of(x: Fraction, n: int) -> int:
    """Bit ``n`` of the expansion of a non-dyadic ``x`` in (0,1)."""
    return 0 if locate(x, n) is None else 1


def find_good_within(interval: Interval, n: int) -> GoodInterval:
    """Least-index good-at-n interval contained in the open ``interval``.

    Cuts the unit interval into pieces of length 2^-(n+1); the first piece
    starting strictly right of ``lo`` with an odd index is good and, given
    ``3/2^(n+1) < length``, ends strictly left of ``hi``.
    """
    if not interval.is_open:
        raise PreconditionError(f"{interval} must be open")
    if interval.lo < 0 or interval.hi > 1:
        raise PreconditionError(f"{interval} is not inside (0,1)")
    scale = 1 << (n + 1)
    if not Fraction(3, scale) < interval.length:
        raise PreconditionError(
            f"3/2^{n + 1} < length fails: 3/{scale} >= {interval.length}")
    lo = interval.lo
    i = (lo.numerator * scale) // lo.denominator
    k = i + 1 if (i + 1) & 1 else i + 2
    g = GoodInterval(n, (k - 1) >> 1)
    assert interval.lo < g.lo and g.hi < interval.hi
    return g


def preimage(x: Fraction) -> list[UPSet]:
    """All sets whose expansion has value ``x``: two for dyadic points of (0,1), else one."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise PreconditionError(f"{x} is outside [0,1]")
    if x == 0:
        return [UPSet("", "0")]
    if x == 1:
        return [UPSet("", "1")]
    dy = is_dyadic(x)
    if dy is not None:
        i, e = dy
        w = format(i, f"0{e}b")
        return [UPSet(w, "0"), UPSet(w[:-1] + "0", "1")]
    den = x.denominator
    a = (den & -den).bit_length() - 1
    num = x.numerator
    # the first a bits form the prefix, after which the remainder sequence is purely periodic
    plen = a
    pbits = (num << a) // den
    r = (num << a) - pbits * den
    r0, qbits, qlen = r, 0, 0
    while True:
        r <<= 1
        bit = 1 if r >= den else 0
        if bit:
            r -= den
        qbits = (qbits << 1) | bit
        qlen += 1
        if r == r0:
            break
    return [UPSet.from_bits(plen, pbits, qlen, qbits)]


def _next_clear(c: int, mask: int) -> int:
    """Least ``y >= c`` with ``y & mask == 0``."""
    while c & mask:
        h = (c & mask).bit_length()
        c = (c | ((1 << h) - 1)) + 1
    return c


def least_cylinder(interval: Interval, zeros: Collection[int] = (), max_depth: Optional[int] = None,
                   avoid: Optional[Callable[[str], bool]] = None) -> str:
    """Shortest bit string ``w`` (least as a number among equals) whose cylinder hull
    ``[0.w000..., 0.w111...]`` lies strictly inside ``interval``, with ``w`` zero at
    every position listed in ``zeros``.  ``avoid(w)`` can veto candidates.
    """
    lo, hi = interval.lo, interval.hi
    inv = 1 / interval.length
    # a cylinder of width 2^-d fits only when 2^d > 1/length
    first = max(1, (inv.numerator // inv.denominator).bit_length())
    if max_depth is None:
        # past this depth the interval holds many whole cylinders per reserved pattern
        max_depth = first + max(zeros, default=0) + 8
    for d in range(first, max_depth + 1):
        scale = 1 << d
        c = (lo.numerator * scale) // lo.denominator + 1
        top = -((-hi.numerator * scale) // hi.denominator) - 2
        if c > top:
            continue
        mask = 0
        for z in zeros:
            if 0 <= z < d:
                mask |= 1 << (d - 1 - z)
        while True:
            c = _next_clear(c, mask)
            if c > top:
                break
            w = format(c, f"0{d}b")
            if avoid is None or not avoid(w):
                return w
            c += 1
    raise MintError(f"no cylinder of depth <= {max_depth} fits strictly inside {interval}")
