"""Brute-force oracles, written independently of the fast paths they check.

Each oracle works from first principles (enumeration, expanded bit strings,
linear scans, geometric series) instead of the bit arithmetic used by the
library proper, so agreement between the two is evidence rather than echo.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Sequence

from .exactnum import Interval, interval_contains
from .setalg import UPSet


def expand(s: UPSet, length: int) -> str:
    """The first ``length`` characteristic bits of ``s``, from its text form."""
    prefix, period = str(s).split("|")
    if prefix == "ε":
        prefix = ""
    out = prefix
    while len(out) < length:
        out += period
    return out[:length]


def agreement_bound(s: UPSet, t: UPSet) -> int:
    return s.plen + t.plen + lcm(s.qlen, t.qlen)


def same_set(s: UPSet, t: UPSet) -> bool:
    """Membership agreement on the first ``p1 + p2 + lcm(q1, q2)`` positions."""
    bound = agreement_bound(s, t)
    return expand(s, bound) == expand(t, bound)


def from_predicate(s: UPSet, t: UPSet, op) -> UPSet:
    """The set ``{m : op(m in s, m in t)}``, built from expanded bits."""
    start = max(s.plen, t.plen)
    period = lcm(s.qlen, t.qlen)
    a, b = expand(s, start + period), expand(t, start + period)
    bits = "".join("1" if op(x == "1", y == "1") else "0" for x, y in zip(a, b))
    return UPSet.parse(bits[:start] + "|" + bits[start:])


def almost_subset(s: UPSet, t: UPSet) -> Optional[int]:
    """Least ``k`` with ``s \\ k`` inside ``t``, or None when ``s \\ t`` is infinite."""
    start = max(s.plen, t.plen)
    bound = start + lcm(s.qlen, t.qlen)
    a, b = expand(s, bound), expand(t, bound)
    bad = [m for m in range(bound) if a[m] == "1" and b[m] == "0"]
    if any(m >= start for m in bad):
        return None
    return bad[-1] + 1 if bad else 0


def count_members(s: UPSet, stop: int) -> int:
    return expand(s, stop).count("1")


def lambda_series(s: UPSet) -> Fraction:
    """``sum 2^-(m+1)`` over members, as a finite sum plus a geometric tail."""
    prefix, period = str(s).split("|")
    if prefix == "ε":
        prefix = ""
    head = sum((Fraction(1, 2 ** (m + 1)) for m, c in enumerate(prefix) if c == "1"), Fraction(0))
    block = sum((Fraction(1, 2 ** (j + 1)) for j, c in enumerate(period) if c == "1"), Fraction(0))
    # the period block repeats every q places: block * (1 + 2^-q + 2^-2q + ...)
    q = len(period)
    tail = block / (1 - Fraction(1, 2 ** q))
    return head + tail / 2 ** len(prefix)


def cylinder_hulls(n: int) -> list[tuple[Fraction, Fraction]]:
    """Merged union of ``[lambda(s000...), lambda(s111...)]`` over strings ``s`` of
    length ``n + 1`` ending in 1."""
    hulls = []
    for v in range(1 << (n + 1)):
        s = format(v, f"0{n + 1}b")
        if s[n] != "1":
            continue
        lo = lambda_series(UPSet.parse(s + "|0"))
        hi = lambda_series(UPSet.parse(s + "|1"))
        hulls.append((lo, hi))
    hulls.sort()
    merged: list[list[Fraction]] = []
    for lo, hi in hulls:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def _good(n: int, i: int) -> tuple[Fraction, Fraction]:
    return Fraction(2 * i + 1, 2 ** (n + 1)), Fraction(2 * i + 2, 2 ** (n + 1))


def _candidates(n: int, lo: Fraction, hi: Fraction) -> range:
    """Indices ``i`` whose good-at-n interval can meet ``[lo, hi]``, padded by one.

    Every other index has its interval entirely left of ``lo`` or right of
    ``hi``, so scanning these alone is exhaustive.
    """
    scale = 2 ** (n + 1)
    first = max(0, int(lo * scale) // 2 - 1)
    last = min((1 << n) - 1, int(hi * scale) // 2 + 1)
    return range(first, last + 1)


def locate_scan(x: Fraction, n: int) -> Optional[int]:
    """Index of the good-at-n interval holding ``x``, by scanning the candidates."""
    for i in _candidates(n, x, x):
        lo, hi = _good(n, i)
        if lo <= x <= hi:
            return i
    return None


def good_within_scan(interval: Interval, n: int) -> Optional[int]:
    """Least ``i`` whose good-at-n interval sits strictly inside ``interval``."""
    for i in _candidates(n, interval.lo, interval.hi):
        lo, hi = _good(n, i)
        if interval_contains(interval, lo) and interval_contains(interval, hi):
            return i
    return None


def least_feasible_level(length: Fraction) -> int:
    """Least ``n`` with ``3/2^(n+1) < length``."""
    n = 0
    while not Fraction(3, 2 ** (n + 1)) < length:
        n += 1
    return n


def subset_by_sampling(inner: Interval, outer: Interval, grid: int = 1000) -> bool:
    """Is every sampled point of ``inner`` in ``outer``?

    Samples a uniform grid over the joint hull plus all end points and the
    midpoints between consecutive end points, which makes the test exact.
    """
    ends = sorted({inner.lo, inner.hi, outer.lo, outer.hi})
    lo, hi = ends[0], ends[-1]
    points = set(ends)
    points.update((a + b) / 2 for a, b in zip(ends, ends[1:]))
    if hi > lo:
        points.update(lo + (hi - lo) * Fraction(j, grid - 1) for j in range(grid))
    return all(interval_contains(outer, v) for v in points if interval_contains(inner, v))


def is_lowest_terms(x: Fraction) -> bool:
    return x.denominator > 0 and gcd(abs(x.numerator), x.denominator) == 1


def order_iso_by_sorting(pairs: Sequence[tuple[Fraction, Fraction]]) -> bool:
    """Sorting by argument and sorting by value give the same list, with no ties."""
    by_x = sorted(pairs, key=lambda pr: pr[0])
    by_y = sorted(pairs, key=lambda pr: pr[1])
    xs, ys = [x for x, _ in by_x], [y for _, y in by_y]
    distinct = len(set(xs)) == len(xs) and len(set(ys)) == len(ys)
    return distinct and by_x == by_y


def interval_hits(intervals: Sequence[Interval], v: Fraction) -> int:
    return sum(1 for iv in intervals if interval_contains(iv, v))


def grid_hits(intervals: Sequence[Interval], grid: int) -> list[int]:
    """For each ``j`` in ``1..grid-1``, how many intervals contain ``j/grid``.

    Uses integer cross-multiplication so a dense grid stays cheap.
    """
    ends = [(iv.lo.numerator, iv.lo.denominator, iv.lo_closed, iv.hi.numerator, iv.hi.denominator, iv.hi_closed)
            for iv in intervals]
    out = []
    for j in range(1, grid):
        hits = 0
        for ln, ld, lc, hn, hd, hc in ends:
            # compare j/grid with ln/ld and hn/hd
            left = j * ld - ln * grid
            right = hn * grid - j * hd
            if (left > 0 or (left == 0 and lc)) and (right > 0 or (right == 0 and hc)):
                hits += 1
        out.append(hits)
    return out
