"""Maximal open intervals missing a finite set, and gluing isomorphisms across them.

The ambient space is (0,1) with 0 and 1 as fixed end points.  Given an
order isomorphism ``phi: F -> G`` between finite sets and, for each
maximal interval ``I`` of the complement of F, an isomorphism ``psi_I``
from points of I into the matching interval of the complement of G, the
union of ``phi`` and all ``psi_I`` is again an order isomorphism.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import PreconditionError
from .exactnum import Interval, interval_contains

Points = Sequence[Fraction]
PairList = Sequence[tuple[Fraction, Fraction]]


@dataclass(frozen=True)
class FiniteNwdSet:
    points: tuple[Fraction, ...]

    def __post_init__(self):
        pts = tuple(Fraction(v) for v in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise PreconditionError("the set must be nonempty")
        if any(not 0 < v < 1 for v in pts):
            raise PreconditionError("points must lie in (0,1)")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise PreconditionError("points must be strictly increasing")


def _points(f) -> tuple[Fraction, ...]:
    return f.points if isinstance(f, FiniteNwdSet) else FiniteNwdSet(tuple(f)).points


def max_intervals(f) -> list[Interval]:
    """``(0,f_1), (f_1,f_2), ..., (f_r,1)``."""
    ends = (Fraction(0),) + _points(f) + (Fraction(1),)
    return [Interval.open(a, b) for a, b in zip(ends, ends[1:])]


def check_order_iso(pairs: PairList) -> bool:
    """Both coordinates strictly increase together, in whatever order the pairs are listed."""
    ordered = sorted(pairs, key=lambda pr: pr[0])
    for (x0, y0), (x1, y1) in zip(ordered, ordered[1:]):
        if not (x0 < x1 and y0 < y1):
            return False
    return True


def induced_iso(phi: PairList, f, g) -> list[tuple[Interval, Interval]]:
    """The k-th maximal interval of the complement of F goes to the k-th one for G."""
    fp, gp = _points(f), _points(g)
    if len(fp) != len(gp):
        raise PreconditionError(f"|F| = {len(fp)} but |G| = {len(gp)}")
    mapping = dict(phi)
    if len(mapping) != len(phi) or set(mapping) != set(fp) or sorted(mapping.values()) != list(gp):
        raise PreconditionError("phi must be a bijection from F onto G")
    if not check_order_iso(list(mapping.items())):
        raise PreconditionError("phi is not order preserving")
    out = []
    for interval in max_intervals(fp):
        lo = interval.lo if interval.lo == 0 else mapping[interval.lo]
        hi = interval.hi if interval.hi == 1 else mapping[interval.hi]
        out.append((interval, Interval.open(lo, hi)))
    return out


def assemble(phi: PairList, f, g, psi: Mapping[int, PairList]) -> list[tuple[Fraction, Fraction]]:
    """Union of ``phi`` and the per-interval maps ``psi[k]`` (k indexes the maximal intervals).

    Returns the combined map sorted by argument.
    """
    hat = induced_iso(phi, f, g)
    combined = [(Fraction(x), Fraction(y)) for x, y in phi]
    for k, pairs in psi.items():
        if not 0 <= k < len(hat):
            raise PreconditionError(f"no maximal interval with index {k}")
        src, dst = hat[k]
        for x, y in pairs:
            if not interval_contains(src, x):
                raise PreconditionError(f"psi[{k}]: argument {x} outside {src}")
            if not interval_contains(dst, y):
                raise PreconditionError(f"psi[{k}]: value {y} outside {dst}")
        if not check_order_iso(pairs):
            raise PreconditionError(f"psi[{k}] is not order preserving")
        combined.extend((Fraction(x), Fraction(y)) for x, y in pairs)
    combined.sort()
    return combined


def interval_index(f, x: Fraction) -> int:
    """Index of the maximal interval holding ``x``; ``x`` must avoid F."""
    pts = _points(f)
    i = bisect_left(pts, x)
    if i < len(pts) and pts[i] == x:
        raise PreconditionError(f"{x} lies in F")
    return i
