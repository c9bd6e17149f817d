"""Ultimately periodic subsets of omega, towers, and point minting.

An :class:`UPSet` is a bit sequence ``prefix`` followed by ``period``
repeated forever; bit ``n`` set means ``n`` is a member.  Bits are held as
Python ints, most significant bit first, so the prefix ``"101"`` is the int
``0b101`` with length 3.  Values are always canonical (shortest period, then
shortest prefix), which makes structural equality the same as equality of
the denoted sets.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Collection, Iterable, Iterator, Optional, Sequence

from .errors import MintError, PreconditionError


@lru_cache(maxsize=4096)
def _repunit(q: int, r: int) -> int:
    """The int whose ``r`` blocks of ``q`` bits each read ``0...01``."""
    return ((1 << (q * r)) - 1) // ((1 << q) - 1)


@lru_cache(maxsize=1024)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def _window(plen: int, pbits: int, qlen: int, qbits: int, start: int, length: int) -> int:
    out = 0
    if length <= 0:
        return 0
    if start < plen:
        take = min(length, plen - start)
        out = (pbits >> (plen - start - take)) & ((1 << take) - 1)
        start += take
        length -= take
        if length == 0:
            return out
    off = (start - plen) % qlen
    need = off + length
    reps = -(-need // qlen)
    run = qbits * _repunit(qlen, reps)
    chunk = (run >> (qlen * reps - need)) & ((1 << length) - 1)
    return (out << length) | chunk


def _canonical(plen: int, pbits: int, qlen: int, qbits: int) -> tuple[int, int, int, int]:
    # any shorter period divides one of the maximal proper divisors qlen/p
    shrunk = True
    while shrunk and qlen > 1:
        shrunk = False
        for p in _prime_factors(qlen):
            d = qlen // p
            head = qbits >> (qlen - d)
            if head * _repunit(d, p) == qbits:
                qlen, qbits = d, head
                shrunk = True
                break
    top = qlen - 1
    while plen and (pbits & 1) == (qbits & 1):
        qbits = ((qbits & 1) << top) | (qbits >> 1)
        pbits >>= 1
        plen -= 1
    return plen, pbits, qlen, qbits


def _bits_to_str(value: int, length: int) -> str:
    return format(value, f"0{length}b") if length else ""


class Cardinality(str, enum.Enum):
    EMPTY = "empty"
    FINITE = "finite"
    INFINITE_COINFINITE = "infinite-coinfinite"
    COFINITE = "cofinite"
    FULL = "full"


class UPSet:
    """Ultimately periodic subset of omega in canonical form."""

    __slots__ = ("plen", "pbits", "qlen", "qbits", "_hash")

    def __init__(self, prefix: str = "", period: str = "0"):
        if not period:
            raise ValueError("period must be nonempty")
        if set(prefix) - {"0", "1"} or set(period) - {"0", "1"}:
            raise ValueError(f"bits must be 0/1: {prefix!r}|{period!r}")
        self._set(*_canonical(len(prefix), int(prefix or "0", 2), len(period), int(period, 2)))

    def _set(self, plen, pbits, qlen, qbits):
        self.plen, self.pbits, self.qlen, self.qbits = plen, pbits, qlen, qbits
        self._hash = hash((plen, pbits, qlen, qbits))

    @classmethod
    def from_bits(cls, plen: int, pbits: int, qlen: int, qbits: int) -> "UPSet":
        if qlen < 1:
            raise ValueError("period must be nonempty")
        obj = cls.__new__(cls)
        obj._set(*_canonical(plen, pbits, qlen, qbits))
        return obj

    @classmethod
    def parse(cls, text: str) -> "UPSet":
        if text.count("|") != 1:
            raise ValueError(f"UPSet text must look like 'prefix|period': {text!r}")
        prefix, period = text.split("|")
        if prefix in ("ε", "e"):
            prefix = ""
        return cls(prefix, period)

    @classmethod
    def finite(cls, members: Iterable[int]) -> "UPSet":
        members = set(members)
        if not members:
            return cls("", "0")
        top = max(members) + 1
        return cls("".join("1" if n in members else "0" for n in range(top)), "0")

    @classmethod
    def full(cls) -> "UPSet":
        return cls("", "1")

    @property
    def prefix(self) -> str:
        return _bits_to_str(self.pbits, self.plen)

    @property
    def period(self) -> str:
        return _bits_to_str(self.qbits, self.qlen)

    def __str__(self) -> str:
        return f"{self.prefix}|{self.period}"

    def __repr__(self) -> str:
        text = str(self)
        if len(text) > 60:
            text = text[:28] + "..." + text[-28:]
        return f"UPSet({text!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, UPSet):
            return NotImplemented
        return (self.plen, self.pbits, self.qlen, self.qbits) == (
            other.plen, other.pbits, other.qlen, other.qbits)

    def __hash__(self) -> int:
        return self._hash

    def __contains__(self, n: int) -> bool:
        return member(self, n)

    def bits(self, start: int, length: int) -> int:
        """Bits ``start .. start+length-1`` as an int, first position most significant."""
        return _window(self.plen, self.pbits, self.qlen, self.qbits, start, length)

    def members(self, stop: int, start: int = 0) -> Iterator[int]:
        for n in range(start, stop):
            if member(self, n):
                yield n

    def next_member(self, start: int, stop: int) -> Optional[int]:
        for n in range(start, stop):
            if member(self, n):
                return n
        return None

    def __invert__(self) -> "UPSet":
        return complement(self)

    def __and__(self, other: "UPSet") -> "UPSet":
        return intersect(self, other)

    def __or__(self, other: "UPSet") -> "UPSet":
        return union(self, other)

    def __sub__(self, other: "UPSet") -> "UPSet":
        return difference(self, other)


def member(s: UPSet, n: int) -> bool:
    if n < 0:
        return False
    if n < s.plen:
        return bool((s.pbits >> (s.plen - 1 - n)) & 1)
    off = (n - s.plen) % s.qlen
    return bool((s.qbits >> (s.qlen - 1 - off)) & 1)


def _combine(s: UPSet, t: UPSet, fn: Callable[[int, int, int], int]) -> UPSet:
    plen = max(s.plen, t.plen)
    qlen = math.lcm(s.qlen, t.qlen)
    pm, qm = (1 << plen) - 1, (1 << qlen) - 1
    pbits = fn(s.bits(0, plen), t.bits(0, plen), pm)
    qbits = fn(s.bits(plen, qlen), t.bits(plen, qlen), qm)
    return UPSet.from_bits(plen, pbits, qlen, qbits)


def complement(s: UPSet) -> UPSet:
    return UPSet.from_bits(s.plen, s.pbits ^ ((1 << s.plen) - 1),
                           s.qlen, s.qbits ^ ((1 << s.qlen) - 1))


def intersect(s: UPSet, t: UPSet) -> UPSet:
    return _combine(s, t, lambda a, b, m: a & b)


def union(s: UPSet, t: UPSet) -> UPSet:
    return _combine(s, t, lambda a, b, m: a | b)


def difference(s: UPSet, t: UPSet) -> UPSet:
    return _combine(s, t, lambda a, b, m: a & ~b & m)


def symmetric_difference(s: UPSet, t: UPSet) -> UPSet:
    return _combine(s, t, lambda a, b, m: a ^ b)


def _finite_bound(s: UPSet) -> Optional[int]:
    # canonical finite sets end their prefix on a 1, so the bound is plen
    if s.qbits:
        return None
    return s.plen


def almost_subset(s: UPSet, t: UPSet) -> Optional[int]:
    """Least ``k`` with ``s \\ k`` inside ``t``, or None when ``s`` is not almost contained in ``t``."""
    return _finite_bound(difference(s, t))


def almost_disjoint(s: UPSet, t: UPSet) -> Optional[int]:
    """Least ``k`` with ``s & t`` inside ``k``, or None when the intersection is infinite."""
    return _finite_bound(intersect(s, t))


def cardinality_class(s: UPSet) -> Cardinality:
    if s.qbits == 0:
        return Cardinality.EMPTY if s.plen == 0 else Cardinality.FINITE
    if s.qbits == (1 << s.qlen) - 1:
        return Cardinality.FULL if s.plen == 0 else Cardinality.COFINITE
    return Cardinality.INFINITE_COINFINITE


def first_difference(s: UPSet, t: UPSet) -> Optional[int]:
    """Least position where ``s`` and ``t`` disagree, None when equal."""
    if s == t:
        return None
    d = symmetric_difference(s, t)
    if d.pbits:
        return d.plen - d.pbits.bit_length()
    return d.plen + d.qlen - d.qbits.bit_length()


def _require_infinite_coinfinite(x: UPSet, name: str = "X") -> None:
    if cardinality_class(x) is not Cardinality.INFINITE_COINFINITE:
        raise PreconditionError(f"{name} must be infinite-coinfinite, got {cardinality_class(x).value}")


# --- towers ---------------------------------------------------------------


@dataclass(frozen=True)
class _Template:
    """Raw (non-canonical) tail source for the next level.

    Its period is a long replication of the base period; thinning clears
    one set bit per period, always the last one at an absolute position at
    or beyond ``horizon`` so that small positions keep agreeing with X.
    """

    plen: int
    pbits: int
    qlen: int
    qbits: int
    horizon: int

    def bits(self, start: int, length: int) -> int:
        return _window(self.plen, self.pbits, self.qlen, self.qbits, start, length)

    def _droppable_mask(self) -> int:
        first = max(0, self.horizon - self.plen)
        if first >= self.qlen:
            return 0
        return (1 << (self.qlen - first)) - 1

    def capacity(self) -> int:
        return bin(self.qbits & self._droppable_mask()).count("1")

    def thinned(self) -> "_Template":
        v = self.qbits & self._droppable_mask()
        if not v:
            raise MintError("tower capacity exhausted: no droppable tail element left "
                            "(generate the tower with a larger capacity)")
        return _Template(self.plen, self.pbits, self.qlen, self.qbits ^ (v & -v), self.horizon)


def _template_for(x: UPSet, capacity: int, horizon: int) -> _Template:
    ones = bin(x.qbits).count("1")
    reps = -(-capacity // ones) + -(-max(0, horizon - x.plen) // x.qlen) + 1
    while True:
        t = _Template(x.plen, x.pbits, x.qlen * reps, x.qbits * _repunit(x.qlen, reps), horizon)
        if t.capacity() >= capacity:
            return t
        reps += 1


def _level_from(w: str, template: _Template) -> UPSet:
    """The set whose first ``len(w)`` bits are the complement of ``w``, then the template."""
    wl = len(w)
    plen = max(wl, template.plen)
    head = (int(w or "0", 2) ^ ((1 << wl) - 1)) if wl else 0
    pbits = (head << (plen - wl)) | template.bits(wl, plen - wl)
    return UPSet.from_bits(plen, pbits, template.qlen, template.bits(plen, template.qlen))


@dataclass(frozen=True)
class Tower:
    """A finite strictly almost-decreasing chain ``X_0 > X_1 > ...``.

    ``bounds[b]`` (for ``b >= 1``) is the least ``k`` with ``X_b \\ k`` inside
    ``X_{b-1}``; ``bounds[0]`` is 0 by convention.
    """

    levels: tuple[UPSet, ...]
    bounds: tuple[int, ...]
    template: _Template = field(repr=False)
    # enough to rebuild the tower: the given top levels plus each minted level's prefix
    base_count: int = 1
    minted: tuple[str, ...] = ()
    capacity: int = 0
    horizon: int = 0

    @property
    def base(self) -> UPSet:
        return self.levels[0]

    def __len__(self) -> int:
        return len(self.levels)

    def remaining_capacity(self) -> int:
        return self.template.capacity()


def _check_prefix(w: str) -> None:
    if set(w) - {"0", "1"}:
        raise ValueError(f"bit string expected, got {w!r}")


def tower_from_levels(levels: Sequence[UPSet], *, capacity: int = 1024, horizon: int = 128) -> Tower:
    """A tower whose top levels are given explicitly; later levels are minted below the last one."""
    if not levels:
        raise PreconditionError("a tower needs at least one level")
    _require_infinite_coinfinite(levels[0])
    bounds = [0]
    for b in range(1, len(levels)):
        bound = almost_subset(levels[b], levels[b - 1])
        bounds.append(0 if bound is None else bound)
    template = _template_for(levels[-1], capacity, horizon)
    tower = Tower(tuple(levels), tuple(bounds), template, len(levels), (), capacity, horizon)
    problems = validate_tower(tower)
    if problems:
        raise PreconditionError("; ".join(problems))
    return tower


def tower_generate(x: UPSet, complement_prefixes: Sequence[str] = (), *,
                   capacity: int = 1024, horizon: int = 128) -> Tower:
    """Build ``[X, X_1, ...]`` where the complement of ``X_a`` starts with the a-th prefix.

    ``capacity`` is how many levels (beyond X) the tower can ever hold,
    counting later calls to :func:`tower_mint_below`.
    """
    capacity = max(capacity, len(complement_prefixes))
    tower = tower_from_levels([x], capacity=capacity, horizon=horizon)
    for w in complement_prefixes:
        tower, _ = tower_mint_below(tower, w)
    return tower


def tower_mint_below(tower: Tower, w: str) -> tuple[Tower, int]:
    _check_prefix(w)
    template = tower.template.thinned()
    level = _level_from(w, template)
    if cardinality_class(level) is not Cardinality.INFINITE_COINFINITE:
        raise MintError(f"prefix {w!r} gives a {cardinality_class(level).value} level")
    bound = almost_subset(level, tower.levels[-1])
    if bound is None:  # pragma: no cover - guarded by the template construction
        raise MintError("minted level is not almost contained in the bottom level")
    grown = Tower(tower.levels + (level,), tower.bounds + (bound,), template,
                  tower.base_count, tower.minted + (w,), tower.capacity, tower.horizon)
    return grown, len(tower.levels)


def validate_tower(tower: Tower) -> list[str]:
    problems = []
    for a, level in enumerate(tower.levels):
        if cardinality_class(level) is not Cardinality.INFINITE_COINFINITE:
            problems.append(f"level {a} is {cardinality_class(level).value}")
    for b in range(1, len(tower.levels)):
        upper, lower = tower.levels[b - 1], tower.levels[b]
        bound = almost_subset(lower, upper)
        if bound is None:
            problems.append(f"level {b} is not almost contained in level {b - 1}")
        elif bound != tower.bounds[b]:
            problems.append(f"level {b} records bound {tower.bounds[b]}, least bound is {bound}")
        if cardinality_class(difference(upper, lower)) in (Cardinality.EMPTY, Cardinality.FINITE):
            problems.append(f"level {b} does not drop an infinite set from level {b - 1}")
    return problems


# --- B-side points ----------------------------------------------------------


def b_mint(x: UPSet, w: str, registry: Collection[UPSet] = ()) -> UPSet:
    """A fresh infinite ``Y`` starting with ``w`` whose tail lies in the complement of X.

    Freshness against ``registry`` is reached by deleting the first ``j``
    tail elements for the least workable ``j``.
    """
    _check_prefix(w)
    if cardinality_class(x) in (Cardinality.COFINITE, Cardinality.FULL):
        raise MintError("complement of X is finite; no almost disjoint points exist")
    _require_infinite_coinfinite(x)
    wl = len(w)
    co = complement(x)
    plen = max(wl, co.plen)
    head = int(w or "0", 2) if wl else 0
    tail_head = co.bits(wl, plen - wl)
    period = co.bits(plen, co.qlen)
    base = UPSet.from_bits(plen, (head << (plen - wl)) | tail_head, co.qlen, period)
    candidate, dropped, n = base, 0, wl
    while candidate in registry:
        n = co.next_member(n, n + co.plen + 2 * co.qlen + 1)
        candidate = difference(candidate, UPSet.finite([n]))
        n += 1
        dropped += 1
    return candidate
