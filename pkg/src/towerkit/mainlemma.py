"""Containment certificates and pseudointersection witnesses.

:func:`force_containment` extends a condition ``p`` to ``q`` so that every
order isomorphism extending ``q`` maps each good-at-n interval ``t_i`` into
a good-at-l interval ``s_i``, for some clear level ``n >= k`` in X and some
``l > n`` in X.  The recipe: pick ``n`` where no domain value sits in a
good-at-n interval, flank every ``t_i`` with fresh a-points, then map the
flanks into the interior of ``s_i``.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from operator import attrgetter
from typing import Iterable, Optional, Sequence, Union

from .cantor import GoodInterval, bit_of, expansion_bit, find_good_within
from .errors import PreconditionError, SearchCapError, TowerkitError
from .exactnum import Interval, equal_partition, order_key
from .poset import Condition, PointRegistry, _gap_at, dense_map_extend, gap_of, is_partial_iso
from .setalg import UPSet, almost_disjoint, intersect, member

_XK = attrgetter("xk")


@dataclass(frozen=True)
class CertificateEntry:
    t: GoodInterval
    a0: str
    a1: Optional[str]  # None: the right flank is the fixed point 1
    s: GoodInterval
    b0: str
    b1: Optional[str]


@dataclass(frozen=True)
class ContainmentCertificate:
    k: int
    n: int
    l: int
    entries: tuple[CertificateEntry, ...]


def _clear(values: Iterable[Fraction], n: int) -> bool:
    # domain values are registry points: non-dyadic and inside (0,1)
    return not any(expansion_bit(x, n) for x in values)


def _domain_levels_diagnostic(p: Condition, registry: PointRegistry, k: int, cap: int) -> str:
    meet = registry.x
    for a in p.domain_ids():
        if a in registry.a_side:
            meet = intersect(meet, registry.level_set(a))
    shown = [m for m in range(k, cap + 1) if member(meet, m)]
    text = str(meet)
    if len(text) > 80:
        text = text[:38] + "..." + text[-38:]
    return f"X ∩ (domain levels) = {text}; members in [{k},{cap}]: {shown}"


def find_clear_level(p: Condition, registry: PointRegistry, k: int, search_cap: int = 64) -> int:
    """Least ``n`` in X with ``k <= n <= search_cap`` such that no domain value is good at ``n``."""
    x = registry.x
    values = [pair.x for pair in p.pairs]
    for n in range(max(k, 0), search_cap + 1):
        if member(x, n) and _clear(values, n):
            return n
    raise SearchCapError(f"no clear level in X between {k} and {search_cap}",
                         _domain_levels_diagnostic(p, registry, k, search_cap))


def _clear_levels_between(x: UPSet, values: Sequence[Fraction], start: int, stop: int) -> list[int]:
    return [m for m in range(start, stop + 1) if member(x, m) and _clear(values, m)]


def flank_points(p: Condition, n: int, registry: PointRegistry,
                 reserve: Sequence[int] = ()) -> list[tuple[str, Optional[str]]]:
    """Fresh a-points ``a0 < t_i < a1`` for every good-at-n interval, left to right.

    Flanks stay inside the domain gap containing ``t_i`` and interleave
    (``a1`` of one interval is below ``a0`` of the next).  The last interval
    ends at 1, so its right flank is the fixed point 1.
    """
    count = 1 << n
    out = []
    prev: Optional[Fraction] = None
    for i in range(count):
        t = GoodInterval(n, i)
        gap = gap_of(p, t.lo)
        if not (gap.x1 > t.hi or gap.x1 == t.hi == 1):
            raise PreconditionError(f"level {n} is not clear: a domain value lies in {t}")
        left = gap.x0 if prev is None or prev < gap.x0 else prev
        a0 = registry.mint_a(Interval.open(left, t.lo), reserve)
        if i == count - 1:
            out.append((a0, None))
            break
        right = min(gap.x1, GoodInterval(n, i + 1).lo)
        a1 = registry.mint_a(Interval.open(t.hi, right), reserve)
        prev = registry.value(a1)
        out.append((a0, a1))
    return out


def choose_targets(p: Condition, n: int, x: UPSet, level_cap: int = 64) -> tuple[int, list[GoodInterval]]:
    """Level ``l`` and one good-at-l target per good-at-n interval, increasing.

    Each image gap holding ``j`` of the ``t_i`` is cut into ``j`` equal pieces
    and ``l`` is the least member of X beyond ``n`` with ``3/2^(l+1)`` below
    every piece length.  The piece ending at 1 takes the good interval that
    ends at 1, since its right flank is the fixed point 1.
    """
    count = 1 << n
    groups: list[tuple[int, int]] = []  # (gap index, how many t's)
    for i in range(count):
        t_lo = GoodInterval(n, i).lo
        gi = bisect_left(p.pairs, order_key(t_lo), key=_XK)
        if groups and groups[-1][0] == gi:
            groups[-1] = (gi, groups[-1][1] + 1)
        else:
            groups.append((gi, 1))
    pieces_per_gap = []
    min_piece = None
    for gi, j in groups:
        image = _gap_at(p, gi).image
        pieces_per_gap.append((image, j))
        piece = image.length / j
        min_piece = piece if min_piece is None or piece < min_piece else min_piece
    l = None
    for m in range(n + 1, level_cap + 1):
        if member(x, m) and Fraction(3, 1 << (m + 1)) < min_piece:
            l = m
            break
    if l is None:
        raise SearchCapError(f"no target level in X between {n + 1} and {level_cap}",
                             f"smallest image piece has length {min_piece}")
    targets = []
    for image, j in pieces_per_gap:
        for piece in equal_partition(image, j):
            if piece.hi == 1:
                targets.append(GoodInterval(l, (1 << l) - 1))
            else:
                targets.append(find_good_within(piece, l))
    return l, targets


def force_containment(p: Condition, k: int, registry: PointRegistry, *, search_cap: int = 64,
                      level_cap: int = 64, reserve_span: int = 16) -> tuple[Condition, ContainmentCertificate]:
    """Extend ``p`` to ``q`` with a checked containment certificate at a clear level ``n >= k``.

    New a-flanks keep the clear levels of X in ``(n, n + reserve_span]`` clear
    where the cylinder geometry allows it, so a follow-up call with
    ``k = n + 1`` usually finds the next member of X at once.
    """
    n = find_clear_level(p, registry, k, search_cap)
    values = [pair.x for pair in p.pairs]
    reserve = _clear_levels_between(registry.x, values, n + 1, n + reserve_span)
    try:
        flanks = flank_points(p, n, registry, reserve)
        l, targets = choose_targets(p, n, registry.x, level_cap)
        q = p
        entries = []
        for i, ((a0, a1), s) in enumerate(zip(flanks, targets)):
            inner = s.interval().interior()
            q, b0 = dense_map_extend(q, a0, inner, registry)
            b1 = None
            if a1 is not None:
                q, b1 = dense_map_extend(q, a1, Interval.open(registry.value(b0), s.hi), registry)
            entries.append(CertificateEntry(GoodInterval(n, i), a0, a1, s, b0, b1))
    except TowerkitError as exc:
        raise type(exc)(f"force_containment at n={n}: {exc}") from exc
    cert = ContainmentCertificate(k, n, l, tuple(entries))
    ok, reason = check_certificate(q, cert, registry.x)
    if not ok:  # pragma: no cover - construction guarantees it
        raise AssertionError(f"constructed certificate fails: {reason}")
    return q, cert


def check_certificate(q: Condition, cert: ContainmentCertificate, x: UPSet) -> tuple[bool, str]:
    """Verify a certificate against ``q`` and X in exact arithmetic; returns (ok, reason)."""
    n, l = cert.n, cert.l
    if not (n >= cert.k and member(x, n)):
        return False, "n ∉ X∖k"
    if not (l >= n and member(x, l)):
        return False, "l ∉ X∖n"
    if len(cert.entries) != (1 << n):
        return False, f"expected {1 << n} entries, found {len(cert.entries)}"
    if not is_partial_iso(q):
        return False, "q is not a partial isomorphism"
    prev_s: Optional[GoodInterval] = None
    last = len(cert.entries) - 1
    for i, e in enumerate(cert.entries):
        where = f"entry {i}"
        if e.t != GoodInterval(n, i):
            return False, f"{where}: t_i is {e.t}, expected good({n},{i})"
        if e.s.n != l:
            return False, f"{where}: s_i is not good at l"
        if prev_s is not None and not prev_s.i < e.s.i:
            return False, f"{where}: s-intervals not increasing"
        prev_s = e.s
        p0 = q.by_a.get(e.a0)
        if p0 is None or not p0.x < e.t.lo:
            return False, f"{where}: left flank {e.a0} not a domain point below t_i"
        if i == last:
            if e.a1 is not None or e.b1 is not None:
                return False, f"{where}: last entry must use the fixed point 1 as right flank"
            if e.s.hi != 1:
                return False, f"{where}: fixed right flank 1 needs s_i to end at 1"
            rights = []
        else:
            p1 = q.by_a.get(e.a1) if e.a1 is not None else None
            if p1 is None or not p1.x > e.t.hi:
                return False, f"{where}: right flank {e.a1} not a domain point above t_i"
            rights = [(e.a1, e.b1)]
        for a, b in [(e.a0, e.b0)] + rights:
            bp = q.by_b.get(b)
            if bp is None:
                return False, f"{where}: {b} is not in the range of q"
            if not (e.s.lo < bp.y < e.s.hi):
                return False, f"{where}: image not in s_i"
            if q.by_a[a].b != b:
                return False, f"{where}: pair ({a},{b}) not in q"
    return True, "ok"


def soundness_oracle(q: Condition, cert: ContainmentCertificate) -> bool:
    """Independent check: the tightest bracket q gives each t_i lands inside s_i.

    For each t_i take the largest domain value below it and the smallest above
    it (0 and 1 as fixed points); any isomorphism extending q maps t_i between
    their images.
    """
    xs = [pair.x for pair in q.pairs]
    ys = [pair.y for pair in q.pairs]
    for e in cert.entries:
        below = [j for j, v in enumerate(xs) if v <= e.t.lo]
        above = [j for j, v in enumerate(xs) if v >= e.t.hi]
        lo = ys[below[-1]] if below else Fraction(0)
        hi = ys[above[0]] if above else Fraction(1)
        if not (e.s.lo <= lo and hi <= e.s.hi):
            return False
    return True


# --- pseudointersection witnesses -------------------------------------------

SetLike = Union[UPSet, Fraction]


def has_member(a: SetLike, n: int) -> bool:
    """``n in A`` for a set given directly or by its (non-dyadic) value."""
    if isinstance(a, UPSet):
        return member(a, n)
    return bit_of(a, n) == 1


def _head_bits(a: SetLike, length: int) -> int:
    """Membership of positions ``0 .. length-1`` as an int, position 0 most significant."""
    if isinstance(a, UPSet):
        return a.bits(0, length)
    if not 0 < a < 1 or a.denominator & (a.denominator - 1) == 0:
        raise PreconditionError(f"{a} must be a non-dyadic point of (0,1)")
    return (a.numerator << length) // a.denominator


def _top_of_meet(y: UPSet, x: UPSet) -> int:
    """Largest element of the finite set ``X ∩ Y``, or -1 when empty."""
    if almost_disjoint(y, x) is None:
        raise PreconditionError(f"{y} is not almost disjoint from X")
    meet = intersect(x, y)
    return meet.plen - 1


def little_xinf(f: Sequence[tuple[SetLike, UPSet]], x: UPSet, horizon: int) -> list[int]:
    """Members ``n < horizon`` of X such that every ``(A, Y)`` with ``n`` in A has some
    ``m >= n`` in ``X ∩ Y``."""
    bad = 0
    for a, y in f:
        top = _top_of_meet(y, x)
        if top >= horizon - 1:
            continue
        # positions top+1 .. horizon-1 sit in the low bits
        bad |= _head_bits(a, horizon) & ((1 << (horizon - 1 - top)) - 1)
    good = x.bits(0, horizon) & ~bad
    return [n for n in range(horizon) if (good >> (horizon - 1 - n)) & 1]


@dataclass(frozen=True)
class InvariantRow:
    n: int
    a: str
    verdict: str  # "in", "below", or "VIOLATION"


def little_invariant_check(witnessed: Iterable[int], pairs: Sequence[tuple[str, SetLike, UPSet]],
                           x: UPSet) -> list[InvariantRow]:
    """For each witnessed ``n`` and each mapped a-point ``(id, A, Y)``, with A the complement
    of its tower level: either ``n`` is in the level, or ``n < k`` for the least ``k`` with
    ``X ∩ Y ⊆ k``."""
    ns = sorted(set(witnessed))
    if not ns:
        return []
    width = ns[-1] + 1
    rows = []
    table = []
    for a, aset, y in pairs:
        k = almost_disjoint(y, x)
        if k is None:
            raise PreconditionError(f"image of {a} is not almost disjoint from X")
        table.append((a, _head_bits(aset, width), k))
    for n in ns:
        shift = width - 1 - n
        for a, bits, k in table:
            if not (bits >> shift) & 1:
                verdict = "in"
            elif n < k:
                verdict = "below"
            else:
                verdict = "VIOLATION"
            rows.append(InvariantRow(n, a, verdict))
    return rows
