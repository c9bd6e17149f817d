"""Finite partial order-isomorphisms between two rational point sets.

The A side holds values ``lambda(omega \\ X_a)`` for tower levels ``X_a``;
the B side holds values ``lambda(Y)`` for sets ``Y`` almost disjoint from X.
Points are identified by id; the registry owns their values.  Conditions
treat 0 and 1 as implicit fixed points that are never stored.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from operator import attrgetter
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .cantor import lambda_value, least_cylinder
from .errors import MintError, PreconditionError
from .exactnum import Interval, interval_subset, order_key
from .setalg import Tower, UPSet, b_mint, complement, tower_mint_below


@dataclass(frozen=True)
class APoint:
    id: str
    level: int
    value: Fraction = field(repr=False)
    key: tuple = field(repr=False, compare=False)


@dataclass(frozen=True)
class BPoint:
    id: str
    set: UPSet = field(repr=False)
    value: Fraction = field(repr=False)
    key: tuple = field(repr=False, compare=False)


class PointRegistry:
    """Minted points of both sides.  Single writer: one run mutates a registry at a time."""

    def __init__(self, tower: Tower, *, a_levels: Optional[Iterable[int]] = None):
        self.tower = tower
        self.a_side: dict[str, APoint] = {}
        self.b_side: dict[str, BPoint] = {}
        self._b_sets: set[UPSet] = set()
        self.a_mints = 0
        self.b_mints = 0
        for level in (range(len(tower)) if a_levels is None else a_levels):
            self._register_level(level)

    @property
    def x(self) -> UPSet:
        return self.tower.base

    def _register_level(self, level: int) -> str:
        # the complement's expansion is the bitwise negation, so the values sum to 1
        value = 1 - lambda_value(self.tower.levels[level])
        pid = f"a{level}"
        self.a_side[pid] = APoint(pid, level, value, order_key(value))
        return pid

    def _register_b(self, y: UPSet) -> str:
        value = lambda_value(y)
        pid = f"b{len(self.b_side)}"
        self.b_side[pid] = BPoint(pid, y, value, order_key(value))
        self._b_sets.add(y)
        return pid

    def value(self, pid: str) -> Fraction:
        point = self.a_side.get(pid) or self.b_side.get(pid)
        if point is None:
            raise KeyError(f"unknown point id {pid!r}")
        return point.value

    def point(self, pid: str) -> Union[APoint, BPoint]:
        point = self.a_side.get(pid) or self.b_side.get(pid)
        if point is None:
            raise KeyError(f"unknown point id {pid!r}")
        return point

    def level_set(self, aid: str) -> UPSet:
        return self.tower.levels[self.a_side[aid].level]

    def a_set(self, aid: str) -> UPSet:
        """The set whose value is the a-point, i.e. the complement of its tower level."""
        return complement(self.level_set(aid))

    def b_set(self, bid: str) -> UPSet:
        return self.b_side[bid].set

    def mint_a(self, interval: Interval, reserve: Sequence[int] = ()) -> str:
        """Mint a tower level whose a-value lies strictly inside ``interval``.

        The level's complement starts with the least-depth cylinder that fits;
        positions in ``reserve`` are kept inside the new level when possible.
        """
        try:
            w = least_cylinder(interval, zeros=reserve)
        except MintError:
            if not reserve:
                raise
            w = least_cylinder(interval)
        self.tower, level = tower_mint_below(self.tower, w)
        self.a_mints += 1
        return self._register_level(level)

    def mint_b(self, interval: Interval) -> str:
        """Mint a fresh B point with value strictly inside ``interval``."""
        w = least_cylinder(interval)
        return self.add_b(w)

    def add_b(self, prefix: str) -> str:
        y = b_mint(self.x, prefix, self._b_sets)
        self.b_mints += 1
        return self._register_b(y)

    def add_b_set(self, y: UPSet) -> str:
        if y in self._b_sets:
            raise MintError(f"B point {y} already registered")
        return self._register_b(y)


class Pair(NamedTuple):
    a: str
    b: str
    x: Fraction
    y: Fraction
    xk: tuple
    yk: tuple


def make_pair(a: str, b: str, x: Fraction, y: Fraction) -> Pair:
    x, y = Fraction(x), Fraction(y)
    return Pair(a, b, x, y, order_key(x), order_key(y))


_XK = attrgetter("xk")


@dataclass(frozen=True, eq=False)
class Condition:
    """Pairs ``(a, b)`` with their values, kept sorted by a-value."""

    pairs: tuple[Pair, ...] = ()

    @classmethod
    def from_values(cls, items: Iterable[tuple[str, str, Fraction, Fraction]]) -> "Condition":
        pairs = sorted((make_pair(*item) for item in items), key=_XK)
        return cls(tuple(pairs))

    @classmethod
    def from_ids(cls, ids: Iterable[tuple[str, str]], registry: PointRegistry) -> "Condition":
        return cls.from_values((a, b, registry.value(a), registry.value(b)) for a, b in ids)

    def __len__(self) -> int:
        return len(self.pairs)

    @cached_property
    def id_pairs(self) -> frozenset:
        return frozenset((p.a, p.b) for p in self.pairs)

    @cached_property
    def by_a(self) -> dict[str, Pair]:
        return {p.a: p for p in self.pairs}

    @cached_property
    def by_b(self) -> dict[str, Pair]:
        return {p.b: p for p in self.pairs}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Condition):
            return NotImplemented
        return self.id_pairs == other.id_pairs

    def __hash__(self) -> int:
        return hash(self.id_pairs)

    def domain_ids(self) -> list[str]:
        return [p.a for p in self.pairs]

    def range_ids(self) -> list[str]:
        return [p.b for p in self.pairs]

    def image(self, a: str) -> Optional[str]:
        pair = self.by_a.get(a)
        return None if pair is None else pair.b

    def with_pair(self, pair: Pair) -> "Condition":
        if pair.a in self.by_a or pair.b in self.by_b:
            raise PreconditionError(f"pair ({pair.a},{pair.b}) reuses a mapped point")
        i = bisect_left(self.pairs, pair.xk, key=_XK)
        out = Condition(self.pairs[:i] + (pair,) + self.pairs[i:])
        # carry the lookup tables over instead of rebuilding them from scratch
        cache = self.__dict__
        if "by_a" in cache:
            out.__dict__["by_a"] = {**cache["by_a"], pair.a: pair}
        if "by_b" in cache:
            out.__dict__["by_b"] = {**cache["by_b"], pair.b: pair}
        return out

    def as_id_list(self) -> list[tuple[str, str]]:
        return [(p.a, p.b) for p in self.pairs]


def is_partial_iso(p: Condition) -> bool:
    """Both coordinates strictly increase together (values inside (0,1))."""
    prev_x = prev_y = None
    for pair in p.pairs:
        if not (0 < pair.x < 1 and 0 < pair.y < 1):
            return False
        if prev_x is not None and not (prev_x < pair.xk and prev_y < pair.yk):
            return False
        prev_x, prev_y = pair.xk, pair.yk
    return True


def restrict(p: Condition, ids: Iterable[str]) -> Condition:
    keep = set(ids)
    unknown = keep - set(p.by_a)
    if unknown:
        raise PreconditionError(f"restrict: ids not in the domain: {sorted(unknown)}")
    return Condition(tuple(pair for pair in p.pairs if pair.a in keep))


def extends(q: Condition, p: Condition) -> bool:
    return p.id_pairs <= q.id_pairs


class Gap(NamedTuple):
    x0: Fraction
    x1: Fraction
    image: Interval


def _gap_at(p: Condition, i: int) -> Gap:
    """Gap between stored pairs ``i-1`` and ``i`` (sentinels at the ends)."""
    lo = p.pairs[i - 1] if i > 0 else None
    hi = p.pairs[i] if i < len(p.pairs) else None
    x0, y0 = (lo.x, lo.y) if lo else (Fraction(0), Fraction(0))
    x1, y1 = (hi.x, hi.y) if hi else (Fraction(1), Fraction(1))
    return Gap(x0, x1, Interval.open(y0, y1))


def gap_of(p: Condition, x: Fraction) -> Gap:
    """Neighbouring domain values around ``x`` and the open image gap between their images."""
    key = order_key(Fraction(x))
    i = bisect_left(p.pairs, key, key=_XK)
    if i < len(p.pairs) and p.pairs[i].x == x:
        raise PreconditionError(f"{x} is already in the domain")
    return _gap_at(p, i)


def range_gap_of(p: Condition, y: Fraction) -> Gap:
    """Mirror of :func:`gap_of` for a value on the B side; ``image`` is the preimage gap."""
    key = order_key(Fraction(y))
    ys = [pair.yk for pair in p.pairs]
    i = bisect_left(ys, key)
    if i < len(p.pairs) and p.pairs[i].y == y:
        raise PreconditionError(f"{y} is already in the range")
    lo = p.pairs[i - 1] if i > 0 else None
    hi = p.pairs[i] if i < len(p.pairs) else None
    y0, x0 = (lo.y, lo.x) if lo else (Fraction(0), Fraction(0))
    y1, x1 = (hi.y, hi.x) if hi else (Fraction(1), Fraction(1))
    return Gap(y0, y1, Interval.open(x0, x1))


def dense_map_extend(p: Condition, a: str, u: Interval, registry: PointRegistry) -> tuple[Condition, str]:
    """Add ``a`` to the domain, mapped to a fresh B point inside ``u``."""
    if a in p.by_a:
        raise PreconditionError(f"{a} is already in the domain")
    x = registry.value(a)
    gap = gap_of(p, x)
    if not interval_subset(u, gap.image):
        raise PreconditionError(f"target {u} is not inside the image gap {gap.image}")
    b = registry.mint_b(u.interior())
    return p.with_pair(make_pair(a, b, x, registry.value(b))), b


def range_extend(p: Condition, b: str, u: Interval, registry: PointRegistry) -> tuple[Condition, str]:
    """Add ``b`` to the range, with a freshly minted a-point inside ``u`` as its preimage."""
    if b in p.by_b:
        raise PreconditionError(f"{b} is already in the range")
    y = registry.value(b)
    gap = range_gap_of(p, y)
    if not interval_subset(u, gap.image):
        raise PreconditionError(f"target {u} is not inside the preimage gap {gap.image}")
    a = registry.mint_a(u.interior())
    return p.with_pair(make_pair(a, b, registry.value(a), y)), a


# --- schedules --------------------------------------------------------------


@dataclass(frozen=True)
class AddDomain:
    a: str

    def __str__(self) -> str:
        return f"AddDomain({self.a})"


@dataclass(frozen=True)
class AddRange:
    b: str

    def __str__(self) -> str:
        return f"AddRange({self.b})"


@dataclass(frozen=True)
class MeetContainment:
    k: int

    def __str__(self) -> str:
        return f"MeetContainment({self.k})"


Task = Union[AddDomain, AddRange, MeetContainment]


@dataclass
class RunResult:
    condition: Condition
    certificates: list
    transcript: list[dict]


def run_schedule(schedule: Sequence[Task], registry: PointRegistry, p: Optional[Condition] = None, *,
                 escalate: bool = False, search_cap: int = 64, level_cap: int = 64) -> RunResult:
    """Meet each scheduled dense set in turn, starting from ``p`` (default: empty).

    With ``escalate`` every containment task uses ``k = max(k, previous n + 1)``,
    so successive certificates witness strictly increasing levels.
    """
    from .mainlemma import force_containment

    q = p if p is not None else Condition()
    certificates = []
    transcript = []
    last_n = -1
    for step, task in enumerate(schedule):
        before = q
        record = {"step": step, "task": str(task)}
        if isinstance(task, AddDomain):
            if task.a not in registry.a_side:
                raise PreconditionError(f"step {step}: unknown a-point {task.a}")
            if task.a not in q.by_a:
                gap = gap_of(q, registry.value(task.a))
                q, _ = dense_map_extend(q, task.a, gap.image, registry)
        elif isinstance(task, AddRange):
            if task.b not in registry.b_side:
                raise PreconditionError(f"step {step}: unknown b-point {task.b}")
            if task.b not in q.by_b:
                gap = range_gap_of(q, registry.value(task.b))
                q, _ = range_extend(q, task.b, gap.image, registry)
        elif isinstance(task, MeetContainment):
            k = max(task.k, last_n + 1) if escalate else task.k
            q, cert = force_containment(q, k, registry, search_cap=search_cap, level_cap=level_cap)
            certificates.append(cert)
            last_n = cert.n
            record["k"] = k
            record["n"] = cert.n
            record["l"] = cert.l
        else:
            raise PreconditionError(f"step {step}: unknown task {task!r}")
        added = sorted(q.id_pairs - before.id_pairs)
        record["added"] = [list(pair) for pair in added]
        record["size"] = len(q)
        transcript.append(record)
    return RunResult(q, certificates, transcript)


def replay_transcript(transcript: Sequence[dict]) -> list[str]:
    """Problems found when replaying a transcript's pair additions (empty when monotone)."""
    problems = []
    current: set = set()
    for record in transcript:
        added = {tuple(pair) for pair in record["added"]}
        if added & current:
            problems.append(f"step {record['step']}: re-adds existing pairs")
        current |= added
        if len(current) != record["size"]:
            problems.append(f"step {record['step']}: size {record['size']} != {len(current)} after additions")
    return problems
