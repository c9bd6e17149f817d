"""Seeded random instances for the property batteries and the acceptance runs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exactnum import Interval
from .poset import AddDomain, Condition, PointRegistry, dense_map_extend, gap_of
from .setalg import Tower, UPSet, tower_generate


def bits(rng: random.Random, length: int) -> str:
    return "".join(rng.choice("01") for _ in range(length))


def dense_period(rng: random.Random, length: int) -> str:
    """A period holding both bits, so the set is infinite and coinfinite."""
    length = max(length, 2)
    while True:
        w = bits(rng, length)
        if "0" in w and "1" in w:
            return w


def random_upset(rng: random.Random, *, max_prefix: int = 8, max_period: int = 6, dense: bool = False) -> UPSet:
    prefix = bits(rng, rng.randint(0, max_prefix))
    if dense:
        period = dense_period(rng, rng.randint(2, max(2, max_period)))
    else:
        period = bits(rng, rng.randint(1, max_period))
    return UPSet.parse(prefix + "|" + period)


def random_rational(rng: random.Random, lo: Fraction, hi: Fraction, max_den: int = 1 << 20) -> Fraction:
    den = rng.randint(1, max_den)
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


def random_open_interval(rng: random.Random, lo: Fraction = Fraction(0), hi: Fraction = Fraction(1)) -> Interval:
    """An open interval inside ``(lo, hi)`` whose length spans many orders of magnitude."""
    while True:
        scale = Fraction(1, 1 << rng.randint(0, 24))
        length = (hi - lo) * scale * Fraction(rng.randint(1, 997), 997)
        a = random_rational(rng, lo, hi - length)
        if length > 0 and a >= lo and a + length <= hi:
            return Interval.open(a, a + length)


def random_x(rng: random.Random, head: int = 12, max_period: int = 6) -> UPSet:
    """An infinite-coinfinite X whose first ``head`` positions are all members."""
    return UPSet.parse("1" * head + "|" + dense_period(rng, rng.randint(2, max_period)))


@dataclass
class TowerInstance:
    x: UPSet
    prefixes: list[str]
    tower: Tower
    registry: PointRegistry


def random_tower(rng: random.Random, *, max_levels: int = 16, max_prefix: int = 4, capacity: int = 4096,
                 x: Optional[UPSet] = None) -> TowerInstance:
    x = x if x is not None else random_x(rng)
    count = rng.randint(1, max_levels - 1)
    prefixes = [bits(rng, rng.randint(1, max_prefix)) for _ in range(count)]
    tower = tower_generate(x, prefixes, capacity=capacity)
    return TowerInstance(x, prefixes, tower, PointRegistry(tower))


def random_condition(rng: random.Random, inst: TowerInstance, size: int) -> Condition:
    """Map ``size`` random a-points, each into a random open piece of its image gap."""
    q = Condition()
    ids = [a for a in inst.registry.a_side if a != "a0"]
    for a in rng.sample(ids, min(size, len(ids))):
        gap = gap_of(q, inst.registry.value(a))
        q, _ = dense_map_extend(q, a, random_open_interval(rng, gap.image.lo, gap.image.hi), inst.registry)
    return q


def random_schedule(rng: random.Random, inst: TowerInstance, domain: int) -> list:
    ids = [a for a in inst.registry.a_side if a != "a0"]
    return [AddDomain(a) for a in rng.sample(ids, min(domain, len(ids)))]


def random_finite_set(rng: random.Random, size: int, max_den: int = 1 << 12) -> list[Fraction]:
    pts: set[Fraction] = set()
    while len(pts) < size:
        den = rng.randint(2, max_den)
        pts.add(Fraction(rng.randint(1, den - 1), den))
    return sorted(pts)
