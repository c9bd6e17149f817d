from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import EVENS
from towerkit.cantor import GoodInterval, locate
from towerkit.errors import SearchCapError
from towerkit.exactnum import Interval
from towerkit.gen import random_condition, random_tower, random_x
from towerkit.mainlemma import (check_certificate, choose_targets, find_clear_level, flank_points, force_containment,
                                little_invariant_check, little_xinf, soundness_oracle)
from towerkit.poset import (AddDomain, Condition, MeetContainment, PointRegistry, dense_map_extend, extends, gap_of,
                            run_schedule)
from towerkit.setalg import UPSet, complement, difference, member, tower_from_levels, tower_generate, union


def evens_registry(*prefixes, capacity=1024):
    return PointRegistry(tower_generate(EVENS, list(prefixes), capacity=capacity))


def map_in(p, a, registry):
    gap = gap_of(p, registry.value(a))
    return dense_map_extend(p, a, gap.image, registry)[0]


def test_find_clear_level_examples():
    registry = evens_registry()
    assert find_clear_level(Condition(), registry, 0) == 0
    assert find_clear_level(Condition(), registry, 5) == 6
    # one domain point from a level that drops 0, 2 and every multiple of 8 from evens
    level = UPSet.parse("00001010|00101010")
    assert difference(EVENS, level) == union(UPSet.finite([0, 2]), UPSet.parse("00000000|10000000"))
    registry = PointRegistry(tower_from_levels([EVENS, level], capacity=64))
    p = map_in(Condition(), "a1", registry)
    assert find_clear_level(p, registry, 0) == 4


def test_find_clear_level_cap_diagnostic():
    with pytest.raises(SearchCapError) as info:
        find_clear_level(Condition(), evens_registry(), 9, search_cap=9)
    assert "members in [9,9]: []" in info.value.diagnostic


def test_flank_points_level_zero():
    registry = evens_registry()
    ((a0, a1),) = flank_points(Condition(), 0, registry)
    assert a1 is None and 0 < registry.value(a0) < F(1, 2)


def test_flank_points_level_one_interleave():
    registry = evens_registry()
    (a00, a01), (a10, a11) = flank_points(Condition(), 1, registry)
    v = registry.value
    assert a11 is None
    assert v(a00) < F(1, 4) and F(1, 2) < v(a01) < v(a10) < F(3, 4)


def test_flank_points_respect_domain_points():
    registry = evens_registry()
    mid = registry.mint_a(Interval.open(F(5, 8), F(11, 16)))
    p = map_in(Condition(), mid, registry)
    (a00, a01), (a10, _) = flank_points(p, 1, registry)
    v = registry.value
    assert v(a01) < v(mid) < v(a10)


def _least_level(x, n, piece):
    return next(m for m in range(n + 1, 65) if member(x, m) and F(3, 2 ** (m + 1)) < piece)


def test_choose_targets_level_zero():
    l, targets = choose_targets(Condition(), 0, EVENS)
    assert l == 2 == _least_level(EVENS, 0, F(1))
    # the single t-interval has the fixed point 1 as right flank, so its target ends at 1
    assert targets == [GoodInterval(2, 3)]


def test_choose_targets_level_one():
    l, targets = choose_targets(Condition(), 1, EVENS)
    # two pieces of length 1/2 and 3/8 < 1/2 already at l = 2
    assert l == 2 == _least_level(EVENS, 1, F(1, 2))
    assert targets == [GoodInterval(2, 0), GoodInterval(2, 3)]


def test_choose_targets_degenerate_gap():
    # the only image gap for the t-interval is (1 - 2^-80, 1)
    p = Condition.from_values([("u", "v", F(1, 3), 1 - F(1, 2 ** 80))])
    with pytest.raises(SearchCapError):
        choose_targets(p, 0, EVENS, level_cap=64)


def test_force_containment_examples():
    registry = evens_registry()
    q, cert = force_containment(Condition(), 0, registry)
    assert cert.n == 0 and len(q) <= 2 * 2 ** cert.n
    assert check_certificate(q, cert, EVENS) == (True, "ok")
    q2, cert2 = force_containment(q, cert.n + 1, registry)
    assert cert2.n > cert.n and extends(q2, q)
    assert check_certificate(q2, cert2, EVENS) == (True, "ok")
    assert check_certificate(q2, cert, EVENS) == (True, "ok")


def test_force_containment_beyond_cap_leaves_p():
    registry = evens_registry()
    p = map_in(Condition(), "a0", registry)
    before = (p.as_id_list(), len(registry.a_side))
    with pytest.raises(SearchCapError):
        force_containment(p, 70, registry, search_cap=64)
    assert (p.as_id_list(), len(registry.a_side)) == before


@pytest.fixture
def certified():
    registry = evens_registry("01", "1")
    p = map_in(map_in(Condition(), "a1", registry), "a2", registry)
    q, cert = force_containment(p, 1, registry)
    return q, cert


def test_check_certificate_swapped_b_ids(certified):
    q, cert = certified
    e0, e1 = cert.entries[0], cert.entries[1]
    entries = (replace(e0, b0=e1.b0), replace(e1, b0=e0.b0)) + cert.entries[2:]
    ok, reason = check_certificate(q, replace(cert, entries=entries), EVENS)
    assert not ok and reason.endswith("image not in s_i")


def test_check_certificate_l_outside_x(certified):
    q, cert = certified
    ok, reason = check_certificate(q, replace(cert, l=cert.l + 1), EVENS)
    assert (ok, reason) == (False, "l ∉ X∖n")


def test_check_certificate_other_mutations(certified):
    q, cert = certified
    assert check_certificate(q, replace(cert, n=cert.n + 1), EVENS)[1] == "n ∉ X∖k"
    assert not check_certificate(q, replace(cert, entries=cert.entries[:-1]), EVENS)[0]
    last = cert.entries[-1]
    wrong = replace(last, s=GoodInterval(cert.l, 0))
    assert not check_certificate(q, replace(cert, entries=cert.entries[:-1] + (wrong,)), EVENS)[0]


def test_little_xinf_examples():
    assert little_xinf([], EVENS, 10) == [0, 2, 4, 6, 8]
    y = UPSet.parse("1111111111|0")
    z = UPSet.parse("0000001|10")  # meets evens exactly in {6}
    assert little_xinf([(y, z)], EVENS, 10) == [0, 2, 4, 6]
    far = UPSet.parse("0000000000|01")
    assert little_xinf([(far, z)], EVENS, 10) == [0, 2, 4, 6, 8]


def test_little_invariant_check_examples():
    assert little_invariant_check([], [], EVENS) == []
    z = UPSet.parse("0000001|10")
    a_set = UPSet.parse("0000000010|0")  # 8 in A and 8 >= k = 7
    rows = little_invariant_check([4, 8], [("a1", a_set, z)], EVENS)
    assert [(r.n, r.verdict) for r in rows] == [(4, "in"), (8, "VIOLATION")]
    rows = little_invariant_check([6], [("a1", UPSet.parse("0000001|0"), z)], EVENS)
    assert rows[0].verdict == "below"


def test_clean_run_passes_invariant():
    registry = evens_registry("01", "1", "0011")
    res = run_schedule([AddDomain("a1"), MeetContainment(0), AddDomain("a2"), MeetContainment(0),
                        AddDomain("a3"), MeetContainment(0)], registry, escalate=True)
    w = [c.n for c in res.certificates]
    assert w == sorted(set(w)) and all(member(EVENS, n) for n in w)
    pairs = [(p.a, registry.a_set(p.a), registry.b_set(p.b)) for p in res.condition.pairs]
    assert all(r.verdict != "VIOLATION" for r in little_invariant_check(w, pairs, EVENS))
    by_value = [(p.a, p.x, registry.b_set(p.b)) for p in res.condition.pairs]
    assert little_invariant_check(w, pairs, EVENS) == little_invariant_check(w, by_value, EVENS)
    assert set(w) <= set(little_xinf([(a, y) for _, a, y in pairs], EVENS, 256))


@settings(max_examples=60)
@given(st.integers(0, 10 ** 6))
def test_clear_level_tests_agree(seed):
    rng = random.Random(seed)
    inst = random_tower(rng, max_levels=12, capacity=256, x=random_x(rng, head=rng.randint(0, 6)))
    p = random_condition(rng, inst, rng.randint(0, 6))
    levels = [inst.registry.level_set(a) for a in p.domain_ids()]
    values = [inst.registry.value(a) for a in p.domain_ids()]
    for n in range(24):
        geometric = all(locate(v, n) is None for v in values)
        combinatorial = all(member(t, n) for t in levels)
        assert geometric == combinatorial
    for a in p.domain_ids():
        assert complement(inst.registry.level_set(a)) == inst.registry.a_set(a)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_small_certificates_pass_the_bracket_oracle(seed):
    rng = random.Random(seed)
    inst = random_tower(rng, max_levels=10, capacity=4096, x=random_x(rng, head=4))
    p = random_condition(rng, inst, rng.randint(0, 4))
    q, cert = force_containment(p, rng.randint(0, 3), inst.registry)
    assert check_certificate(q, cert, inst.x)[0]
    if cert.n <= 3:
        assert soundness_oracle(q, cert)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_witnessed_levels_grow(seed):
    rng = random.Random(seed)
    inst = random_tower(rng, max_levels=8, capacity=4096, x=random_x(rng, head=8))
    q = Condition()
    w = []
    for a in [a for a in inst.registry.a_side if a != "a0"][:3]:
        q = map_in(q, a, inst.registry)
        q, cert = force_containment(q, w[-1] + 1 if w else 0, inst.registry)
        w.append(cert.n)
    assert all(x < y for x, y in zip(w, w[1:])) and all(member(inst.x, n) for n in w)
