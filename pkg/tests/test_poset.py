from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import EVENS
from towerkit import oracles
from towerkit.errors import PreconditionError
from towerkit.exactnum import Interval, interval_contains
from towerkit.gen import random_condition, random_open_interval, random_tower
from towerkit.mainlemma import check_certificate
from towerkit.poset import (AddDomain, AddRange, Condition, MeetContainment, PointRegistry, dense_map_extend,
                            extends, gap_of, is_partial_iso, range_extend, replay_transcript, restrict, run_schedule)
from towerkit.setalg import member, tower_generate


def cond(*pairs):
    return Condition.from_values([(f"u{i}", f"v{i}", F(x), F(y)) for i, (x, y) in enumerate(pairs)])


@pytest.fixture
def registry():
    return PointRegistry(tower_generate(EVENS, ["01", "1", "0011"], capacity=256))


def test_is_partial_iso_examples():
    assert is_partial_iso(Condition())
    assert is_partial_iso(cond((F(1, 3), F(1, 4)), (F(1, 2), F(3, 4))))
    assert not is_partial_iso(cond((F(1, 3), F(3, 4)), (F(1, 2), F(1, 4))))


def test_restrict_examples():
    p = cond((F(1, 5), F(1, 7)), (F(1, 3), F(1, 4)), (F(1, 2), F(3, 4)))
    assert restrict(p, p.domain_ids()) == p
    assert restrict(p, []) == Condition()
    assert restrict(p, ["u0", "u2"]).as_id_list() == [("u0", "v0"), ("u2", "v2")]
    with pytest.raises(PreconditionError):
        restrict(p, ["nope"])


def test_extends_examples():
    p = cond((F(1, 3), F(1, 4)))
    assert extends(p, p)
    assert extends(cond((F(1, 3), F(1, 4)), (F(1, 2), F(1, 2))), p)
    changed = Condition.from_values([("u0", "v9", F(1, 3), F(1, 4))])
    assert not extends(changed, p)


def test_gap_of_examples():
    assert gap_of(Condition(), F(1, 3)) == (0, 1, Interval.open(0, 1))
    assert gap_of(cond((F(1, 3), F(1, 4))), F(1, 2)) == (F(1, 3), 1, Interval.open(F(1, 4), 1))
    p = cond((F(1, 3), F(1, 4)), (F(2, 3), F(1, 2)))
    assert gap_of(p, F(1, 2)) == (F(1, 3), F(2, 3), Interval.open(F(1, 4), F(1, 2)))
    with pytest.raises(PreconditionError):
        gap_of(p, F(1, 3))


def test_dense_map_extend_examples(registry):
    a = "a1"
    q, b = dense_map_extend(Condition(), a, Interval.open(0, 1), registry)
    assert q.image(a) == b and 0 < registry.value(b) < 1
    x = registry.value(a)
    p = Condition.from_values([("u", "v", x / 2, F(1, 4))])
    u = Interval.open(F(1, 4), F(1, 2))
    q, b = dense_map_extend(p, a, u, registry)
    assert is_partial_iso(q) and extends(q, p) and interval_contains(u, registry.value(b))
    with pytest.raises(PreconditionError, match="image gap"):
        dense_map_extend(p, a, Interval.open(F(1, 8), F(1, 2)), registry)


def test_range_extend(registry):
    b = registry.add_b("01")
    q, a = range_extend(Condition(), b, Interval.open(F(1, 3), F(1, 2)), registry)
    assert q.image(a) == b and F(1, 3) < registry.value(a) < F(1, 2)


def test_run_schedule_examples(registry):
    empty = run_schedule([], registry)
    assert empty.condition == Condition() and empty.certificates == [] and empty.transcript == []
    one = run_schedule([AddDomain("a1")], registry)
    assert one.condition.domain_ids() == ["a1"]
    res = run_schedule([AddDomain("a1"), MeetContainment(0)], registry)
    (cert,) = res.certificates
    assert cert.n >= 0 and member(EVENS, cert.n)
    assert check_certificate(res.condition, cert, EVENS) == (True, "ok")


def test_run_schedule_unknown_point(registry):
    with pytest.raises(PreconditionError, match="unknown a-point"):
        run_schedule([AddDomain("a99")], registry)


def test_transcript_is_monotone(registry):
    registry.add_b("1")
    res = run_schedule([AddDomain("a2"), AddRange("b0"), MeetContainment(0), AddDomain("a1")],
                       registry, escalate=True)
    assert replay_transcript(res.transcript) == []
    assert res.transcript[-1]["size"] == len(res.condition)
    assert "a1" in res.condition.by_a and "b0" in res.condition.by_b


def test_replay_transcript_flags_tampering():
    bad = [{"step": 0, "added": [["a1", "b0"]], "size": 1}, {"step": 1, "added": [["a1", "b0"]], "size": 1}]
    assert replay_transcript(bad)


@given(st.integers(0, 10 ** 6), st.integers(0, 6))
def test_restriction_closure_and_dense_mapping(seed, size):
    rng = random.Random(seed)
    inst = random_tower(rng, max_levels=10, capacity=256)
    p = random_condition(rng, inst, size)
    assert is_partial_iso(p)
    assert oracles.order_iso_by_sorting([(pr.x, pr.y) for pr in p.pairs])
    keep = [a for a in p.domain_ids() if rng.random() < 0.5]
    r = restrict(p, keep)
    assert is_partial_iso(r) and extends(p, r)
    free = [a for a in inst.registry.a_side if a not in p.by_a and a != "a0"]
    if free:
        a = rng.choice(free)
        gap = gap_of(p, inst.registry.value(a))
        u = random_open_interval(rng, gap.image.lo, gap.image.hi)
        q, b = dense_map_extend(p, a, u, inst.registry)
        assert extends(q, p) and interval_contains(u, inst.registry.value(b))
        assert oracles.order_iso_by_sorting([(pr.x, pr.y) for pr in q.pairs])
