from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from towerkit import oracles
from towerkit.decomp import FiniteNwdSet, assemble, check_order_iso, induced_iso, interval_index, max_intervals
from towerkit.errors import PreconditionError
from towerkit.exactnum import Interval


def opens(*ends):
    return [Interval.open(a, b) for a, b in zip(ends, ends[1:])]


def test_max_intervals_examples():
    assert max_intervals([F(1, 3), F(1, 2)]) == opens(0, F(1, 3), F(1, 2), 1)
    assert max_intervals([F(1, 2)]) == opens(0, F(1, 2), 1)
    quarters = max_intervals(FiniteNwdSet((F(1, 4), F(1, 2), F(3, 4))))
    assert len(quarters) == 4
    hits = oracles.grid_hits(quarters, 64)
    assert [j for j, h in enumerate(hits, start=1) if h != 1] == [16, 32, 48]
    assert all(h in (0, 1) for h in hits)


def test_finite_set_validation():
    for bad in ((), (F(1, 2), F(1, 3)), (F(0),), (F(1, 2), F(1, 2))):
        with pytest.raises(PreconditionError):
            FiniteNwdSet(bad)


def test_induced_iso_examples():
    f, g = [F(1, 3), F(1, 2)], [F(1, 4), F(3, 4)]
    hat = induced_iso(list(zip(f, g)), f, g)
    assert hat == list(zip(opens(0, F(1, 3), F(1, 2), 1), opens(0, F(1, 4), F(3, 4), 1)))
    identity = induced_iso([(v, v) for v in f], f, f)
    assert all(s == d for s, d in identity)
    with pytest.raises(PreconditionError):
        induced_iso([(F(1, 3), F(1, 4))], f, [F(1, 4)])
    with pytest.raises(PreconditionError, match="order"):
        induced_iso([(F(1, 3), F(3, 4)), (F(1, 2), F(1, 4))], f, g)


def test_assemble_examples():
    f, g = [F(1, 3), F(1, 2)], [F(1, 4), F(3, 4)]
    phi = list(zip(f, g))
    assert assemble(phi, f, g, {}) == phi
    psi = {1: [(F(5, 14), F(1, 3)), (F(2, 5), F(1, 2)), (F(9, 20), F(2, 3))]}
    combined = assemble(phi, f, g, psi)
    assert len(combined) == 5 and check_order_iso(combined) and oracles.order_iso_by_sorting(combined)
    with pytest.raises(PreconditionError, match="outside"):
        assemble(phi, f, g, {1: [(F(2, 5), F(4, 5))]})
    with pytest.raises(PreconditionError, match="outside"):
        assemble(phi, f, g, {0: [(F(2, 5), F(1, 8))]})


def test_check_order_iso_examples():
    assert check_order_iso([])
    assert check_order_iso([(F(1, 2), F(1, 3)), (F(1, 4), F(1, 5))])
    assert not check_order_iso([(F(1, 4), F(1, 3)), (F(1, 2), F(1, 5))])


def test_interval_index():
    f = [F(1, 3), F(1, 2)]
    assert [interval_index(f, v) for v in (F(1, 5), F(2, 5), F(3, 5))] == [0, 1, 2]
    with pytest.raises(PreconditionError):
        interval_index(f, F(1, 2))


def unit_points(denominator, size):
    return st.lists(st.integers(1, denominator - 1), min_size=size, max_size=size, unique=True).map(
        lambda ns: sorted(F(n, denominator) for n in ns))


finite_sets = st.integers(1, 10).flatmap(lambda size: unit_points(720, size))


@given(finite_sets, st.lists(st.integers(1, 1439).map(lambda n: F(n, 1440)), max_size=30))
def test_every_point_in_exactly_one_interval(f, probes):
    intervals = max_intervals(f)
    ends = set(f) | {F(0), F(1)}
    assert all(iv.lo in ends and iv.hi in ends for iv in intervals)
    for v in probes:
        assert oracles.interval_hits(intervals, v) == (0 if v in f else 1)
        if v not in f:
            assert intervals[interval_index(f, v)].lo < v


@given(finite_sets, st.data())
def test_assembly_is_order_isomorphism(f, data):
    g = data.draw(unit_points(997, len(f)))
    phi = list(zip(f, g))
    hat = induced_iso(phi, f, g)
    psi = {}
    for k, (s, d) in enumerate(hat):
        m = data.draw(st.integers(0, 3))
        xs = [s.lo + (s.hi - s.lo) * F(i + 1, m + 1) for i in range(m)]
        ys = [d.lo + (d.hi - d.lo) * F(i + 1, m + 1) for i in range(m)]
        psi[k] = list(zip(xs, ys))
    combined = assemble(phi, f, g, psi)
    assert check_order_iso(combined) and oracles.order_iso_by_sorting(combined)
    assert set(phi) <= set(combined)
    assert len(combined) == len(f) + sum(len(v) for v in psi.values())
