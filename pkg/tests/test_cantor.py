from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import EVENS, unit_rationals, upsets
from towerkit import oracles
from towerkit.cantor import (GoodInterval, cylinder_image, find_good_within, good_interval, lambda_value,
                             least_cylinder, locate, preimage)
from towerkit.errors import MintError, PreconditionError
from towerkit.exactnum import Interval, interval_subset
from towerkit.setalg import UPSet, member


@pytest.mark.parametrize("text, expected", [("1|0", F(1, 2)), ("|10", F(2, 3)), ("|1", F(1))])
def test_lambda_value(text, expected):
    y = UPSet.parse(text)
    assert lambda_value(y) == expected == oracles.lambda_series(y)


def test_evens_partial_sums_approach_two_thirds():
    partial = sum(F(1, 2 ** (m + 1)) for m in range(0, 40, 2))
    assert 0 < lambda_value(EVENS) - partial < F(1, 2 ** 40)


@pytest.mark.parametrize("n, i, lo, hi", [(1, 0, F(1, 4), F(1, 2)), (1, 1, F(3, 4), 1), (0, 0, F(1, 2), 1)])
def test_good_interval(n, i, lo, hi):
    assert good_interval(GoodInterval(n, i)) == Interval.closed(lo, hi)


def test_good_interval_index_range():
    with pytest.raises(PreconditionError):
        GoodInterval(1, 2)
    assert GoodInterval.parse("good(3,5)") == GoodInterval(3, 5)


@pytest.mark.parametrize("n, expected", [
    (0, [(F(1, 2), 1)]),
    (1, [(F(1, 4), F(1, 2)), (F(3, 4), 1)]),
    (2, [(F(1, 8), F(1, 4)), (F(3, 8), F(1, 2)), (F(5, 8), F(3, 4)), (F(7, 8), 1)]),
])
def test_cylinder_image_small(n, expected):
    assert [(g.lo, g.hi) for g in cylinder_image(n)] == expected


@pytest.mark.parametrize("n", range(11))
def test_cylinder_image_matches_enumeration(n):
    assert [(g.lo, g.hi) for g in cylinder_image(n)] == oracles.cylinder_hulls(n)


@pytest.mark.parametrize("x, n, expected", [(F(2, 3), 2, 2), (F(2, 3), 1, None), (F(1, 3), 0, None)])
def test_locate(x, n, expected):
    assert locate(x, n) == expected == oracles.locate_scan(x, n)


def test_locate_rejects_dyadic_and_outside():
    with pytest.raises(PreconditionError):
        locate(F(1, 2), 3)
    with pytest.raises(PreconditionError):
        locate(F(3, 2), 0)


@pytest.mark.parametrize("interval, n, expected", [
    (Interval.open(F(1, 8), F(1, 2)), 3, GoodInterval(3, 1)),
    (Interval.open(F(1, 4), F(3, 4)), 2, GoodInterval(2, 1)),
])
def test_find_good_within(interval, n, expected):
    g = find_good_within(interval, n)
    assert g == expected
    assert g.i == oracles.good_within_scan(interval, n)
    assert interval_subset(g.interval(), interval)


def test_find_good_within_unit_interval_at_level_zero_is_an_error():
    # no good-at-0 interval fits strictly inside (0,1), and 3/2 < 1 fails
    assert oracles.good_within_scan(Interval.open(0, 1), 0) is None
    with pytest.raises(PreconditionError, match="3/2"):
        find_good_within(Interval.open(0, 1), 0)


def test_find_good_within_needs_open_interval():
    with pytest.raises(PreconditionError):
        find_good_within(Interval.closed(0, 1), 3)


def test_preimage_examples():
    assert set(preimage(F(1, 2))) == {UPSet.parse("1|0"), UPSet.parse("0|1")}
    assert preimage(F(2, 3)) == [EVENS]
    assert preimage(F(0)) == [UPSet.parse("|0")]


def test_least_cylinder():
    assert least_cylinder(Interval.open(F(1, 8), F(1, 2))) == "010"
    # a reserved zero at position 1 pushes the choice elsewhere
    w = least_cylinder(Interval.open(F(1, 8), F(1, 2)), zeros=[1])
    assert w[1] == "0"
    with pytest.raises(MintError):
        least_cylinder(Interval.open(F(1, 4), F(1, 2)), zeros=[0, 1], max_depth=6)


@given(upsets(dense=True))
def test_duality(y):
    v = lambda_value(y)
    assert v == oracles.lambda_series(y)
    for n in range(13):
        assert (locate(v, n) is not None) == member(y, n)
        assert locate(v, n) == oracles.locate_scan(v, n)


@given(upsets())
def test_round_trip(y):
    assert y in preimage(lambda_value(y))


@given(unit_rationals())
def test_preimage_values(x):
    sets = preimage(x)
    assert all(lambda_value(s) == x for s in sets)
    assert len(sets) == (2 if x.denominator & (x.denominator - 1) == 0 else 1)


@given(upsets(dense=True), upsets(dense=True))
def test_lambda_monotone(s, t):
    bound = oracles.agreement_bound(s, t)
    a, b = oracles.expand(s, bound), oracles.expand(t, bound)
    if a != b:
        assert (a < b) == (lambda_value(s) < lambda_value(t))


@given(unit_rationals(), unit_rationals())
def test_good_interval_inside_short_intervals(a, b):
    if a == b:
        return
    interval = Interval.open(min(a, b), max(a, b))
    n = oracles.least_feasible_level(interval.length)
    g = find_good_within(interval, n)
    assert interval.lo < g.lo and g.hi < interval.hi
    assert g.i == oracles.good_within_scan(interval, n)


@given(unit_rationals(), unit_rationals(), st.lists(st.integers(0, 12), max_size=4))
def test_least_cylinder_fits_and_is_least(a, b, zeros):
    if a == b:
        return
    interval = Interval.open(min(a, b), max(a, b))
    try:
        w = least_cylinder(interval, zeros)
    except MintError:
        return
    d = len(w)
    lo, hi = F(int(w, 2), 2 ** d), F(int(w, 2) + 1, 2 ** d)
    assert interval.lo < lo and hi < interval.hi
    assert all(w[z] == "0" for z in zeros if z < d)
    # nothing shallower, and nothing smaller at the same depth, fits
    for depth in range(1, d + 1):
        for c in range(2 ** depth):
            if depth == d and c >= int(w, 2):
                break
            v = format(c, f"0{depth}b")
            fits = interval.lo < F(c, 2 ** depth) and F(c + 1, 2 ** depth) < interval.hi
            assert not (fits and all(v[z] == "0" for z in zeros if z < depth))
