from __future__ import annotations

from fractions import Fraction

from hypothesis import settings, strategies as st

from towerkit.setalg import UPSet

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

EVENS = UPSet.parse("|10")
ODDS = UPSet.parse("|01")


def bitstrings(min_size: int = 0, max_size: int = 8):
    return st.text(alphabet="01", min_size=min_size, max_size=max_size)


@st.composite
def upsets(draw, dense: bool = False, max_prefix: int = 8, max_period: int = 6):
    prefix = draw(bitstrings(0, max_prefix))
    period = draw(bitstrings(2 if dense else 1, max_period))
    if dense and ("0" not in period or "1" not in period):
        period = "01" + period
    return UPSet.parse(prefix + "|" + period)


@st.composite
def unit_rationals(draw, max_den: int = 10 ** 6):
    den = draw(st.integers(2, max_den))
    return Fraction(draw(st.integers(1, den - 1)), den)
