from __future__ import annotations

import pytest

from towerkit import suite
from towerkit.suite import BATTERIES, resolve, run_battery, run_trial, trial_rng


@pytest.mark.parametrize("selector", list(BATTERIES))
def test_battery_smoke(selector):
    result = run_battery(selector, trials=5, seed=7)
    assert result.ok, result.counterexamples
    assert result.trials == (BATTERIES[selector].exhaustive or 5)


def test_resolve():
    assert resolve("cantor.cylinders") == ["cantor.cylinders"]
    assert resolve("cantor.fact3") == ["cantor.cylinders"]
    assert resolve("medini") == ["medini.order", "medini.density"]
    assert resolve("all") == list(BATTERIES)
    with pytest.raises(KeyError, match="cantor.cylinders"):
        resolve("nope")


def test_trial_streams_are_independent_and_replayable():
    a = trial_rng("poset.axioms", 3, 17).random()
    assert a == trial_rng("poset.axioms", 3, 17).random()
    assert a != trial_rng("poset.axioms", 3, 18).random()
    assert a != trial_rng("poset.axioms", 4, 17).random()


def test_counterexamples_record_the_replay_inputs(monkeypatch):
    def flaky(rng):
        return suite._fail("odd draw", value=rng.randrange(10)) if rng.random() < 0.5 else None

    monkeypatch.setitem(BATTERIES, "demo.flaky", suite.Battery("demo.flaky", "test", flaky, 20))
    result = run_battery("demo.flaky", seed=2)
    assert not result.ok and len(result.counterexamples) <= 5
    cx = result.counterexamples[0]
    assert (cx["selector"], cx["seed"]) == ("demo.flaky", 2)
    assert run_trial("demo.flaky", 2, cx["trial"]) == {k: cx[k] for k in ("reason", "input")}
    assert run_battery("demo.flaky", seed=2, only=cx["trial"]).counterexamples == [cx]
