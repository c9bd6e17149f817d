from __future__ import annotations

import json

import pytest

from towerkit import suite
from towerkit.cli import main


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def write(path, doc):
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def test_demo_lists_scenarios(capsys):
    assert main(["demo"]) == 0
    assert capsys.readouterr().out.split() == ["empty", "medini8", "small", "tower16"]


def test_demo_run_and_check(in_tmp, capsys):
    assert main(["demo", "small"]) == 0
    report = in_tmp / "small.report.json"
    assert report.exists()
    assert main(["check", str(report)]) == 0
    assert capsys.readouterr().out.strip().endswith("pass")


def test_run_with_out_and_caps(in_tmp):
    scenario = write(in_tmp / "s.json", {"schema": "towerkit.scenario/1", "name": "s", "X": "|10"})
    out = in_tmp / "r.json"
    assert main(["run", scenario, "--out", str(out), "--caps", "horizon=16"]) == 0
    assert json.loads(out.read_text())["little_xinf"] == list(range(0, 16, 2))


def test_validation_errors_exit_2(in_tmp, capsys):
    finite = write(in_tmp / "f.json", {"schema": "towerkit.scenario/1", "name": "f", "X": "101|0"})
    assert main(["run", finite]) == 2
    assert "X must be infinite-coinfinite" in capsys.readouterr().err
    (in_tmp / "bad.json").write_text("{", encoding="utf-8")
    assert main(["run", str(in_tmp / "bad.json")]) == 2
    assert main(["demo", "small", "--caps", "search_cap=x"]) == 2
    assert main(["demo", "nope"]) == 2
    assert main(["check", str(in_tmp / "bad.json")]) == 2


def test_check_failure_exits_1(in_tmp, capsys):
    assert main(["demo", "small", "--out", "r.json"]) == 0
    doc = json.loads((in_tmp / "r.json").read_text())
    doc["certificates"][0]["l"] += 1
    write(in_tmp / "r.json", doc)
    capsys.readouterr()
    assert main(["check", "r.json"]) == 1
    assert "FAIL certificates[0]: l ∉ X∖n" in capsys.readouterr().out


def test_search_cap_failure_exits_1(in_tmp, capsys):
    scenario = write(in_tmp / "s.json", {"schema": "towerkit.scenario/1", "name": "s", "X": "|10",
                                         "tower": {"prefixes": ["1"]}, "schedule": [{"meet": 30}]})
    assert main(["run", scenario, "--caps", "search_cap=20"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: run failed: no clear level in X between 30 and 20")
    assert not (in_tmp / "s.report.json").exists()


def test_suite_pass_and_unknown(capsys):
    assert main(["suite", "cantor.fact3"]) == 0
    assert main(["suite", "poset.axioms", "--trials", "10", "--seed", "3"]) == 0
    assert main(["suite", "nope"]) == 2
    assert "available" in capsys.readouterr().err


def test_suite_counterexample_file_and_replay(in_tmp, monkeypatch, capsys):
    def flaky(rng):
        return suite._fail("odd draw", value=rng.randrange(10)) if rng.random() < 0.3 else None

    monkeypatch.setitem(suite.BATTERIES, "demo.flaky", suite.Battery("demo.flaky", "test", flaky, 20))
    assert main(["suite", "demo.flaky", "--seed", "5"]) == 1
    found = json.loads((in_tmp / "counterexamples.json").read_text())
    cx = found[0]
    assert cx["replay"] == f"towerkit suite demo.flaky --seed 5 --trial {cx['trial']}"
    assert main(cx["replay"].split()[1:] + ["--out", "again.json"]) == 1
    again = json.loads((in_tmp / "again.json").read_text())
    assert again == [cx]
