"""Command line: ``towerkit run|check|demo|suite``.

Exit status 0 means every check passed, 1 that a check failed (or the
suite found a counterexample), 2 that the input did not validate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import ScenarioError, TowerkitError
from .report import (DEFAULT_CAPS, ReportError, Scenario, bundled_scenarios, check_report, dump_report, load_bundled,
                     load_scenario, read_json, run_scenario)

EXIT_PASS, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _parse_caps(text: Optional[str]) -> dict[str, int]:
    """``search_cap=64,level_cap=32`` into a dict."""
    caps: dict[str, int] = {}
    if not text:
        return caps
    for item in text.split(","):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in DEFAULT_CAPS:
            raise ScenarioError(f"--caps: expected key=value with key in {sorted(DEFAULT_CAPS)}, got {item!r}")
        try:
            caps[key] = int(value)
        except ValueError:
            raise ScenarioError(f"--caps: {key} needs an integer, got {value!r}") from None
    return caps


def _summarise(doc: dict, out: Path) -> None:
    for check in doc["checks"]:
        mark = "PASS" if check["pass"] else "FAIL"
        print(f"  {mark} {check['name']}: {check['detail']}")
    print(f"{'pass' if doc['pass'] else 'FAIL'}: {len(doc['certificates'])} certificates, "
          f"W = {doc['witnessed']}, {doc['timing']['seconds']}s -> {out}")


def _execute(sc: Scenario, out: Optional[str]) -> int:
    try:
        doc = run_scenario(sc)
    except TowerkitError as exc:
        print(f"error: run failed: {exc}", file=sys.stderr)
        diagnostic = getattr(exc, "diagnostic", None)
        if diagnostic and diagnostic not in str(exc):
            print(f"  {diagnostic}", file=sys.stderr)
        return EXIT_FAIL
    path = Path(out) if out else Path(f"{sc.name}.report.json")
    path.write_text(dump_report(doc), encoding="utf-8")
    _summarise(doc, path)
    return EXIT_PASS if doc["pass"] else EXIT_FAIL


def cmd_run(args) -> int:
    sc = load_scenario(args.scenario, _parse_caps(args.caps))
    return _execute(sc, args.out)


def cmd_demo(args) -> int:
    if args.name is None:
        for name in bundled_scenarios():
            print(name)
        return EXIT_PASS
    sc = load_bundled(args.name, _parse_caps(args.caps))
    return _execute(sc, args.out)


def cmd_check(args) -> int:
    doc = read_json(args.report, ReportError)
    verdict = check_report(doc)
    for note in verdict.notes:
        print(f"note: {note}")
    for failure in verdict.failures:
        print(f"FAIL {failure}")
    print("pass" if verdict.ok else f"FAIL: {len(verdict.failures)} problem(s)")
    return EXIT_PASS if verdict.ok else EXIT_FAIL


def cmd_suite(args) -> int:
    from .suite import resolve, run_battery

    try:
        names = resolve(args.selector)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_INVALID
    found = []
    for name in names:
        result = run_battery(name, args.trials, args.seed, only=args.trial)
        mark = "pass" if result.ok else "FAIL"
        print(f"{mark} {name}: {result.trials} trials, {len(result.counterexamples)} counterexample(s), "
              f"{result.seconds:.2f}s")
        for cx in result.counterexamples:
            print(f"  trial {cx['trial']}: {cx['reason']}")
        found += result.counterexamples
    if found:
        path = Path(args.out or "counterexamples.json")
        for cx in found:
            cx["replay"] = f"towerkit suite {cx['selector']} --seed {cx['seed']} --trial {cx['trial']}"
        path.write_text(json.dumps(found, indent=1) + "\n", encoding="utf-8")
        print(f"counterexamples written to {path}")
        return EXIT_FAIL
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="towerkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    def caps_and_out(p):
        p.add_argument("--out", help="report path (default: <scenario name>.report.json)")
        p.add_argument("--caps", help="override caps, e.g. search_cap=64,level_cap=64,horizon=256")

    p = sub.add_parser("run", help="run a scenario file and write its report")
    p.add_argument("scenario")
    caps_and_out(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("demo", help="run a bundled scenario (no name: list them)")
    p.add_argument("name", nargs="?")
    caps_and_out(p)
    p.set_defaults(fn=cmd_demo)

    p = sub.add_parser("check", help="re-verify a report from its own contents")
    p.add_argument("report")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("suite", help="run an invariant battery (selector, module name, or 'all')")
    p.add_argument("selector")
    p.add_argument("--trials", type=int, help="trial count (default: the battery's own)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, help="run only this trial index (replay)")
    p.add_argument("--out", help="counterexample file (default: counterexamples.json)")
    p.set_defaults(fn=cmd_suite)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
