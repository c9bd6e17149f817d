"""Scenario files in, report files out, and re-verification of reports.

Both formats are JSON documents carrying a versioned ``schema`` field and
are validated against the JSON Schemas shipped in ``towerkit/schemas``;
unknown fields are rejected.  Reports hold every rational as an exact
``num/den`` string and describe the tower compactly (its explicit top
levels plus the complement prefix of every minted level), so
:func:`check_report` can rebuild every point value from the report alone.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import fastjsonschema

from .cantor import GoodInterval, lambda_value
from .errors import PreconditionError, ScenarioError, TowerkitError
from .exactnum import format_rational, parse_rational
from .mainlemma import (CertificateEntry, ContainmentCertificate, check_certificate, little_invariant_check,
                        little_xinf)
from .medini import (BitFixCertificate, Coloring, MAX_LEVEL, MediniCondition, bit_string, check_fix_certificate,
                     fix_bit_extend, medini_add_point, medini_validate)
from .poset import (AddDomain, AddRange, Condition, MeetContainment, PointRegistry, is_partial_iso,
                    replay_transcript, run_schedule)
from .setalg import (Cardinality, Tower, UPSet, almost_disjoint, cardinality_class, member, tower_from_levels,
                     tower_mint_below)

SCENARIO_SCHEMA = "towerkit.scenario/1"
REPORT_SCHEMA = "towerkit.report/1"
DEFAULT_CAPS = {"search_cap": 64, "level_cap": 64, "horizon": 256}
DEFAULT_CAPACITY = 1024
DEFAULT_HORIZON = 128

class ReportError(TowerkitError, ValueError):
    """A report file that is not well formed."""


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("towerkit").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def _validator(name: str):
    return fastjsonschema.compile(load_schema(name))


def _schema_errors(doc: Any, name: str) -> list[str]:
    """Empty when ``doc`` validates, else the first error with its field path."""
    try:
        _validator(name)(doc)
    except fastjsonschema.JsonSchemaValueException as exc:
        where = exc.name[len("data"):].lstrip(".") if exc.name else ""
        message = exc.message[len(exc.name or ""):].strip() if exc.name else exc.message
        return [f"field {where or '(top level)'}: {message}"]
    return []


def read_json(path: Union[str, Path], kind: type = ScenarioError) -> Any:
    try:
        text = Path(path).read_text("utf-8")
    except OSError as exc:
        raise kind(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise kind(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


# --- scenarios ----------------------------------------------------------------


@dataclass
class MediniSpec:
    classes: int = 1
    tasks: list = field(default_factory=list)  # ("add", a_id) or ("fix", k)
    escalate: bool = False


@dataclass
class Scenario:
    name: str
    x: UPSet
    levels: list[UPSet]
    prefixes: list[str]
    capacity: int
    horizon: int
    b_count: int
    b_prefixes: list[str]
    schedule: list
    escalate: bool
    medini: Optional[MediniSpec]
    caps: dict[str, int]
    seed: int
    raw: dict


def _parse_task(item: dict):
    if "add_domain" in item:
        return AddDomain(item["add_domain"])
    if "add_range" in item:
        return AddRange(item["add_range"])
    return MeetContainment(item["meet"])


def validate_scenario(doc: Any, caps_override: Optional[dict] = None) -> Scenario:
    errors = _schema_errors(doc, "scenario")
    if errors:
        raise ScenarioError("scenario does not validate: " + "; ".join(errors))
    x = UPSet.parse(doc["X"])
    if cardinality_class(x) is not Cardinality.INFINITE_COINFINITE:
        raise ScenarioError("field X: X must be infinite-coinfinite")
    tower = doc.get("tower", {})
    levels = [UPSet.parse(t) for t in tower.get("levels", [doc["X"]])]
    if levels[0] != x:
        raise ScenarioError("field tower.levels[0]: the first level must equal X")
    b_side = doc.get("b_side", {})
    b_prefixes = list(b_side.get("prefixes", []))
    b_count = b_side.get("count", len(b_prefixes))
    if b_count < len(b_prefixes):
        raise ScenarioError("field b_side.count: fewer points than listed prefixes")
    medini = None
    if "medini" in doc:
        m = doc["medini"]
        tasks = [("add", t["add_point"]) if "add_point" in t else ("fix", t["fix_bit"]) for t in m.get("tasks", [])]
        medini = MediniSpec(m.get("classes", 1), tasks, m.get("escalate", False))
    caps = dict(DEFAULT_CAPS)
    caps.update(doc.get("caps", {}))
    caps.update(caps_override or {})
    for key, value in caps.items():
        if key not in DEFAULT_CAPS:
            raise ScenarioError(f"caps: unknown cap {key!r}")
        if not isinstance(value, int) or value < 1:
            raise ScenarioError(f"caps.{key}: must be a positive integer")
    return Scenario(
        name=doc["name"],
        x=x,
        levels=levels,
        prefixes=list(tower.get("prefixes", [])),
        capacity=tower.get("capacity", DEFAULT_CAPACITY),
        horizon=tower.get("horizon", DEFAULT_HORIZON),
        b_count=b_count,
        b_prefixes=b_prefixes,
        schedule=[_parse_task(t) for t in doc.get("schedule", [])],
        escalate=doc.get("escalate", False),
        medini=medini,
        caps=caps,
        seed=doc.get("seed", 0),
        raw=doc,
    )


def load_scenario(path: Union[str, Path], caps_override: Optional[dict] = None) -> Scenario:
    return validate_scenario(read_json(path), caps_override)


def bundled_scenarios() -> list[str]:
    folder = resources.files("towerkit").joinpath("scenarios")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str, caps_override: Optional[dict] = None) -> Scenario:
    if name not in bundled_scenarios():
        raise ScenarioError(f"no bundled scenario {name!r}; available: {', '.join(bundled_scenarios())}")
    text = resources.files("towerkit").joinpath("scenarios", f"{name}.json").read_text("utf-8")
    return validate_scenario(json.loads(text), caps_override)


def build_tower(sc: Scenario) -> Tower:
    try:
        tower = tower_from_levels(sc.levels, capacity=max(sc.capacity, len(sc.prefixes)), horizon=sc.horizon)
        for w in sc.prefixes:
            tower, _ = tower_mint_below(tower, w)
    except TowerkitError as exc:
        raise ScenarioError(f"field tower: {exc}") from exc
    return tower


# --- running -------------------------------------------------------------------


def _tower_doc(tower: Tower) -> dict:
    return {
        "levels": [str(t) for t in tower.levels[:tower.base_count]],
        "minted": list(tower.minted),
        "capacity": tower.capacity,
        "horizon": tower.horizon,
    }


def _rebuild_tower(doc: dict) -> Tower:
    tower = tower_from_levels([UPSet.parse(t) for t in doc["levels"]],
                              capacity=doc["capacity"], horizon=doc["horizon"])
    for w in doc["minted"]:
        tower, _ = tower_mint_below(tower, w)
    return tower


def _certificate_doc(cert: ContainmentCertificate) -> dict:
    return {
        "k": cert.k,
        "n": cert.n,
        "l": cert.l,
        "entries": [
            {"t": str(e.t), "a0": e.a0, "a1": e.a1, "s": str(e.s), "b0": e.b0, "b1": e.b1}
            for e in cert.entries
        ],
    }


def _certificate_from_doc(doc: dict) -> ContainmentCertificate:
    entries = tuple(
        CertificateEntry(GoodInterval.parse(e["t"]), e["a0"], e["a1"], GoodInterval.parse(e["s"]), e["b0"], e["b1"])
        for e in doc["entries"]
    )
    return ContainmentCertificate(doc["k"], doc["n"], doc["l"], entries)


def _b_points_doc(registry: PointRegistry, coloring: Optional[Coloring] = None) -> list[dict]:
    out = []
    for pid, point in registry.b_side.items():
        row = {"id": pid, "set": str(point.set), "value": format_rational(point.value)}
        if coloring is not None:
            row["class"] = coloring.b[pid]
        out.append(row)
    return out


def _invariant_pairs(q: Condition, b_sets: dict[str, UPSet]) -> list[tuple[str, Fraction, UPSet]]:
    # a-points enter through their values: the value's expansion is the complement of the level
    return [(pair.a, pair.x, b_sets[pair.b]) for pair in q.pairs]


def _check(name: str, ok: bool, detail: str = "ok") -> dict:
    return {"name": name, "pass": bool(ok), "detail": detail if not ok or detail != "ok" else "ok"}


def _strictly_increasing(values: Sequence[int]) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


def _run_medini(sc: Scenario) -> tuple[dict, list[dict]]:
    spec = sc.medini
    registry = PointRegistry(build_tower(sc))
    coloring = Coloring.by_level(registry, spec.classes)
    p = MediniCondition.minimal()
    certs: list[BitFixCertificate] = []
    last = -1
    cap = min(sc.caps["search_cap"], MAX_LEVEL - 1)
    for kind, arg in spec.tasks:
        if kind == "add":
            p, _ = medini_add_point(p, arg, coloring, registry)
        else:
            k = max(arg, last + 1) if spec.escalate else arg
            p, n, cert = fix_bit_extend(p, k, sc.x, registry, search_cap=cap)
            certs.append(cert)
            last = n
    witnessed = [c.n for c in certs]
    rows = little_invariant_check(witnessed, [(a, registry.a_set(a), registry.b_set(b)) for a, b in p.f], sc.x)
    doc = {
        "classes": spec.classes,
        "tower": _tower_doc(registry.tower),
        "b_points": _b_points_doc(registry, coloring),
        "f": [[a, b] for a, b in p.f],
        "n": p.n,
        "pi": [bit_string(v, p.n) for v in p.pi],
        "certificates": [{"n": c.n, "level": c.level} for c in certs],
        "witnessed": witnessed,
        "little_invariant": [[r.n, r.a, r.verdict] for r in rows],
    }
    return doc, _medini_checks(doc, p, coloring, registry, sc.x)


def _medini_checks(doc: dict, p: MediniCondition, coloring: Coloring, registry: PointRegistry,
                   x: UPSet) -> list[dict]:
    checks = []
    ok, reason = medini_validate(p, coloring, registry)
    checks.append(_check("medini.validate", ok, reason))
    bad = [c["n"] for c in doc["certificates"] if c["level"] > p.n or not check_fix_certificate(p, c["n"])]
    checks.append(_check("medini.certificates", not bad, f"bit not preserved for n in {bad}" if bad else "ok"))
    w = doc["witnessed"]
    checks.append(_check("medini.witnessed", _strictly_increasing(w) and all(member(x, n) for n in w),
                         f"W = {w}"))
    violations = [r for r in doc["little_invariant"] if r[2] == "VIOLATION"]
    checks.append(_check("medini.little_invariant", not violations,
                         f"violations: {violations[:5]}" if violations else f"{len(doc['little_invariant'])} rows"))
    return checks


def run_scenario(sc: Scenario) -> dict:
    """Run the declared pipeline and return the report document."""
    started = time.perf_counter()
    tower = build_tower(sc)
    registry = PointRegistry(tower)
    for i in range(sc.b_count):
        registry.add_b(sc.b_prefixes[i] if i < len(sc.b_prefixes) else "")
    result = run_schedule(sc.schedule, registry, escalate=sc.escalate,
                          search_cap=sc.caps["search_cap"], level_cap=sc.caps["level_cap"])
    q = result.condition
    witnessed = [c.n for c in result.certificates]
    b_sets = {pid: pt.set for pid, pt in registry.b_side.items()}
    pairs = _invariant_pairs(q, b_sets)
    rows = little_invariant_check(witnessed, pairs, sc.x)
    xinf = little_xinf([(xv, y) for _, xv, y in pairs], sc.x, sc.caps["horizon"])
    doc: dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "scenario": sc.raw,
        "X": str(sc.x),
        "caps": dict(sc.caps),
        "tower": _tower_doc(registry.tower),
        "b_points": _b_points_doc(registry),
        "condition": [[p.a, p.b, format_rational(p.x), format_rational(p.y)] for p in q.pairs],
        "certificates": [_certificate_doc(c) for c in result.certificates],
        "transcript": result.transcript,
        "witnessed": witnessed,
        "little_invariant": [[r.n, r.a, r.verdict] for r in rows],
        "little_xinf": xinf,
        "medini": None,
        "checks": [],
        "pass": False,
        "timing": {},
    }
    checks = _pipeline_checks(doc, q, result.certificates, sc.x)
    if sc.medini is not None:
        doc["medini"], medini_checks = _run_medini(sc)
        checks += medini_checks
    doc["checks"] = checks
    doc["pass"] = all(c["pass"] for c in checks)
    doc["timing"] = {"seconds": round(time.perf_counter() - started, 3)}
    return doc


def _pipeline_checks(doc: dict, q: Condition, certs: Sequence[ContainmentCertificate], x: UPSet) -> list[dict]:
    checks = [_check("condition", is_partial_iso(q), "ok" if is_partial_iso(q) else "not a partial isomorphism")]
    failed = []
    for i, cert in enumerate(certs):
        ok, reason = check_certificate(q, cert, x)
        if not ok:
            failed.append(f"certificates[{i}]: {reason}")
    checks.append(_check("certificates", not failed, "; ".join(failed) or f"{len(certs)} verified"))
    w = doc["witnessed"]
    checks.append(_check("witnessed", _strictly_increasing(w) and all(member(x, n) for n in w), f"W = {w}"))
    violations = [r for r in doc["little_invariant"] if r[2] == "VIOLATION"]
    checks.append(_check("little_invariant", not violations,
                         f"violations: {violations[:5]}" if violations else f"{len(doc['little_invariant'])} rows"))
    missing = sorted(set(w) - set(doc["little_xinf"]))
    checks.append(_check("little_xinf", not missing, f"witnessed levels outside: {missing}" if missing else "W inside"))
    problems = replay_transcript(doc["transcript"])
    if doc["transcript"] and doc["transcript"][-1]["size"] != len(q):
        problems.append("transcript does not end at the final condition")
    checks.append(_check("transcript", not problems, "; ".join(problems) or "monotone"))
    return checks


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def without_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}


# --- re-verification -------------------------------------------------------------


@dataclass
class Verdict:
    ok: bool
    failures: list[str]
    notes: list[str] = field(default_factory=list)


def _parse_rat(text: str, where: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ReportError(f"{where}: {exc}") from exc


def _registry_from(doc_tower: dict, b_points: list[dict], x: UPSet, where: str,
                   failures: list[str]) -> PointRegistry:
    try:
        tower = _rebuild_tower(doc_tower)
    except (TowerkitError, ValueError) as exc:
        raise ReportError(f"{where}.tower: cannot rebuild: {exc}") from exc
    if tower.levels[0] != x:
        failures.append(f"{where}.tower.levels[0]: does not equal X")
    registry = PointRegistry(tower)
    for i, row in enumerate(b_points):
        loc = f"{where}b_points[{i}] ({row['id']})"
        y = UPSet.parse(row["set"])
        if row["id"] != f"b{i}":
            raise ReportError(f"{loc}: ids must run b0, b1, ... in order")
        if y in registry._b_sets:
            failures.append(f"{loc}: repeats an earlier point")
            y_id = registry._register_b(y)
        else:
            y_id = registry.add_b_set(y)
        assert y_id == row["id"]
        if _parse_rat(row["value"], loc) != lambda_value(y):
            failures.append(f"{loc}: value does not equal λ(set)")
        if almost_disjoint(y, x) is None:
            failures.append(f"{loc}: set is not almost disjoint from X")
        if cardinality_class(y) is not Cardinality.INFINITE_COINFINITE:
            failures.append(f"{loc}: set is not infinite-coinfinite")
    return registry


def check_report(doc: Any) -> Verdict:
    """Re-verify a report from its own contents; raises :class:`ReportError` if malformed."""
    errors = _schema_errors(doc, "report")
    if errors:
        raise ReportError("report does not validate: " + "; ".join(errors[:10]))
    failures: list[str] = []
    x = UPSet.parse(doc["X"])
    registry = _registry_from(doc["tower"], doc["b_points"], x, "", failures)

    rows = []
    for i, (a, b, xs, ys) in enumerate(doc["condition"]):
        loc = f"condition[{i}]"
        xv, yv = _parse_rat(xs, loc), _parse_rat(ys, loc)
        if a not in registry.a_side:
            failures.append(f"{loc}: unknown a-point {a}")
            continue
        if b not in registry.b_side:
            failures.append(f"{loc}: unknown b-point {b}")
            continue
        if xv != registry.value(a):
            failures.append(f"{loc} ({a}): x does not match the value of its tower level")
        if yv != registry.value(b):
            failures.append(f"{loc} ({b}): y does not match b_points")
        rows.append((a, b, xv, yv))
    q = Condition.from_values(rows)
    if len(q.by_a) != len(rows) or len(q.by_b) != len(rows):
        failures.append("condition: a point is used twice")
    if not is_partial_iso(q):
        failures.append("condition: not a partial isomorphism")

    certs = []
    for i, c in enumerate(doc["certificates"]):
        try:
            cert = _certificate_from_doc(c)
        except (ValueError, PreconditionError) as exc:
            raise ReportError(f"certificates[{i}]: {exc}") from exc
        certs.append(cert)
        ok, reason = check_certificate(q, cert, x)
        if not ok:
            failures.append(f"certificates[{i}]: {reason}")

    witnessed = [c.n for c in certs]
    if doc["witnessed"] != witnessed:
        failures.append(f"witnessed: {doc['witnessed']} does not list the certificate levels {witnessed}")
    if not _strictly_increasing(witnessed):
        failures.append("witnessed: levels are not strictly increasing")
    if not all(member(x, n) for n in witnessed):
        failures.append("witnessed: a level lies outside X")

    b_sets = {pid: pt.set for pid, pt in registry.b_side.items()}
    pairs = _invariant_pairs(q, b_sets)
    inv = [[r.n, r.a, r.verdict] for r in little_invariant_check(witnessed, pairs, x)]
    if inv != doc["little_invariant"]:
        failures.append("little_invariant: table differs from recomputation")
    bad = [r for r in inv if r[2] == "VIOLATION"]
    if bad:
        failures.append(f"little_invariant: violations {bad[:5]}")
    xinf = little_xinf([(xv, y) for _, xv, y in pairs], x, doc["caps"]["horizon"])
    if xinf != doc["little_xinf"]:
        failures.append("little_xinf: list differs from recomputation")
    missing = sorted(set(witnessed) - set(xinf))
    if missing:
        failures.append(f"little_xinf: witnessed levels {missing} are missing")

    problems = replay_transcript(doc["transcript"])
    added = {tuple(p) for r in doc["transcript"] for p in r["added"]}
    if doc["transcript"] and added != set(q.id_pairs):
        problems.append("pairs added by the transcript differ from the condition")
    failures += [f"transcript: {p}" for p in problems]

    if doc["medini"] is not None:
        failures += _check_medini(doc["medini"], x)

    notes = []
    if doc["pass"] != (not failures):
        notes.append(f"report claims pass={doc['pass']}, re-verification says pass={not failures}")
    claimed_bad = [c["name"] for c in doc["checks"] if not c["pass"]]
    if claimed_bad:
        failures.append(f"checks: report records failing checks {claimed_bad}")
    return Verdict(not failures, failures, notes)


def _check_medini(m: dict, x: UPSet) -> list[str]:
    failures: list[str] = []
    registry = _registry_from(m["tower"], m["b_points"], x, "medini.", failures)
    n = m["n"]
    if len(m["pi"]) != 1 << n or any(len(s) != n for s in m["pi"]):
        raise ReportError(f"medini.pi: expected {1 << n} strings of length {n}")
    pi = tuple(int(s, 2) if s else 0 for s in m["pi"])
    p = MediniCondition(tuple((a, b) for a, b in m["f"]), n, pi)
    coloring = Coloring.by_level(registry, m["classes"])
    for row in m["b_points"]:
        if "class" not in row:
            raise ReportError(f"medini.b_points ({row['id']}): class missing")
        coloring.b[row["id"]] = row["class"]
    for a, _ in p.f:
        if a not in registry.a_side:
            failures.append(f"medini.f: unknown a-point {a}")
            return failures
    ok, reason = medini_validate(p, coloring, registry)
    if not ok:
        failures.append(f"medini: {reason}")
    for i, c in enumerate(m["certificates"]):
        if c["level"] > n or c["n"] >= n:
            failures.append(f"medini.certificates[{i}]: level {c['level']} is beyond the final condition")
        elif not check_fix_certificate(p, c["n"]):
            failures.append(f"medini.certificates[{i}]: bit {c['n']} is not preserved")
    w = [c["n"] for c in m["certificates"]]
    if m["witnessed"] != w or not _strictly_increasing(w) or not all(member(x, k) for k in w):
        failures.append("medini.witnessed: does not match the certificates or leaves X")
    if ok:
        rows = little_invariant_check(w, [(a, registry.a_set(a), registry.b_set(b)) for a, b in p.f], x)
        inv = [[r.n, r.a, r.verdict] for r in rows]
        if inv != m["little_invariant"]:
            failures.append("medini.little_invariant: table differs from recomputation")
        if any(r[2] == "VIOLATION" for r in inv):
            failures.append("medini.little_invariant: violation")
    return failures
