"""Randomized invariant batteries, one per selector, each checked against a brute-force oracle.

Every trial draws from its own generator seeded by ``(selector, seed, trial)``,
so a counterexample can be replayed alone from those three values.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import oracles
from .cantor import cylinder_image, find_good_within, lambda_value, locate, preimage
from .decomp import assemble, check_order_iso, induced_iso, max_intervals
from .errors import TowerkitError
from .exactnum import (Interval, equal_partition, format_rational, interval_contains, interval_subset,
                       parse_rational, rat)
from .gen import (TowerInstance, bits, random_condition, random_finite_set, random_open_interval,
                  random_tower, random_upset, random_x)
from .mainlemma import (check_certificate, find_clear_level, force_containment, little_invariant_check,
                        little_xinf, soundness_oracle)
from .medini import (Coloring, MediniCondition, check_fix_certificate, cylinder_action_oracle, fix_bit_extend,
                     medini_add_point, medini_extends, medini_validate)
from .poset import (AddDomain, AddRange, MeetContainment, PointRegistry, dense_map_extend, extends, gap_of,
                    is_partial_iso, replay_transcript, restrict, run_schedule)
from .setalg import (Cardinality, UPSet, almost_subset, cardinality_class, complement, difference, intersect, member,
                     symmetric_difference, tower_generate, union, validate_tower)

Outcome = Optional[dict]  # None when the trial passes, else what went wrong


@dataclass
class Battery:
    selector: str
    description: str
    body: Callable[..., Outcome]  # takes a Random, or the trial index when exhaustive
    default_trials: int
    exhaustive: Optional[int] = None  # fixed trial count; trial i checks case i


@dataclass
class SuiteResult:
    selector: str
    seed: int
    trials: int
    counterexamples: list[dict] = field(default_factory=list)
    seconds: float = 0.0
    max_trial_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def trial_rng(selector: str, seed: int, trial: int) -> random.Random:
    return random.Random(f"{selector}/{seed}/{trial}")


def _fail(reason: str, **inputs) -> dict:
    return {"reason": reason, "input": {k: _text(v) for k, v in inputs.items()}}


def _text(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_text(x) for x in v]
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    return str(v)


# --- exactnum ---------------------------------------------------------------------


def _exactnum_canonical(rng: random.Random) -> Outcome:
    p = rng.randint(-10 ** 6, 10 ** 6)
    q = rng.choice([-1, 1]) * rng.randint(1, 10 ** 6)
    k = rng.choice([-1, 1]) * rng.randint(1, 10 ** 4)
    x = rat(p, q)
    if not oracles.is_lowest_terms(x):
        return _fail("not in lowest terms", p=p, q=q)
    y = rat(k * p, k * q)
    if (y.numerator, y.denominator) != (x.numerator, x.denominator):
        return _fail("scaling changes the canonical value", p=p, q=q, k=k)
    if parse_rational(format_rational(x)) != x:
        return _fail("text round trip", x=x)
    return None


def _exactnum_partition(rng: random.Random) -> Outcome:
    interval = random_open_interval(rng)
    j = rng.randint(1, 12)
    pieces = equal_partition(interval, j)
    if len(pieces) != j or pieces[0].lo != interval.lo or pieces[-1].hi != interval.hi:
        return _fail("pieces do not span the interval", interval=interval, j=j)
    if any(a.hi != b.lo for a, b in zip(pieces, pieces[1:])):
        return _fail("closures do not tile", interval=interval, j=j)
    if any(not p.is_open or p.length != interval.length / j for p in pieces):
        return _fail("pieces are not open of equal length", interval=interval, j=j)
    cuts = {p.hi for p in pieces[:-1]}
    step = interval.length / 97
    samples = [interval.lo - step + step * m for m in range(100)] + sorted(cuts)
    for v in samples:
        hits = oracles.interval_hits(pieces, v) + (v in cuts)
        if hits != (1 if interval_contains(interval, v) else 0):
            return _fail("point covered the wrong number of times", interval=interval, j=j, point=v)
    return None


def _random_end_interval(rng: random.Random, pool: list[Fraction]) -> Interval:
    lo, hi = sorted(rng.sample(pool, 2))
    return Interval(lo, hi, rng.random() < 0.5, rng.random() < 0.5)


def _exactnum_subset(rng: random.Random) -> Outcome:
    # a small pool of end points makes shared ends (the delicate case) common
    pool = [Fraction(rng.randint(0, 40), 40) for _ in range(5)]
    pool = sorted(set(pool))
    if len(pool) < 2:
        return None
    inner, outer = _random_end_interval(rng, pool), _random_end_interval(rng, pool)
    if interval_subset(inner, outer) != oracles.subset_by_sampling(inner, outer):
        return _fail("interval_subset disagrees with sampling", inner=inner, outer=outer)
    return None


# --- setalg -----------------------------------------------------------------------


def _re_represent(rng: random.Random, s: UPSet) -> UPSet:
    """The same set written with a longer prefix and a repeated period."""
    extra = rng.randint(0, 5)
    reps = rng.randint(1, 3)
    head = oracles.expand(s, s.plen + extra)
    period = oracles.expand(s, s.plen + extra + s.qlen)[s.plen + extra:] * reps
    return UPSet.parse(head + "|" + period)


def _setalg_canonical(rng: random.Random) -> Outcome:
    s = random_upset(rng)
    if UPSet.parse(str(s)) != s:
        return _fail("canonical form is not idempotent", s=s)
    t = _re_represent(rng, s) if rng.random() < 0.5 else random_upset(rng)
    if (s == t) != oracles.same_set(s, t):
        return _fail("equality disagrees with membership", s=s, t=t)
    if str(s) == str(t) and s != t:
        return _fail("equal text, unequal sets", s=s, t=t)
    return None


def _setalg_boolean(rng: random.Random) -> Outcome:
    s, t, u = random_upset(rng), random_upset(rng), random_upset(rng)
    ops = {
        "intersect": (intersect, lambda a, b: a and b),
        "union": (union, lambda a, b: a or b),
        "difference": (difference, lambda a, b: a and not b),
        "symmetric_difference": (symmetric_difference, lambda a, b: a != b),
    }
    for name, (fn, pred) in ops.items():
        if fn(s, t) != oracles.from_predicate(s, t, pred):
            return _fail(f"{name} disagrees with the membership oracle", s=s, t=t)
    if complement(complement(s)) != s:
        return _fail("double complement", s=s)
    if complement(union(s, t)) != intersect(complement(s), complement(t)):
        return _fail("De Morgan (union)", s=s, t=t)
    if complement(intersect(s, t)) != union(complement(s), complement(t)):
        return _fail("De Morgan (intersection)", s=s, t=t)
    if intersect(s, union(t, u)) != union(intersect(s, t), intersect(s, u)):
        return _fail("distributivity", s=s, t=t, u=u)
    return None


def _perturb(rng: random.Random, s: UPSet) -> UPSet:
    """``s`` with a few small positions toggled (a finite change)."""
    flips = UPSet.finite(rng.sample(range(12), rng.randint(0, 3)))
    return symmetric_difference(s, flips)


def _setalg_almost(rng: random.Random) -> Outcome:
    a = random_upset(rng)
    b = _perturb(rng, union(a, random_upset(rng))) if rng.random() < 0.7 else random_upset(rng)
    c = _perturb(rng, union(b, random_upset(rng))) if rng.random() < 0.7 else random_upset(rng)
    for x, y in ((a, b), (b, c), (a, c)):
        if almost_subset(x, y) != oracles.almost_subset(x, y):
            return _fail("almost_subset disagrees with the oracle", s=x, t=y)
    if almost_subset(a, a) != 0:
        return _fail("not reflexive", s=a)
    k1, k2, k3 = almost_subset(a, b), almost_subset(b, c), almost_subset(a, c)
    if k1 is not None and k2 is not None and (k3 is None or k3 > max(k1, k2)):
        return _fail("transitivity bound fails", a=a, b=b, c=c)
    return None


def _small_tower(rng: random.Random, **kw) -> TowerInstance:
    return random_tower(rng, capacity=rng.choice([64, 256, 1024]), **kw)


def _setalg_tower(rng: random.Random) -> Outcome:
    x = random_x(rng, head=rng.randint(0, 6))
    prefixes = [bits(rng, rng.randint(0, 6)) for _ in range(rng.randint(0, 15))]
    tower = tower_generate(x, prefixes, capacity=rng.choice([16, 64, 256]))
    problems = validate_tower(tower)
    if problems:
        return _fail("; ".join(problems), x=x, prefixes=prefixes)
    return None


def _setalg_meet(rng: random.Random) -> Outcome:
    inst = _small_tower(rng)
    chosen = rng.sample(range(len(inst.tower)), rng.randint(1, len(inst.tower)))
    meet = inst.x
    for a in chosen:
        meet = intersect(meet, inst.tower.levels[a])
    if cardinality_class(meet) in (Cardinality.EMPTY, Cardinality.FINITE):
        return _fail("finite meet of tower levels", x=inst.x, prefixes=inst.prefixes, levels=chosen)
    return None


# --- cantor -----------------------------------------------------------------------

CYLINDER_LEVELS = 11  # n = 0..10


def _cantor_cylinders(n: int) -> Outcome:
    got = [(g.lo, g.hi) for g in cylinder_image(n)]
    if got != oracles.cylinder_hulls(n):
        return _fail("cylinder image differs from enumeration", n=n)
    return None


def _cantor_goodfit(rng: random.Random) -> Outcome:
    interval = random_open_interval(rng)
    n = oracles.least_feasible_level(interval.length)
    try:
        g = find_good_within(interval, n)
    except TowerkitError as exc:
        return _fail(f"find_good_within failed: {exc}", interval=interval, n=n)
    if not Fraction(3, 2 ** (n + 1)) < interval.length:
        return _fail("level does not satisfy the length bound", interval=interval, n=n)
    if not (interval.lo < g.lo and g.hi < interval.hi):
        return _fail("returned interval is not strictly inside", interval=interval, n=n, good=g)
    if g.i != oracles.good_within_scan(interval, n):
        return _fail("not the least contained good interval", interval=interval, n=n, good=g)
    return None


def _cantor_duality(rng: random.Random) -> Outcome:
    y = random_upset(rng, dense=True)
    v = lambda_value(y)
    if v != oracles.lambda_series(y):
        return _fail("lambda differs from the series", y=y)
    for n in range(13):
        i = locate(v, n)
        if (i is not None) != member(y, n):
            return _fail("locate presence differs from membership", y=y, n=n)
        if i != oracles.locate_scan(v, n):
            return _fail("locate differs from the scan", y=y, n=n)
    return None


def _cantor_roundtrip(rng: random.Random) -> Outcome:
    y = random_upset(rng)
    pre = preimage(lambda_value(y))
    if y not in pre:
        return _fail("preimage misses the set", y=y, preimage=pre)
    if any(lambda_value(z) != lambda_value(y) for z in pre):
        return _fail("preimage holds a set of another value", y=y, preimage=pre)
    return None


def _cantor_monotone(rng: random.Random) -> Outcome:
    ys = [random_upset(rng, dense=True) for _ in range(6)]
    for s in ys:
        for t in ys:
            if s == t:
                continue
            bound = oracles.agreement_bound(s, t)
            lex = oracles.expand(s, bound) < oracles.expand(t, bound)
            if lex != (lambda_value(s) < lambda_value(t)):
                return _fail("lambda is not order preserving", s=s, t=t)
    return None


# --- poset ------------------------------------------------------------------------


def _pairs_of(q) -> list[tuple[Fraction, Fraction]]:
    return [(p.x, p.y) for p in q.pairs]


def _poset_axioms(rng: random.Random) -> Outcome:
    inst = _small_tower(rng, max_levels=10)
    p = random_condition(rng, inst, rng.randint(0, 6))
    if not is_partial_iso(p) or not oracles.order_iso_by_sorting(_pairs_of(p)):
        return _fail("constructed condition is not a partial isomorphism", x=inst.x, prefixes=inst.prefixes)
    # restriction closure
    keep = [a for a in p.domain_ids() if rng.random() < 0.5]
    r = restrict(p, keep)
    if not is_partial_iso(r) or not oracles.order_iso_by_sorting(_pairs_of(r)) or not extends(p, r):
        return _fail("restriction is not a condition below p", x=inst.x, prefixes=inst.prefixes, keep=keep)
    # dense mapping
    free = [a for a in inst.registry.a_side if a not in p.by_a and a != "a0"]
    if not free:
        return None
    a = rng.choice(free)
    gap = gap_of(p, inst.registry.value(a))
    u = random_open_interval(rng, gap.image.lo, gap.image.hi)
    q, b = dense_map_extend(p, a, u, inst.registry)
    if not extends(q, p) or q.image(a) != b or not interval_contains(u, inst.registry.value(b)):
        return _fail("dense_map_extend did not extend into U", x=inst.x, prefixes=inst.prefixes, a=a, u=u)
    if not oracles.order_iso_by_sorting(_pairs_of(q)):
        return _fail("extension is not order preserving", x=inst.x, prefixes=inst.prefixes, a=a, u=u)
    return None


def _poset_schedule(rng: random.Random) -> Outcome:
    # each containment step mints 2^(n+1) levels, so give the tower room
    inst = random_tower(rng, max_levels=10, capacity=4096)
    for _ in range(rng.randint(0, 3)):
        inst.registry.add_b(bits(rng, rng.randint(1, 4)))
    a_ids = [a for a in inst.registry.a_side if a != "a0"]
    b_ids = list(inst.registry.b_side)
    schedule = []
    for _ in range(rng.randint(1, 6)):
        r = rng.random()
        if r < 0.5:
            schedule.append(AddDomain(rng.choice(a_ids)))
        elif r < 0.7 and b_ids:
            schedule.append(AddRange(rng.choice(b_ids)))
        else:
            schedule.append(MeetContainment(rng.randint(0, 4)))
    result = run_schedule(schedule, inst.registry, escalate=True)
    problems = replay_transcript(result.transcript)
    if problems:
        return _fail("; ".join(problems), schedule=schedule)
    q = result.condition
    for task in schedule:
        if isinstance(task, AddDomain) and task.a not in q.by_a:
            return _fail(f"{task.a} missing from the final domain", schedule=schedule)
        if isinstance(task, AddRange) and task.b not in q.by_b:
            return _fail(f"{task.b} missing from the final range", schedule=schedule)
    if not is_partial_iso(q):
        return _fail("final condition is not a partial isomorphism", schedule=schedule)
    return None


# --- mainlemma --------------------------------------------------------------------


def density_instance(rng: random.Random) -> tuple[TowerInstance, object, int]:
    """Tower of at most 16 levels, a condition with at most 6 pairs, and ``k <= 8``."""
    # with X holding 0..11 and prefixes of length <= 4, n <= 8, so at most 2^9 flanks are minted
    inst = random_tower(rng, max_levels=16, max_prefix=4, capacity=1024)
    p = random_condition(rng, inst, rng.randint(0, 6))
    return inst, p, rng.randint(0, 8)


def _mainlemma_density(rng: random.Random) -> Outcome:
    inst, p, k = density_instance(rng)
    q, cert = force_containment(p, k, inst.registry)
    ok, reason = check_certificate(q, cert, inst.x)
    if not ok:
        return _fail(f"certificate rejected: {reason}", x=inst.x, prefixes=inst.prefixes, k=k)
    if not extends(q, p) or not (cert.n >= k and member(inst.x, cert.n)):
        return _fail("q does not extend p or n is not in X above k", x=inst.x, prefixes=inst.prefixes, k=k)
    return None


def _mainlemma_equivalence(rng: random.Random) -> Outcome:
    inst = _small_tower(rng, max_levels=12, x=random_x(rng, head=rng.randint(0, 6)))
    p = random_condition(rng, inst, rng.randint(0, 6))
    levels = [inst.registry.level_set(a) for a in p.domain_ids()]
    values = [inst.registry.value(a) for a in p.domain_ids()]
    for n in range(24):
        geometric = member(inst.x, n) and all(locate(v, n) is None for v in values)
        combinatorial = member(inst.x, n) and all(member(t, n) for t in levels)
        if geometric != combinatorial:
            return _fail("geometric and combinatorial clear tests differ", x=inst.x, prefixes=inst.prefixes, n=n)
    k = rng.randint(0, 8)
    expected = next((n for n in range(k, 65) if member(inst.x, n) and all(member(t, n) for t in levels)), None)
    try:
        got = find_clear_level(p, inst.registry, k)
    except TowerkitError:
        got = None
    if got != expected:
        return _fail(f"find_clear_level gave {got}, expected {expected}", x=inst.x, prefixes=inst.prefixes, k=k)
    return None


def _mainlemma_soundness(rng: random.Random) -> Outcome:
    inst = random_tower(rng, max_levels=10, capacity=4096, x=random_x(rng, head=4))
    p = random_condition(rng, inst, rng.randint(0, 4))
    k = rng.randint(0, 3)
    q, cert = force_containment(p, k, inst.registry)
    if cert.n > 3:
        return None
    ok, reason = check_certificate(q, cert, inst.x)
    if not ok or not soundness_oracle(q, cert):
        return _fail(f"sound certificate rejected ({reason})", x=inst.x, prefixes=inst.prefixes, k=k)
    # a certificate pointing one entry at the wrong target must fail both ways
    i = rng.randrange(len(cert.entries))
    e = cert.entries[i]
    others = [j for j in range(1 << cert.l) if j != e.s.i]
    wrong = type(e.s)(cert.l, rng.choice(others))
    entries = cert.entries[:i] + (type(e)(e.t, e.a0, e.a1, wrong, e.b0, e.b1),) + cert.entries[i + 1:]
    bad = type(cert)(cert.k, cert.n, cert.l, entries)
    if soundness_oracle(q, bad) or check_certificate(q, bad, inst.x)[0]:
        return _fail("corrupted certificate accepted", x=inst.x, prefixes=inst.prefixes, k=k, entry=i)
    return None


def _iterate_containment(rng: random.Random):
    inst = random_tower(rng, max_levels=12, capacity=4096, x=random_x(rng, head=rng.randint(6, 12)))
    schedule = []
    ids = [a for a in inst.registry.a_side if a != "a0"]
    for a in rng.sample(ids, rng.randint(1, min(4, len(ids)))):
        schedule += [AddDomain(a), MeetContainment(0)]
    result = run_schedule(schedule, inst.registry, escalate=True)
    return inst, result


def _mainlemma_growth(rng: random.Random) -> Outcome:
    inst, result = _iterate_containment(rng)
    w = [c.n for c in result.certificates]
    if any(a >= b for a, b in zip(w, w[1:])) or not all(member(inst.x, n) for n in w):
        return _fail("witnessed levels are not strictly increasing inside X", x=inst.x, prefixes=inst.prefixes, w=w)
    return None


def _mainlemma_xinf(rng: random.Random) -> Outcome:
    inst, result = _iterate_containment(rng)
    w = [c.n for c in result.certificates]
    q = result.condition
    pairs = [(p.a, inst.registry.a_set(p.a), inst.registry.b_set(p.b)) for p in q.pairs]
    rows = little_invariant_check(w, pairs, inst.x)
    if any(r.verdict == "VIOLATION" for r in rows):
        return _fail("dichotomy violated", x=inst.x, prefixes=inst.prefixes, w=w)
    xinf = little_xinf([(a, y) for _, a, y in pairs], inst.x, 256)
    if not set(w) <= set(xinf):
        return _fail("witnessed level outside little_xinf", x=inst.x, prefixes=inst.prefixes, w=w)
    return None


# --- medini -----------------------------------------------------------------------


@dataclass
class MediniRun:
    x: UPSet
    prefixes: list[str]
    classes: int
    chain: list[MediniCondition]
    witnessed: list[int]
    certificates: list[tuple[int, int]]  # (k, n)
    registry: PointRegistry
    coloring: Coloring


def medini_instance(rng: random.Random) -> MediniRun:
    """Random tower of equal-length prefixes, 1..3 colours, and up to three bit fixes."""
    # short periods keep three escalating fixes well below the table cap
    x = random_x(rng, head=rng.randint(0, 4), max_period=3)
    length = rng.randint(2, 4)
    words = [format(v, f"0{length}b") for v in range(1 << length)]
    prefixes = rng.sample(words, rng.randint(1, min(6, len(words))))
    tower = tower_generate(x, prefixes, capacity=64)
    registry = PointRegistry(tower, a_levels=range(1, len(prefixes) + 1))
    classes = rng.randint(1, 3)
    coloring = Coloring.by_level(registry, classes)
    p = MediniCondition.minimal()
    chain, witnessed, certs = [p], [], []
    todo = list(registry.a_side)
    rng.shuffle(todo)
    fixes = 0
    for _ in range(rng.randint(1, 6)):
        if not todo and fixes >= 3:
            break
        if todo and (fixes >= 3 or rng.random() < 0.5):
            p, _ = medini_add_point(p, todo.pop(), coloring, registry)
        else:
            k = max(rng.randint(0, 4), witnessed[-1] + 1 if witnessed else 0)
            p, n, _ = fix_bit_extend(p, k, x, registry)
            witnessed.append(n)
            certs.append((k, n))
            fixes += 1
        chain.append(p)
    return MediniRun(x, prefixes, classes, chain, witnessed, certs, registry, coloring)


def _medini_order(rng: random.Random) -> Outcome:
    run = medini_instance(rng)
    chain = run.chain
    for i, c in enumerate(chain):
        if not medini_extends(c, c):
            return _fail("not reflexive", x=run.x, prefixes=run.prefixes, step=i)
        for j in range(i):
            if not medini_extends(c, chain[j]):
                return _fail("chain is not decreasing", x=run.x, prefixes=run.prefixes, step=i, earlier=j)
    return None


def _medini_density(rng: random.Random) -> Outcome:
    run = medini_instance(rng)
    where = dict(x=run.x, prefixes=run.prefixes, classes=run.classes)
    final = run.chain[-1]
    for step, (before, after) in enumerate(zip(run.chain, run.chain[1:])):
        ok, reason = medini_validate(after, run.coloring, run.registry)
        if not ok or not medini_extends(after, before):
            return _fail(f"step {step}: invalid extension ({reason})", **where)
    for k, n in run.certificates:
        if not (n >= k and member(run.x, n)):
            return _fail(f"fixed level {n} is not in X above {k}", **where)
        if not check_fix_certificate(final, n):
            return _fail(f"bit {n} is not preserved", **where)
    for q in run.chain:
        for _, n in run.certificates:
            if n <= 3 and n < q.n <= 12 and cylinder_action_oracle(q, n) != check_fix_certificate(q, n):
                return _fail(f"cylinder oracle disagrees at n={n}, level {q.n}", **where)
    pairs = [(a, run.registry.a_set(a), run.registry.b_set(b)) for a, b in final.f]
    if any(r.verdict == "VIOLATION" for r in little_invariant_check(run.witnessed, pairs, run.x)):
        return _fail("dichotomy violated", w=run.witnessed, **where)
    return None


# --- decomp -----------------------------------------------------------------------


def _decomp_skeleton(rng: random.Random) -> Outcome:
    size = rng.randint(1, 12)
    f, g = random_finite_set(rng, size), random_finite_set(rng, size)
    phi = list(zip(f, g))
    rng.shuffle(phi)
    intervals = max_intervals(f)
    where = dict(f=f, g=g)
    on_grid = {int(v * 1000) for v in f if (v * 1000).denominator == 1}
    for j, hits in enumerate(oracles.grid_hits(intervals, 1000), start=1):
        if hits != (0 if j in on_grid else 1):
            return _fail("grid point not in exactly one interval", point=Fraction(j, 1000), **where)
    ends = set(f) | {Fraction(0), Fraction(1)}
    if any(iv.lo not in ends or iv.hi not in ends or iv.lo >= iv.hi for iv in intervals):
        return _fail("interval end points outside F and {0,1}", **where)
    if any(a.hi > b.lo for a, b in zip(intervals, intervals[1:])):
        return _fail("intervals overlap", **where)
    hat = induced_iso(phi, f, g)
    src = [s for s, _ in hat]
    dst = [d for _, d in hat]
    if src != intervals or dst != max_intervals(g):
        return _fail("induced map is not a bijection of interval lists", **where)
    if any(a.hi > b.lo for a, b in zip(dst, dst[1:])):
        return _fail("induced map is not order preserving", **where)
    budget = rng.randint(0, 200)
    psi = {}
    for k, (s, d) in enumerate(hat):
        m = min(budget, rng.randint(0, 30))
        budget -= m
        if m == 0:
            continue
        xs = sorted({oracles_point(rng, s) for _ in range(m)})
        ys = sorted({oracles_point(rng, d) for _ in range(len(xs))})
        m = min(len(xs), len(ys))
        psi[k] = list(zip(xs[:m], ys[:m]))
    combined = assemble(phi, f, g, psi)
    if not check_order_iso(combined) or not oracles.order_iso_by_sorting(combined):
        return _fail("assembled map is not an order isomorphism", **where)
    expected = set(phi) | {pr for pairs in psi.values() for pr in pairs}
    if set(combined) != expected:
        return _fail("assembled map is not phi together with the samples", **where)
    return None


def oracles_point(rng: random.Random, interval: Interval) -> Fraction:
    den = rng.randint(1, 1 << 16)
    return interval.lo + interval.length * Fraction(rng.randint(1, den), den + 1)


# --- registry ---------------------------------------------------------------------

BATTERIES: dict[str, Battery] = {b.selector: b for b in [
    Battery("exactnum.canonical", "lowest terms and scaling invariance", _exactnum_canonical, 500),
    Battery("exactnum.partition", "equal_partition tiles the interval", _exactnum_partition, 300),
    Battery("exactnum.subset", "interval_subset against point sampling", _exactnum_subset, 300),
    Battery("setalg.canonical", "canonical forms decide equality", _setalg_canonical, 500),
    Battery("setalg.boolean", "boolean operations and their laws", _setalg_boolean, 500),
    Battery("setalg.almost", "almost_subset bounds, reflexive and transitive", _setalg_almost, 500),
    Battery("setalg.tower", "generated towers validate", _setalg_tower, 200),
    Battery("setalg.meet", "finite meets of tower levels are infinite", _setalg_meet, 200),
    Battery("cantor.cylinders", "cylinder images against enumeration, n <= 10",
            _cantor_cylinders, CYLINDER_LEVELS, exhaustive=CYLINDER_LEVELS),
    Battery("cantor.goodfit", "good intervals inside short open intervals", _cantor_goodfit, 1000),
    Battery("cantor.duality", "locate(lambda(Y), n) present iff n in Y", _cantor_duality, 500),
    Battery("cantor.roundtrip", "preimage of lambda contains the set", _cantor_roundtrip, 500),
    Battery("cantor.monotone", "lambda preserves lexicographic order", _cantor_monotone, 200),
    Battery("poset.axioms", "restriction closure and dense mapping", _poset_axioms, 300),
    Battery("poset.schedule", "schedules are monotone and meet their tasks", _poset_schedule, 100),
    Battery("mainlemma.density", "force_containment yields checked certificates", _mainlemma_density, 200),
    Battery("mainlemma.equivalence", "geometric and combinatorial clear levels agree", _mainlemma_equivalence, 200),
    Battery("mainlemma.soundness", "certificates with n <= 3 against the bracket oracle", _mainlemma_soundness, 200),
    Battery("mainlemma.growth", "iterated containment witnesses increasing levels", _mainlemma_growth, 30),
    Battery("mainlemma.xinf", "witnessed levels pass the dichotomy and lie in little_xinf", _mainlemma_xinf, 30),
    Battery("medini.order", "extension is reflexive and transitive on chains", _medini_order, 300),
    Battery("medini.density", "bit fixing yields valid certified extensions", _medini_density, 200),
    Battery("decomp.skeleton", "maximal intervals, induced map and assembly", _decomp_skeleton, 200),
]}


def selectors() -> list[str]:
    return list(BATTERIES)


# older selector names that scripts may still use
ALIASES = {"cantor.fact3": "cantor.cylinders"}


def resolve(selector: str) -> list[str]:
    """Exact selector, or every selector under a module prefix such as ``cantor``."""
    selector = ALIASES.get(selector, selector)
    if selector in BATTERIES:
        return [selector]
    if selector == "all":
        return selectors()
    matched = [s for s in BATTERIES if s.split(".")[0] == selector]
    if not matched:
        raise KeyError(f"unknown selector {selector!r}; available: all, "
                       + ", ".join(sorted({s.split('.')[0] for s in BATTERIES}) + selectors()))
    return matched


def run_trial(selector: str, seed: int, trial: int) -> Outcome:
    battery = BATTERIES[selector]
    try:
        if battery.exhaustive:
            return battery.body(trial)
        return battery.body(trial_rng(selector, seed, trial))
    except TowerkitError as exc:
        return {"reason": f"{type(exc).__name__}: {exc}", "input": {}}


def run_battery(selector: str, trials: Optional[int] = None, seed: int = 0,
                only: Optional[int] = None, stop_after: int = 5) -> SuiteResult:
    battery = BATTERIES[selector]
    count = battery.exhaustive or (trials if trials is not None else battery.default_trials)
    indices = [only] if only is not None else range(count)
    result = SuiteResult(selector, seed, len(indices))
    started = time.perf_counter()
    for i in indices:
        t0 = time.perf_counter()
        outcome = run_trial(selector, seed, i)
        result.max_trial_seconds = max(result.max_trial_seconds, time.perf_counter() - t0)
        if outcome is not None:
            result.counterexamples.append({"selector": selector, "seed": seed, "trial": i, **outcome})
            if len(result.counterexamples) >= stop_after:
                break
    result.seconds = time.perf_counter() - started
    return result
