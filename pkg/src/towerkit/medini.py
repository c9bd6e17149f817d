"""Homeomorphism-forcing conditions on the Cantor space.

A condition is a finite colour-preserving injection ``f`` from A-points to
B-points together with a permutation ``pi`` of the bit strings of length
``n``; ``f`` must respect ``pi`` on ``n``-prefixes.  Bit strings of length
``n`` are stored as ints, first bit most significant, so ``pi`` is a table
of ``2^n`` ints.

The bit-fixing step makes the existence of a suitable refined permutation
constructive: first raise ``n`` until mapped points have distinct prefixes
(:func:`separate`), then refine each fibre by a single transposition of
the middle bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import PreconditionError, SearchCapError
from .poset import PointRegistry
from .setalg import UPSet, first_difference, member

# Permutation tables have 2^n entries; keep them desk sized.
MAX_LEVEL = 20


@dataclass(frozen=True)
class MediniCondition:
    f: tuple[tuple[str, str], ...] = ()
    n: int = 0
    pi: tuple[int, ...] = (0,)

    @classmethod
    def minimal(cls) -> "MediniCondition":
        return cls((), 0, (0,))

    def domain(self) -> list[str]:
        return [a for a, _ in self.f]

    def range(self) -> list[str]:
        return [b for _, b in self.f]


@dataclass
class Coloring:
    """Class index of every point; A-points default to ``level mod classes``."""

    classes: int = 1
    a: dict[str, int] = field(default_factory=dict)
    b: dict[str, int] = field(default_factory=dict)

    @classmethod
    def by_level(cls, registry: PointRegistry, classes: int) -> "Coloring":
        if classes < 1:
            raise PreconditionError("class count must be at least 1")
        return cls(classes, {pid: pt.level % classes for pid, pt in registry.a_side.items()})

    def of_a(self, pid: str, registry: Optional[PointRegistry] = None) -> int:
        if pid not in self.a and registry is not None and pid in registry.a_side:
            self.a[pid] = registry.a_side[pid].level % self.classes
        return self.a[pid]

    def of_b(self, pid: str) -> int:
        return self.b[pid]


def bit_string(value: int, length: int) -> str:
    return format(value, f"0{length}b") if length else ""


def prefix(s: UPSet, n: int) -> int:
    return s.bits(0, n)


def medini_validate(p: MediniCondition, coloring: Coloring, registry: PointRegistry) -> tuple[bool, str]:
    if not 0 <= p.n <= MAX_LEVEL:
        return False, f"level {p.n} outside 0..{MAX_LEVEL}"
    dom, rng = p.domain(), p.range()
    if len(set(dom)) != len(dom) or len(set(rng)) != len(rng):
        return False, "clause (1): f is not injective"
    for a, b in p.f:
        if a not in registry.a_side or b not in registry.b_side:
            return False, f"clause (1): unknown point in pair ({a},{b})"
    for a, b in p.f:
        if coloring.of_a(a, registry) != coloring.of_b(b):
            return False, f"clause (2): {a} and {b} have different colours"
    size = 1 << p.n
    if len(p.pi) != size or sorted(p.pi) != list(range(size)):
        return False, f"clause (3): pi is not a permutation of 2^{p.n}"
    for a, b in p.f:
        if p.pi[prefix(registry.a_set(a), p.n)] != prefix(registry.b_set(b), p.n):
            return False, f"clause (4): pair ({a},{b}) does not respect pi"
    return True, "ok"


def medini_extends(p: MediniCondition, q: MediniCondition) -> bool:
    """``p <= q``: ``f_p`` contains ``f_q`` and ``pi_p`` refines ``pi_q`` on every fibre."""
    if not set(q.f) <= set(p.f) or p.n < q.n:
        return False
    shift = p.n - q.n
    pi_p, pi_q = p.pi, q.pi
    return all(pi_p[t] >> shift == pi_q[t >> shift] for t in range(1 << p.n))


def _separation_level(sets: Sequence[UPSet]) -> int:
    """Least length at which the given distinct sets have pairwise distinct prefixes."""
    level = 0
    ordered = list(sets)
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            d = first_difference(ordered[i], ordered[j])
            if d is None:
                raise PreconditionError(f"two mapped points denote the same set {ordered[i]}")
            level = max(level, d + 1)
    return level


def _fibre_permutation(width: int, constraints: Mapping[int, int]) -> list[int]:
    """Permutation of ``range(2^width)`` meeting ``constraints``; identity where free,
    leftovers matched in increasing order."""
    size = 1 << width
    sigma = [-1] * size
    targets = set(constraints.values())
    for v, w in constraints.items():
        sigma[v] = w
    for v in range(size):
        if sigma[v] < 0 and v not in targets:
            sigma[v] = v
    used = set(sigma)
    spare = iter(w for w in range(size) if w not in used)
    for v in range(size):
        if sigma[v] < 0:
            sigma[v] = next(spare)
    return sigma


def _refine(p: MediniCondition, new_n: int, pairs: Iterable[tuple[UPSet, UPSet]]) -> tuple[int, ...]:
    """Extend ``pi`` to ``new_n`` bits fibrewise, sending each A-prefix to its B-prefix."""
    width = new_n - p.n
    if width == 0:
        return p.pi
    cons: dict[int, dict[int, int]] = {}
    for a_set, b_set in pairs:
        u = prefix(a_set, p.n)
        cons.setdefault(u, {})[a_set.bits(p.n, width)] = b_set.bits(p.n, width)
    identity = list(range(1 << width))
    pi = []
    for u in range(1 << p.n):
        head = p.pi[u] << width
        sigma = _fibre_permutation(width, cons[u]) if u in cons else identity
        pi.extend(head | v for v in sigma)
    return tuple(pi)


def _mapped_sets(p: MediniCondition, registry: PointRegistry) -> list[tuple[UPSet, UPSet]]:
    return [(registry.a_set(a), registry.b_set(b)) for a, b in p.f]


def separate(p: MediniCondition, registry: PointRegistry,
             extra_a: Sequence[str] = ()) -> MediniCondition:
    """Raise ``n`` to the least level separating the mapped points on each side.

    ``extra_a`` lists A-points about to join the domain; they are separated too.
    """
    pairs = _mapped_sets(p, registry)
    dom = [a for a, _ in pairs] + [registry.a_set(a) for a in extra_a]
    level = max(p.n, _separation_level(dom), _separation_level([b for _, b in pairs]))
    if level > MAX_LEVEL:
        raise SearchCapError(f"separating the mapped points needs level {level}",
                             f"permutation tables are capped at level {MAX_LEVEL}")
    if level == p.n:
        return p
    return MediniCondition(p.f, level, _refine(p, level, pairs))


@dataclass(frozen=True)
class BitFixCertificate:
    n: int
    level: int  # length of the strings the permutation acts on


def fix_bit_extend(p: MediniCondition, k: int, x: UPSet, registry: PointRegistry,
                   search_cap: int = MAX_LEVEL - 1) -> tuple[MediniCondition, int, BitFixCertificate]:
    """Extend ``p`` so its permutation maps ``[x(n)=1]`` onto itself, for the least usable n.

    ``n`` is the least member of X with ``n >= k``, at least the separation
    level, and outside every mapped set.  Each fibre then gets the
    transposition carrying its (single) A-point's middle bits to its
    B-point's; the final bit ``n`` passes through unchanged.
    """
    ps = separate(p, registry)
    pairs = _mapped_sets(ps, registry)
    mapped = [s for pair in pairs for s in pair]
    n = None
    for m in range(max(k, ps.n), search_cap + 1):
        if member(x, m) and not any(member(s, m) for s in mapped):
            n = m
            break
    if n is None:
        raise SearchCapError(f"no usable level in X between {max(k, ps.n)} and {search_cap}",
                             "every candidate is outside X or inside a mapped set")
    width = n - ps.n
    fibre: dict[int, tuple[int, int]] = {}
    for a_set, b_set in pairs:
        u = prefix(a_set, ps.n)
        assert u not in fibre, "separation leaves one A-point per fibre"
        fibre[u] = (a_set.bits(ps.n, width), b_set.bits(ps.n, width))
    pi = []
    for u in range(1 << ps.n):
        head = ps.pi[u] << (width + 1)
        src, dst = fibre.get(u, (0, 0))
        for mid in range(1 << width):
            moved = dst if mid == src else src if mid == dst else mid
            pi.append(head | (moved << 1))
            pi.append(head | (moved << 1) | 1)
    q = MediniCondition(ps.f, n + 1, tuple(pi))
    return q, n, BitFixCertificate(n, n + 1)


def check_fix_certificate(q: MediniCondition, n: int) -> bool:
    """Does ``pi_q`` keep bit ``n`` of every string?  Then any homeomorphism extending
    ``q`` maps the cylinder ``[x(n)=1]`` onto itself."""
    if not 0 <= n < q.n:
        raise PreconditionError(f"level too shallow: need n + 1 <= {q.n}, got n = {n}")
    shift = q.n - 1 - n
    return all((q.pi[t] >> shift) & 1 == (t >> shift) & 1 for t in range(1 << q.n))


def cylinder_action_oracle(q: MediniCondition, n: int) -> bool:
    """Brute force: the image of the strings with bit n set is exactly that set."""
    strings = [bit_string(t, q.n) for t in range(1 << q.n)]
    ones = {s for s in strings if s[n] == "1"}
    image = {bit_string(q.pi[int(s, 2)], q.n) for s in ones}
    return image == ones


def medini_add_point(p: MediniCondition, a: str, coloring: Coloring,
                     registry: PointRegistry) -> tuple[MediniCondition, str]:
    """Map ``a`` to a fresh same-coloured B-point whose prefix is ``pi(a's prefix)``."""
    if a in p.domain():
        raise PreconditionError(f"{a} is already in the domain")
    if a not in registry.a_side:
        raise PreconditionError(f"unknown a-point {a}")
    ps = separate(p, registry, extra_a=[a])
    w = bit_string(ps.pi[prefix(registry.a_set(a), ps.n)], ps.n)
    b = registry.add_b(w)
    coloring.b[b] = coloring.of_a(a, registry)
    return MediniCondition(ps.f + ((a, b),), ps.n, ps.pi), b
