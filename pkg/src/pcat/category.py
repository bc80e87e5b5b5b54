"""Degree-truncated categories of two-colored partitions.

A :class:`TruncatedCategory` records the members with at most ``degree`` legs
of a category of partitions, as obtained with intermediates of at most
``bound`` legs.  Every verdict derived from it is a verdict "at (degree,
bound)".

Members are stored as orbits of one-row partitions under rotation and
involution (see :mod:`pcat.closure`); :attr:`TruncatedCategory.members`
expands them to ordinary two-row partitions on demand.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from . import closure
from .cache import ClosureCache, digest
from .calculus import from_line, to_line
from .closure import BudgetExceeded, Codes, canonical, variants
from .partition import (
    NAMED_FILTERS,
    ColoredPartition,
    is_matching,
    is_matching_per_color,
    parse_partition,
    predicate,
    set_partitions,
    word_pair_key,
    words,
)

log = logging.getLogger(__name__)

DEFAULT_DEGREE = 6
DEFAULT_BUDGET = 5_000_000

VERTEX_NAMES = ("Peven", "P2", "CPeven", "CP2", "NCeven", "NC2", "CNCeven", "CNC2")

# generators used as seeds for the named categories; each list is checked
# against predicate enumeration by the test-suite
_KNOWN_GENERATORS: dict[str, tuple[str, ...]] = {
    "CNC2": (),
    "CP2": ("[ww|ww] {u1 d2} {u2 d1}",),
    "NC2": ("[|ww] {d1 d2}",),
    "P2": ("[|ww] {d1 d2}", "[ww|ww] {u1 d2} {u2 d1}"),
    "CNCeven": ("[|wbwb] {d1 d2 d3 d4}", "[|wwbb] {d1 d2 d3 d4}"),
    "NCeven": ("[|ww] {d1 d2}", "[|wwww] {d1 d2 d3 d4}"),
    "CPeven": ("[ww|ww] {u1 d2} {u2 d1}", "[|wbwb] {d1 d2 d3 d4}", "[|wwbb] {d1 d2 d3 d4}"),
    "Peven": ("[|ww] {d1 d2}", "[ww|ww] {u1 d2} {u2 d1}", "[|wwww] {d1 d2 d3 d4}"),
    "NC": ("[|w] {d1}", "[|ww] {d1 d2}", "[|wwww] {d1 d2 d3 d4}"),
    "P": ("[|w] {d1}", "[|ww] {d1 d2}", "[ww|ww] {u1 d2} {u2 d1}", "[|wwww] {d1 d2 d3 d4}"),
}


class CategoryError(ValueError):
    pass


# ------------------------------------------------------------ line encodings


def line_codes(p: ColoredPartition) -> Codes:
    """Integer codes of the one-row form of p (see :mod:`pcat.closure`)."""
    line = to_line(p)
    return tuple(((lab + 1) << 1) | (c == "b") for lab, c in zip(line.labels, line.down))


def codes_to_line(codes: Codes) -> ColoredPartition:
    if any(c >> 1 == 0 for c in codes):
        raise CategoryError("pinned legs have no partition form")
    down = "".join("b" if c & 1 else "w" for c in codes)
    return ColoredPartition.from_labels("", down, [c >> 1 for c in codes])


def orbit_key(p: ColoredPartition) -> Codes:
    return canonical(line_codes(p))


def expand_orbit(rep: Codes) -> list[ColoredPartition]:
    """Every two-row partition whose one-row form lies in the orbit of ``rep``."""
    out = []
    for v in sorted(variants(rep)):
        line = codes_to_line(v)
        for k in range(len(v) + 1):
            out.append(from_line(line, k))
    return out


def sort_members(ps: Iterable[ColoredPartition]) -> list[ColoredPartition]:
    return sorted(ps, key=lambda p: (word_pair_key(p.up, p.down), str(p)))


# ------------------------------------------------------------------- the type


@dataclass(frozen=True, eq=False)
class TruncatedCategory:
    degree: int
    bound: int
    orbits: frozenset
    generators: tuple[ColoredPartition, ...] = ()
    provenance: str = "saturated"  # or "predicate-enumerated"
    stable: bool = True
    name: str | None = None
    notes: tuple[str, ...] = field(default=())

    @cached_property
    def members(self) -> frozenset[ColoredPartition]:
        out: set[ColoredPartition] = set()
        for rep in self.orbits:
            out.update(expand_orbit(rep))
        return frozenset(out)

    @cached_property
    def _by_word_pair(self) -> dict[tuple[str, str], list[ColoredPartition]]:
        table: dict[tuple[str, str], list[ColoredPartition]] = {}
        for p in self.members:
            table.setdefault(p.word_pair, []).append(p)
        for ps in table.values():
            ps.sort(key=lambda p: p.labels)
        return table

    def at(self, up: str, down: str) -> list[ColoredPartition]:
        """Members on the word pair (up, down), in canonical order."""
        return list(self._by_word_pair.get((up, down), ()))

    def sorted_members(self) -> list[ColoredPartition]:
        return sort_members(self.members)

    def __contains__(self, p: ColoredPartition) -> bool:
        return member(self, p)

    def __len__(self) -> int:
        return len(self.members)

    def label(self) -> str:
        return self.name or f"category[{len(self.orbits)} orbits]"

    def __repr__(self) -> str:
        return f"TruncatedCategory({self.label()!r}, degree={self.degree}, bound={self.bound})"

    def to_record(self) -> dict:
        from .partition import serialize

        return {
            "name": self.name,
            "generators": [serialize(g) for g in self.generators],
            "degree": self.degree,
            "bound": self.bound,
            "provenance": self.provenance,
            "stable": self.stable,
            "members": [serialize(p) for p in self.sorted_members()],
        }


def from_record(record: dict) -> TruncatedCategory:
    """Rebuild a category from its file record (members listed explicitly)."""
    from .partition import from_record as partition_from_record

    degree = int(record["degree"])
    bound = int(record.get("bound", degree))
    members = [partition_from_record(m) for m in record["members"]]
    orbits = set()
    for p in members:
        if p.size > degree:
            raise CategoryError(f"member {p} exceeds degree {degree}")
        orbits.add(orbit_key(p))
    cat = TruncatedCategory(
        degree=degree,
        bound=bound,
        orbits=frozenset(orbits),
        generators=tuple(partition_from_record(g) for g in record.get("generators", ())),
        provenance=record.get("provenance", "saturated"),
        stable=bool(record.get("stable", True)),
        name=record.get("name"),
    )
    if cat.members != frozenset(members):
        missing = sort_members(cat.members - frozenset(members))
        raise CategoryError(f"member list is not closed under rotation; missing e.g. {missing[0]}")
    return cat


# ---------------------------------------------------------- named categories


@lru_cache(maxsize=None)
def _enumerated_orbits(name: str, degree: int) -> frozenset:
    test = predicate(name)
    orbits = set()
    for n in range(degree + 1):
        shapes = list(set_partitions(n))
        for w in words(n):
            for labels in shapes:
                p = ColoredPartition("", w, labels)
                if test(p):
                    orbits.add(canonical(line_codes(p)))
    return frozenset(orbits)


def known_generators(name: str) -> list[ColoredPartition]:
    return [parse_partition(s) for s in _KNOWN_GENERATORS[name]]


def named_category(name: str, degree: int = DEFAULT_DEGREE) -> TruncatedCategory:
    """Predicate-enumerated category: a cube vertex, or ``P`` / ``NC``."""
    if name not in NAMED_FILTERS:
        raise CategoryError(f"unknown category name {name!r}")
    if degree < 0:
        raise CategoryError("degree must be nonnegative")
    orbits = _enumerated_orbits(name, degree)
    notes = ()
    if name.startswith("C"):
        notes = _matching_reading_note(orbits)
    return TruncatedCategory(
        degree=degree,
        bound=degree,
        orbits=orbits,
        generators=tuple(known_generators(name)),
        provenance="predicate-enumerated",
        stable=True,
        name=name,
        notes=notes,
    )


def vertex_category(name: str, degree: int = DEFAULT_DEGREE) -> TruncatedCategory:
    if name not in VERTEX_NAMES:
        raise CategoryError(f"unknown vertex {name!r}; expected one of {', '.join(VERTEX_NAMES)}")
    return named_category(name, degree)


def _matching_reading_note(orbits) -> tuple[str, ...]:
    count = 0
    for rep in orbits:
        p = codes_to_line(rep)
        if is_matching(p) != is_matching_per_color(p):
            count += 1
    if not count:
        return ()
    return (f"{count} member orbits are matching but fail the per-color zero-sum reading",)


# ----------------------------------------------------------------- generation

_memo: dict[str, dict] = {}
_default_cache: ClosureCache | None = None


def set_default_cache(cache: ClosureCache | None) -> None:
    global _default_cache
    _default_cache = cache


_memo_clearers: list = []


def clear_memo() -> None:
    _memo.clear()
    _greedy_cached.cache_clear()
    for fn in _memo_clearers:
        fn()


_schedule_seed: int | None = None


@contextmanager
def randomized_scheduling(seed: int):
    """Run every saturation inside the block with a shuffled worklist.

    The disk cache is bypassed and the memo is keyed by the seed, so every
    closure is recomputed once per schedule; used to check that results do
    not depend on processing order.
    """
    global _schedule_seed
    previous = _schedule_seed
    _schedule_seed = seed
    try:
        yield
    finally:
        _schedule_seed = previous


def schedule_seed() -> int | None:
    return _schedule_seed


def _gen_key(orbits: Sequence[Codes], degree: int, bound: int) -> str:
    return digest(
        {
            "engine": closure.ENGINE_VERSION,
            "generators": sorted(list(o) for o in set(orbits)),
            "degree": degree,
            "bound": bound,
        }
    )


def _closure_orbits(gen_orbits, degree, bound, budget, shuffle_seed, cache):
    """Colored member orbits (<= degree legs) of the closure at ``bound``."""
    if shuffle_seed is None:
        shuffle_seed = _schedule_seed
    key = _gen_key(gen_orbits, degree, bound)
    memo_key = key if shuffle_seed is None else f"{key}:{shuffle_seed}"
    hit = _memo.get(memo_key)
    if hit is None and cache is not None and shuffle_seed is None:
        hit = cache.get(key)
    if hit is not None:
        _memo[memo_key] = hit
        return frozenset(tuple(o) for o in hit["orbits"])
    res = closure.saturate(gen_orbits, bound, budget=budget, shuffle_seed=shuffle_seed)
    orbits = res.colored_orbits(degree)
    log.debug("closure d=%d B=%d: %s, colorblind=%s", degree, bound, res.stats, res.colorblind)
    record = {"orbits": sorted(list(o) for o in orbits)}
    _memo[memo_key] = record
    if cache is not None and shuffle_seed is None:
        cache.put(key, record)
    return orbits


def _prove_stable(generators: Sequence[ColoredPartition], orbits: frozenset, degree: int) -> bool:
    # If the truncated closure already equals a known category and every
    # generator lies in it, raising the bound cannot add members.
    for name in NAMED_FILTERS:
        if _enumerated_orbits(name, degree) == orbits:
            test = predicate(name)
            if all(test(g) for g in generators):
                return True
    return False


def generate(
    generators: Iterable[ColoredPartition],
    degree: int = DEFAULT_DEGREE,
    bound: int | None = None,
    budget: int = DEFAULT_BUDGET,
    shuffle_seed: int | None = None,
    cache: ClosureCache | None = None,
    name: str | None = None,
) -> TruncatedCategory:
    """Category generated by ``generators`` (plus the duality caps), truncated.

    Stability is decided either by recognising a known category that contains
    all generators, or by re-running the saturation with ``bound + 2``.
    """
    generators = list(generators)
    if bound is None:
        bound = degree + 4
    if bound < degree:
        raise CategoryError(f"bound {bound} is smaller than degree {degree}")
    cache = cache if cache is not None else _default_cache
    for g in generators:
        if g.size > bound:
            raise CategoryError(f"generator {g} has more than {bound} legs")
    gen_orbits = sorted({orbit_key(g) for g in generators})
    orbits = _closure_orbits(gen_orbits, degree, bound, budget, shuffle_seed, cache)
    stable = _prove_stable(generators, orbits, degree)
    if not stable:
        higher = _closure_orbits(gen_orbits, degree, bound + 2, budget, shuffle_seed, cache)
        stable = higher == orbits
    return TruncatedCategory(
        degree=degree,
        bound=bound,
        orbits=orbits,
        generators=tuple(generators),
        provenance="saturated",
        stable=stable,
        name=name,
    )


def reduced_generators(c: TruncatedCategory) -> list[ColoredPartition]:
    """A small generating set for ``c`` at (degree, degree).

    Named categories use their seed generators and generated categories their
    own generators; otherwise orbits are added greedily, smallest first, until
    the closure at bound ``degree`` covers all members.
    """
    if c.generators:
        gens = [codes_to_line(orbit_key(g)) for g in c.generators]
        return gens
    return [codes_to_line(o) for o in _greedy_generators(c.orbits, c.degree)]


def _greedy_generators(orbits: frozenset, degree: int) -> tuple:
    return _greedy_cached(orbits, degree, _schedule_seed)


@lru_cache(maxsize=256)
def _greedy_cached(orbits: frozenset, degree: int, seed: int | None) -> tuple:
    return _greedy_search(orbits, degree, seed)


def _greedy_search(orbits: frozenset, degree: int, seed) -> tuple:
    covered = closure.saturate([], degree, shuffle_seed=seed).colored_orbits(degree)
    gens: list[Codes] = []
    for o in sorted(orbits, key=lambda o: (len(o), o)):
        if o in covered:
            continue
        gens.append(o)
        covered = closure.saturate(gens, degree, shuffle_seed=seed).colored_orbits(degree)
    return tuple(gens)


# ------------------------------------------------------------ lattice methods


def _same_degree(c1: TruncatedCategory, c2: TruncatedCategory) -> None:
    if c1.degree != c2.degree:
        raise CategoryError(f"degree mismatch: {c1.degree} vs {c2.degree}")


def intersect(c1: TruncatedCategory, c2: TruncatedCategory) -> TruncatedCategory:
    _same_degree(c1, c2)
    saturated = "saturated" in (c1.provenance, c2.provenance)
    return TruncatedCategory(
        degree=c1.degree,
        bound=max(c1.bound, c2.bound),
        orbits=c1.orbits & c2.orbits,
        provenance="saturated" if saturated else "predicate-enumerated",
        stable=c1.stable and c2.stable,
        name=f"({c1.label()} & {c2.label()})",
    )


def join(
    c1: TruncatedCategory,
    c2: TruncatedCategory,
    bound: int | None = None,
    budget: int = DEFAULT_BUDGET,
    cache: ClosureCache | None = None,
) -> TruncatedCategory:
    """Category generated by the members of both inputs.

    The saturation starts from small generating sets of the inputs; any input
    member the closure misses is added as an extra generator, so the result
    always contains both inputs.  If one input lies inside the other and the
    larger one is a predicate-enumerated category, the larger one is the
    answer and no saturation is needed.
    """
    _same_degree(c1, c2)
    d = c1.degree
    if bound is None:
        bound = max(c1.bound, c2.bound, d)
    name = f"<{c1.label()}, {c2.label()}>"
    for small, big in ((c1, c2), (c2, c1)):
        if big.provenance == "predicate-enumerated" and small.orbits <= big.orbits:
            return TruncatedCategory(
                degree=d,
                bound=bound,
                orbits=big.orbits,
                generators=big.generators,
                provenance="saturated" if small.provenance == "saturated" else big.provenance,
                stable=small.stable and big.stable,
                name=big.name,
            )
    gens = _dedupe(reduced_generators(c1) + reduced_generators(c2))
    while True:
        cat = generate(gens, d, bound, budget=budget, cache=cache, name=name)
        missing = (c1.orbits | c2.orbits) - cat.orbits
        if not missing:
            return cat
        extra = min(missing, key=lambda o: (len(o), o))
        gens = _dedupe(gens + [codes_to_line(extra)])


def _dedupe(gens: list[ColoredPartition]) -> list[ColoredPartition]:
    seen = set()
    out = []
    for g in gens:
        key = orbit_key(g)
        if key not in seen:
            seen.add(key)
            out.append(g)
    return out


def includes(c1: TruncatedCategory, c2: TruncatedCategory) -> bool:
    """True iff every member of c2 is a member of c1."""
    _same_degree(c1, c2)
    return c2.orbits <= c1.orbits


def equals(c1: TruncatedCategory, c2: TruncatedCategory) -> bool:
    _same_degree(c1, c2)
    return c1.orbits == c2.orbits


def member(c: TruncatedCategory, p: ColoredPartition) -> bool:
    if p.size > c.degree:
        raise CategoryError(f"{p} has {p.size} legs, more than the degree {c.degree}")
    return orbit_key(p) in c.orbits


def difference_witness(c1: TruncatedCategory, c2: TruncatedCategory) -> ColoredPartition | None:
    """Smallest partition (canonical order) in exactly one of the two categories."""
    return minimal_member(c1.orbits ^ c2.orbits)


def minimal_member(orbits) -> ColoredPartition | None:
    """Smallest partition, in canonical order, of the given orbits."""
    if not orbits:
        return None
    # the minimal member lives in an orbit of minimal size
    n = min(len(o) for o in orbits)
    cands = [p for o in orbits if len(o) == n for p in expand_orbit(o)]
    return sort_members(cands)[0]


def half_liberation_generators() -> list[ColoredPartition]:
    """Generators of the half-liberated orthogonal category (abc = cba)."""
    return [
        parse_partition("[www|www] {u1 d3} {u2 d2} {u3 d1}"),
        parse_partition("[|ww] {d1 d2}"),
    ]


__all__ = [
    "BudgetExceeded",
    "CategoryError",
    "TruncatedCategory",
    "VERTEX_NAMES",
    "named_category",
    "vertex_category",
    "generate",
    "intersect",
    "join",
    "includes",
    "equals",
    "member",
    "half_liberation_generators",
    "difference_witness",
]
