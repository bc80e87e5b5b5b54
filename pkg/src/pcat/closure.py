"""Worklist saturation on one-row partitions.

Every category handled here contains the duality caps, so a partition in
P(k, l) can be rotated onto a single row without changing membership (see
``calculus.to_line``).  The engine therefore works on one-row partitions and
stores each one as a tuple of integer codes, one per leg::

    code = (block << 1) | color        color: 0 white, 1 black

Blocks are numbered 1, 2, ... in order of first appearance.  Block number 0
is reserved for *pinned* legs, i.e. legs whose index is forced to the first
basis vector; ordinary categories never use it, the e1-capped families of
``linreal`` do.

On one-row partitions the category operations become:

* rotation: cyclic shift of the legs;
* involution: reverse the legs and invert every color;
* capping: glue two neighbouring legs of different colors with a cup;
* tensoring with a generator (in any rotated / involuted form), or gluing
  some of its legs onto the item's last legs (composition on those strands).

Closing a set under these operations, starting from the generators and
the two colored pair blocks, yields the generated category.  The leg bound
``bound`` caps the size of every stored intermediate.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

Codes = tuple  # tuple[int, ...]

ENGINE_VERSION = "pcat-closure-3"

WHITE_PAIR: Codes = (2, 3)  # one block, white then black
BLACK_PAIR: Codes = (3, 2)
MONO_PAIR: Codes = (2, 2)  # one block, two white legs
PIN_WHITE: Codes = (0,)
PIN_BLACK: Codes = (1,)


class BudgetExceeded(RuntimeError):
    """The saturation hit its work-item cap; the result would be truncated."""


class BoundError(ValueError):
    pass


def relabel(seq: Iterable[int]) -> Codes:
    """Renumber blocks in first-use order; pinned legs (block 0) are kept."""
    m: dict[int, int] = {}
    out = []
    for c in seq:
        lab = c >> 1
        if lab:
            r = m.get(lab)
            if r is None:
                r = m[lab] = len(m) + 1
            out.append((r << 1) | (c & 1))
        else:
            out.append(c)
    return tuple(out)


def reflected(codes: Codes, colorblind: bool = False) -> Codes:
    if colorblind:
        return relabel(reversed(codes))
    return relabel(c ^ 1 for c in reversed(codes))


def rotations(codes: Codes) -> list[Codes]:
    n = len(codes)
    if n == 0:
        return [codes]
    d = codes + codes
    return [relabel(d[r : r + n]) for r in range(n)]


def variants(codes: Codes, colorblind: bool = False) -> set[Codes]:
    """All rotations of the partition and of its involution."""
    return set(rotations(codes)) | set(rotations(reflected(codes, colorblind)))


def canonical(codes: Codes, colorblind: bool = False) -> Codes:
    return min(variants(codes, colorblind))


def decolor(codes: Codes) -> Codes:
    return tuple(c & ~1 for c in codes)


def recolorings(codes: Codes) -> Iterable[Codes]:
    n = len(codes)
    base = decolor(codes)
    for mask in range(1 << n):
        yield tuple(c | ((mask >> i) & 1) for i, c in enumerate(base))


def cap(v: Codes, colorblind: bool = False) -> Codes | None:
    """Glue legs 0 and 1 with a cup and drop them, or None if colors forbid it."""
    if len(v) < 2:
        return None
    a, b = v[0], v[1]
    if not colorblind and (a & 1) == (b & 1):
        return None
    la, lb = a >> 1, b >> 1
    target = 0 if (la == 0 or lb == 0) else la
    out = []
    for c in v[2:]:
        lab = c >> 1
        if lab == la or lab == lb:
            c = (target << 1) | (c & 1)
        out.append(c)
    return relabel(out)


def glue(v: Codes, g: Codes, j: int, colorblind: bool = False) -> Codes | None:
    """Join the last j legs of v to the first j legs of g with nested cups.

    Leg ``v[-1-i]`` meets ``g[i]``; this is the composition of v with g on j
    strands, done locally so no intermediate is larger than the output.
    Returns None if a cup would join two legs of the same color.
    """
    n = len(v)
    if j == 0:
        return tensor_codes(v, g)
    shift = max((c >> 1 for c in v), default=0)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    def node(c: int, offset: int) -> int:
        lab = c >> 1
        return 0 if lab == 0 else lab + offset

    for i in range(j):
        a, b = v[n - 1 - i], g[i]
        if not colorblind and (a & 1) == (b & 1):
            return None
        ra, rb = find(node(a, 0)), find(node(b, shift))
        if ra != rb:
            # keep the pinned node 0 as root so pinning propagates
            if rb == 0:
                ra, rb = rb, ra
            parent[rb] = ra
    out = [(find(node(c, 0)) << 1) | (c & 1) for c in v[: n - j]]
    out += [(find(node(c, shift)) << 1) | (c & 1) for c in g[j:]]
    return relabel(out)


def tensor_codes(x: Codes, y: Codes) -> Codes:
    shift = max((c >> 1 for c in x), default=0)
    return x + tuple(c + (shift << 1) if c >> 1 else c for c in y)


@dataclass
class SaturationResult:
    orbits: frozenset  # canonical representatives, in the mode used
    colorblind: bool
    processed: int
    bound: int
    stats: dict = field(default_factory=dict)

    def colored_orbits(self, max_legs: int) -> frozenset:
        """Canonical colored representatives with at most ``max_legs`` legs."""
        if not self.colorblind:
            return frozenset(o for o in self.orbits if len(o) <= max_legs)
        out = set()
        for o in self.orbits:
            if len(o) <= max_legs:
                for r in recolorings(o):
                    out.add(canonical(r))
        return frozenset(out)


class Saturator:
    """Closure of a set of one-row generators under the category operations.

    ``shuffle_seed`` randomizes the worklist order; the resulting set does not
    depend on it (this is tested).
    """

    def __init__(
        self,
        generators: Iterable[Codes],
        bound: int,
        budget: int = 5_000_000,
        colorblind: bool = False,
        shuffle_seed: int | None = None,
    ):
        self.generators = [tuple(g) for g in generators]
        for g in self.generators:
            if len(g) > bound:
                raise BoundError(f"generator with {len(g)} legs exceeds the bound {bound}")
        self.bound = bound
        self.budget = budget
        self.colorblind = colorblind
        self.shuffle_seed = shuffle_seed

    def run(self) -> SaturationResult:
        result = self._run(self.colorblind)
        if result is None:
            result = self._run(True)
        return result

    def _run(self, colorblind: bool) -> SaturationResult | None:
        bound = self.bound
        prep = decolor if colorblind else (lambda c: c)
        base = [MONO_PAIR] if colorblind else [WHITE_PAIR, BLACK_PAIR]
        gens = [relabel(prep(g)) for g in self.generators]
        pool: set[Codes] = set(base)
        for g in gens:
            pool |= variants(g, colorblind)
        # tensoring with the empty partition is a no-op
        pool.discard(())
        by_size: dict[int, list[Codes]] = {}
        for g in sorted(pool):
            by_size.setdefault(len(g), []).append(g)
        sizes = sorted(by_size)

        seen: set[Codes] = set()
        orbits: set[Codes] = set()
        work: list[list[Codes]] = []
        rng = random.Random(self.shuffle_seed) if self.shuffle_seed is not None else None

        def push(codes: Codes) -> bool:
            """Record a new partition; False signals a switch to colorblind mode."""
            vs = variants(codes, colorblind)
            seen.update(vs)
            rep = min(vs)
            orbits.add(rep)
            if not colorblind and rep == MONO_PAIR:
                return False
            work.append(rotations(rep))
            return True

        for g in [()] + base + gens:
            if g not in seen and not push(g):
                return None
        processed = 0
        while work:
            if rng is not None:
                i = rng.randrange(len(work))
                work[i], work[-1] = work[-1], work[i]
            rots = work.pop()
            processed += 1
            if processed > self.budget:
                raise BudgetExceeded(f"saturation exceeded the budget of {self.budget} work items")
            n = len(rots[0])
            if n >= 2:
                for v in rots:
                    c = cap(v, colorblind)
                    if c is not None and c not in seen:
                        if not push(c):
                            return None
            for s in sizes:
                for j in range(min(n, s) + 1):
                    if n + s - 2 * j > bound:
                        continue
                    for g in by_size[s]:
                        for v in rots:
                            t = glue(v, g, j, colorblind)
                            if t is not None and t not in seen:
                                if not push(t):
                                    return None
        return SaturationResult(
            orbits=frozenset(orbits),
            colorblind=colorblind,
            processed=processed,
            bound=bound,
            stats={"orbits": len(orbits), "variants": len(seen)},
        )


def saturate(
    generators: Iterable[Codes],
    bound: int,
    budget: int = 5_000_000,
    shuffle_seed: int | None = None,
) -> SaturationResult:
    return Saturator(generators, bound, budget=budget, shuffle_seed=shuffle_seed).run()
