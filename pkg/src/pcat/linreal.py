"""Exact linear realization of partitions.

``t_map`` turns a partition into the 0/1 operator between tensor powers of
C^N whose entries are the block-constancy symbol.  Ranks of families of such
operators are computed from their integer Gram matrix; the Gram entry of two
partitions on the same legs is ``N ** blocks(p v q)``, so no operator is ever
materialized.  Dense routines (sparse rational matrices, echelon forms) are
kept for families that are not spanned by partition maps, and as an
independent check of the Gram route.

Multi-indices run over 1..N and are ordered lexicographically with the
leftmost leg most significant.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

from . import category, closure
from .calculus import compose, involve
from .category import (
    TruncatedCategory,
    codes_to_line,
    expand_orbit,
    orbit_key,
    reduced_generators,
    schedule_seed,
)
from .closure import BudgetExceeded
from .partition import ColoredPartition, word_pair_key, word_pairs

log = logging.getLogger(__name__)

Index = tuple  # tuple[int, ...], entries in 1..N

WHITE_CAP = ColoredPartition.from_labels("", "ww", (0, 0))


class LinearError(ValueError):
    pass


# ------------------------------------------------------------------ operators


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Matrix from the tensor space of ``col_word`` to that of ``row_word``."""

    row_word: str
    col_word: str
    N: int
    entries: Mapping[tuple[Index, Index], int | Fraction] = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.N ** len(self.row_word), self.N ** len(self.col_word)

    def __matmul__(self, other: SparseOperator) -> SparseOperator:
        if self.col_word != other.row_word or self.N != other.N:
            raise LinearError(f"cannot multiply: {self.col_word!r} vs {other.row_word!r}")
        by_row: dict[Index, list] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out: dict = {}
        for (r, m), v in self.entries.items():
            for c, w in by_row.get(m, ()):
                key = (r, c)
                out[key] = out.get(key, 0) + v * w
        return SparseOperator(self.row_word, other.col_word, self.N, _nonzero(out))

    def transpose(self) -> SparseOperator:
        return SparseOperator(
            self.col_word, self.row_word, self.N, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def tensor(self, other: SparseOperator) -> SparseOperator:
        if self.N != other.N:
            raise LinearError("ambient dimensions differ")
        out = {
            (r1 + r2, c1 + c2): v * w
            for (r1, c1), v in self.entries.items()
            for (r2, c2), w in other.entries.items()
        }
        return SparseOperator(
            self.row_word + other.row_word, self.col_word + other.col_word, self.N, _nonzero(out)
        )

    def scaled(self, factor) -> SparseOperator:
        return SparseOperator(
            self.row_word, self.col_word, self.N, _nonzero({k: v * factor for k, v in self.entries.items()})
        )

    def restrict(self, values: Sequence[int]) -> SparseOperator:
        """Keep the entries whose indices all lie in ``values``, renumbered 1..len."""
        pos = {v: i + 1 for i, v in enumerate(values)}
        out = {}
        for (r, c), v in self.entries.items():
            if all(x in pos for x in r) and all(x in pos for x in c):
                out[(tuple(pos[x] for x in r), tuple(pos[x] for x in c))] = v
        return SparseOperator(self.row_word, self.col_word, len(values), out)

    def flat(self) -> dict[int, int | Fraction]:
        """Entries keyed by position in the row-major flattening."""
        cols = self.shape[1]
        return {
            _position(r, self.N) * cols + _position(c, self.N): v for (r, c), v in self.entries.items()
        }

    def to_dense(self) -> list[list]:
        rows, cols = self.shape
        out = [[0] * cols for _ in range(rows)]
        for (r, c), v in self.entries.items():
            out[_position(r, self.N)][_position(c, self.N)] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseOperator):
            return NotImplemented
        return (
            (self.row_word, self.col_word, self.N) == (other.row_word, other.col_word, other.N)
            and _nonzero(self.entries) == _nonzero(other.entries)
        )

    __hash__ = None  # type: ignore[assignment]


def _nonzero(entries: Mapping) -> dict:
    return {k: v for k, v in entries.items() if v}


def _position(index: Index, N: int) -> int:
    pos = 0
    for x in index:
        pos = pos * N + (x - 1)
    return pos


def identity_operator(word: str, N: int) -> SparseOperator:
    return SparseOperator(word, word, N, {(i, i): 1 for i in product(range(1, N + 1), repeat=len(word))})


def basis_vector(word: str, N: int, index: int = 1) -> SparseOperator:
    """The column map C -> (C^N)^{word} sending 1 to e_index (one leg only)."""
    if len(word) != 1:
        raise LinearError("basis vectors live on a single leg")
    return SparseOperator(word, "", N, {((index,), ()): 1})


def t_map(p: ColoredPartition, N: int, pinned: frozenset = frozenset()) -> SparseOperator:
    """Operator of p: entry (j, i) is 1 iff the indices are constant on blocks.

    Blocks listed in ``pinned`` are forced to the index 1.
    """
    if N < 1:
        raise LinearError("ambient dimension must be at least 1")
    nb = max(p.labels, default=-1) + 1
    free = [b for b in range(nb) if b not in pinned]
    k = p.k
    entries = {}
    for vals in product(range(1, N + 1), repeat=len(free)):
        value = dict.fromkeys(pinned, 1)
        value.update(zip(free, vals))
        idx = [value[lab] for lab in p.labels]
        entries[(tuple(idx[k:]), tuple(idx[:k]))] = 1
    return SparseOperator(p.down, p.up, N, entries)


def verify_composition_law(p: ColoredPartition, q: ColoredPartition, N: int) -> bool:
    """Check that stacking p on q matches the operator product, loops giving N.

    With p on top, ``T_p`` acts first, so the product read right to left is
    ``T_q @ T_p``.
    """
    result = compose(p, q)
    lhs = t_map(q, N) @ t_map(p, N)
    rhs = t_map(result.partition, N).scaled(N**result.loops)
    return lhs == rhs


def verify_adjoint_law(p: ColoredPartition, N: int) -> bool:
    return t_map(involve(p), N) == t_map(p, N).transpose()


# --------------------------------------------------------------- exact ranks


def integer_rank(matrix: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [list(row) for row in matrix]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r][c]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        pv = a[rank][c]
        for r in range(rank + 1, rows):
            f = a[r][c]
            row = a[r]
            top = a[rank]
            for j in range(c + 1, cols):
                row[j] = (pv * row[j] - f * top[j]) // prev
            row[c] = 0
        prev = pv
        rank += 1
        if rank == rows:
            break
    return rank


def join_blocks(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of blocks of the join of two partitions of the same legs."""
    parent: dict = {}

    def find(x):
        while parent.get(x, x) != x:
            x = parent[x]
        return x

    for x, y in zip(a, b):
        rx, ry = find(("a", x)), find(("b", y))
        if rx != ry:
            parent[rx] = ry
    return len({find(("a", x)) for x in a})


@lru_cache(maxsize=65536)
def _gram_rank(shapes: tuple, N: int) -> int:
    gram = [[N ** join_blocks(s, t) for t in shapes] for s in shapes]
    return integer_rank(gram)


def span_dim(partitions: Iterable[ColoredPartition], N: int) -> int:
    """Dimension of span{T_p} over the rationals, via the Gram matrix."""
    ps = list(partitions)
    if not ps:
        raise LinearError("span_dim needs at least one partition")
    pair = ps[0].word_pair
    if any(p.word_pair != pair for p in ps):
        raise LinearError("span_dim needs partitions on a common word pair")
    if N < 1:
        raise LinearError("ambient dimension must be at least 1")
    shapes = tuple(sorted({p.labels for p in ps}))
    return _gram_rank(shapes, N)


# --------------------------------------------------------- dense echelon form


class Echelon:
    """Incrementally reduced row space of sparse rational vectors."""

    def __init__(self, length: int):
        self.length = length
        self.rows: dict[int, dict[int, Fraction]] = {}  # pivot -> row, pivot entry 1

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[int, int | Fraction]) -> dict[int, Fraction]:
        v = {i: Fraction(x) for i, x in vec.items() if x}
        while v:
            pivots = [i for i in v if i in self.rows]
            if not pivots:
                break
            i = min(pivots)
            f = v[i]
            for j, x in self.rows[i].items():
                y = v.get(j, 0) - f * x
                if y:
                    v[j] = y
                else:
                    v.pop(j, None)
        return v

    def contains(self, vec) -> bool:
        return not self.reduce(vec)

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        p = min(v)
        inv = 1 / v[p]
        v = {j: x * inv for j, x in v.items()}
        # keep the form fully reduced
        for q, row in self.rows.items():
            f = row.get(p)
            if f:
                for j, x in v.items():
                    y = row.get(j, 0) - f * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        self.rows[p] = v
        return True

    def basis(self) -> list[list[Fraction]]:
        out = []
        for p in sorted(self.rows):
            dense = [Fraction(0)] * self.length
            for j, x in self.rows[p].items():
                dense[j] = x
            out.append(dense)
        return out


def _operator_from_flat(row_word: str, col_word: str, N: int, vec: Mapping[int, Fraction]) -> SparseOperator:
    cols = N ** len(col_word)
    entries = {}
    for pos, v in vec.items():
        r, c = divmod(pos, cols)
        entries[(_unposition(r, len(row_word), N), _unposition(c, len(col_word), N))] = v
    return SparseOperator(row_word, col_word, N, entries)


def _unposition(pos: int, length: int, N: int) -> Index:
    out = []
    for _ in range(length):
        pos, r = divmod(pos, N)
        out.append(r + 1)
    return tuple(reversed(out))


# ------------------------------------------------------------- hom families


@dataclass
class HomSpaceFamily:
    """Spaces of operators indexed by word pairs (up, down); each operator
    maps the tensor space of ``up`` to that of ``down``."""

    degree: int
    N: int
    spaces: dict[tuple[str, str], Echelon] = field(default_factory=dict)
    saturated: bool = True

    def space(self, up: str, down: str) -> Echelon:
        key = (up, down)
        if key not in self.spaces:
            self.spaces[key] = Echelon(self.N ** (len(up) + len(down)))
        return self.spaces[key]

    def dim(self, up: str, down: str) -> int:
        s = self.spaces.get((up, down))
        return len(s) if s is not None else 0

    def dims(self) -> dict[tuple[str, str], int]:
        return {wp: self.dim(*wp) for wp in word_pairs(self.degree)}

    def add(self, op: SparseOperator) -> bool:
        return self.space(op.col_word, op.row_word).add(op.flat())

    def contains(self, op: SparseOperator) -> bool:
        s = self.spaces.get((op.col_word, op.row_word))
        if s is None:
            return not _nonzero(op.entries)
        return s.contains(op.flat())

    def operators(self, up: str, down: str) -> list[SparseOperator]:
        s = self.spaces.get((up, down))
        if s is None:
            return []
        return [_operator_from_flat(down, up, self.N, row) for _, row in sorted(s.rows.items())]

    def total_dim(self) -> int:
        return sum(len(s) for s in self.spaces.values())

    def compressed_dim(self, up: str, down: str) -> int:
        """Dimension after restricting every index to the coordinates 2..N."""
        keep = list(range(2, self.N + 1))
        n = len(keep)
        target = Echelon(n ** (len(up) + len(down)))
        for op in self.operators(up, down):
            target.add(op.restrict(keep).flat())
        return len(target)

    def to_records(self) -> list[dict]:
        out = []
        for wp in sorted(self.spaces, key=lambda w: word_pair_key(*w)):
            out.append(
                {
                    "word_pair": list(wp),
                    "N": self.N,
                    "basis": [[str(x) for x in row] for row in self.spaces[wp].basis()],
                }
            )
        return out


def hom_family(c: TruncatedCategory, N: int, degree: int | None = None, alphabet: str = "wb") -> HomSpaceFamily:
    """Spans of the partition maps of ``c`` at every word pair up to ``degree``.

    ``alphabet="w"`` keeps only all-white word pairs, which loses nothing for
    categories containing the all-white cap (both colors then carry the same
    maps).
    """
    if N < 1:
        raise LinearError("ambient dimension must be at least 1")
    d = c.degree if degree is None else degree
    if d > c.degree:
        raise LinearError(f"degree {d} exceeds the category degree {c.degree}")
    fam = HomSpaceFamily(d, N)
    for up, down in _pairs(d, alphabet):
        for p in c.at(up, down):
            fam.add(t_map(p, N))
    return fam


def _pairs(degree: int, alphabet: str) -> list[tuple[str, str]]:
    pairs = word_pairs(degree)
    if alphabet == "wb":
        return pairs
    return [wp for wp in pairs if set("".join(wp)) <= set(alphabet)]


def e1_extras(N: int) -> list[SparseOperator]:
    """e_1 as a map into the white and into the black single-leg space."""
    return [basis_vector("w", N), basis_vector("b", N)]


def saturate_homspaces(
    seed: HomSpaceFamily,
    extra_vectors: Iterable[SparseOperator] = (),
    degree: int | None = None,
    budget: int = 2_000_000,
) -> HomSpaceFamily:
    """Smallest family containing the seed and extras that is closed under
    composition, tensor products and adjoints, within ``degree`` legs.

    Rounds of all three operations repeat until the total dimension stops
    growing.  ``budget`` caps the number of operator products; hitting it
    returns a family flagged ``saturated=False``.
    """
    d = seed.degree if degree is None else degree
    N = seed.N
    fam = HomSpaceFamily(d, N)
    for (up, down), s in seed.spaces.items():
        if len(up) + len(down) <= d:
            for op in seed.operators(up, down):
                fam.add(op)
    for op in extra_vectors:
        if op.N != N:
            raise LinearError("extra vector has the wrong ambient dimension")
        if len(op.row_word) + len(op.col_word) > d:
            raise LinearError("extra vector exceeds the degree")
        fam.add(op)
    work = 0

    def charge(n: int) -> bool:
        nonlocal work
        work += n
        return work <= budget

    total = -1
    while fam.total_dim() != total:
        total = fam.total_dim()
        ops = {wp: fam.operators(*wp) for wp in sorted(fam.spaces, key=lambda w: word_pair_key(*w))}
        ops = {wp: v for wp, v in ops.items() if v}
        for wp, vs in ops.items():
            for op in vs:
                fam.add(op.transpose())
        keys = list(ops)
        for a in keys:
            for b in keys:
                # tensor product
                if sum(map(len, a)) + sum(map(len, b)) <= d:
                    if not charge(len(ops[a]) * len(ops[b])):
                        fam.saturated = False
                        return fam
                    for x in ops[a]:
                        for y in ops[b]:
                            fam.add(x.tensor(y))
                # composition: a maps u -> m, b maps m -> v
                if a[1] == b[0] and len(a[0]) + len(b[1]) <= d:
                    if not charge(len(ops[a]) * len(ops[b])):
                        fam.saturated = False
                        return fam
                    for x in ops[a]:
                        for y in ops[b]:
                            fam.add(y @ x)
    return fam


# -------------------------------------------------------------- uniformity


@dataclass
class UniformityReport:
    subject: str
    N: int
    degree: int
    status: str  # "uniform", "not uniform", "inconclusive"
    witness: dict | None = None
    method: str = "diagram"
    bound: int | None = None

    @property
    def uniform(self) -> bool | None:
        if self.status == "inconclusive":
            return None
        return self.status == "uniform"

    def to_record(self) -> dict:
        out = {
            "subject": self.subject,
            "N": self.N,
            "degree": self.degree,
            "status": self.status,
            "method": self.method,
        }
        if self.bound is not None:
            out["bound"] = self.bound
        if self.witness is not None:
            out["witness"] = self.witness
        return out


_pinned_memo: dict = {}
category._memo_clearers.append(_pinned_memo.clear)


def pinned_closure(c: TruncatedCategory, bound: int | None = None, budget: int = 5_000_000):
    """Closure of c's generators together with e_1 on a white and a black leg.

    Returned as a saturation result whose orbit codes may contain pinned legs
    (block number 0): those legs carry the index 1.
    """
    if bound is None:
        bound = c.degree + 2
    gens = [orbit_key(g) for g in reduced_generators(c)]
    gens += [closure.PIN_WHITE, closure.PIN_BLACK]
    seed = schedule_seed()
    key = (tuple(sorted(set(gens))), bound, seed)
    if key not in _pinned_memo:
        _pinned_memo[key] = closure.saturate(gens, bound, budget=budget, shuffle_seed=seed)
    return _pinned_memo[key]


def _unpinned_by_word_pair(orbits: Iterable, degree: int) -> dict[tuple[str, str], list[ColoredPartition]]:
    table: dict[tuple[str, str], list[ColoredPartition]] = {}
    for rep in orbits:
        if len(rep) > degree or any(x >> 1 == 0 for x in rep):
            continue
        for p in expand_orbit(rep):
            table.setdefault(p.word_pair, []).append(p)
    return table


def pinned_members(rep, k: int) -> tuple[ColoredPartition, frozenset]:
    """Two-row form (k upper legs) of a one-row code with pinned legs, plus
    the label of the pinned block (empty if nothing is pinned)."""
    from .calculus import from_line

    fresh = max((x >> 1 for x in rep), default=0) + 1
    codes = tuple(((fresh << 1) | (x & 1)) if x >> 1 == 0 else x for x in rep)
    p = from_line(codes_to_line(codes), k)
    first = next((i for i, x in enumerate(rep) if x >> 1 == 0), None)
    if first is None:
        return p, frozenset()
    pos = k - 1 - first if first < k else first
    return p, frozenset([p.labels[pos]])


def uniformity_check(
    c: TruncatedCategory,
    N: int,
    degree: int | None = None,
    bound: int | None = None,
    budget: int = 5_000_000,
    subject: str | None = None,
) -> UniformityReport:
    """Compare the e_1-capped family, compressed to coordinates 2..N, with
    the family of c at N - 1, at every word pair up to ``degree``.

    The capped family is spanned by partition maps with some blocks pinned
    to index 1; compression kills exactly those, so its compressed dimension
    is the rank of the unpinned partitions at N - 1.
    """
    d = c.degree if degree is None else degree
    if N < 2:
        raise LinearError("uniformity needs N >= 2")
    if d > c.degree:
        raise LinearError(f"degree {d} exceeds the category degree {c.degree}")
    name = subject or c.label()
    bound = c.degree + 2 if bound is None else bound
    try:
        res = pinned_closure(c, bound, budget)
    except BudgetExceeded:
        return UniformityReport(name, N, d, "inconclusive", {"reason": "budget exceeded"}, bound=bound)
    capped = _unpinned_by_word_pair(res.colored_orbits(d), d)
    for up, down in word_pairs(d):
        own = c.at(up, down)
        # the capped family contains c itself, whatever the truncation found
        got = sorted({*capped.get((up, down), ()), *own}, key=lambda p: p.labels)
        expected = span_dim(own, N - 1) if own else 0
        compressed = span_dim(got, N - 1) if got else 0
        if compressed != expected:
            return UniformityReport(
                name,
                N,
                d,
                "not uniform",
                {"word_pair": [up, down], "compressed_dim": compressed, "expected_dim": expected},
                bound=bound,
            )
    return UniformityReport(name, N, d, "uniform", bound=bound)


def uniformity_check_dense(
    c: TruncatedCategory, N: int, degree: int | None = None, bound: int | None = None
) -> UniformityReport:
    """Same verdict computed with explicit matrices (small N and degree only).

    Operators with up to ``bound`` legs take part in the saturation.  If c
    contains the all-white cap the single-leg map from white to black is
    the identity matrix, so only all-white word pairs are carried; this makes
    ``bound = c.degree`` affordable.  Colored families default to
    ``bound = degree``.
    """
    d = c.degree if degree is None else degree
    if N < 2:
        raise LinearError("uniformity needs N >= 2")
    colorblind = WHITE_CAP in c.members if c.degree >= 2 else False
    alphabet = "w" if colorblind else "wb"
    if bound is None:
        bound = c.degree if colorblind else d
    if not d <= bound <= c.degree:
        raise LinearError(f"bound {bound} must lie between {d} and the category degree {c.degree}")
    extras = [basis_vector("w", N)] if colorblind else e1_extras(N)
    fam = saturate_homspaces(hom_family(c, N, bound, alphabet), extras, bound)
    if not fam.saturated:
        return UniformityReport(c.label(), N, d, "inconclusive", {"reason": "budget exceeded"}, "dense", bound)
    lower = hom_family(c, N - 1, d, alphabet)
    for up, down in _pairs(d, alphabet):
        got = fam.compressed_dim(up, down)
        expected = lower.dim(up, down)
        if got != expected:
            return UniformityReport(
                c.label(),
                N,
                d,
                "not uniform",
                {"word_pair": [up, down], "compressed_dim": got, "expected_dim": expected},
                method="dense",
                bound=bound,
            )
    return UniformityReport(c.label(), N, d, "uniform", method="dense", bound=bound)


def capped_space(c: TruncatedCategory, N: int, up: str, down: str, bound: int | None = None) -> HomSpaceFamily:
    """Dense span at one word pair of the e_1-capped family (pinned maps included)."""
    res = pinned_closure(c, bound)
    n = len(up) + len(down)
    fam = HomSpaceFamily(n, N)
    for rep in res.colored_orbits(n):
        if len(rep) != n:
            continue
        for v in closure.variants(rep):
            p, pinned = pinned_members(v, len(up))
            if p.word_pair == (up, down):
                fam.add(t_map(p, N, pinned))
    return fam


# ------------------------------------------------ span of intersections


def span_discrepancies(d1: TruncatedCategory, d2: TruncatedCategory, N: int, degree: int | None = None) -> list[dict]:
    """Word pairs where span(D1 & D2) differs from span(D1) & span(D2).

    dim(span D1 & span D2) = dim D1 + dim D2 - dim(span(D1 u D2)).
    """
    d = min(d1.degree, d2.degree) if degree is None else degree
    out = []
    for up, down in word_pairs(d):
        a, b = d1.at(up, down), d2.at(up, down)
        if not a or not b:
            continue
        bs = set(b)
        common = [p for p in a if p in bs]
        union = list({*a, *b})
        meet = span_dim(a, N) + span_dim(b, N) - span_dim(union, N)
        inter = span_dim(common, N) if common else 0
        if meet != inter:
            out.append({"word_pair": [up, down], "span_of_intersection": inter, "intersection_of_spans": meet})
    return out

