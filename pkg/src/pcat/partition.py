"""Two-colored partitions: representation, text/structured formats, enumeration.

A partition in P(k, l) has an upper row of k legs and a lower row of l legs,
each leg colored white (``w``) or black (``b``).  Legs are numbered in
traversal order: upper row left to right, then lower row left to right.
Internally a partition is stored as a restricted growth string over that
order, which makes the canonical form (blocks ordered by earliest leg, legs
sorted inside blocks) automatic and hashing cheap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

WHITE = "w"
BLACK = "b"
COLORS = (WHITE, BLACK)

#: default cap on k + l for exhaustive enumeration (Bell(8) = 4140)
ENUMERATION_BOUND = 8


class PartitionError(ValueError):
    """Malformed partition text or inconsistent block data."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class BoundExceeded(ValueError):
    pass


def check_word(word: str) -> str:
    if any(c not in COLORS for c in word):
        raise PartitionError(f"color word {word!r} may only contain 'w' and 'b'")
    return word


def invert_word(word: str) -> str:
    return word.translate(_INVERT)


_INVERT = str.maketrans("wb", "bw")


class Leg(NamedTuple):
    row: str  # "u" or "d"
    index: int  # 1-based

    def __str__(self) -> str:
        return f"{self.row}{self.index}"


def restricted_growth(labels: Iterable[int]) -> tuple[int, ...]:
    """Relabel block ids so they appear as 0, 1, 2, ... in first-use order."""
    seen: dict[int, int] = {}
    out = []
    for x in labels:
        y = seen.get(x)
        if y is None:
            y = seen[x] = len(seen)
        out.append(y)
    return tuple(out)


@dataclass(frozen=True)
class ColoredPartition:
    """A partition of the legs of an (up, down) word pair, in canonical form.

    ``labels[i]`` is the block number of the i-th leg in traversal order and
    is always a restricted growth string, so equal partitions compare equal.
    """

    up: str
    down: str
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        check_word(self.up)
        check_word(self.down)
        if len(self.labels) != len(self.up) + len(self.down):
            raise PartitionError("label count does not match the number of legs")
        if restricted_growth(self.labels) != tuple(self.labels):
            raise PartitionError("labels are not in canonical (restricted growth) form")

    @classmethod
    def from_labels(cls, up: str, down: str, labels: Iterable[int]) -> ColoredPartition:
        return cls(up, down, restricted_growth(labels))

    @classmethod
    def from_blocks(cls, up: str, down: str, blocks: Iterable[Iterable[Leg | str | tuple]]) -> ColoredPartition:
        """Build from blocks of legs; legs may be ``Leg``, ``"u3"`` or ``("d", 2)``."""
        k, l = len(up), len(down)
        labels: list[int | None] = [None] * (k + l)
        for b, block in enumerate(blocks):
            block = list(block)
            if not block:
                raise PartitionError("empty block")
            for leg in block:
                row, index = _coerce_leg(leg)
                if row == "u":
                    if not 1 <= index <= k:
                        raise PartitionError(f"leg {row}{index} out of range for upper word {up!r}")
                    pos = index - 1
                else:
                    if not 1 <= index <= l:
                        raise PartitionError(f"leg {row}{index} out of range for lower word {down!r}")
                    pos = k + index - 1
                if labels[pos] is not None:
                    raise PartitionError(f"leg {row}{index} referenced twice")
                labels[pos] = b
        for pos, lab in enumerate(labels):
            if lab is None:
                raise PartitionError(f"leg {_leg_at(pos, k)} missing from all blocks")
        return cls.from_labels(up, down, labels)  # type: ignore[arg-type]

    @property
    def k(self) -> int:
        return len(self.up)

    @property
    def l(self) -> int:
        return len(self.down)

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def word_pair(self) -> tuple[str, str]:
        return (self.up, self.down)

    @property
    def colors(self) -> str:
        return self.up + self.down

    @cached_property
    def blocks(self) -> tuple[tuple[Leg, ...], ...]:
        nblocks = max(self.labels, default=-1) + 1
        out: list[list[Leg]] = [[] for _ in range(nblocks)]
        for pos, lab in enumerate(self.labels):
            out[lab].append(_leg_at(pos, self.k))
        return tuple(tuple(b) for b in out)

    @cached_property
    def block_positions(self) -> tuple[tuple[int, ...], ...]:
        nblocks = max(self.labels, default=-1) + 1
        out: list[list[int]] = [[] for _ in range(nblocks)]
        for pos, lab in enumerate(self.labels):
            out[lab].append(pos)
        return tuple(tuple(b) for b in out)

    def sort_key(self) -> tuple:
        return word_pair_key(self.up, self.down) + (self.labels,)

    def __str__(self) -> str:
        return serialize(self)

    def __repr__(self) -> str:
        return f"ColoredPartition({serialize(self)!r})"


def word_pair_key(up: str, down: str) -> tuple:
    """Canonical order on word pairs.

    Smaller total size first, then balanced pairs (endomorphism spaces) before
    unbalanced ones, then more upper legs first, then colors with white before
    black.
    """
    k, l = len(up), len(down)
    return (k + l, abs(k - l), -k, up.translate(_COLOR_RANK), down.translate(_COLOR_RANK))


_COLOR_RANK = str.maketrans("wb", "01")


def _coerce_leg(leg) -> tuple[str, int]:
    if isinstance(leg, str):
        m = _LEG_RE.fullmatch(leg)
        if not m:
            raise PartitionError(f"bad leg {leg!r}")
        return m.group(1), int(m.group(2))
    row, index = leg
    if row not in ("u", "d"):
        raise PartitionError(f"bad leg row {row!r}")
    return row, int(index)


def _leg_at(pos: int, k: int) -> Leg:
    return Leg("u", pos + 1) if pos < k else Leg("d", pos - k + 1)


_LEG_RE = re.compile(r"([ud])([0-9]+)")


# ---------------------------------------------------------------- text format

_TOKEN_RE = re.compile(r"\s*(?:(\{)|(\})|([ud][0-9]+)|(\S))")


def parse_partition(text: str) -> ColoredPartition:
    """Parse ``"[up|down] {legs} {legs} ..."`` into canonical form."""
    s = text
    i = 0
    n = len(s)
    while i < n and s[i].isspace():
        i += 1
    if i >= n or s[i] != "[":
        raise PartitionError("expected '['", i)
    j = s.find("]", i)
    if j < 0:
        raise PartitionError("missing ']'", i)
    head = s[i + 1 : j]
    if head.count("|") != 1:
        raise PartitionError("word pair must contain exactly one '|'", i + 1)
    up, down = head.split("|")
    for off, c in enumerate(head):
        if c not in "wb|":
            raise PartitionError(f"bad color {c!r}", i + 1 + off)
    blocks: list[list[str]] = []
    current: list[str] | None = None
    seen: set[str] = set()
    pos = j + 1
    while pos < n:
        m = _TOKEN_RE.match(s, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastindex)
        if m.group(1):
            if current is not None:
                raise PartitionError("nested '{'", start)
            current = []
        elif m.group(2):
            if current is None:
                raise PartitionError("unmatched '}'", start)
            if not current:
                raise PartitionError("empty block", start)
            blocks.append(current)
            current = None
        elif m.group(3):
            if current is None:
                raise PartitionError("leg outside of a block", start)
            leg = m.group(3)
            row, index = leg[0], int(leg[1:])
            if not 1 <= index <= len(up if row == "u" else down):
                raise PartitionError(f"leg {leg} out of range for word pair ({up!r}, {down!r})", start)
            if leg in seen:
                raise PartitionError(f"leg {leg} referenced twice", start)
            seen.add(leg)
            current.append(leg)
        else:
            raise PartitionError(f"unexpected character {m.group(4)!r}", start)
        pos = m.end()
    if current is not None:
        raise PartitionError("unterminated block", n)
    for pos, c in enumerate(up + down):
        leg = str(_leg_at(pos, len(up)))
        if leg not in seen:
            raise PartitionError(f"leg {leg} missing from all blocks", n)
    return ColoredPartition.from_blocks(up, down, blocks)


def serialize(p: ColoredPartition, format: str = "text"):
    """Canonical text (``"[w|w] {u1 d1}"``) or structured record."""
    if format == "text":
        body = " ".join("{" + " ".join(str(leg) for leg in b) + "}" for b in p.blocks)
        return f"[{p.up}|{p.down}] {body}"
    if format == "structured":
        return {
            "up": p.up,
            "down": p.down,
            "blocks": [[str(leg) for leg in b] for b in p.blocks],
        }
    raise ValueError(f"unknown format {format!r}")


def from_record(record) -> ColoredPartition:
    """Inverse of ``serialize(p, "structured")``; also accepts text strings."""
    if isinstance(record, str):
        return parse_partition(record)
    try:
        up, down, blocks = record["up"], record["down"], record["blocks"]
    except (KeyError, TypeError) as exc:
        raise PartitionError(f"bad partition record {record!r}") from exc
    return ColoredPartition.from_blocks(up, down, blocks)


# ------------------------------------------------------------------ predicates


class Flags(NamedTuple):
    even_blocks: bool
    pairing: bool
    noncrossing: bool
    matching: bool


def _leg_weights(p: ColoredPartition) -> list[int]:
    # lower legs count +, upper legs count -; white +1, black -1
    k = p.k
    return [
        (1 if pos >= k else -1) * (1 if c == WHITE else -1)
        for pos, c in enumerate(p.up + p.down)
    ]


def is_matching(p: ColoredPartition) -> bool:
    """Signed number of white legs equals signed number of black legs in every block."""
    w = _leg_weights(p)
    return all(sum(w[i] for i in b) == 0 for b in p.block_positions)


def is_matching_per_color(p: ColoredPartition) -> bool:
    """Alternative reading: signed white and signed black counts both vanish per block."""
    k = p.k
    cols = p.up + p.down
    for b in p.block_positions:
        sw = sum((1 if i >= k else -1) for i in b if cols[i] == WHITE)
        sb = sum((1 if i >= k else -1) for i in b if cols[i] == BLACK)
        if sw or sb:
            return False
    return True


def circular_order(p: ColoredPartition) -> list[int]:
    """Leg positions around the circle: u1..uk then dl..d1."""
    k, l = p.k, p.l
    return list(range(k)) + list(range(k + l - 1, k - 1, -1))


def is_noncrossing(p: ColoredPartition) -> bool:
    return _labels_noncrossing([p.labels[i] for i in circular_order(p)])


def _labels_noncrossing(seq: Sequence[int]) -> bool:
    # a sequence of block labels along a line is noncrossing iff no pattern a..b..a..b
    last = {}
    for i, x in enumerate(seq):
        last[x] = i
    stack: list[int] = []
    for i, x in enumerate(seq):
        if stack and stack[-1] == x:
            if last[x] == i:
                stack.pop()
            continue
        if x in stack:
            return False
        if last[x] != i:
            stack.append(x)
    return True


def classify_flags(p: ColoredPartition) -> Flags:
    sizes = [len(b) for b in p.block_positions]
    return Flags(
        even_blocks=all(s % 2 == 0 for s in sizes),
        pairing=all(s == 2 for s in sizes),
        noncrossing=is_noncrossing(p),
        matching=is_matching(p),
    )


def delta(p: ColoredPartition, upper_index: Sequence[int], lower_index: Sequence[int]) -> int:
    """Kronecker symbol: 1 iff the indices are constant on every block."""
    if len(upper_index) != p.k or len(lower_index) != p.l:
        raise ValueError(
            f"index lengths ({len(upper_index)}, {len(lower_index)}) do not match ({p.k}, {p.l})"
        )
    value: dict[int, int] = {}
    for lab, idx in zip(p.labels, tuple(upper_index) + tuple(lower_index)):
        seen = value.setdefault(lab, idx)
        if seen != idx:
            return 0
    return 1


# ----------------------------------------------------------------- enumeration

_FLAG_ALIASES = {
    "even": "even_blocks",
    "even_blocks": "even_blocks",
    "pairing": "pairing",
    "pairings": "pairing",
    "nc": "noncrossing",
    "noncrossing": "noncrossing",
    "matching": "matching",
}

# vertex names -> required flags; "P" and "NC" are the two categories of all
# (resp. all noncrossing) partitions
NAMED_FILTERS: dict[str, tuple[str, ...]] = {
    "P": (),
    "NC": ("noncrossing",),
    "Peven": ("even_blocks",),
    "P2": ("pairing",),
    "CPeven": ("even_blocks", "matching"),
    "CP2": ("pairing", "matching"),
    "NCeven": ("even_blocks", "noncrossing"),
    "NC2": ("pairing", "noncrossing"),
    "CNCeven": ("even_blocks", "noncrossing", "matching"),
    "CNC2": ("pairing", "noncrossing", "matching"),
}


def predicate(name: str | None) -> Callable[[ColoredPartition], bool]:
    """Resolve a filter name: a vertex name (``CP2``) or flags joined by '-' (``nc-pairing``)."""
    if name is None:
        return lambda p: True
    if name in NAMED_FILTERS:
        flags = NAMED_FILTERS[name]
    else:
        try:
            flags = tuple(_FLAG_ALIASES[part] for part in re.split(r"[-,+ ]+", name.strip().lower()) if part)
        except KeyError as exc:
            raise ValueError(f"unknown filter {name!r}") from exc
    if not flags:
        return lambda p: True

    def test(p: ColoredPartition) -> bool:
        f = classify_flags(p)
        return all(getattr(f, x) for x in flags)

    return test


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All restricted growth strings of length n, in lexicographic order."""
    if n == 0:
        yield ()
        return
    labels = [0] * n

    def rec(i: int, m: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(labels)
            return
        for v in range(m + 1):
            labels[i] = v
            yield from rec(i + 1, max(m, v + 1))

    labels[0] = 0
    yield from rec(1, 1)


def enumerate_partitions(
    up: str,
    down: str,
    filter: str | Callable[[ColoredPartition], bool] | None = None,
    bound: int = ENUMERATION_BOUND,
) -> list[ColoredPartition]:
    check_word(up)
    check_word(down)
    n = len(up) + len(down)
    if n > bound:
        raise BoundExceeded(f"{n} legs exceeds the enumeration bound {bound}")
    test = filter if callable(filter) else predicate(filter)
    out = []
    for labels in set_partitions(n):
        p = ColoredPartition(up, down, labels)
        if test(p):
            out.append(p)
    return out


def words(n: int) -> Iterator[str]:
    """All color words of length n, white before black."""
    for t in product(COLORS, repeat=n):
        yield "".join(t)


def word_pairs(max_legs: int) -> list[tuple[str, str]]:
    """All word pairs with at most ``max_legs`` legs, in canonical order."""
    out = []
    for n in range(max_legs + 1):
        for k in range(n + 1):
            for u in words(k):
                for d in words(n - k):
                    out.append((u, d))
    out.sort(key=lambda w: word_pair_key(*w))
    return out
