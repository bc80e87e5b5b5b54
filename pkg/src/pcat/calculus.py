"""Diagram calculus: tensor, composition, involution and rotations."""

from __future__ import annotations

from typing import NamedTuple

from .partition import ColoredPartition, invert_word, restricted_growth


class CompositionError(ValueError):
    pass


class CompositionResult(NamedTuple):
    partition: ColoredPartition
    loops: int


def empty() -> ColoredPartition:
    return ColoredPartition("", "", ())


def identity(word: str) -> ColoredPartition:
    """Vertical strands on ``word``."""
    n = len(word)
    return ColoredPartition(word, word, tuple(range(n)) + tuple(range(n)))


def tensor(p: ColoredPartition, q: ColoredPartition) -> ColoredPartition:
    """Horizontal concatenation, p on the left."""
    shift = max(p.labels, default=-1) + 1
    pu, pd = p.labels[: p.k], p.labels[p.k :]
    qu, qd = q.labels[: q.k], q.labels[q.k :]
    labels = pu + tuple(x + shift for x in qu) + pd + tuple(x + shift for x in qd)
    return ColoredPartition.from_labels(p.up + q.up, p.down + q.down, labels)


def compose(p: ColoredPartition, q: ColoredPartition) -> CompositionResult:
    """Stack p on top of q, gluing p's lower row to q's upper row.

    The glued row disappears; blocks connected through it merge.  Components
    living entirely in the glued row are closed loops and are counted.
    """
    if p.down != q.up:
        raise CompositionError(f"cannot compose: lower word {p.down!r} != upper word {q.up!r}")
    np_ = max(p.labels, default=-1) + 1
    parent = list(range(np_ + max(q.labels, default=-1) + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    k, m = p.k, p.l
    for j in range(m):
        a = find(p.labels[k + j])
        b = find(np_ + q.labels[j])
        if a != b:
            parent[a] = b
    outer = [find(x) for x in p.labels[:k]] + [find(np_ + x) for x in q.labels[m:]]
    live = set(outer)
    middle = {find(x) for x in p.labels[k:]}
    loops = len(middle - live)
    return CompositionResult(ColoredPartition.from_labels(p.up, q.down, outer), loops)


def involve(p: ColoredPartition) -> ColoredPartition:
    """Upside-down turning: swap the rows, keeping positions."""
    return ColoredPartition.from_labels(p.down, p.up, p.labels[p.k :] + p.labels[: p.k])


def rotate_left(p: ColoredPartition) -> ColoredPartition:
    """Move the leftmost upper leg to the leftmost lower position, inverting its color."""
    if not p.up:
        raise ValueError("rotate_left needs a nonempty upper row")
    labels = p.labels[1 : p.k] + p.labels[:1] + p.labels[p.k :]
    return ColoredPartition.from_labels(p.up[1:], invert_word(p.up[0]) + p.down, labels)


def rotate_right(p: ColoredPartition) -> ColoredPartition:
    """Inverse of :func:`rotate_left`: the leftmost lower leg goes back up."""
    if not p.down:
        raise ValueError("rotate_right needs a nonempty lower row")
    k = p.k
    labels = p.labels[k : k + 1] + p.labels[:k] + p.labels[k + 1 :]
    return ColoredPartition.from_labels(invert_word(p.down[0]) + p.up, p.down[1:], labels)


def to_line(p: ColoredPartition) -> ColoredPartition:
    """Rotate every upper leg down: result has no upper row.

    The lower word becomes ``invert(reversed(up)) + down``.
    """
    k = p.k
    labels = p.labels[:k][::-1] + p.labels[k:]
    return ColoredPartition.from_labels("", invert_word(p.up[::-1]) + p.down, labels)


def from_line(line: ColoredPartition, k: int) -> ColoredPartition:
    """Inverse of :func:`to_line` for a one-row partition, lifting k legs up."""
    if line.k:
        raise ValueError("from_line expects a partition with empty upper row")
    w = line.down
    labels = line.labels[:k][::-1] + line.labels[k:]
    return ColoredPartition.from_labels(invert_word(w[:k][::-1]), w[k:], labels)


def recolor(p: ColoredPartition, up: str, down: str) -> ColoredPartition:
    if len(up) != p.k or len(down) != p.l:
        raise ValueError("recoloring must keep the word lengths")
    return ColoredPartition(up, down, p.labels)


def reflect(p: ColoredPartition) -> ColoredPartition:
    """Left-right mirror image, colors kept."""
    k = p.k
    labels = p.labels[:k][::-1] + p.labels[k:][::-1]
    return ColoredPartition.from_labels(p.up[::-1], p.down[::-1], restricted_growth(labels))
