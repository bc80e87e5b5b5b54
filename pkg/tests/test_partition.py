from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import blocks_of, circle, crosses, is_vertex_member, set_partitions_by_insertion
from pcat.calculus import reflect
from pcat.partition import (
    ColoredPartition,
    Flags,
    PartitionError,
    BoundExceeded,
    classify_flags,
    delta,
    enumerate_partitions,
    from_record,
    is_matching,
    is_matching_per_color,
    parse_partition,
    serialize,
    set_partitions,
    word_pair_key,
    word_pairs,
    words,
)

X = "[ww|ww] {u1 d2} {u2 d1}"


def bell(n):
    b = [1]
    for i in range(n):
        b.append(sum(comb(i, j) * b[j] for j in range(i + 1)))
    return b[n]


def catalan(m):
    return comb(2 * m, m) // (m + 1)


def double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@st.composite
def partitions(draw, max_legs=6):
    n = draw(st.integers(0, max_legs))
    k = draw(st.integers(0, n))
    colors = draw(st.lists(st.sampled_from("wb"), min_size=n, max_size=n))
    labels = draw(st.lists(st.integers(0, max(n - 1, 0)), min_size=n, max_size=n))
    return ColoredPartition.from_labels("".join(colors[:k]), "".join(colors[k:]), labels)


# --------------------------------------------------------------- parsing


def test_parse_examples():
    strand = parse_partition("[w|w] {u1 d1}")
    assert strand.word_pair == ("w", "w") and strand.labels == (0, 0)
    cap = parse_partition("[|wb] {d1 d2}")
    assert cap.word_pair == ("", "wb") and cap.labels == (0, 0)
    x = parse_partition(X)
    assert x.labels == (0, 1, 1, 0)


def test_serialize_examples():
    assert serialize(parse_partition("[w|w]{u1 d1}")) == "[w|w] {u1 d1}"
    assert serialize(ColoredPartition("", "", ())) == "[|] "
    assert serialize(parse_partition("[ww|ww] {d1 u2}{d2 u1}")) == X


def test_parse_accepts_unordered_blocks_and_whitespace():
    p = parse_partition("  [ww|ww]   {d1   u2} {u1 d2} ")
    assert serialize(p) == X


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("[w|w] {u1 d1} {u1}", "twice"),
        ("[w|w] {u1}", "missing"),
        ("[w|w] {u1 d2}", "range"),
        ("[w|x] {u1 d1}", ""),
        ("[w|w {u1 d1}", ""),
        ("[w|w] {u1 d1", ""),
        ("[w|w] {}", ""),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(PartitionError) as info:
        parse_partition(text)
    assert fragment in str(info.value)
    assert info.value.position is not None


@given(partitions(max_legs=8))
def test_text_round_trip(p):
    assert parse_partition(serialize(p)) == p
    assert serialize(parse_partition(serialize(p))) == serialize(p)


@given(partitions())
def test_structured_round_trip(p):
    rec = serialize(p, "structured")
    assert set(rec) == {"up", "down", "blocks"}
    assert from_record(rec) == p
    shuffled = dict(rec, blocks=[list(reversed(b)) for b in reversed(rec["blocks"])])
    assert from_record(shuffled) == p


@given(partitions())
def test_canonical_form_idempotent(p):
    again = ColoredPartition.from_labels(p.up, p.down, p.labels)
    assert again == p
    assert ColoredPartition.from_blocks(p.up, p.down, p.blocks) == p


# ------------------------------------------------------------ enumeration


def test_enumeration_examples():
    assert len(enumerate_partitions("", "wwww")) == 15
    assert len(enumerate_partitions("", "wwwwww", "nc-pairing")) == 5
    got = {serialize(p) for p in enumerate_partitions("", "wbwb", "matching-nc-pairing")}
    assert got == {"[|wbwb] {d1 d2} {d3 d4}", "[|wbwb] {d1 d4} {d2 d3}"}


@pytest.mark.parametrize("n", range(0, 9))
def test_enumeration_counts(n):
    down = "w" * n
    assert len(enumerate_partitions("", down)) == bell(n)
    if n % 2 == 0:
        assert len(enumerate_partitions("", down, "nc-pairing")) == catalan(n // 2)
        assert len(enumerate_partitions("", down, "pairing")) == double_factorial(n - 1)


@pytest.mark.parametrize("n", range(0, 8))
def test_set_partitions_match_insertion_oracle(n):
    ours = {tuple(sorted(tuple(b) for b in blocks_of(labels))) for labels in set_partitions(n)}
    ref = {tuple(sorted(tuple(b) for b in blocks)) for blocks in set_partitions_by_insertion(n)}
    assert ours == ref and len(list(set_partitions(n))) == len(ref)


def test_enumeration_bound():
    with pytest.raises(BoundExceeded):
        enumerate_partitions("wwww", "wwwww")
    assert len(enumerate_partitions("wwww", "wwwww", bound=9)) == bell(9)


def test_enumeration_deterministic():
    a = [serialize(p) for p in enumerate_partitions("wb", "bw")]
    b = [serialize(p) for p in enumerate_partitions("wb", "bw")]
    assert a == b and len(set(a)) == len(a)


def test_word_pairs_order():
    pairs = word_pairs(4)
    assert pairs[0] == ("", "")
    assert pairs.index(("w", "w")) < pairs.index(("b", "b"))
    fours = [p for p in pairs if sum(map(len, p)) == 4]
    assert fours[0] == ("ww", "ww")
    assert len(pairs) == sum((n + 1) * 2**n for n in range(5))
    assert sorted(pairs, key=lambda w: word_pair_key(*w)) == pairs
    assert list(words(2)) == ["ww", "wb", "bw", "bb"]


# ------------------------------------------------------------- predicates


def test_flag_examples():
    assert classify_flags(parse_partition(X)) == Flags(True, True, False, True)
    assert classify_flags(parse_partition("[|ww] {d1 d2}")) == Flags(True, True, True, False)
    assert classify_flags(parse_partition("[|wb] {d1 d2}")) == Flags(True, True, True, True)
    assert classify_flags(parse_partition("[w|w] {u1 d1}")).matching
    assert not classify_flags(parse_partition("[w|b] {u1 d1}")).matching


@given(partitions(max_legs=7))
def test_noncrossing_matches_brute_force(p):
    assert classify_flags(p).noncrossing == (not crosses(p.labels, circle(p.k, p.l)))


@given(partitions(max_legs=7))
def test_flags_match_independent_membership(p):
    f = classify_flags(p)
    assert f.even_blocks == is_vertex_member(p, "Peven")
    assert f.pairing == is_vertex_member(p, "P2")
    assert f.matching == is_vertex_member(p, "CPeven") or not f.even_blocks


@given(partitions())
def test_flags_reflection_invariant(p):
    f, g = classify_flags(p), classify_flags(reflect(p))
    assert (f.even_blocks, f.pairing, f.noncrossing) == (g.even_blocks, g.pairing, g.noncrossing)


def test_matching_readings_differ_on_mixed_blocks():
    # upper white counts -1 on the white side, lower black +1 on the black side
    p = parse_partition("[w|b] {u1 d1}")
    q = parse_partition("[|wwbb] {d1 d2 d3 d4}")
    assert not is_matching(p)
    assert is_matching(q) and not is_matching_per_color(q)


# ------------------------------------------------------------------ delta


def test_delta_examples():
    strand = parse_partition("[w|w] {u1 d1}")
    assert delta(strand, (3,), (3,)) == 1
    cap = parse_partition("[|ww] {d1 d2}")
    assert delta(cap, (), (1, 2)) == 0 and delta(cap, (), (2, 2)) == 1
    four = parse_partition("[|wwww] {d1 d2 d3 d4}")
    assert delta(four, (), (2, 2, 2, 2)) == 1 and delta(four, (), (2, 2, 1, 2)) == 0
    with pytest.raises(ValueError):
        delta(cap, (1,), (1, 1))


@given(partitions(max_legs=6), st.data())
def test_delta_ignores_colors(p, data):
    from itertools import product

    n = p.size
    colors = data.draw(st.lists(st.sampled_from("wb"), min_size=n, max_size=n))
    q = ColoredPartition("".join(colors[: p.k]), "".join(colors[p.k :]), p.labels)
    for idx in product((1, 2), repeat=n):
        assert delta(p, idx[: p.k], idx[p.k :]) == delta(q, idx[: p.k], idx[p.k :])
