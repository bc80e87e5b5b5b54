import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import is_vertex_member
from pcat.calculus import compose, identity, tensor
from pcat.category import codes_to_line, line_codes
from pcat.closure import (
    BoundError,
    BudgetExceeded,
    canonical,
    cap,
    glue,
    reflected,
    relabel,
    rotations,
    saturate,
    tensor_codes,
    variants,
)
from pcat.partition import ColoredPartition, enumerate_partitions, invert_word, words


@st.composite
def lines(draw, min_legs=0, max_legs=5):
    n = draw(st.integers(min_legs, max_legs))
    colors = draw(st.lists(st.sampled_from("wb"), min_size=n, max_size=n))
    labels = draw(st.lists(st.integers(0, max(n - 1, 0)), min_size=n, max_size=n))
    return line_codes(ColoredPartition.from_labels("", "".join(colors), labels))


def word(codes):
    return "".join("b" if c & 1 else "w" for c in codes)


def test_relabel_first_use_order():
    assert relabel((6, 3, 6, 1)) == (2, 5, 2, 1)
    assert relabel(()) == ()


def test_cap_examples():
    # white-black neighbours in one block vanish, leaving an empty line
    assert cap((2, 3)) == ()
    assert cap((2, 2)) is None
    assert cap((2, 2), colorblind=True) == ()
    # capping legs of two different blocks merges what is left of them
    assert cap((2, 5, 2, 4)) == (2, 2)


def test_glue_zero_is_tensor():
    assert glue((2, 3), (2, 2), 0) == tensor_codes((2, 3), (2, 2)) == (2, 3, 4, 4)


@given(lines(), lines(), st.data())
def test_glue_agrees_with_two_row_composition(v, g, data):
    j = data.draw(st.integers(0, min(len(v), len(g))))
    n = len(v)
    expected = None
    if all((v[n - 1 - i] & 1) != (g[i] & 1) for i in range(j)):
        # rotate the first j legs of g up, then stack the one-row v on top
        gl = codes_to_line(g)
        q_up = invert_word(word(g[:j])[::-1])
        q = ColoredPartition.from_labels(q_up, word(g[j:]), gl.labels)
        vl = codes_to_line(v)
        lower = tensor(identity(word(v[: n - j])), q)
        expected = line_codes(compose(vl, lower).partition)
    assert glue(v, g, j) == expected


@given(lines())
def test_orbit_operations(codes):
    vs = variants(codes)
    assert codes in vs
    assert all(canonical(x) == canonical(codes) for x in vs)
    assert set(rotations(codes)) <= vs and reflected(codes) in vs
    assert reflected(reflected(codes)) == codes


def test_saturation_of_nothing_is_noncrossing_matching_pairings():
    res = saturate([], 8)
    assert not res.colorblind
    got = res.colored_orbits(6)
    assert all(is_vertex_member(codes_to_line(o), "CNC2") for o in got)
    # every noncrossing matching pairing on <= 6 legs is reached
    for n in (2, 4, 6):
        for w in words(n):
            for p in enumerate_partitions("", w, "matching-nc-pairing"):
                assert canonical(line_codes(p)) in got


def test_mono_pair_switches_to_colorblind():
    res = saturate([(2, 2)], 6)
    assert res.colorblind


@pytest.mark.parametrize("gens", [[], [(2, 4, 2, 4)], [(2, 2, 2, 2)], [(2, 3, 2, 3)]])
def test_saturation_independent_of_schedule(gens):
    base = saturate(gens, 8).orbits
    for seed in range(4):
        assert saturate(gens, 8, shuffle_seed=seed).orbits == base


def test_saturation_limits():
    with pytest.raises(BoundError):
        saturate([(2,) * 7], 6)
    with pytest.raises(BudgetExceeded):
        saturate([(2, 4, 2, 4)], 8, budget=3)
