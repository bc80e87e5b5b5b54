import json

import pytest

from pcat.category import (
    VERTEX_NAMES,
    CategoryError,
    equals,
    generate,
    half_liberation_generators,
    includes,
    named_category,
    vertex_category,
)
from pcat.lattice import (
    CUBE,
    DIRECTIONS,
    FAIL,
    INCONCLUSIVE,
    PASS,
    Condition,
    Context,
    PoolEntry,
    Report,
    classify_pool,
    containment_check,
    face_check,
    midpoint_check,
    preslice_check,
    project,
    slice_check,
)
from pcat.partition import parse_partition

FOUR = parse_partition("[|wwww] {d1 d2 d3 d4}")


@pytest.fixture(scope="module")
def ctx():
    return Context(6, 10)


@pytest.fixture(scope="module")
def half():
    return generate(half_liberation_generators(), 6, 10, name="ON*")


def test_cube_assignment_reverses_inclusion():
    by_coords = {v.coords: vertex_category(v.category_name) for v in CUBE}
    for a, ca in by_coords.items():
        for b, cb in by_coords.items():
            # a bigger group has a smaller category
            if all(x <= y for x, y in zip(a, b)):
                assert includes(ca, cb)
            if a != b and all(x <= y for x, y in zip(a, b)):
                assert not includes(cb, ca)


def test_project_examples(ctx):
    assert equals(ctx.project(vertex_category("CNC2"), "class"), vertex_category("CP2"))
    assert equals(ctx.project(vertex_category("Peven"), "free"), vertex_category("NCeven"))
    assert equals(project(vertex_category("NC2", 4), "unit"), vertex_category("CNC2", 4))
    with pytest.raises(CategoryError):
        ctx.project(vertex_category("P2"), "sideways")


def _subjects(half):
    return [vertex_category(n) for n in VERTEX_NAMES] + [half]


def test_projection_coherence_and_idempotence(ctx, half):
    for c in _subjects(half):
        assert includes(c, ctx.project(c, "free"))
        assert includes(ctx.project(c, "class"), c)
        for x in DIRECTIONS:
            once = ctx.project(c, x)
            assert equals(ctx.project(once, x), once)


def test_vertex_fixpoints(ctx):
    for v in CUBE:
        c = vertex_category(v.category_name)
        for direction, (axis, value, _, _) in DIRECTIONS.items():
            if v.coords[axis] == value:
                assert equals(ctx.project(c, direction), c), (v.name, direction)


def test_projection_lands_on_the_face_diagonal(ctx, half):
    # the projection onto a face sits between the face's extreme corners
    for c in _subjects(half):
        for direction, (axis, value, _, _) in DIRECTIONS.items():
            corners = [v for v in CUBE if v.coords[axis] == value]
            small_group = min(corners, key=lambda v: sum(v.coords))
            big_group = max(corners, key=lambda v: sum(v.coords))
            x = ctx.project(c, direction)
            assert includes(vertex_category(small_group.category_name), x)
            assert includes(x, vertex_category(big_group.category_name))


# ----------------------------------------------------------------- faces


def test_face_check_examples(ctx):
    v = vertex_category
    bottom = face_check(v("Peven"), v("P2"), v("CPeven"), v("CP2"), ctx=ctx)
    assert bottom["intersection_ok"] and bottom["generation_ok"] and not bottom["witnesses"]
    left = face_check(v("Peven"), v("CPeven"), v("NCeven"), v("CNCeven"), ctx=ctx)
    assert left["intersection_ok"] and left["generation_ok"]
    c = v("NC2")
    same = face_check(c, c, c, c, ctx=ctx)
    assert same["intersection_ok"] and same["generation_ok"]


def test_face_check_reports_witnesses(ctx):
    v = vertex_category
    # a square degenerate along one edge is fine; a square that is not a
    # face of the cube fails both ways
    res = face_check(v("P2"), v("P2"), v("CP2"), v("CP2"), ctx=ctx)
    assert res["intersection_ok"] and res["generation_ok"]
    res = face_check(v("Peven"), v("P2"), v("CP2"), v("CNC2"), ctx=ctx)
    assert not res["intersection_ok"] and res["witnesses"]["intersection"]
    assert not res["generation_ok"] and res["witnesses"]["generation"]


def test_face_check_rejects_malformed_square():
    v = vertex_category
    with pytest.raises(CategoryError):
        face_check(v("CP2"), v("P2"), v("CPeven"), v("Peven"))


# ----------------------------------------------------- midpoints, preslice


def test_midpoint_examples(ctx):
    conds = midpoint_check(vertex_category("CNC2"), ctx=ctx)
    assert [c.id for c in conds] == [
        "midpoint.class_disc",
        "midpoint.class_real",
        "midpoint.disc_real",
        "midpoint.free_cont",
        "midpoint.free_unit",
        "midpoint.cont_unit",
    ]
    assert all(c.status == PASS for c in conds)
    # classical then discrete lands on the category of K_N
    kn = ctx.project(ctx.project(vertex_category("CNC2"), "class"), "disc")
    assert equals(kn, vertex_category("CPeven"))


def test_preslice_report_shape():
    c = generate([FOUR], 4, 6)
    conds = preslice_check(c, bound=6)
    assert len(conds) == 6 and len({x.id for x in conds}) == 6
    ctx = Context(4, 6)
    for cond in conds:
        assert cond.status in (PASS, FAIL, INCONCLUSIVE)
        if cond.status == FAIL:
            x, y = cond.id.split(".")[1].split("_")
            a = ctx.project(ctx.project(c, x), y)
            b = ctx.project(ctx.project(c, y), x)
            w = parse_partition(cond.witness)
            assert (w in a.members) != (w in b.members)


# ------------------------------------------------------------------ slicing


def test_slice_report_for_base_vertex():
    report = slice_check(vertex_category("CNC2"), 10)
    ids = [c.id for c in report.conditions]
    assert len(ids) == len(set(ids)) == 72
    assert sum(i.startswith("midpoint.") for i in ids) == 6
    assert sum(i.startswith("preslice.") for i in ids) == 6
    assert sum(i.startswith("slice.") for i in ids) == 24
    assert sum(i.startswith("square.") for i in ids) == 36
    assert "slice.item2.free_face.generation" in ids
    assert "slice.item1.class_cont" in ids
    assert report.passed and report.exit_code() == 0
    assert report.summary["pass"] == 72 and report.summary["slices"] is True


def test_slice_short_circuits_after_preslice_failure(monkeypatch):
    import pcat.lattice as lattice

    real = lattice.preslice_check

    def failing(c, *args, **kwargs):
        conds = real(c, *args, **kwargs)
        conds[0] = Condition(conds[0].id, FAIL, "[|] ")
        return conds

    monkeypatch.setattr(lattice, "preslice_check", failing)
    report = lattice.slice_check(vertex_category("CNC2", 4), 6)
    assert len(report.conditions) == 72
    assert report.condition("slice.item1.class_cont").status == FAIL
    later = [c for c in report.conditions if c.id.startswith(("square.", "slice.item2", "slice.item3", "slice.item4"))]
    assert len(later) == 18 + 36 and all(c.status == INCONCLUSIVE for c in later)
    assert report.exit_code() == 1


# ------------------------------------------------------------------ reports


def test_report_exit_codes_and_serialization():
    r = Report("x", {"degree": 2})
    r.conditions = [Condition("a", PASS)]
    assert r.finalize().exit_code() == 0
    r.conditions.append(Condition("b", INCONCLUSIVE, {"reason": "budget"}))
    assert r.finalize().exit_code() == 3
    r.conditions.append(Condition("c", FAIL, "[w|b] {u1 d1}"))
    r.finalize()
    assert r.exit_code() == 1
    rec = json.loads(r.to_json())
    assert rec["conditions"][2] == {"id": "c", "status": "fail", "witness": "[w|b] {u1 d1}"}
    assert rec["summary"] == {"pass": 1, "fail": 1, "inconclusive": 1, "total": 3}
    text = r.to_text().splitlines()
    assert text[2].startswith("PASS") and "witness: [w|b] {u1 d1}" in text[4]


# ----------------------------------------------------------- classification


def test_containment_check():
    assert containment_check(vertex_category("NC2")).status == PASS
    bad = containment_check(named_category("P", 6))
    assert bad.status == FAIL and bad.witness == {"violates": "subset of Peven", "partition": "[w|] {u1}"}


def test_classify_empty_pool():
    report = classify_pool([], 3, 6)
    assert report.conditions == []
    assert report.summary["survivors"] == [] and report.summary["rejected"] == {}
    assert report.exit_code() == 0


def test_classify_single_vertex():
    report = classify_pool([PoolEntry("HN", vertex_category("Peven"))], 3, 6)
    assert report.summary["survivors"] == ["HN"]
    assert [c.id for c in report.conditions] == ["HN.containment", "HN.uniformity", "HN.slicing"]


def test_classify_rejects_half_liberation_for_uniformity(half):
    report = classify_pool([PoolEntry("ON*", half)], 3, 6, uniformity_degree=4)
    assert report.summary["rejected"] == {"ON*": "uniformity"}
    cond = report.condition("ON*.uniformity")
    assert cond.witness == {"word_pair": ["ww", "ww"], "compressed_dim": 3, "expected_dim": 2}
    assert report.exit_code() == 1


def test_classify_rejects_mixed_degrees():
    pool = [PoolEntry("a", vertex_category("P2", 4)), PoolEntry("b", vertex_category("P2", 6))]
    with pytest.raises(CategoryError):
        classify_pool(pool)
