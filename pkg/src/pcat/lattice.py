"""The cube of eight vertex categories, projections, slicing and classification.

Quantum groups and categories of partitions are in order-reversing
correspondence: intersecting two groups corresponds to generating a category
from both, and generating a group corresponds to intersecting categories.
Everything below works with categories, so a condition such as
``G = <G n Q, G n R>`` is evaluated as ``D_G = join(D_G, D_Q) & join(D_G, D_R)``.

Cube coordinates: ``a`` runs from H to O (discrete to continuous), ``b`` from
H to K (real to unitary), ``c`` from classical to free.  Groups grow with each
coordinate, categories shrink.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .category import (
    DEFAULT_BUDGET,
    BudgetExceeded,
    CategoryError,
    TruncatedCategory,
    difference_witness,
    equals,
    includes,
    intersect,
    join,
    minimal_member,
    vertex_category,
)
from .closure import ENGINE_VERSION
from .partition import serialize

log = logging.getLogger(__name__)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


@dataclass(frozen=True)
class CubeVertex:
    name: str
    category_name: str
    coords: tuple[int, int, int]


CUBE = (
    CubeVertex("HN", "Peven", (0, 0, 0)),
    CubeVertex("ON", "P2", (1, 0, 0)),
    CubeVertex("KN", "CPeven", (0, 1, 0)),
    CubeVertex("UN", "CP2", (1, 1, 0)),
    CubeVertex("HN+", "NCeven", (0, 0, 1)),
    CubeVertex("ON+", "NC2", (1, 0, 1)),
    CubeVertex("KN+", "CNCeven", (0, 1, 1)),
    CubeVertex("UN+", "CNC2", (1, 1, 1)),
)
VERTEX_BY_NAME = {v.name: v for v in CUBE}
VERTEX_AT = {v.coords: v for v in CUBE}

# direction -> (axis, value, operation, vertex category)
DIRECTIONS = {
    "class": (2, 0, "join", "CP2"),
    "free": (2, 1, "intersect", "NCeven"),
    "disc": (0, 0, "join", "CNCeven"),
    "cont": (0, 1, "intersect", "P2"),
    "real": (1, 0, "join", "NC2"),
    "unit": (1, 1, "intersect", "CPeven"),
}
DIRECTION_AT = {(axis, value): name for name, (axis, value, _, _) in DIRECTIONS.items()}

FACE_NAMES = {
    "class": "classical",
    "free": "free",
    "disc": "discrete",
    "cont": "continuous",
    "real": "real",
    "unit": "unitary",
}

# the six edge midpoints determined by a single vertex category
MIDPOINTS = (
    ("class", "disc", "join", "CPeven"),
    ("class", "real", "join", "P2"),
    ("disc", "real", "join", "NCeven"),
    ("free", "cont", "intersect", "NC2"),
    ("free", "unit", "intersect", "CNCeven"),
    ("cont", "unit", "intersect", "CP2"),
)
PRESLICE = (
    ("class", "cont"),
    ("class", "unit"),
    ("disc", "free"),
    ("disc", "unit"),
    ("real", "free"),
    ("real", "cont"),
)
FACES = {
    "lower": (2, 0),
    "upper": (2, 1),
    "left": (0, 0),
    "right": (0, 1),
    "front": (1, 0),
    "back": (1, 1),
}


# ------------------------------------------------------------------ reports


@dataclass
class Condition:
    id: str
    status: str
    witness: object = None
    detail: dict | None = None

    def to_record(self) -> dict:
        out = {"id": self.id, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.detail:
            out.update(self.detail)
        return out


@dataclass
class Report:
    subject: str
    parameters: dict
    conditions: list[Condition] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def status_counts(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for c in self.conditions:
            counts[c.status] += 1
        return counts

    def finalize(self) -> Report:
        self.summary = {**self.summary, **self.status_counts(), "total": len(self.conditions)}
        return self

    @property
    def passed(self) -> bool:
        return all(c.status == PASS for c in self.conditions)

    def exit_code(self) -> int:
        counts = self.status_counts()
        if counts[FAIL]:
            return 1
        if counts[INCONCLUSIVE]:
            return 3
        return 0

    def condition(self, cid: str) -> Condition:
        for c in self.conditions:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_record(self) -> dict:
        return {
            "subject": self.subject,
            "parameters": self.parameters,
            "conditions": [c.to_record() for c in self.conditions],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"# {self.subject}"]
        lines.append("# " + " ".join(f"{k}={v}" for k, v in sorted(self.parameters.items())))
        for c in self.conditions:
            line = f"{c.status.upper():<13} {c.id}"
            if c.witness is not None:
                line += f"  witness: {_witness_text(c.witness)}"
            lines.append(line)
        lines.append("# " + " ".join(f"{k}={_witness_text(v)}" for k, v in sorted(self.summary.items())))
        return "\n".join(lines) + "\n"


def _witness_text(w) -> str:
    if isinstance(w, str):
        return w
    return json.dumps(w, sort_keys=True)


def parameters(degree: int, bound: int, **extra) -> dict:
    out = {"degree": degree, "bound": bound, "engine": ENGINE_VERSION}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


# ---------------------------------------------------------------- projection


class Context:
    """Shared settings and memo for one verification run."""

    def __init__(self, degree: int, bound: int, budget: int = DEFAULT_BUDGET, cache=None):
        if bound < degree:
            raise CategoryError(f"bound {bound} is smaller than degree {degree}")
        self.degree = degree
        self.bound = bound
        self.budget = budget
        self.cache = cache

    def vertex(self, name: str) -> TruncatedCategory:
        return vertex_category(name, self.degree)

    def join(self, c1: TruncatedCategory, c2: TruncatedCategory) -> TruncatedCategory:
        return join(c1, c2, self.bound, budget=self.budget, cache=self.cache)

    def apply(self, c: TruncatedCategory, op: str, vertex_name: str) -> TruncatedCategory:
        v = self.vertex(vertex_name)
        if op == "join":
            return self.join(c, v)
        return intersect(c, v)

    def project(self, c: TruncatedCategory, direction: str) -> TruncatedCategory:
        if direction not in DIRECTIONS:
            raise CategoryError(f"unknown direction {direction!r}")
        _, _, op, vname = DIRECTIONS[direction]
        out = self.apply(c, op, vname)
        return _renamed(out, f"{direction}({c.label()})")


def _renamed(c: TruncatedCategory, name: str) -> TruncatedCategory:
    return TruncatedCategory(
        degree=c.degree,
        bound=c.bound,
        orbits=c.orbits,
        generators=c.generators,
        provenance=c.provenance,
        stable=c.stable,
        name=name,
    )


def project(
    c: TruncatedCategory, direction: str, bound: int | None = None, budget: int = DEFAULT_BUDGET, cache=None
) -> TruncatedCategory:
    """Projection of c onto one of the six faces of the cube."""
    ctx = Context(c.degree, max(c.degree, bound if bound is not None else c.degree + 4), budget, cache)
    return ctx.project(c, direction)


def _witness(c1: TruncatedCategory, c2: TruncatedCategory):
    w = difference_witness(c1, c2)
    return None if w is None else serialize(w)


def _compare(cid: str, a: TruncatedCategory, b: TruncatedCategory) -> Condition:
    if equals(a, b):
        status = PASS if (a.stable and b.stable) else INCONCLUSIVE
        return Condition(cid, status, None if status == PASS else {"reason": "unstable truncation"})
    return Condition(cid, FAIL, _witness(a, b))


def _guarded(cid: str, fn: Callable[[], Condition]) -> Condition:
    try:
        return fn()
    except BudgetExceeded as exc:
        return Condition(cid, INCONCLUSIVE, {"reason": str(exc)})


# -------------------------------------------------------------- face checks


def face_check(
    P: TruncatedCategory,
    Q: TruncatedCategory,
    R: TruncatedCategory,
    S: TruncatedCategory,
    bound: int | None = None,
    budget: int = DEFAULT_BUDGET,
    cache=None,
    ctx: Context | None = None,
) -> dict:
    """Square of groups P < Q, R < S: P = Q n R and <Q, R> = S.

    At category level: D_P = join(D_Q, D_R) and D_S = D_Q & D_R.
    """
    d = P.degree
    if any(x.degree != d for x in (Q, R, S)):
        raise CategoryError("face categories must share one degree")
    for big, small in ((P, Q), (P, R), (Q, S), (R, S)):
        if not includes(big, small):
            raise CategoryError(f"malformed square: {big.label()} does not contain {small.label()}")
    if ctx is None:
        ctx = Context(d, bound if bound is not None else d + 4, budget, cache)
    out = {"intersection_ok": None, "generation_ok": None, "witnesses": {}}
    try:
        joined = ctx.join(Q, R)
        out["intersection_ok"] = equals(joined, P) and joined.stable
        if not equals(joined, P):
            out["witnesses"]["intersection"] = _witness(joined, P)
    except BudgetExceeded as exc:
        out["witnesses"]["intersection"] = {"reason": str(exc)}
    met = intersect(Q, R)
    out["generation_ok"] = equals(met, S)
    if not out["generation_ok"]:
        out["witnesses"]["generation"] = _witness(met, S)
    return out


def verify_cube(degree: int = 6, bound: int | None = None, budget: int = DEFAULT_BUDGET, cache=None) -> Report:
    """The six faces of the vertex cube, two conditions each."""
    bound = degree + 4 if bound is None else bound
    ctx = Context(degree, bound, budget, cache)
    report = Report("cube", parameters(degree, bound))
    for face, (axis, value) in FACES.items():
        P, Q, R, S = (ctx.vertex(VERTEX_AT[c].category_name) for c in _face_corners(axis, value))
        res = face_check(P, Q, R, S, ctx=ctx)
        for key, cond in (("intersection", "intersection_ok"), ("generation", "generation_ok")):
            ok = res[cond]
            status = PASS if ok else (INCONCLUSIVE if ok is None else FAIL)
            report.conditions.append(Condition(f"face.{face}.{key}", status, res["witnesses"].get(key)))
    return report.finalize()


def _face_corners(axis: int, value: int) -> list[tuple[int, int, int]]:
    """Corners P, Q, R, S of a cube face (P the smallest group)."""
    free = [i for i in range(3) if i != axis]
    out = []
    for bits in ((0, 0), (1, 0), (0, 1), (1, 1)):
        c = [0, 0, 0]
        c[axis] = value
        c[free[0]], c[free[1]] = bits
        out.append(tuple(c))
    return out


# ------------------------------------------------------ midpoints, preslicing


def midpoint_check(c: TruncatedCategory, bound: int | None = None, budget: int = DEFAULT_BUDGET, cache=None, ctx=None) -> list[Condition]:
    """The six edge midpoints that are determined by one vertex category."""
    if ctx is None:
        ctx = Context(c.degree, bound if bound is not None else c.degree + 4, budget, cache)
    out = []
    for x, y, op, vname in MIDPOINTS:
        cid = f"midpoint.{x}_{y}"

        def run(x=x, y=y, op=op, vname=vname, cid=cid):
            xy = ctx.project(ctx.project(c, x), y)
            yx = ctx.project(ctx.project(c, y), x)
            direct = ctx.apply(c, op, vname)
            first = _compare(cid, xy, yx)
            if first.status != PASS:
                return first
            return _compare(cid, xy, direct)

        out.append(_guarded(cid, run))
    return out


def preslice_check(c: TruncatedCategory, bound: int | None = None, budget: int = DEFAULT_BUDGET, cache=None, ctx=None) -> list[Condition]:
    """The six edge midpoints that need a commutation condition."""
    if ctx is None:
        ctx = Context(c.degree, bound if bound is not None else c.degree + 4, budget, cache)
    out = []
    for x, y in PRESLICE:
        cid = f"preslice.{x}_{y}"
        out.append(
            _guarded(cid, lambda x=x, y=y, cid=cid: _compare(cid, ctx.project(ctx.project(c, x), y), ctx.project(ctx.project(c, y), x)))
        )
    return out


# ------------------------------------------------------------------ slicing

HALF = "h"


class SlicedCube:
    """The 27 nodes: coordinates in {0, h, 1} per axis, h the midpoint."""

    def __init__(self, c: TruncatedCategory, ctx: Context):
        self.c = c
        self.ctx = ctx
        self._nodes: dict[tuple, TruncatedCategory] = {}

    def node(self, coords: tuple) -> TruncatedCategory:
        if coords in self._nodes:
            return self._nodes[coords]
        fixed = [(i, v) for i, v in enumerate(coords) if v != HALF]
        if len(fixed) == 3:
            out = self.ctx.vertex(VERTEX_AT[coords].category_name)
        else:
            # project successively, axis order a, b, c; well-definedness of
            # the order is what the midpoint and preslice checks establish
            out = self.c
            for axis, value in fixed:
                out = self.ctx.project(out, DIRECTION_AT[(axis, value)])
        self._nodes[coords] = out
        return out


def _plane_name(axis: int, value) -> str:
    if value == HALF:
        lo, hi = DIRECTION_AT[(axis, 0)], DIRECTION_AT[(axis, 1)]
        return f"{FACE_NAMES[lo]}_{FACE_NAMES[hi]}"
    return FACE_NAMES[DIRECTION_AT[(axis, value)]]


def _face_label(axis: int, value) -> str:
    return "intermediate" if value == HALF else _plane_name(axis, value)


def _square_conditions(
    Q: TruncatedCategory, R: TruncatedCategory, G: TruncatedCategory, ctx: Context, prefix: str
) -> list[Condition]:
    """A square P < Q, R < S sliced by an intermediate G.

    generation: G = <G n Q, G n R>, i.e. D_G = join(D_G, D_Q) & join(D_G, D_R);
    intersection: G = <G, Q> n <G, R>, i.e. D_G = join(D_G & D_Q, D_G & D_R).
    """
    gen = _guarded(
        f"{prefix}.generation",
        lambda: _compare(f"{prefix}.generation", intersect(ctx.join(G, Q), ctx.join(G, R)), G),
    )
    inter = _guarded(
        f"{prefix}.intersection",
        lambda: _compare(f"{prefix}.intersection", ctx.join(intersect(G, Q), intersect(G, R)), G),
    )
    return [gen, inter]


SLICE_ITEMS = {2: 2, 3: 0, 4: 1}  # item number -> axis held fixed by its faces


def slice_check(
    c: TruncatedCategory,
    bound: int | None = None,
    budget: int = DEFAULT_BUDGET,
    cache=None,
    subject: str | None = None,
) -> Report:
    """Midpoints, preslicing, the 24 slicing conditions and the 36 small squares."""
    d = c.degree
    bound = d + 4 if bound is None else bound
    ctx = Context(d, bound, budget, cache)
    report = Report(subject or c.label(), parameters(d, bound))
    report.conditions += midpoint_check(c, ctx=ctx)
    pre = preslice_check(c, ctx=ctx)
    report.conditions += pre
    item1 = [Condition(p.id.replace("preslice.", "slice.item1."), p.status, p.witness) for p in pre]
    later_ids = _slice_ids() + _square_ids()
    blocked = [p for p in pre if p.status != PASS]
    if blocked:
        report.conditions += item1
        reason = {"reason": f"not evaluated: {blocked[0].id} did not pass"}
        report.conditions += [Condition(cid, INCONCLUSIVE, reason) for cid in later_ids]
        return report.finalize()
    report.conditions += item1
    cube = SlicedCube(c, ctx)
    for item, axis in SLICE_ITEMS.items():
        for value in (0, HALF, 1):
            center = tuple(value if i == axis else HALF for i in range(3))
            G = cube.node(center)
            u, v = [i for i in range(3) if i != axis]
            Q = cube.node(_point(axis, value, u, 1, v, 0))
            R = cube.node(_point(axis, value, u, 0, v, 1))
            prefix = f"slice.item{item}.{_face_label(axis, value)}_face"
            report.conditions += _square_conditions(Q, R, G, ctx, prefix)
    for axis in range(3):
        for value in (0, HALF, 1):
            u, v = [i for i in range(3) if i != axis]
            for lo_u, hi_u in ((0, HALF), (HALF, 1)):
                for lo_v, hi_v in ((0, HALF), (HALF, 1)):
                    cid = f"square.{_plane_name(axis, value)}.{lo_u}{lo_v}"
                    P = cube.node(_point(axis, value, u, lo_u, v, lo_v))
                    Q = cube.node(_point(axis, value, u, hi_u, v, lo_v))
                    R = cube.node(_point(axis, value, u, lo_u, v, hi_v))
                    S = cube.node(_point(axis, value, u, hi_u, v, hi_v))
                    report.conditions.append(_guarded(cid, lambda P=P, Q=Q, R=R, S=S, cid=cid: _small_square(cid, P, Q, R, S, ctx)))
    report.summary = {"slices": all(x.status == PASS for x in report.conditions)}
    return report.finalize()


def _point(axis, value, u, x, v, y) -> tuple:
    c = [None, None, None]
    c[axis], c[u], c[v] = value, x, y
    return tuple(c)


def _small_square(cid, P, Q, R, S, ctx: Context) -> Condition:
    joined = ctx.join(Q, R)
    inter_ok = equals(joined, P)
    gen_ok = equals(intersect(Q, R), S)
    detail = {"intersection_ok": inter_ok, "generation_ok": gen_ok}
    if inter_ok and gen_ok:
        stable = all(x.stable for x in (P, Q, R, S, joined))
        return Condition(cid, PASS if stable else INCONCLUSIVE, None, detail)
    witness = _witness(joined, P) if not inter_ok else _witness(intersect(Q, R), S)
    return Condition(cid, FAIL, witness, detail)


def _slice_ids() -> list[str]:
    out = []
    for item, axis in SLICE_ITEMS.items():
        for value in (0, HALF, 1):
            prefix = f"slice.item{item}.{_face_label(axis, value)}_face"
            out += [f"{prefix}.generation", f"{prefix}.intersection"]
    return out


def _square_ids() -> list[str]:
    out = []
    for axis in range(3):
        for value in (0, HALF, 1):
            for lo_u in (0, HALF):
                for lo_v in (0, HALF):
                    out.append(f"square.{_plane_name(axis, value)}.{lo_u}{lo_v}")
    return out


# ------------------------------------------------------------ classification


@dataclass
class PoolEntry:
    label: str
    category: TruncatedCategory


def containment_check(c: TruncatedCategory) -> Condition:
    """H_N < G < U_N^+: every member has even blocks, every base member is present."""
    top = vertex_category("Peven", c.degree)
    base = vertex_category("CNC2", c.degree)
    extra = c.orbits - top.orbits
    if extra:
        w = serialize(minimal_member(extra))
        return Condition("containment", FAIL, {"violates": "subset of Peven", "partition": w})
    missing = base.orbits - c.orbits
    if missing:
        w = serialize(minimal_member(missing))
        return Condition("containment", FAIL, {"violates": "contains CNC2", "partition": w})
    return Condition("containment", PASS)


def classify_pool(
    pool: Sequence[PoolEntry],
    N: int = 3,
    degree: int | None = None,
    bound: int | None = None,
    uniformity_degree: int | None = None,
    budget: int = DEFAULT_BUDGET,
    cache=None,
) -> Report:
    """Check containment, uniformity and slicing, in that order, for each entry."""
    from .linreal import uniformity_check

    degrees = {e.category.degree for e in pool}
    if len(degrees) > 1:
        raise CategoryError(f"pool members have different degrees: {sorted(degrees)}")
    d = degree if degree is not None else (degrees.pop() if degrees else 6)
    if pool and pool[0].category.degree != d:
        raise CategoryError(f"pool degree {pool[0].category.degree} differs from requested {d}")
    bound = d + 4 if bound is None else bound
    ud = d if uniformity_degree is None else uniformity_degree
    report = Report("classification", parameters(d, bound, ambient=N, uniformity_degree=ud))
    survivors, rejected, inconclusive = [], {}, []
    for entry in sorted(pool, key=lambda e: e.label):
        c = entry.category
        verdict = None
        cond = containment_check(c)
        report.conditions.append(Condition(f"{entry.label}.containment", cond.status, cond.witness))
        if cond.status != PASS:
            verdict = ("containment", cond.status)
        if verdict is None:
            u = uniformity_check(c, N, ud, budget=budget, subject=entry.label)
            status = {"uniform": PASS, "not uniform": FAIL}.get(u.status, INCONCLUSIVE)
            report.conditions.append(Condition(f"{entry.label}.uniformity", status, u.witness))
            if status != PASS:
                verdict = ("uniformity", status)
        if verdict is None:
            s = slice_check(c, bound, budget, cache, subject=entry.label)
            first_bad = next((x for x in s.conditions if x.status != PASS), None)
            status = PASS if first_bad is None else first_bad.status
            witness = None if first_bad is None else {"condition": first_bad.id, "witness": first_bad.witness}
            report.conditions.append(Condition(f"{entry.label}.slicing", status, witness))
            if status != PASS:
                verdict = ("slicing", status)
        if verdict is None:
            survivors.append(entry.label)
        elif verdict[1] == FAIL:
            rejected[entry.label] = verdict[0]
        else:
            inconclusive.append(entry.label)
    report.summary = {"survivors": survivors, "rejected": rejected, "undecided": inconclusive}
    return report.finalize()


def default_pool(degree: int = 6, bound: int | None = None, budget: int = DEFAULT_BUDGET, cache=None) -> list[PoolEntry]:
    """The eight vertices, the half-liberated orthogonal category, P and NC."""
    from .category import generate, half_liberation_generators, named_category

    bound = degree + 4 if bound is None else bound
    pool = [PoolEntry(v.name, vertex_category(v.category_name, degree)) for v in CUBE]
    pool.append(PoolEntry("ON*", generate(half_liberation_generators(), degree, bound, budget=budget, cache=cache, name="ON*")))
    pool.append(PoolEntry("SN", named_category("P", degree)))
    pool.append(PoolEntry("SN+", named_category("NC", degree)))
    return pool
