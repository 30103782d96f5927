"""Covering atlases: verification, chart search, and constructive lifting.

An atlas packages a candidate covering map with the data the abstract
definition merely asserts to exist: a covering system of the base and, per
cover set, a trivialization identifying the preimage with cover-set x fiber.
The verifier checks every chart is a genuine homeomorphism of finite spaces
and that fibers are discrete; lifting of walks, of rewrite certificates, and
of whole maps is then sheet transport through the charts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    LimitSpace,
    PointMap,
    discrete_space,
    is_continuous,
    mask_bits,
    mask_size,
)
from .connectivity import (
    LocalCover,
    components_within,
    is_connected,
    is_local_cover,
)
from .constructions import product, subspace
from . import paths
from .paths import (
    BacktrackDelete,
    BacktrackInsert,
    Fill,
    FlagMove,
    HomotopySystem,
    Move,
    Walk,
    constant_walk,
    pushforward,
)


class AtlasDefect(RuntimeError):
    """A lift could not proceed: the atlas lacks a chart for a transition."""


@dataclass(frozen=True)
class Chart:
    """Sheet assignment over one cover set: fiber label per preimage point."""

    set_index: int
    sheet: tuple[tuple[int, int], ...]  # (point of E, fiber label index)

    @property
    def sheet_of(self) -> dict[int, int]:
        return dict(self.sheet)


@dataclass(frozen=True)
class CoveringAtlas:
    """A candidate covering map with explicit per-chart trivializations.

    fiber_space declares the fiber structure used on the chart codomains;
    None means discrete, the covering-map case.
    """

    map: PointMap
    cover: LocalCover
    fiber: tuple[str, ...]
    charts: tuple[Chart, ...]
    fiber_space: LimitSpace | None = None

    @property
    def total(self) -> LimitSpace:
        return self.map.domain

    @property
    def base(self) -> LimitSpace:
        return self.map.codomain

    def chart_for(self, points_mask: int) -> Chart | None:
        """First chart whose cover set contains the given base points."""
        for chart in self.charts:
            if points_mask & ~self.cover.sets[chart.set_index] == 0:
                return chart
        return None

    def mate(self, chart: Chart, e: int, b: int) -> int:
        """The point of the chart sharing e's sheet over base point b."""
        s = chart.sheet_of[e]
        for e2, s2 in chart.sheet:
            if s2 == s and self.map.table[e2] == b:
                return e2
        raise AtlasDefect(
            f"chart {chart.set_index} has no point over "
            f"{self.base.carrier.points[b]} on sheet {self.fiber[s]}")


@dataclass
class AtlasReport:
    map_continuous: bool = True
    surjective: bool = True
    cover_ok: bool = True
    charts_ok: bool = True
    fibers_discrete: bool = True
    defects: list[str] = field(default_factory=list)

    @property
    def locally_trivial(self) -> bool:
        return (self.map_continuous and self.surjective
                and self.cover_ok and self.charts_ok)

    @property
    def ok(self) -> bool:
        return self.locally_trivial and self.fibers_discrete


def _fiber_space(a: CoveringAtlas) -> LimitSpace:
    return a.fiber_space if a.fiber_space is not None else discrete_space(a.fiber)


def verify_atlas(a: CoveringAtlas) -> AtlasReport:
    """Check every atlas invariant; defects are results, not exceptions."""
    rep = AtlasReport()
    p = a.map
    base, total = a.base, a.total

    if not is_continuous(p):
        rep.map_continuous = False
        rep.defects.append("projection is not continuous")
    hit = 0
    for j in p.table:
        hit |= 1 << j
    if hit != base.carrier.full_mask:
        rep.surjective = False
        rep.defects.append("projection is not surjective")
    if not is_local_cover(base, LocalCover(a.cover.sets, base.carrier.full_mask)):
        rep.cover_ok = False
        rep.defects.append("chart family is not a covering system of the base")
    if len(a.charts) != len(a.cover.sets):
        rep.charts_ok = False
        rep.defects.append("need exactly one chart per cover set")
    if (a.fiber_space is not None
            and a.fiber_space.carrier.points != a.fiber):
        rep.charts_ok = False
        rep.defects.append("declared fiber space must be carried by the "
                           "fiber labels")
        return rep

    fib = _fiber_space(a)
    for chart in a.charts:
        u = a.cover.sets[chart.set_index]
        pre = p.preimage_mask(u)
        sheet = chart.sheet_of
        if set(sheet) != set(mask_bits(pre)):
            rep.charts_ok = False
            rep.defects.append(
                f"chart {chart.set_index}: table does not match the preimage")
            continue
        pairs = {(p.table[e], s) for e, s in sheet.items()}
        if len(pairs) != len(sheet) or len(sheet) != mask_size(u) * len(a.fiber):
            rep.charts_ok = False
            rep.defects.append(f"chart {chart.set_index}: not a bijection")
            continue
        esub = subspace(total, pre)
        bsub = subspace(base, u)
        prod, _ = product([bsub, fib])
        fwd_table = []
        for e in mask_bits(pre):
            name = f"{base.carrier.points[p.table[e]]},{a.fiber[sheet[e]]}"
            fwd_table.append(prod.carrier.index[name])
        fwd = PointMap(esub, prod, tuple(fwd_table))
        inv_table = [0] * len(prod)
        for k, e in enumerate(mask_bits(pre)):
            inv_table[fwd_table[k]] = k
        inv = PointMap(prod, esub, tuple(inv_table))
        if not is_continuous(fwd):
            rep.charts_ok = False
            rep.defects.append(f"chart {chart.set_index}: trivialization "
                               "is not continuous")
        if not is_continuous(inv):
            rep.charts_ok = False
            rep.defects.append(f"chart {chart.set_index}: inverse trivialization "
                               "is not continuous")

    for b in range(len(base)):
        fibre = p.preimage_mask(1 << b)
        for e in mask_bits(fibre):
            if total.vmax[e] & fibre & ~(1 << e):
                rep.fibers_discrete = False
                rep.defects.append(
                    f"fiber over {base.carrier.points[b]} is not discrete "
                    f"at {total.carrier.points[e]}")
    return rep


def identity_atlas(space: LimitSpace) -> CoveringAtlas:
    n = len(space)
    chart = Chart(0, tuple((e, 0) for e in range(n)))
    return CoveringAtlas(
        PointMap(space, space, tuple(range(n))),
        LocalCover((space.carrier.full_mask,), space.carrier.full_mask),
        ("0",), (chart,))


def trivial_atlas(base: LimitSpace, fiber_space: LimitSpace) -> CoveringAtlas:
    """Projection of base x fiber onto base, trivialized over the whole base."""
    prod, projections = product([base, fiber_space])
    p = projections[0]
    q = projections[1]
    chart = Chart(0, tuple((e, q.table[e]) for e in range(len(prod))))
    return CoveringAtlas(
        p, LocalCover((base.carrier.full_mask,), base.carrier.full_mask),
        fiber_space.carrier.points, (chart,), fiber_space)


def search_atlas(p: PointMap) -> CoveringAtlas | None:
    """Best-effort chart search for a candidate covering map.

    Candidate cover sets are the maximal generators of the base; a set is
    usable when every component of its preimage projects bijectively onto it,
    and the components then serve as sheets.  Returns None when no subfamily
    of usable sets covers the base with a uniform sheet count, or when the
    assembled atlas fails verification.
    """
    if not is_continuous(p):
        raise ValueError("search_atlas requires a continuous map")
    hit = 0
    for j in p.table:
        hit |= 1 << j
    base = p.codomain
    if hit != base.carrier.full_mask:
        raise ValueError("search_atlas requires a surjective map")

    usable: list[tuple[int, list[int]]] = []
    for u in dict.fromkeys(base.vmax):
        pre = p.preimage_mask(u)
        comps = components_within(p.domain, pre)
        if all(p.image_mask(c) == u and mask_size(c) == mask_size(u)
               for c in comps):
            usable.append((u, comps))

    by_count: dict[int, list[tuple[int, list[int]]]] = {}
    for u, comps in usable:
        by_count.setdefault(len(comps), []).append((u, comps))
    for count in sorted(by_count):
        family = by_count[count]
        sets = tuple(u for u, _ in family)
        if not is_local_cover(base, LocalCover(sets, base.carrier.full_mask)):
            continue
        charts = []
        for ci, (u, comps) in enumerate(family):
            sheet = []
            for s, comp in enumerate(sorted(comps)):
                sheet.extend((e, s) for e in mask_bits(comp))
            charts.append(Chart(ci, tuple(sorted(sheet))))
        atlas = CoveringAtlas(
            p, LocalCover(sets, base.carrier.full_mask),
            tuple(str(i) for i in range(count)), tuple(charts))
        if verify_atlas(atlas).ok:
            return atlas
    return None


# ---------------------------------------------------------------------------
# lifting


def lift_path(a: CoveringAtlas, w: Walk, e0: str) -> Walk:
    """The lift of a walk, transported sheet by sheet through the charts."""
    p = a.map
    if w.space != a.base:
        raise ValueError("walk does not live in the base of the atlas")
    e = a.total.carrier.index[e0]
    if p.table[e] != w.values[0]:
        raise ValueError("starting point does not lie over the walk's start")
    values = [e]
    for i in range(1, len(w.values)):
        b1, b2 = w.values[i - 1], w.values[i]
        chart = a.chart_for(1 << b1 | 1 << b2)
        if chart is None:
            raise AtlasDefect(
                f"no chart contains the transition "
                f"{a.base.carrier.points[b1]} -> {a.base.carrier.points[b2]}")
        e = a.mate(chart, values[-1], b2)
        values.append(e)
    lifted = Walk(a.total, tuple(values), w.flags)
    if paths.walk_defect(lifted) is not None:
        raise AtlasDefect("lift is not a valid walk; the atlas is defective")
    return lifted


def lift_homotopy(a: CoveringAtlas, moves: list[Move], lift1: Walk) -> Walk:
    """Transport a rewrite certificate upstairs, move by move.

    Each move acts inside a single chart, so it lifts along the sheet of the
    affected segment; the result is the lift of the certificate's target with
    the same starting point as lift1.
    """
    down = pushforward(lift1, a.map)
    up = lift1
    for mv in moves:
        if isinstance(mv, FlagMove):
            up_mv: Move = mv
        elif isinstance(mv, BacktrackDelete):
            up_mv = mv
        elif isinstance(mv, BacktrackInsert):
            base_pt = down.values[mv.after]
            chart = a.chart_for(1 << base_pt | 1 << mv.point)
            if chart is None:
                raise AtlasDefect("backtrack insertion spans no single chart")
            up_mv = BacktrackInsert(
                mv.after, a.mate(chart, up.values[mv.after], mv.point))
        elif isinstance(mv, Fill):
            touched = 0
            for b in mv.values + down.values[mv.lo:mv.hi + 1]:
                touched |= 1 << b
            chart = a.chart_for(touched)
            if chart is None:
                raise AtlasDefect("fill spans no single chart; the homotopy "
                                  "cover must refine the atlas cover there")
            anchor = up.values[mv.lo]
            up_vals = tuple(a.mate(chart, anchor, b) for b in mv.values)
            if up_vals[-1] != up.values[mv.hi]:
                raise AtlasDefect("fill leaves its sheet; atlas cannot lift it")
            up_mv = Fill(mv.lo, mv.hi, mv.cover_index, up_vals, mv.flags)
        else:
            raise TypeError(f"unknown move {mv!r}")
        try:
            up = paths.apply_move(up, up_mv)
        except ValueError as exc:
            raise AtlasDefect(f"move does not lift: {exc}") from exc
        down = paths.apply_move(down, mv)
    if down.start == pushforward(lift1, a.map).start:
        independent = lift_path(a, down, a.total.carrier.points[lift1.start])
        if independent.end != up.end:
            raise AtlasDefect("transported lift disagrees with direct lifting")
    return up


def has_unique_path_lifting(a: CoveringAtlas) -> bool:
    """No fiber admits a one-step walk between distinct points."""
    p = a.map
    for b in range(len(a.base)):
        fibre = p.preimage_mask(1 << b)
        for e in mask_bits(fibre):
            for e2 in mask_bits(fibre & ~(1 << e)):
                if (paths.step_valid(a.total, e, e2, paths.LEFT)
                        or paths.step_valid(a.total, e, e2, paths.RIGHT)):
                    return False
    return True


@dataclass
class LiftMapResult:
    status: str  # "lifted" / "obstructed" / "indeterminate"
    map: PointMap | None = None
    obstruction: Walk | None = None
    detail: str = ""


def _adjacent(space: LimitSpace, a: int, b: int) -> bool:
    return (paths.step_valid(space, a, b, paths.LEFT)
            or paths.step_valid(space, a, b, paths.RIGHT))


def _one_step(space: LimitSpace, a: int, b: int) -> Walk:
    f = paths.canonical_flag(space, a, b)
    return Walk(space, (a, b), (f,))


def lift_map(a: CoveringAtlas, f: PointMap, y0: str, e0: str,
             sys: HomotopySystem | None = None) -> LiftMapResult:
    """Lift a map through the atlas by transporting walks from the basepoint.

    Every point of the (connected) domain gets the endpoint of the lift of
    its image walk; well-definedness is checked on the difference loop of
    every non-tree adjacency, whose lift must close up.  A non-closing loop
    is the obstruction; if the rewrite engine cannot certify that loop
    against the constant walk within budget, the verdict is indeterminate.
    """
    y_space = f.domain
    if f.codomain != a.base:
        raise ValueError("map does not land in the base of the atlas")
    if not is_connected(y_space):
        raise ValueError("lift_map requires a connected domain")
    if not is_continuous(f):
        raise ValueError("lift_map requires a continuous map")
    y0i = y_space.carrier.index[y0]
    e0i = a.total.carrier.index[e0]
    if a.map.table[e0i] != f.table[y0i]:
        raise ValueError("basepoints are incompatible with the projection")
    if sys is None:
        sys = HomotopySystem(a.base, a.cover)

    n = len(y_space)
    tree: dict[int, Walk] = {y0i: constant_walk(y_space, y0)}
    order = [y0i]
    for y in order:
        for z in range(n):
            if z not in tree and _adjacent(y_space, y, z):
                tree[z] = paths.concat(tree[y], _one_step(y_space, y, z))
                order.append(z)

    e0_name = a.total.carrier.points[e0i]
    lifted_end: dict[int, int] = {}
    for y, walk in tree.items():
        down = pushforward(walk, f)
        lifted_end[y] = lift_path(a, down, e0_name).end

    for y in range(n):
        for z in range(y + 1, n):
            if not _adjacent(y_space, y, z):
                continue
            loop_y = paths.concat(paths.concat(tree[y], _one_step(y_space, y, z)),
                                  paths.reverse(tree[z]))
            down = pushforward(loop_y, f)
            lifted = lift_path(a, down, e0_name)
            if lifted.end == lifted.start:
                continue
            verdict = paths.homotopic(down, constant_walk(
                a.base, a.base.carrier.points[down.start]), sys)
            if verdict.answer == "no":
                return LiftMapResult("obstructed", obstruction=down,
                                     detail="loop lifts to an open walk")
            return LiftMapResult(
                "indeterminate", obstruction=down,
                detail="open lift, but the rewrite engine could not certify "
                       f"the loop (verdict {verdict.answer})")

    table = tuple(lifted_end[y] for y in range(n))
    lifted_map = PointMap(y_space, a.total, table)
    if any(a.map.table[table[y]] != f.table[y] for y in range(n)):
        return LiftMapResult("indeterminate",
                             detail="internal defect: lift does not project back")
    if not is_continuous(lifted_map):
        return LiftMapResult("indeterminate",
                             detail="internal defect: lift is not continuous")
    return LiftMapResult("lifted", map=lifted_map)

