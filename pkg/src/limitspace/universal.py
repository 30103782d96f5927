"""Radius-bounded construction of the universal cover.

The points are rewrite classes of walks from a basepoint, discovered by
breadth-first extension and merged through the homotopy engine's normal
forms.  The convergence structure on classes is generated chart-locally: a
class converges into the classes obtained by extending it one step towards
the maximal generator downstairs, inside a cover set around its endpoint.
The whole object is in general infinite, so fragments carry explicit
interior/boundary bookkeeping: a class is interior when it is certified, lies
within the radius, and has all its one-step extensions explored.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .core import Carrier, LimitSpace, PointMap, is_continuous, mask_bits, mask_size
from .connectivity import LocalCover, is_connected
from . import paths
from .paths import HomotopySystem, Walk, constant_walk, normalize


@dataclass(frozen=True)
class WalkClass:
    """A rewrite class of walks from the basepoint, named by its normal form."""

    walk: Walk
    certified: bool

    @property
    def endpoint(self) -> int:
        return self.walk.end

    @property
    def key(self):
        return self.walk.key()


@dataclass
class CoverFragment:
    """A radius-bounded portion of the universal cover.

    classes are sorted by normal-form key; ext[i] maps a downstairs endpoint
    neighbor to the extended class index (None when unexplored, which exiles
    the class to the boundary).
    """

    space: LimitSpace
    basepoint: int
    sys: HomotopySystem
    radius: int
    classes: list[WalkClass]
    ext: list[dict[int, int | None]]
    vmax: tuple[int, ...] = field(default=())
    interior: int = 0
    boundary: int = 0
    _space_cache: LimitSpace | None = field(default=None, repr=False)

    def class_index(self, w: Walk) -> int | None:
        key = w.key()
        for i, c in enumerate(self.classes):
            if c.key == key:
                return i
        return None

    @property
    def class_names(self) -> tuple[str, ...]:
        width = len(str(max(len(self.classes) - 1, 0)))
        return tuple(f"w{idx:0{width}d}" for idx in range(len(self.classes)))

    def fragment_space(self) -> LimitSpace:
        if self._space_cache is None:
            self._space_cache = LimitSpace(Carrier(self.class_names), self.vmax)
        return self._space_cache

    def projection(self) -> PointMap:
        """Endpoint evaluation on the whole fragment."""
        return PointMap(self.fragment_space(), self.space,
                        tuple(c.endpoint for c in self.classes))


def _adjacent_points(space: LimitSpace, e: int):
    for z in range(len(space)):
        if z != e and paths.canonical_flag(space, e, z) is not None:
            yield z


def build_fragment(space: LimitSpace, x0: str, sys: HomotopySystem,
                   radius: int) -> CoverFragment:
    """Grow the class space outward from the constant walk at the basepoint.

    Classes with normal forms up to the radius are expanded; their one-step
    extensions may land one ring further out, which is recorded but not
    expanded.  Budget exhaustion during a merge leaves the class uncertified
    rather than merged or split silently.
    """
    if not is_connected(space):
        raise ValueError("the universal cover is built over a connected space")
    if sys.space != space:
        raise ValueError("homotopy system belongs to a different space")
    x0i = space.carrier.index[x0]

    r0 = normalize(constant_walk(space, x0), sys)
    classes: list[WalkClass] = [WalkClass(r0.walk, r0.certified)]
    index: dict = {r0.walk.key(): 0}
    ext: list[dict[int, int | None]] = [{}]
    queue = deque([0])
    while queue:
        ci = queue.popleft()
        cls = classes[ci]
        expand = len(cls.walk) <= radius
        for z in _adjacent_points(space, cls.endpoint):
            step = Walk(space, (cls.endpoint, z),
                        (paths.canonical_flag(space, cls.endpoint, z),))
            r = normalize(paths.concat(cls.walk, step), sys)
            key = r.walk.key()
            if key in index:
                ext[ci][z] = index[key]
                continue
            if not expand:
                ext[ci][z] = None  # unexplored ring beyond the radius
                continue
            index[key] = len(classes)
            classes.append(WalkClass(r.walk, r.certified))
            ext.append({})
            ext[ci][z] = index[key]
            if len(r.walk) <= radius:
                queue.append(index[key])

    order = sorted(range(len(classes)), key=lambda i: classes[i].key)
    rank = {old: new for new, old in enumerate(order)}
    classes = [classes[i] for i in order]
    ext = [{z: (None if t is None else rank[t]) for z, t in ext[i].items()}
           for i in order]

    vmax = []
    interior = boundary = 0
    for i, c in enumerate(classes):
        v = 1 << i
        complete = True
        for z in _adjacent_points(space, c.endpoint):
            target = ext[i].get(z)
            if target is None:
                complete = False
                continue
            if space.vmax[c.endpoint] >> z & 1:
                v |= 1 << target
        vmax.append(v)
        if c.certified and len(c.walk) <= radius and complete:
            interior |= 1 << i
        else:
            boundary |= 1 << i

    return CoverFragment(space, x0i, sys, radius, classes, ext,
                         tuple(vmax), interior, boundary)


def phi_bar(frag: CoverFragment) -> PointMap:
    """Endpoint projection restricted to the interior of the fragment."""
    from .constructions import subspace

    fs = frag.fragment_space()
    sub = subspace(fs, frag.interior)
    table = tuple(frag.classes[i].endpoint for i in mask_bits(frag.interior))
    return PointMap(sub, frag.space, table)


# ---------------------------------------------------------------------------
# sheets and verification


def _sheet_through(frag: CoverFragment, start: int, cover_set: int) -> tuple[int, bool]:
    """Closure of a class under extensions inside one cover set.

    Returns (mask of classes, complete) where complete means no unexplored
    extension was encountered.
    """
    inside = [i for i, c in enumerate(frag.classes)
              if cover_set >> c.endpoint & 1]
    forward = {i: [] for i in inside}
    backward = {i: [] for i in inside}
    complete_at = {}
    for i in inside:
        ok = True
        for z in _adjacent_points(frag.space, frag.classes[i].endpoint):
            if not cover_set >> z & 1:
                continue
            target = frag.ext[i].get(z)
            if target is None:
                ok = False
                continue
            forward[i].append(target)
            if target in backward:
                backward[target].append(i)
        complete_at[i] = ok
    seen = 1 << start
    queue = deque([start])
    complete = complete_at[start]
    while queue:
        i = queue.popleft()
        complete = complete and complete_at[i]
        for j in forward[i] + backward[i]:
            if j in complete_at and not seen >> j & 1:
                seen |= 1 << j
                queue.append(j)
    return seen, complete


def fragment_sheets(frag: CoverFragment) -> list[list[tuple[int, bool]]]:
    """Per cover set, the distinct sheets (class masks) of its preimage.

    The sheet through every class is computed; overlapping but unequal
    sheets are kept distinct so the verifier can report the defect.
    """
    out = []
    for u in frag.sys.cover.sets:
        sheets: list[tuple[int, bool]] = []
        for i, c in enumerate(frag.classes):
            if not u >> c.endpoint & 1:
                continue
            sheet = _sheet_through(frag, i, u)
            if sheet not in sheets:
                sheets.append(sheet)
        out.append(sheets)
    return out


def fragment_cover(frag: CoverFragment) -> LocalCover:
    """The lifted covering system of the fragment: all sheets over all sets."""
    sets = []
    for sheets in fragment_sheets(frag):
        for mask, _ in sheets:
            if mask not in sets:
                sets.append(mask)
    return LocalCover(tuple(sets), frag.fragment_space().carrier.full_mask)


def fragment_atlas(frag: CoverFragment):
    """Best-effort atlas over the base, ragged at the explored rim.

    Chart tables assign a sheet index to every class over each cover set, so
    lifting works wherever the fragment is complete and raises at the rim.
    """
    from .covering import Chart, CoveringAtlas

    all_sheets = fragment_sheets(frag)
    count = max((len(s) for s in all_sheets), default=1)
    charts = []
    for ci, sheets in enumerate(all_sheets):
        table = []
        for s, (mask, _) in enumerate(sorted(sheets)):
            table.extend((i, s) for i in mask_bits(mask))
        charts.append(Chart(ci, tuple(sorted(table))))
    return CoveringAtlas(frag.projection(), frag.sys.cover,
                         tuple(str(i) for i in range(count)), tuple(charts))


@dataclass
class UniversalReport:
    charts_ok: bool = True
    sheets_checked: int = 0
    sheets_skipped: int = 0
    sheet_defects: list[str] = field(default_factory=list)
    projection_continuous: bool = True
    fibers_discrete: bool = True
    loops_trivial: bool = True
    loops_checked: int = 0
    loop_defects: list[str] = field(default_factory=list)
    path_connected: bool = True
    stipulating_sets: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.charts_ok and self.projection_continuous
                and self.fibers_discrete and self.loops_trivial
                and self.path_connected)


def _nonbacktracking_loops(space: LimitSpace, within: int, max_len: int):
    """Closed walks with no immediate reversal, inside a point mask."""
    for start in mask_bits(within):
        stack = [(start,)]
        while stack:
            vals = stack.pop()
            if len(vals) > 1 and vals[-1] == start:
                yield vals
                continue
            if len(vals) > max_len:
                continue
            for z in mask_bits(within):
                if z == vals[-1]:
                    continue
                if len(vals) > 1 and z == vals[-2]:
                    continue
                if paths.canonical_flag(space, vals[-1], z) is None:
                    continue
                stack.append(vals + (z,))


def verify_universal(frag: CoverFragment, loop_len: int = 16) -> UniversalReport:
    """Check the fragment behaves like a universal cover on its interior.

    Per cover set, every complete sheet must project bijectively onto the
    set with a continuous inverse, and distinct sheets must be disjoint; the
    endpoint projection must be continuous with discrete fibers; every
    non-backtracking interior loop up to loop_len must normalize to the
    constant walk under the lifted covering system.  A cover set whose
    subspace already contains a non-backtracking loop stipulates the
    contractibility it is supposed to witness, which is flagged.
    """
    rep = UniversalReport()
    space = frag.space
    fs = frag.fragment_space()

    for ci, sheets in enumerate(fragment_sheets(frag)):
        u = frag.sys.cover.sets[ci]
        for mask, complete in sheets:
            if not complete:
                rep.sheets_skipped += 1
                continue
            rep.sheets_checked += 1
            endpoints = [frag.classes[i].endpoint for i in mask_bits(mask)]
            if sorted(endpoints) != list(mask_bits(u)):
                rep.charts_ok = False
                rep.sheet_defects.append(
                    f"set {ci}: sheet does not project bijectively")
                continue
            back = {frag.classes[i].endpoint: i for i in mask_bits(mask)}
            for b in mask_bits(u):
                for z in mask_bits(space.vmax[b] & u):
                    if not frag.vmax[back[b]] >> back[z] & 1:
                        rep.charts_ok = False
                        rep.sheet_defects.append(
                            f"set {ci}: inverse over "
                            f"{space.carrier.points[b]} not continuous")
        for (m1, _), (m2, _) in itertools.combinations(sheets, 2):
            if m1 & m2:  # distinct sheets must be fully disjoint
                rep.charts_ok = False
                rep.sheet_defects.append(f"set {ci}: sheets overlap without "
                                         "coinciding")

    rep.projection_continuous = is_continuous(frag.projection())

    for x in range(len(space)):
        fibre = 0
        for i, c in enumerate(frag.classes):
            if c.endpoint == x:
                fibre |= 1 << i
        for i in mask_bits(fibre):
            if frag.vmax[i] & fibre & ~(1 << i):
                rep.fibers_discrete = False

    up_sys = HomotopySystem(fs, fragment_cover(frag),
                            budget=frag.sys.budget, growth=frag.sys.growth)
    for vals in _nonbacktracking_loops(fs, frag.interior, loop_len):
        rep.loops_checked += 1
        loop = paths.walk_from_names(fs, [fs.carrier.points[v] for v in vals])
        r = normalize(loop, up_sys)
        if len(r.walk) != 0:
            rep.loops_trivial = False
            rep.loop_defects.append("->".join(
                fs.carrier.points[v] for v in vals))

    interior_names = [fs.carrier.points[i] for i in mask_bits(frag.interior)]
    if interior_names:
        from .constructions import subspace

        sub = subspace(fs, frag.interior)
        rep.path_connected = len(paths.path_components(sub)) <= 1

    for ci, u in enumerate(frag.sys.cover.sets):
        if any(True for _ in _nonbacktracking_loops(space, u, mask_size(u) + 1)):
            rep.stipulating_sets.append(ci)
    return rep


# ---------------------------------------------------------------------------
# loop classes at the basepoint


@dataclass
class Pi1Report:
    loop_classes: list[WalkClass]
    generators: list[WalkClass]
    verdict: str  # "trivial" / "infinite-cyclic-compatible" / "inconclusive"
    shift_evidence: bool
    uncertified: int


def pi1_probe(space: LimitSpace, x0: str, sys: HomotopySystem,
              max_len: int) -> Pi1Report:
    """Survey loop classes at the basepoint up to a length bound.

    Reports the distinct certified classes, a greedy generating set under
    concatenate-and-normalize closure, and structural evidence only: no group
    presentation is claimed.  Loops never leave the basepoint's component, so
    a disconnected ambient space is restricted to it first.
    """
    if not is_connected(space):
        from .connectivity import components
        from .constructions import subspace

        x0_bit = 1 << space.carrier.index[x0]
        comp = next(m for m in components(space) if m & x0_bit)
        space = subspace(space, comp)
        cover = LocalCover(tuple(u & comp for u in sys.cover.sets if u & comp),
                           comp)
        # reindex cover masks into the subspace carrier
        remap = {i: k for k, i in enumerate(mask_bits(comp))}
        sets = []
        for u in cover.sets:
            m = 0
            for i in mask_bits(u):
                m |= 1 << remap[i]
            sets.append(m)
        sys = HomotopySystem(space, LocalCover(tuple(sets),
                                               space.carrier.full_mask),
                             budget=sys.budget, growth=sys.growth,
                             flag_moves=sys.flag_moves)
    frag = build_fragment(space, x0, sys, max_len)
    x0i = frag.basepoint
    fiber = [c for c in frag.classes if c.endpoint == x0i and len(c.walk) <= max_len]
    uncert = sum(1 for c in fiber if not c.certified)
    fiber = [c for c in fiber if c.certified]
    trivial_key = constant_walk(space, x0).key()

    def closure(gens: list[WalkClass]) -> set:
        known = {trivial_key: constant_walk(space, x0)}
        grew = True
        while grew:
            grew = False
            for w in list(known.values()):
                for g in gens:
                    for gw in (g.walk, paths.reverse(g.walk)):
                        r = normalize(paths.concat(w, gw), sys)
                        if len(r.walk) <= max_len and r.walk.key() not in known:
                            known[r.walk.key()] = r.walk
                            grew = True
        return set(known)

    generators: list[WalkClass] = []
    reached = closure(generators)
    for c in sorted(fiber, key=lambda c: c.key):
        if c.key not in reached:
            generators.append(c)
            reached = closure(generators)

    shift = False
    if len(generators) == 1:
        g = generators[0]
        sigma = {}
        for c in fiber:
            r = normalize(paths.concat(c.walk, g.walk), sys)
            if len(r.walk) <= max_len:
                sigma[c.key] = r.walk.key()
        injective = len(set(sigma.values())) == len(sigma)
        free = all(k != v for k, v in sigma.items())
        fiber_keys = {c.key for c in fiber}
        shift = (injective and free
                 and set(sigma.values()) <= fiber_keys
                 and len(reached & fiber_keys) == len(fiber))

    if uncert:
        verdict = "inconclusive"
    elif not generators:
        verdict = "trivial"
    elif len(generators) == 1 and shift:
        verdict = "infinite-cyclic-compatible"
    else:
        verdict = "inconclusive"
    return Pi1Report(fiber, generators, verdict, shift, uncert)


@dataclass
class TransportEntry:
    source: Walk
    image: Walk
    certified: bool


def basepoint_transport(frag: CoverFragment, w: Walk) -> list[TransportEntry]:
    """Conjugation of basepoint loop classes along a connecting walk.

    Each certified loop class tau at the old basepoint maps to the class of
    reverse(w) * tau * w at the new one; uncertified normalizations are
    reported as such, never silently trusted.
    """
    if w.space != frag.space or w.start != frag.basepoint:
        raise ValueError("transport walk must leave the fragment basepoint")
    out = []
    for c in frag.classes:
        if c.endpoint != frag.basepoint or not c.certified:
            continue
        conj = paths.concat(paths.concat(paths.reverse(w), c.walk), w)
        r = normalize(conj, frag.sys)
        out.append(TransportEntry(c.walk, r.walk, r.certified))
    return out
