"""New limit spaces from old: initial and final constructions.

Initial structures (products, subspaces, and the general form over any map
family) make a generator converge exactly when every image does; on finite
closed spaces that pins the maximal generator to an intersection of
preimages.  Final constructions (disjoint unions, quotients) push structure
forward.  Both quotient flavours are implemented: the limit quotient, and the
ultrafilter-tested quotient natural to pseudotopological spaces; on finite
carriers they coincide, which the test suite checks rather than assumes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (
    Carrier,
    LimitSpace,
    PointMap,
    ResourceLimit,
    close,
    is_continuous,
    mask_bits,
    RawConvergenceTable,
)

PRODUCT_POINT_BOUND = 10 ** 6
FUNCTION_SPACE_BOUND = 4096

UNIT = LimitSpace(Carrier(("unit",)), (1,))


def product(spaces: list[LimitSpace],
            bound: int = PRODUCT_POINT_BOUND) -> tuple[LimitSpace, list[PointMap]]:
    """Product space plus its projections.

    Point names are the comma-joined factor names; the maximal generator at a
    tuple is the product of the factor maximal generators.  The empty product
    is the one-point space.
    """
    if not spaces:
        return UNIT, []
    total = 1
    for s in spaces:
        total *= len(s)
        if total > bound:
            raise ResourceLimit(f"product would exceed {bound} points")
    for s in spaces:
        for name in s.carrier.points:
            if "," in name:
                raise ValueError("product factor names must not contain ','")
    combos = list(itertools.product(*(range(len(s)) for s in spaces)))
    names = tuple(
        ",".join(s.carrier.points[i] for s, i in zip(spaces, combo))
        for combo in combos
    )
    c = Carrier(names)
    pos = {combo: k for k, combo in enumerate(combos)}
    vmax = []
    for combo in combos:
        v = 0
        for other in itertools.product(*(mask_bits(s.vmax[i])
                                         for s, i in zip(spaces, combo))):
            v |= 1 << pos[other]
        vmax.append(v)
    prod = LimitSpace(c, tuple(vmax))
    projections = [
        PointMap(prod, s, tuple(combo[axis] for combo in combos))
        for axis, s in enumerate(spaces)
    ]
    return prod, projections


def subspace(s: LimitSpace, mask: int) -> LimitSpace:
    """Restriction to a subset: V_M(x) = V(x) with points outside M removed."""
    s.carrier.check_mask(mask)
    kept = list(mask_bits(mask))
    c = Carrier(tuple(s.carrier.points[i] for i in kept))
    new_pos = {i: k for k, i in enumerate(kept)}
    vmax = []
    for i in kept:
        v = 0
        for j in mask_bits(s.vmax[i] & mask):
            v |= 1 << new_pos[j]
        vmax.append(v)
    return LimitSpace(c, tuple(vmax))


def inclusion_map(s: LimitSpace, mask: int) -> PointMap:
    sub = subspace(s, mask)
    return PointMap(sub, s, tuple(mask_bits(mask)))


def disjoint_union(spaces: list[LimitSpace]) -> LimitSpace:
    """Tagged union; each summand keeps its own structure."""
    names = []
    vmax = []
    offset = 0
    for tag, s in enumerate(spaces):
        names.extend(f"{tag}:{p}" for p in s.carrier.points)
        vmax.extend(v << offset for v in s.vmax)
        offset += len(s)
    return LimitSpace(Carrier(tuple(names)), tuple(vmax))


@dataclass(frozen=True)
class QuotientSpec:
    """A surjection from a limit space onto a target carrier."""

    source: LimitSpace
    target: Carrier
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != len(self.source):
            raise ValueError("projection must be total on the source")
        hit = 0
        for j in self.table:
            if not 0 <= j < len(self.target):
                raise ValueError("projection image outside the target carrier")
            hit |= 1 << j
        if hit != self.target.full_mask:
            raise ValueError("quotient projection must be surjective")

    def image_mask(self, mask: int) -> int:
        m = 0
        for i in mask_bits(mask):
            m |= 1 << self.table[i]
        return m

    def preimage(self, j: int) -> list[int]:
        return [i for i, t in enumerate(self.table) if t == j]


def quotient_spec_from_names(source: LimitSpace, table: dict[str, str]) -> QuotientSpec:
    targets = sorted(set(table.values()))
    tc = Carrier(tuple(targets))
    return QuotientSpec(
        source, tc, tuple(tc.index[table[p]] for p in source.carrier.points)
    )


def quotient_limit(spec: QuotientSpec) -> LimitSpace:
    """Final limit structure for a surjection.

    A generator converges at y when it sits under a finite union of images of
    generators convergent at preimages of y; the maximal one is the union of
    the images of all maximal generators over the fibre.
    """
    vmax = []
    for j in range(len(spec.target)):
        v = 0
        for i in spec.preimage(j):
            v |= spec.image_mask(spec.source.vmax[i])
        vmax.append(v)
    return LimitSpace(spec.target, tuple(vmax))


def quotient_pstop(spec: QuotientSpec) -> LimitSpace:
    """Quotient by the ultrafilter test.

    A generator A converges at y when every ultrafilter refining [A] absorbs
    the image of some filter convergent over the fibre.  Finite ultrafilters
    are point filters, so membership is tested point by point: a belongs to
    the maximal generator at y iff some fibre point x has a in the image of
    V(x).
    """
    n = len(spec.target)
    vmax = [0] * n
    for j in range(n):
        fibre = spec.preimage(j)
        for a in range(n):
            if any(spec.image_mask(spec.source.vmax[i]) >> a & 1 for i in fibre):
                vmax[j] |= 1 << a
    return LimitSpace(spec.target, tuple(vmax))


def quotient_map(spec: QuotientSpec, quotient: LimitSpace) -> PointMap:
    return PointMap(spec.source, quotient, spec.table)


def initial_structure(c: Carrier,
                      maps: list[tuple[tuple[int, ...], LimitSpace]]) -> LimitSpace:
    """Coarsest structure making every listed map continuous.

    A generator converges at x iff each image converges at the image of x, so
    the maximal generator is the intersection of the preimages of the factor
    maximal generators; the empty family yields the indiscrete space.
    """
    vmax = []
    for i in range(len(c)):
        v = c.full_mask
        for table, cod in maps:
            target = cod.vmax[table[i]]
            pre = 0
            for k in range(len(c)):
                if target >> table[k] & 1:
                    pre |= 1 << k
            v &= pre
        vmax.append(v | (1 << i))
    return LimitSpace(c, tuple(vmax))


@dataclass(frozen=True)
class FunctionSpace:
    """All continuous maps between two finite spaces, as a limit space.

    A set H of maps converges to f when every evaluation of H against a
    convergent filter lands in a generator convergent at f(x); at finite
    scale the maximal such H is the set of maps h with h(V(x)) inside
    V(f(x)) for all x.
    """

    domain: LimitSpace
    codomain: LimitSpace
    maps: tuple[PointMap, ...]
    space: LimitSpace


def _map_name(domain: LimitSpace, table: tuple[int, ...], codomain: LimitSpace) -> str:
    return "|".join(
        f"{p}>{codomain.carrier.points[j]}"
        for p, j in zip(domain.carrier.points, table)
    )


def function_space(x: LimitSpace, y: LimitSpace,
                   bound: int = FUNCTION_SPACE_BOUND) -> FunctionSpace:
    if len(y) ** len(x) > bound:
        raise ResourceLimit(f"function space would enumerate more than {bound} maps")
    maps = []
    for table in itertools.product(range(len(y)), repeat=len(x)):
        m = PointMap(x, y, table)
        if is_continuous(m):
            maps.append(m)
    names = tuple(_map_name(x, m.table, y) for m in maps)
    c = Carrier(names)
    vmax = []
    for f in maps:
        h = 0
        for k, g in enumerate(maps):
            if all(
                g.image_mask(x.vmax[i]) & ~y.vmax[f.table[i]] == 0
                for i in range(len(x))
            ):
                h |= 1 << k
        vmax.append(h)
    return FunctionSpace(x, y, tuple(maps), LimitSpace(c, tuple(vmax)))


def evaluation_map(fs: FunctionSpace) -> PointMap:
    """Evaluation on function-space x domain, for the cartesian-closure check."""
    prod, _ = product([fs.space, fs.domain])
    table = []
    for name in prod.carrier.points:
        fname, pname = name.split(",", 1)
        f = fs.maps[fs.space.carrier.index[fname]]
        table.append(f.table[fs.domain.carrier.index[pname]])
    return PointMap(prod, fs.codomain, tuple(table))


def modification_pstop(space_or_raw) -> LimitSpace:
    """Pseudotopological modification; the identity on finite closed spaces."""
    if isinstance(space_or_raw, RawConvergenceTable):
        return close(space_or_raw)
    return LimitSpace(space_or_raw.carrier, space_or_raw.vmax)


def modification_pretop(space_or_raw) -> LimitSpace:
    """Pretopological modification; also the identity at finite scale."""
    return modification_pstop(space_or_raw)
