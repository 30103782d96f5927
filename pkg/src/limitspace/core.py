"""Finite limit spaces stored as maximal convergent sets.

On a finite carrier every filter is principal: a filter is closed under
finite intersection, so it contains the intersection of all its members,
which is then a smallest member generating the whole filter as its superset
family [A].  All filter algebra below therefore reduces to subset algebra,
and subsets of a carrier are represented as int bitmasks.

A closed convergence structure is determined by one subset V(x) per point:
the convergent generators at x are exactly the nonempty subsets of V(x).
The three limit-structure axioms hold by construction for any table with
x in V(x): the point filter [x] converges, intersections of convergent
filters are generated by unions of their generators (still inside V(x)),
and finer filters are generated by smaller subsets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator


class CarrierMismatch(ValueError):
    """Two objects over different carriers were combined."""


class ResourceLimit(RuntimeError):
    """A construction would exceed its configured size bound."""


# ---------------------------------------------------------------------------
# bitmask helpers


def mask_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_size(mask: int) -> int:
    return bin(mask).count("1")


def subsets_of(mask: int, nonempty: bool = True) -> Iterator[int]:
    """Enumerate submasks of ``mask`` (ascending as integers)."""
    sub = 0
    while True:
        if sub or not nonempty:
            yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


@dataclass(frozen=True)
class Carrier:
    """An ordered finite set of distinct point identifiers.

    The given order is the internal index order; canonical serialization
    sorts identifiers lexicographically instead (see ``documents``).
    """

    points: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = {p: i for i, p in enumerate(self.points)}
        if len(idx) != len(self.points):
            raise ValueError("carrier identifiers must be pairwise distinct")
        object.__setattr__(self, "index", idx)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.points)) - 1

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index[name]
        return m

    def names_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.points[i] for i in mask_bits(mask))

    def check_mask(self, mask: int) -> None:
        if mask < 0 or mask & ~self.full_mask:
            raise ValueError(f"mask {mask:#x} is not a subset of the carrier")


def carrier(*names: str) -> Carrier:
    return Carrier(tuple(names))


# ---------------------------------------------------------------------------
# principal filters


@dataclass(frozen=True)
class PrincipalFilter:
    """The filter [A] of all supersets of a nonempty generator A."""

    carrier: Carrier
    generator: int

    def __post_init__(self):
        if self.generator == 0:
            raise ValueError("a filter generator must be nonempty")
        self.carrier.check_mask(self.generator)

    def members(self) -> Iterator[int]:
        """All sets belonging to the filter, i.e. supersets of the generator."""
        rest = self.carrier.full_mask & ~self.generator
        for extra in subsets_of(rest, nonempty=False):
            yield self.generator | extra

    def names(self) -> tuple[str, ...]:
        return self.carrier.names_of(self.generator)


def point_filter(c: Carrier, name: str) -> PrincipalFilter:
    return PrincipalFilter(c, 1 << c.index[name])


def _same_carrier(f1: PrincipalFilter, f2: PrincipalFilter) -> None:
    if f1.carrier != f2.carrier:
        raise CarrierMismatch("filters live on different carriers")


def filter_meet(f1: PrincipalFilter, f2: PrincipalFilter) -> PrincipalFilter:
    """Filter intersection [A] cap [B] = [A union B]."""
    _same_carrier(f1, f2)
    return PrincipalFilter(f1.carrier, f1.generator | f2.generator)


def is_finer(f1: PrincipalFilter, f2: PrincipalFilter) -> bool:
    """[A] is finer than [B] (contains it) iff A is a subset of B."""
    _same_carrier(f1, f2)
    return f1.generator & ~f2.generator == 0


# ---------------------------------------------------------------------------
# convergence structures


@dataclass(frozen=True)
class RawConvergenceTable:
    """Per point, an arbitrary finite family of generator subsets.

    Nothing is assumed: the family may be empty or violate the axioms.
    ``close`` produces the smallest limit structure containing it.
    """

    carrier: Carrier
    gens: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.gens) != len(self.carrier):
            raise ValueError("one generator family required per point")
        for fam in self.gens:
            for g in fam:
                self.carrier.check_mask(g)


@dataclass(frozen=True)
class LimitSpace:
    """A closed limit structure: per point the maximal convergent generator.

    [A] -> x  iff  A is nonempty and A is a subset of vmax[x].
    """

    carrier: Carrier
    vmax: tuple[int, ...]

    def __post_init__(self):
        if len(self.vmax) != len(self.carrier):
            raise ValueError("one maximal generator required per point")
        for i, v in enumerate(self.vmax):
            self.carrier.check_mask(v)
            if not v >> i & 1:
                raise ValueError(
                    f"point filter must converge: {self.carrier.points[i]!r} "
                    "is missing from its own maximal generator"
                )

    def __len__(self) -> int:
        return len(self.carrier)

    def v(self, name: str) -> tuple[str, ...]:
        return self.carrier.names_of(self.vmax[self.carrier.index[name]])


def space_from_names(points: Iterable[str], vmax: dict[str, Iterable[str]]) -> LimitSpace:
    c = Carrier(tuple(points))
    return LimitSpace(c, tuple(c.mask_of(vmax.get(p, (p,))) | (1 << i)
                               for i, p in enumerate(c.points)))


def discrete_space(points: Iterable[str]) -> LimitSpace:
    c = Carrier(tuple(points))
    return LimitSpace(c, tuple(1 << i for i in range(len(c))))


def indiscrete_space(points: Iterable[str]) -> LimitSpace:
    c = Carrier(tuple(points))
    return LimitSpace(c, tuple(c.full_mask for _ in range(len(c))))


def close(raw: RawConvergenceTable) -> LimitSpace:
    """Smallest limit structure containing a raw table.

    Refinement-closure admits every nonempty subset of a listed generator,
    intersection-closure admits every union of admitted generators, and the
    point filter joins in; the resulting family at x is exactly the nonempty
    subsets of {x} united with all listed generators.
    """
    vmax = []
    for i, fam in enumerate(raw.gens):
        v = 1 << i
        for g in fam:
            v |= g
        vmax.append(v)
    return LimitSpace(raw.carrier, tuple(vmax))


def converges(space: LimitSpace, f: PrincipalFilter, x: str) -> bool:
    if f.carrier != space.carrier:
        raise CarrierMismatch("filter and space live on different carriers")
    return f.generator & ~space.vmax[space.carrier.index[x]] == 0


def neighborhood(space: LimitSpace, x: str) -> PrincipalFilter:
    """The intersection of all filters convergent at x, i.e. [V(x)]."""
    return PrincipalFilter(space.carrier, space.vmax[space.carrier.index[x]])


def is_pretopological(space: LimitSpace) -> bool:
    """Does each neighborhood filter [V(x)] itself converge to x?

    True on every closed finite structure; kept definitional so the collapse
    is a verified fact rather than an assumption.
    """
    return all(
        converges(space, neighborhood(space, p), p) for p in space.carrier.points
    )


def is_pseudotopological(space: LimitSpace) -> bool:
    """Does ultrafilter-detected convergence already imply convergence?

    Ultrafilters on a finite carrier are the point filters, so the check is:
    whenever every point of a nonempty A satisfies [a] -> x, also [A] -> x.
    The largest such A is the set of all point-filter limits at x, so one
    test per point suffices.
    """
    c = space.carrier
    for i, p in enumerate(c.points):
        a = 0
        for j in range(len(c)):
            if converges(space, PrincipalFilter(c, 1 << j), p):
                a |= 1 << j
        if a and not converges(space, PrincipalFilter(c, a), p):
            return False
    return True


# ---------------------------------------------------------------------------
# point maps and continuity


@dataclass(frozen=True)
class PointMap:
    """A total function between the carriers of two limit spaces."""

    domain: LimitSpace
    codomain: LimitSpace
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != len(self.domain):
            raise ValueError("map table must be total on the domain")
        n = len(self.codomain)
        for j in self.table:
            if not 0 <= j < n:
                raise ValueError("map image must lie in the codomain carrier")

    def __call__(self, name: str) -> str:
        return self.codomain.carrier.points[self.table[self.domain.carrier.index[name]]]

    def image_mask(self, mask: int) -> int:
        m = 0
        for i in mask_bits(mask):
            m |= 1 << self.table[i]
        return m

    def preimage_mask(self, mask: int) -> int:
        m = 0
        for i, j in enumerate(self.table):
            if mask >> j & 1:
                m |= 1 << i
        return m


def map_from_names(domain: LimitSpace, codomain: LimitSpace,
                   table: dict[str, str]) -> PointMap:
    ci = codomain.carrier.index
    return PointMap(domain, codomain,
                    tuple(ci[table[p]] for p in domain.carrier.points))


def identity_map(space: LimitSpace) -> PointMap:
    return PointMap(space, space, tuple(range(len(space))))


def compose(g: PointMap, f: PointMap) -> PointMap:
    """The composite g o f."""
    if f.codomain != g.domain:
        raise CarrierMismatch("maps do not compose")
    return PointMap(f.domain, g.codomain, tuple(g.table[j] for j in f.table))


def filter_image(f: PrincipalFilter, m: PointMap) -> PrincipalFilter:
    """The image filter, generated by the pointwise image of the generator."""
    if f.carrier != m.domain.carrier:
        raise CarrierMismatch("filter does not live on the map's domain")
    return PrincipalFilter(m.codomain.carrier, m.image_mask(f.generator))


@dataclass(frozen=True)
class ContinuityDefect:
    """A point together with a convergent filter whose image fails to converge."""

    point: str
    filter: PrincipalFilter


def continuity_defect(m: PointMap) -> ContinuityDefect | None:
    """First witness against continuity, or None.

    Images of maximal convergent filters suffice: finer filters have smaller
    images, so m(V(x)) inside V(m(x)) for all x settles every convergent filter.
    """
    dom, cod = m.domain, m.codomain
    for i in range(len(dom)):
        if m.image_mask(dom.vmax[i]) & ~cod.vmax[m.table[i]]:
            return ContinuityDefect(
                dom.carrier.points[i], PrincipalFilter(dom.carrier, dom.vmax[i])
            )
    return None


def is_continuous(m: PointMap) -> bool:
    return continuity_defect(m) is None
