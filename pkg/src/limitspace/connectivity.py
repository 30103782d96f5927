"""Covering systems, connectedness, components, and local connectedness.

A local covering system plays the role of an open cover: a family of sets
meeting every convergent filter at the covered points.  Connectedness is
decided on the symmetric adjacency graph (x ~ y iff either maximal generator
contains the other point); the definitional partition search is kept in the
test suite as an oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .core import LimitSpace, mask_bits, subsets_of
from . import constructions


@dataclass(frozen=True)
class LocalCover:
    """A candidate covering system: subsets plus the points it claims to cover."""

    sets: tuple[int, ...]
    scope: int


@dataclass(frozen=True)
class CoverBase:
    """A candidate covering system base (arbitrarily small members inside
    some coarser convergent filter)."""

    sets: tuple[int, ...]
    scope: int


def cover_from_names(space: LimitSpace, sets, scope=None) -> LocalCover:
    c = space.carrier
    return LocalCover(
        tuple(c.mask_of(s) for s in sets),
        c.full_mask if scope is None else c.mask_of(scope),
    )


def ball_cover(space: LimitSpace) -> LocalCover:
    """The family of maximal generators, one per point; always a covering system."""
    return LocalCover(tuple(dict.fromkeys(space.vmax)), space.carrier.full_mask)


@dataclass(frozen=True)
class CoverDefect:
    point: str
    generator: int


def local_cover_defect(space: LimitSpace, c: LocalCover) -> CoverDefect | None:
    """First convergent generator missed by the family, or None.

    Checked literally: every nonempty subset of V(x) must have a superset in
    the family, for every x in scope.
    """
    for i in mask_bits(c.scope):
        for a in subsets_of(space.vmax[i]):
            if not any(a & ~u == 0 for u in c.sets):
                return CoverDefect(space.carrier.points[i], a)
    return None


def is_local_cover(space: LimitSpace, c: LocalCover) -> bool:
    return local_cover_defect(space, c) is None


def cover_base_defect(space: LimitSpace, b: CoverBase) -> CoverDefect | None:
    """First convergent generator with no base member between it and V(x).

    For principal filters the base condition collapses to: some family member
    F with H within F within V(x); F itself is then the required small member
    of every superset of F.
    """
    for i in mask_bits(b.scope):
        v = space.vmax[i]
        for h in subsets_of(v):
            if not any(h & ~f == 0 and f & ~v == 0 for f in b.sets):
                return CoverDefect(space.carrier.points[i], h)
    return None


def is_cover_base(space: LimitSpace, b: CoverBase) -> bool:
    return cover_base_defect(space, b) is None


# ---------------------------------------------------------------------------
# connectedness


def adjacency_masks(space: LimitSpace) -> list[int]:
    """Symmetric adjacency: x ~ y iff y in V(x) or x in V(y)."""
    n = len(space)
    adj = list(space.vmax)
    for i in range(n):
        for j in mask_bits(space.vmax[i]):
            adj[j] |= 1 << i
    return adj


def components(space: LimitSpace) -> list[int]:
    """Masks of the maximal connected subspaces, ordered by least point."""
    n = len(space)
    adj = adjacency_masks(space)
    seen = 0
    parts = []
    for i in range(n):
        if seen >> i & 1:
            continue
        comp = 0
        frontier = 1 << i
        while frontier:
            comp |= frontier
            nxt = 0
            for j in mask_bits(frontier):
                nxt |= adj[j]
            frontier = nxt & ~comp
        parts.append(comp)
        seen |= comp
    return parts


def components_within(space: LimitSpace, mask: int) -> list[int]:
    """Components of the subspace on ``mask``, reported as ambient masks."""
    space.carrier.check_mask(mask)
    adj = adjacency_masks(space)
    seen = 0
    parts = []
    for i in mask_bits(mask):
        if seen >> i & 1:
            continue
        comp = 0
        frontier = 1 << i
        while frontier:
            comp |= frontier
            nxt = 0
            for j in mask_bits(frontier):
                nxt |= adj[j] & mask
            frontier = nxt & ~comp
        parts.append(comp)
        seen |= comp
    return parts


def disconnection_witness(space: LimitSpace) -> tuple[int, int] | None:
    """A separating partition (A, B), or None when the space is connected.

    Every convergent generator at x lies inside V(x), so a family splits into
    the two sides exactly when every V(x) does; that makes separations of the
    symmetric adjacency graph the only possible witnesses.
    """
    parts = components(space)
    if len(parts) < 2:
        return None
    return parts[0], space.carrier.full_mask & ~parts[0]


def is_connected(space: LimitSpace) -> bool:
    return disconnection_witness(space) is None


def chain_between(space: LimitSpace, x: str, y: str, c: LocalCover) -> list[int] | None:
    """A finite chain of cover sets joining x to y, consecutive ones meeting.

    BFS over the intersection graph of the family; None when no chain exists.
    Requires the family to be a covering system of the whole carrier.
    """
    if local_cover_defect(space, LocalCover(c.sets, space.carrier.full_mask)):
        raise ValueError("chain_between requires a covering system of the carrier")
    xb = 1 << space.carrier.index[x]
    yb = 1 << space.carrier.index[y]
    starts = [k for k, u in enumerate(c.sets) if u & xb]
    prev: dict[int, int | None] = {k: None for k in starts}
    queue = deque(starts)
    goal = None
    while queue:
        k = queue.popleft()
        if c.sets[k] & yb:
            goal = k
            break
        for k2, u2 in enumerate(c.sets):
            if k2 not in prev and c.sets[k] & u2:
                prev[k2] = k
                queue.append(k2)
    if goal is None:
        return None
    chain = []
    at: int | None = goal
    while at is not None:
        chain.append(c.sets[at])
        at = prev[at]
    chain.reverse()
    return chain


# ---------------------------------------------------------------------------
# local (path-)connectedness


@dataclass(frozen=True)
class LocalBaseReport:
    ok: bool
    base: dict[str, int] | None
    failed_point: str | None


def _locally(space: LimitSpace, part_fn) -> LocalBaseReport:
    base = {}
    for i, p in enumerate(space.carrier.points):
        v = space.vmax[i]
        sub = constructions.subspace(space, v)
        if len(part_fn(sub)) > 1:
            return LocalBaseReport(False, None, p)
        base[p] = v
    return LocalBaseReport(True, base, None)


def is_locally_connected(space: LimitSpace) -> LocalBaseReport:
    """Search for a per-point base of connected sets; {V(x)} always works on a
    finite closed space, but connectivity of each member is verified."""
    return _locally(space, components)


def is_locally_path_connected(space: LimitSpace) -> LocalBaseReport:
    from .paths import path_components

    return _locally(space, path_components)
