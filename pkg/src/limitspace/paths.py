"""Step paths, walks, and a budget-bounded combinatorial homotopy engine.

A continuous map from the unit interval into a finite space is a step
function: finitely many values, with a one-sided choice at every jump.  The
jump condition is continuity at the cut: neighborhoods of the cut map to the
filter generated by the two adjacent values, which must converge to the value
taken at the cut.  Taking the left value at a cut therefore requires the
right value to converge there, and symmetrically.

Erasing the cut positions leaves a ``Walk`` (values plus jump sides), the
reparametrization-invariant core.  Homotopy rel endpoints is realized as
reachability in a rewrite graph over walks:

* backtrack: ...p,q,p... <-> ...p...  when q lies in V(p);
* flag change at a cut where both jump sides are valid;
* cover fill: a contiguous subwalk inside a designated cover set may be
  replaced by any valid subwalk inside the same set with the same endpoints
  (the semi-local simple-connectivity witness, consumed as an input).

The engine normalizes by greedy reduction (shortest, then lexicographically
least) plus a bounded escape search, and never reports a verdict it cannot
certify within its budget: "unknown" is a first-class answer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

from .core import LimitSpace, PointMap, is_continuous, mask_bits
from .connectivity import LocalCover, local_cover_defect

LEFT = "L"
RIGHT = "R"


def step_valid(space: LimitSpace, a: int, b: int, flag: str) -> bool:
    """Can a walk step from point index a to b with this jump side?"""
    if flag == LEFT:
        return bool(space.vmax[a] >> b & 1)
    return bool(space.vmax[b] >> a & 1)


def canonical_flag(space: LimitSpace, a: int, b: int) -> str | None:
    """Preferred jump side for a step a -> b; None when no side is valid."""
    if space.vmax[a] >> b & 1:
        return LEFT
    if space.vmax[b] >> a & 1:
        return RIGHT
    return None


# ---------------------------------------------------------------------------
# step paths


@dataclass(frozen=True)
class StepPath:
    """A breakpointed step function on the unit interval.

    values are point indices with consecutive entries distinct; cuts are the
    jump positions, strictly increasing inside (0, 1); flags say which side's
    value is taken at each cut.
    """

    space: LimitSpace
    values: tuple[int, ...]
    cuts: tuple[Fraction, ...]
    flags: tuple[str, ...]

    def __post_init__(self):
        k = len(self.values) - 1
        if k < 0:
            raise ValueError("a step path takes at least one value")
        if len(self.cuts) != k or len(self.flags) != k:
            raise ValueError("need one cut and one flag per jump")
        prev = Fraction(0)
        for t in self.cuts:
            if not prev < t < 1:
                raise ValueError("cuts must be strictly increasing inside (0, 1)")
            prev = t
        for f in self.flags:
            if f not in (LEFT, RIGHT):
                raise ValueError(f"unknown flag {f!r}")
        for u, v in zip(self.values, self.values[1:]):
            if u == v:
                raise ValueError("consecutive step values must differ")


@dataclass(frozen=True)
class CutDefect:
    cut_index: int  # 1-based, as in "the i-th jump"
    reason: str


def path_defect(p: StepPath) -> CutDefect | None:
    """First jump violating the continuity condition; None for a valid path."""
    for i in range(1, len(p.values)):
        a, b, f = p.values[i - 1], p.values[i], p.flags[i - 1]
        if not step_valid(p.space, a, b, f):
            names = p.space.carrier.points
            need = (f"{names[b]} must converge at {names[a]}" if f == LEFT
                    else f"{names[a]} must converge at {names[b]}")
            return CutDefect(i, need)
    return None


def is_valid_path(p: StepPath) -> bool:
    return path_defect(p) is None


# ---------------------------------------------------------------------------
# walks


@dataclass(frozen=True)
class Walk:
    """A step path with the cut positions erased."""

    space: LimitSpace
    values: tuple[int, ...]
    flags: tuple[str, ...]

    def __post_init__(self):
        if len(self.values) < 1 or len(self.flags) != len(self.values) - 1:
            raise ValueError("need one flag per step")
        for u, v in zip(self.values, self.values[1:]):
            if u == v:
                raise ValueError("consecutive walk values must differ")

    @property
    def start(self) -> int:
        return self.values[0]

    @property
    def end(self) -> int:
        return self.values[-1]

    def __len__(self) -> int:
        return len(self.values) - 1

    def names(self) -> tuple[str, ...]:
        return tuple(self.space.carrier.points[i] for i in self.values)

    def key(self):
        return (len(self.values), self.values, self.flags)


def walk_defect(w: Walk) -> CutDefect | None:
    for i in range(1, len(w.values)):
        if not step_valid(w.space, w.values[i - 1], w.values[i], w.flags[i - 1]):
            return CutDefect(i, "invalid step")
    return None


def is_valid_walk(w: Walk) -> bool:
    return walk_defect(w) is None


def constant_walk(space: LimitSpace, name: str) -> Walk:
    return Walk(space, (space.carrier.index[name],), ())


def walk_from_names(space: LimitSpace, names, flags=None) -> Walk:
    values = tuple(space.carrier.index[n] for n in names)
    if flags is None:
        fl = []
        for a, b in zip(values, values[1:]):
            f = canonical_flag(space, a, b)
            if f is None:
                raise ValueError(f"no valid step between {names} entries {a} and {b}")
            fl.append(f)
        flags = tuple(fl)
    return Walk(space, values, tuple(flags))


def to_walk(p: StepPath) -> Walk:
    if not is_valid_path(p):
        raise ValueError("cannot take the walk of an invalid step path")
    return Walk(p.space, p.values, p.flags)


def spread_cuts(w: Walk) -> StepPath:
    """Any step-path representative of a walk: evenly spaced cuts."""
    k = len(w)
    cuts = tuple(Fraction(i, k + 1) for i in range(1, k + 1))
    return StepPath(w.space, w.values, cuts, w.flags)


def concat(p: Walk, q: Walk) -> Walk:
    if p.space != q.space:
        raise ValueError("walks live in different spaces")
    if p.end != q.start:
        raise ValueError("concatenation endpoints do not meet")
    return Walk(p.space, p.values + q.values[1:], p.flags + q.flags)


def reverse(p: Walk) -> Walk:
    """Traverse backwards; jump sides swap, preserving validity."""
    swapped = tuple(RIGHT if f == LEFT else LEFT for f in reversed(p.flags))
    return Walk(p.space, tuple(reversed(p.values)), swapped)


def pushforward(p: Walk, m: PointMap) -> Walk:
    """Image walk under a continuous map, equal neighbors merged."""
    if m.domain != p.space:
        raise ValueError("walk does not live in the map's domain")
    if not is_continuous(m):
        raise ValueError("pushforward requires a continuous map")
    values = [m.table[p.values[0]]]
    flags = []
    for i in range(1, len(p.values)):
        v = m.table[p.values[i]]
        if v != values[-1]:
            values.append(v)
            flags.append(p.flags[i - 1])
    return Walk(m.codomain, tuple(values), tuple(flags))


def path_components(space: LimitSpace) -> list[int]:
    """Partition by one-step-walk reachability (then transitivity)."""
    n = len(space)
    reach = [0] * n
    for a in range(n):
        for b in range(n):
            if a != b and (step_valid(space, a, b, LEFT)
                           or step_valid(space, a, b, RIGHT)):
                reach[a] |= 1 << b
    seen = 0
    parts = []
    for i in range(n):
        if seen >> i & 1:
            continue
        comp = 1 << i
        frontier = 1 << i
        while frontier:
            nxt = 0
            for j in mask_bits(frontier):
                nxt |= reach[j]
            frontier = nxt & ~comp
            comp |= nxt
        parts.append(comp)
        seen |= comp
    return parts


# ---------------------------------------------------------------------------
# rewrite moves


@dataclass(frozen=True)
class FlagMove:
    cut: int
    flag: str


@dataclass(frozen=True)
class BacktrackDelete:
    at: int  # delete values[at] and values[at+1]; values[at-1] == values[at+1]


@dataclass(frozen=True)
class BacktrackInsert:
    after: int  # insert (point, values[after]) right after position ``after``
    point: int


@dataclass(frozen=True)
class Fill:
    lo: int
    hi: int  # inclusive segment values[lo..hi], endpoints preserved
    cover_index: int
    values: tuple[int, ...]
    flags: tuple[str, ...]


Move = FlagMove | BacktrackDelete | BacktrackInsert | Fill


def apply_move(w: Walk, move: Move) -> Walk:
    space = w.space
    if isinstance(move, FlagMove):
        a, b = w.values[move.cut], w.values[move.cut + 1]
        if not (step_valid(space, a, b, LEFT) and step_valid(space, a, b, RIGHT)):
            raise ValueError("flag change needs both jump sides valid")
        flags = list(w.flags)
        flags[move.cut] = move.flag
        return Walk(space, w.values, tuple(flags))
    if isinstance(move, BacktrackDelete):
        i = move.at
        if not 1 <= i < len(w.values) - 1 or w.values[i - 1] != w.values[i + 1]:
            raise ValueError("not a backtrack position")
        p, q = w.values[i - 1], w.values[i]
        if not space.vmax[p] >> q & 1:
            raise ValueError("backtrack removal needs the detour point in V(base)")
        return Walk(space, w.values[:i] + w.values[i + 2:],
                    w.flags[:i - 1] + w.flags[i + 1:])
    if isinstance(move, BacktrackInsert):
        i, q = move.after, move.point
        p = w.values[i]
        if q == p or not space.vmax[p] >> q & 1:
            raise ValueError("backtrack insertion needs the detour point in V(base)")
        f1 = canonical_flag(space, p, q)
        f2 = canonical_flag(space, q, p)
        return Walk(space, w.values[:i + 1] + (q, p) + w.values[i + 1:],
                    w.flags[:i] + (f1, f2) + w.flags[i:])
    if isinstance(move, Fill):
        lo, hi = move.lo, move.hi
        if move.values[0] != w.values[lo] or move.values[-1] != w.values[hi]:
            raise ValueError("fill must preserve the segment endpoints")
        out = Walk(space, w.values[:lo] + move.values + w.values[hi + 1:],
                   w.flags[:lo] + move.flags + w.flags[hi:])
        if not is_valid_walk(out):
            raise ValueError("fill produced an invalid walk")
        return out
    raise TypeError(f"unknown move {move!r}")


def invert_moves(start: Walk, moves: list[Move]) -> list[Move]:
    """Moves that undo ``moves``, valid when applied from the final walk."""
    inverses = []
    w = start
    for mv in moves:
        if isinstance(mv, FlagMove):
            inv: Move = FlagMove(mv.cut, w.flags[mv.cut])
        elif isinstance(mv, BacktrackDelete):
            inv = BacktrackInsert(mv.at - 1, w.values[mv.at])
        elif isinstance(mv, BacktrackInsert):
            inv = BacktrackDelete(mv.after + 1)
        elif isinstance(mv, Fill):
            inv = Fill(mv.lo, mv.lo + len(mv.values) - 1, mv.cover_index,
                       w.values[mv.lo:mv.hi + 1], w.flags[mv.lo:mv.hi])
        else:
            raise TypeError(f"unknown move {mv!r}")
        w = apply_move(w, mv)
        inverses.append(inv)
    inverses.reverse()
    return inverses


def replay(start: Walk, moves: list[Move]) -> Walk:
    w = start
    for mv in moves:
        w = apply_move(w, mv)
    return w


# ---------------------------------------------------------------------------
# the homotopy system and normalization


@dataclass(frozen=True)
class HomotopySystem:
    """A designated cover whose sets have stipulated-contractible loops,
    plus the search budget of the rewrite engine.

    budget counts elementary search operations (state expansions); growth is
    how far above the current best length the escape search may climb.
    flag_moves=False freezes the jump sides (no flag rewriting).
    """

    space: LimitSpace
    cover: LocalCover
    budget: int = 1000
    growth: int = 2
    flag_moves: bool = True

    def __post_init__(self):
        defect = local_cover_defect(
            self.space, LocalCover(self.cover.sets, self.space.carrier.full_mask))
        if defect is not None:
            raise ValueError(
                f"homotopy system requires a covering system of the whole space; "
                f"missed generator at {defect.point}")


def canonicalize_flags(w: Walk, sys: HomotopySystem) -> tuple[Walk, list[Move]]:
    if not sys.flag_moves:
        return w, []
    moves: list[Move] = []
    flags = list(w.flags)
    for i in range(len(flags)):
        want = canonical_flag(w.space, w.values[i], w.values[i + 1])
        if want != flags[i]:
            moves.append(FlagMove(i, want))
            flags[i] = want
    return Walk(w.space, w.values, tuple(flags)), moves


def _mask_of(values) -> int:
    m = 0
    for v in values:
        m |= 1 << v
    return m


@lru_cache(maxsize=None)
def _canonical_segment(space: LimitSpace, inside: int, a: int, b: int):
    """Shortest, lexicographically least valid walk from a to b inside a set."""
    ok = lambda u, v: (canonical_flag(space, u, v) is not None
                       and inside >> v & 1)

    def bfs(src):
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in mask_bits(inside):
                if v != u and v not in dist and ok(u, v):
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    if not (inside >> a & 1 and inside >> b & 1):
        return None
    from_a = bfs(a)
    if b not in from_a:
        return None
    to_b = bfs(b)  # step existence is symmetric, so distances agree reversed
    values = [a]
    cur = a
    while cur != b:
        remaining = to_b[cur]
        for v in mask_bits(inside):
            if v != cur and ok(cur, v) and to_b.get(v) == remaining - 1:
                values.append(v)
                cur = v
                break
    flags = tuple(canonical_flag(space, u, v) for u, v in zip(values, values[1:]))
    return tuple(values), flags


@dataclass
class NormalizeResult:
    walk: Walk
    certified: bool
    moves: list[Move]
    ops: int


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> bool:
        self.used += n
        return self.used <= self.limit


def _windows(w: Walk, sets: tuple[int, ...]) -> Iterator[tuple[int, int, int]]:
    """Contiguous walk segments paired with every cover set containing them,
    longest segments first per starting position."""
    n = len(w.values)
    for lo in range(n):
        live = [ci for ci, u in enumerate(sets) if u >> w.values[lo] & 1]
        spans = []
        hi = lo
        while hi + 1 < n:
            nxt = [ci for ci in live if sets[ci] >> w.values[hi + 1] & 1]
            if not nxt:
                break
            hi += 1
            live = nxt
            spans.append((hi, tuple(live)))
        for hi, cis in reversed(spans):
            for ci in cis:
                yield lo, hi, ci


def _greedy(w: Walk, sys: HomotopySystem, budget: _Budget) -> tuple[Walk, list[Move]]:
    """Apply strictly reducing moves to a fixpoint, deterministically."""
    space = sys.space
    moves: list[Move] = []
    changed = True
    while changed:
        changed = False
        # backtracks first: each removes two letters
        for i in range(1, len(w.values) - 1):
            if (w.values[i - 1] == w.values[i + 1]
                    and space.vmax[w.values[i - 1]] >> w.values[i] & 1):
                mv = BacktrackDelete(i)
                w = apply_move(w, mv)
                moves.append(mv)
                budget.spend()
                changed = True
                break
        if changed:
            continue
        # cover fills to the canonical subwalk, largest segments first
        for lo, hi, ci in _windows(w, sys.cover.sets):
            best = _canonical_segment(space, sys.cover.sets[ci],
                                      w.values[lo], w.values[hi])
            if best is None:
                continue
            vals, flags = best
            old = (hi - lo, w.values[lo:hi + 1], w.flags[lo:hi])
            if (len(vals) - 1, vals, flags) < old:
                mv = Fill(lo, hi, ci, vals, flags)
                w = apply_move(w, mv)
                moves.append(mv)
                budget.spend()
                changed = True
                break
    return w, moves


def _neighbors(w: Walk, sys: HomotopySystem, cap: int) -> Iterator[tuple[Move, Walk]]:
    """Escape-search moves: backtrack edits and fills to the canonical subwalk.

    Alternate fills inside forest-shaped cover sets are compositions of these
    (every within-set walk is its geodesic plus backtracks), so the search
    graph reaches the same states the full move set does there.
    """
    space = sys.space
    n = len(w.values)
    for i in range(1, n - 1):
        if (w.values[i - 1] == w.values[i + 1]
                and space.vmax[w.values[i - 1]] >> w.values[i] & 1):
            mv = BacktrackDelete(i)
            yield mv, apply_move(w, mv)
    if n + 2 <= cap:
        for i in range(n):
            p = w.values[i]
            for q in mask_bits(space.vmax[p] & ~(1 << p)):
                mv = BacktrackInsert(i, q)
                yield mv, apply_move(w, mv)
    for lo, hi, ci in _windows(w, sys.cover.sets):
        best = _canonical_segment(space, sys.cover.sets[ci],
                                  w.values[lo], w.values[hi])
        if best is None:
            continue
        vals, flags = best
        if (vals, flags) == (w.values[lo:hi + 1], w.flags[lo:hi]):
            continue
        if n - (hi - lo + 1) + len(vals) > cap:
            continue
        mv = Fill(lo, hi, ci, vals, flags)
        try:
            yield mv, apply_move(w, mv)
        except ValueError:
            continue


def normalize(w: Walk, sys: HomotopySystem) -> NormalizeResult:
    """Canonical representative of the rewrite class of a walk.

    Greedy reduction to a fixpoint, then an exhaustive bounded search over
    the move graph near the fixpoint; any smaller walk found restarts the
    reduction.  The result is certified when the search exhausted every
    reachable state within the cap and budget, and uncertified (never wrong,
    possibly not canonical) when the budget ran out.
    """
    if walk_defect(w) is not None:
        raise ValueError("cannot normalize an invalid walk")
    budget = _Budget(sys.budget)
    w, moves = canonicalize_flags(w, sys)
    certified = True
    while True:
        w, more = _greedy(w, sys, budget)
        moves.extend(more)
        cap = len(w.values) + sys.growth
        seen: dict[Walk, tuple[Optional[Walk], Optional[Move]]] = {w: (None, None)}
        queue = deque([w])
        better = None
        exhausted = True
        while queue:
            if not budget.spend():
                exhausted = False
                break
            cur = queue.popleft()
            for mv, nxt in _neighbors(cur, sys, cap):
                if nxt in seen:
                    continue
                seen[nxt] = (cur, mv)
                if nxt.key() < w.key():
                    better = nxt
                    break
                queue.append(nxt)
            if better is not None:
                break
        if budget.used > budget.limit:
            exhausted = False
        if better is None:
            certified = exhausted and certified
            return NormalizeResult(w, certified, moves, budget.used)
        # reconstruct the path to the better walk and keep reducing from it
        chain = []
        at = better
        while seen[at][1] is not None:
            chain.append(seen[at][1])
            at = seen[at][0]
        chain.reverse()
        moves.extend(chain)
        w = better
        if not exhausted:
            certified = False


@dataclass
class HomotopyVerdict:
    answer: str  # "yes" / "no" / "unknown"
    moves: list[Move] | None
    nf1: Walk
    nf2: Walk


def homotopic(w1: Walk, w2: Walk, sys: HomotopySystem) -> HomotopyVerdict:
    """Decide rewrite-equivalence rel endpoints; unknown on budget exhaustion.

    "yes" comes with a move certificate from w1 to w2; "no" requires both
    normal forms certified.
    """
    if w1.start != w2.start or w1.end != w2.end:
        raise ValueError("homotopy rel endpoints needs equal endpoints")
    r1 = normalize(w1, sys)
    r2 = normalize(w2, sys)
    if r1.walk == r2.walk:
        cert = r1.moves + invert_moves(w2, r2.moves)
        return HomotopyVerdict("yes", cert, r1.walk, r2.walk)
    if r1.certified and r2.certified:
        return HomotopyVerdict("no", None, r1.walk, r2.walk)
    return HomotopyVerdict("unknown", None, r1.walk, r2.walk)
