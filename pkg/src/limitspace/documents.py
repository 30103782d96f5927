"""Versioned JSON documents, point-cloud and edge-list ingestion.

Canonical form: points sorted lexicographically, every subset a sorted list,
keys sorted, one trailing newline.  Closed structures are the preferred
output; raw convergence tables are accepted on input and closed on demand.
Decimal coordinates are parsed exactly (arbitrary precision), so scale
comparisons at the boundary are semantic, not floating-point noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .core import (
    Carrier,
    LimitSpace,
    PointMap,
    RawConvergenceTable,
    close,
)
from .connectivity import LocalCover
from .covering import Chart, CoveringAtlas
from .paths import Walk

SPACE_FORMAT = "limitspace.space/1"
MAP_FORMAT = "limitspace.map/1"
COVER_FORMAT = "limitspace.cover/1"
WALK_FORMAT = "limitspace.walk/1"
ATLAS_FORMAT = "limitspace.atlas/1"
FRAGMENT_FORMAT = "limitspace.fragment/1"


class DocumentError(ValueError):
    """The document is malformed (wrong shape, types, or format tag)."""


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("a document must be a JSON object")
    return doc


def _expect(doc: dict, fmt: str) -> None:
    if doc.get("format") != fmt:
        raise DocumentError(f"expected format {fmt!r}, got {doc.get('format')!r}")


# ---------------------------------------------------------------------------
# spaces


@dataclass
class SpaceDocument:
    """A limit space plus free-form metadata, raw or closed."""

    space: LimitSpace
    raw: RawConvergenceTable | None = None
    metadata: dict = field(default_factory=dict)

    @property
    def closed(self) -> bool:
        return self.raw is None


def space_to_doc(space: LimitSpace, metadata: dict | None = None) -> dict:
    order = sorted(space.carrier.points)
    return {
        "format": SPACE_FORMAT,
        "points": order,
        "vmax": {p: sorted(space.v(p)) for p in order},
        "metadata": metadata or {},
    }


def space_from_doc(doc: dict) -> SpaceDocument:
    _expect(doc, SPACE_FORMAT)
    points = doc.get("points")
    if (not isinstance(points, list)
            or not all(isinstance(p, str) for p in points)):
        raise DocumentError("'points' must be a list of strings")
    try:
        carrier = Carrier(tuple(sorted(points)))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict):
        raise DocumentError("'metadata' must be an object")

    def mask(subset) -> int:
        if not isinstance(subset, list):
            raise DocumentError("subsets must be lists of point names")
        try:
            return carrier.mask_of(subset)
        except KeyError as exc:
            raise DocumentError(f"unknown point {exc.args[0]!r}") from exc

    if "vmax" in doc:
        table = doc["vmax"]
        if not isinstance(table, dict) or set(table) != set(points):
            raise DocumentError("'vmax' must list exactly the carrier points")
        try:
            space = LimitSpace(carrier,
                               tuple(mask(table[p]) for p in carrier.points))
        except ValueError as exc:
            raise DocumentError(str(exc)) from exc
        return SpaceDocument(space, None, meta)
    if "convergence" in doc:
        table = doc["convergence"]
        if not isinstance(table, dict) or not set(table) <= set(points):
            raise DocumentError("'convergence' keys must be carrier points")
        gens = tuple(tuple(mask(s) for s in table.get(p, []))
                     for p in carrier.points)
        raw = RawConvergenceTable(carrier, gens)
        return SpaceDocument(close(raw), raw, meta)
    raise DocumentError("a space document needs 'vmax' or 'convergence'")


# ---------------------------------------------------------------------------
# maps, covers, walks


def map_to_doc(m: PointMap, embed: bool = True) -> dict:
    doc = {
        "format": MAP_FORMAT,
        "table": {p: m(p) for p in m.domain.carrier.points},
    }
    if embed:
        doc["domain"] = space_to_doc(m.domain)
        doc["codomain"] = space_to_doc(m.codomain)
    return doc


def map_table_from_doc(doc: dict) -> dict[str, str]:
    _expect(doc, MAP_FORMAT)
    table = doc.get("table")
    if (not isinstance(table, dict)
            or not all(isinstance(k, str) and isinstance(v, str)
                       for k, v in table.items())):
        raise DocumentError("'table' must map point names to point names")
    return table


def map_from_doc(doc: dict, domain: LimitSpace | None = None,
                 codomain: LimitSpace | None = None) -> PointMap:
    table = map_table_from_doc(doc)
    if domain is None:
        if "domain" not in doc:
            raise DocumentError("map document does not embed its domain")
        domain = space_from_doc(doc["domain"]).space
    if codomain is None:
        if "codomain" not in doc:
            raise DocumentError("map document does not embed its codomain")
        codomain = space_from_doc(doc["codomain"]).space
    missing = set(domain.carrier.points) - set(table)
    if missing:
        raise DocumentError(f"map table is missing {sorted(missing)}")
    try:
        return PointMap(domain, codomain,
                        tuple(codomain.carrier.index[table[p]]
                              for p in domain.carrier.points))
    except KeyError as exc:
        raise DocumentError(f"unknown codomain point {exc.args[0]!r}") from exc


def cover_to_doc(space: LimitSpace, c: LocalCover) -> dict:
    return {
        "format": COVER_FORMAT,
        "sets": sorted(sorted(space.carrier.names_of(u)) for u in c.sets),
        "scope": sorted(space.carrier.names_of(c.scope)),
    }


def cover_from_doc(doc: dict, space: LimitSpace) -> LocalCover:
    _expect(doc, COVER_FORMAT)
    sets = doc.get("sets")
    if not isinstance(sets, list):
        raise DocumentError("'sets' must be a list of subsets")
    try:
        masks = tuple(space.carrier.mask_of(s) for s in sets)
        scope = (space.carrier.full_mask if doc.get("scope") is None
                 else space.carrier.mask_of(doc["scope"]))
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    return LocalCover(masks, scope)


def walk_to_doc(w: Walk) -> dict:
    return {
        "format": WALK_FORMAT,
        "values": list(w.names()),
        "flags": "".join(w.flags),
    }


def walk_from_doc(doc: dict, space: LimitSpace) -> Walk:
    _expect(doc, WALK_FORMAT)
    values = doc.get("values")
    flags = doc.get("flags", "")
    if not isinstance(values, list) or not isinstance(flags, str):
        raise DocumentError("'values' must be a list and 'flags' a string")
    try:
        idx = tuple(space.carrier.index[v] for v in values)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    try:
        return Walk(space, idx, tuple(flags))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


# ---------------------------------------------------------------------------
# atlases


def atlas_to_doc(a: CoveringAtlas) -> dict:
    total, base = a.total, a.base
    return {
        "format": ATLAS_FORMAT,
        "total": space_to_doc(total),
        "base": space_to_doc(base),
        "map": {p: a.map(p) for p in total.carrier.points},
        "cover": [sorted(base.carrier.names_of(u)) for u in a.cover.sets],
        "fiber": list(a.fiber),
        "charts": [
            {"set": chart.set_index,
             "sheet": {total.carrier.points[e]: a.fiber[s]
                       for e, s in chart.sheet}}
            for chart in a.charts
        ],
        "fiber_space": (None if a.fiber_space is None
                        else space_to_doc(a.fiber_space)),
    }


def atlas_from_doc(doc: dict) -> CoveringAtlas:
    _expect(doc, ATLAS_FORMAT)
    total = space_from_doc(doc["total"]).space
    base = space_from_doc(doc["base"]).space
    table = doc.get("map")
    if not isinstance(table, dict):
        raise DocumentError("'map' must be an object")
    try:
        p = PointMap(total, base, tuple(base.carrier.index[table[q]]
                                        for q in total.carrier.points))
        cover = LocalCover(tuple(base.carrier.mask_of(u) for u in doc["cover"]),
                           base.carrier.full_mask)
        fiber = tuple(doc["fiber"])
        flabel = {f: i for i, f in enumerate(fiber)}
        charts = tuple(
            Chart(entry["set"],
                  tuple(sorted((total.carrier.index[e], flabel[s])
                               for e, s in entry["sheet"].items())))
            for entry in doc["charts"]
        )
    except KeyError as exc:
        raise DocumentError(f"atlas references unknown name {exc.args[0]!r}") from exc
    fs = doc.get("fiber_space")
    fiber_space = None if fs is None else space_from_doc(fs).space
    return CoveringAtlas(p, cover, fiber, charts, fiber_space)


# ---------------------------------------------------------------------------
# scaled point clouds and edge lists


@dataclass(frozen=True)
class ScaledCloud:
    """Labelled points with exact rational coordinates and a scale."""

    points: tuple[tuple[str, tuple[Fraction, ...]], ...]
    scale: Fraction

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("the scale must be nonnegative")
        dims = {len(xs) for _, xs in self.points}
        if len(dims) > 1:
            raise ValueError("all points need the same dimension")


def parse_decimal(text: str) -> Fraction:
    try:
        return Fraction(Decimal(text.strip()))
    except (InvalidOperation, ValueError) as exc:
        raise DocumentError(f"malformed number {text!r}") from exc


def cloud_from_csv(text: str, scale: Fraction) -> ScaledCloud:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) < 2:
            raise DocumentError(f"cloud row needs an id and coordinates: {line!r}")
        rows.append((cells[0], tuple(parse_decimal(c) for c in cells[1:])))
    return ScaledCloud(tuple(rows), scale)


def from_cloud(cloud: ScaledCloud) -> LimitSpace:
    """Scale-r neighborhoods: V(x) is every point within distance r, inclusively."""
    order = sorted(cloud.points)
    carrier = Carrier(tuple(name for name, _ in order))
    rr = cloud.scale * cloud.scale
    vmax = []
    for i, (_, xi) in enumerate(order):
        v = 1 << i
        for j, (_, xj) in enumerate(order):
            if i != j and sum((a - b) ** 2 for a, b in zip(xi, xj)) <= rr:
                v |= 1 << j
        vmax.append(v)
    return LimitSpace(carrier, tuple(vmax))


def from_edges(edges: list[tuple[str, str]], mode: str,
               points: list[str] | None = None) -> LimitSpace:
    """Reflexive relation from an edge list.

    Directed mode reads an edge a -> b as: the point filter of a converges
    at b, i.e. a joins V(b).  Symmetric mode adds both directions.
    """
    if mode not in ("directed", "symmetric"):
        raise DocumentError(f"unknown edge mode {mode!r}")
    if points is None:
        seen: dict[str, None] = {}
        for a, b in edges:
            seen.setdefault(a)
            seen.setdefault(b)
        points = list(seen)
    carrier = Carrier(tuple(sorted(set(points))))
    vmax = [1 << i for i in range(len(carrier))]
    for a, b in edges:
        if a not in carrier.index or b not in carrier.index:
            missing = a if a not in carrier.index else b
            raise DocumentError(f"unknown vertex in edge: {missing!r}")
        ia, ib = carrier.index[a], carrier.index[b]
        vmax[ib] |= 1 << ia
        if mode == "symmetric":
            vmax[ia] |= 1 << ib
    return LimitSpace(carrier, tuple(vmax))


def edges_from_text(text: str) -> tuple[list[tuple[str, str]], list[str]]:
    """One edge per line; a lone token declares an isolated vertex."""
    edges = []
    points = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) == 1:
            points.append(tokens[0])
        elif len(tokens) == 2:
            edges.append((tokens[0], tokens[1]))
            points.extend(tokens)
        else:
            raise DocumentError(f"an edge line has two tokens: {line!r}")
    return edges, points
