"""Serialization round-trips, point-cloud ingestion, and edge lists."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from limitspace.core import mask_bits
from limitspace.connectivity import components
from limitspace.covering import search_atlas
from limitspace.documents import (
    DocumentError,
    ScaledCloud,
    atlas_from_doc,
    atlas_to_doc,
    cloud_from_csv,
    dumps,
    edges_from_text,
    from_cloud,
    from_edges,
    loads,
    map_from_doc,
    map_to_doc,
    parse_decimal,
    space_from_doc,
    space_to_doc,
    walk_from_doc,
    walk_to_doc,
)
from limitspace.core import map_from_names
from limitspace.paths import walk_from_names

from conftest import cycle_space, random_space


@st.composite
def limit_spaces(draw, max_points=5):
    n = draw(st.integers(1, max_points))
    vmax = tuple((1 << i) | draw(st.integers(0, (1 << n) - 1))
                 for i in range(n))
    from limitspace.core import Carrier, LimitSpace

    return LimitSpace(Carrier(tuple(f"p{i}" for i in range(n))), vmax)


@given(limit_spaces())
@settings(max_examples=80, deadline=None)
def test_space_roundtrip_property(s):
    text = dumps(space_to_doc(s))
    again = space_from_doc(loads(text)).space
    assert again == s
    assert dumps(space_to_doc(again)) == text


def test_space_roundtrip_closed(rng):
    for _ in range(100):
        s = random_space(rng, rng.randrange(1, 6))
        doc = space_to_doc(s, {"note": "x"})
        text = dumps(doc)
        again = space_from_doc(loads(text))
        assert again.closed and again.metadata == {"note": "x"}
        assert dumps(space_to_doc(again.space, again.metadata)) == text


def test_raw_document_closes():
    doc = {
        "format": "limitspace.space/1",
        "points": ["a", "b"],
        "convergence": {"a": [["a", "b"]], "b": []},
        "metadata": {},
    }
    sd = space_from_doc(doc)
    assert not sd.closed
    assert sd.space.v("a") == ("a", "b") and sd.space.v("b") == ("b",)
    # canonical print is the closed form; parsing it back is stable
    out = dumps(space_to_doc(sd.space))
    assert space_from_doc(loads(out)).space == sd.space


def test_canonical_order_is_lexicographic():
    doc = {
        "format": "limitspace.space/1",
        "points": ["v10", "v2", "v1"],
        "vmax": {"v10": ["v10"], "v2": ["v2"], "v1": ["v1", "v2"]},
        "metadata": {},
    }
    s = space_from_doc(doc).space
    assert s.carrier.points == ("v1", "v10", "v2")


def test_document_errors():
    with pytest.raises(DocumentError):
        loads("{nope")
    with pytest.raises(DocumentError):
        space_from_doc({"format": "wrong/1"})
    with pytest.raises(DocumentError):
        space_from_doc({"format": "limitspace.space/1", "points": ["a"]})
    with pytest.raises(DocumentError):
        space_from_doc({"format": "limitspace.space/1", "points": ["a", "a"],
                        "vmax": {"a": ["a"]}})
    with pytest.raises(DocumentError):
        space_from_doc({"format": "limitspace.space/1", "points": ["a"],
                        "vmax": {"a": []}})  # point filter must converge


def test_map_and_walk_roundtrip(cyc8):
    m = map_from_names(cyc8, cyc8, {f"v{i}": f"v{(i + 3) % 8}" for i in range(8)})
    doc = map_to_doc(m)
    again = map_from_doc(loads(dumps(doc)))
    assert again.table == m.table
    w = walk_from_names(cyc8, ["v0", "v1", "v2"])
    assert walk_from_doc(loads(dumps(walk_to_doc(w))), cyc8) == w


def test_atlas_roundtrip():
    cyc8, cyc16 = cycle_space(8), cycle_space(16, "e")
    p = map_from_names(cyc16, cyc8, {f"e{k}": f"v{k % 8}" for k in range(16)})
    atlas = search_atlas(p)
    doc = dumps(atlas_to_doc(atlas))
    again = atlas_from_doc(loads(doc))
    assert again.map.table == atlas.map.table
    assert again.cover.sets == atlas.cover.sets
    assert again.charts == atlas.charts
    assert dumps(atlas_to_doc(again)) == doc


# --- clouds -------------------------------------------------------------------


def test_parse_decimal_exact():
    assert parse_decimal("0.123456789012") == Fraction(123456789012, 10 ** 12)
    assert parse_decimal("2") == 2
    with pytest.raises(DocumentError):
        parse_decimal("zero")


def test_cloud_zero_scale_is_discrete():
    cloud = ScaledCloud((("a", (Fraction(0),)), ("b", (Fraction(1),))),
                        Fraction(0))
    s = from_cloud(cloud)
    assert s.vmax == (1, 2)


def test_cloud_big_scale_is_indiscrete():
    cloud = ScaledCloud((("a", (Fraction(0),)), ("b", (Fraction(1),))),
                        Fraction(5))
    s = from_cloud(cloud)
    assert s.vmax == (0b11, 0b11)


def test_cloud_boundary_is_inclusive():
    cloud = ScaledCloud((("a", (Fraction(0),)), ("b", (Fraction(1),))),
                        Fraction(1))
    s = from_cloud(cloud)
    assert s.vmax == (0b11, 0b11)


def test_cloud_monotone_in_scale(rng):
    pts = tuple((f"q{i}", (Fraction(rng.randrange(0, 50), 7),
                           Fraction(rng.randrange(0, 50), 7)))
                for i in range(6))
    smaller = from_cloud(ScaledCloud(pts, Fraction(2)))
    bigger = from_cloud(ScaledCloud(pts, Fraction(3)))
    for v_small, v_big in zip(smaller.vmax, bigger.vmax):
        assert v_small & ~v_big == 0


def test_cloud_csv_parse_and_chord_circle():
    # 8 points on a circle of circumference 8, coordinates rounded; the scale
    # sits just above the rounded chord and far below the next chord
    import math

    radius = 8 / (2 * math.pi)
    rows = []
    for i in range(8):
        x = round(radius * math.cos(2 * math.pi * i / 8), 9)
        y = round(radius * math.sin(2 * math.pi * i / 8), 9)
        rows.append(f"v{i},{x:.9f},{y:.9f}")
    cloud = cloud_from_csv("\n".join(rows), parse_decimal("0.9745"))
    s = from_cloud(cloud)
    for i in range(8):
        expect = sorted({f"v{i}", f"v{(i + 1) % 8}", f"v{(i - 1) % 8}"})
        assert sorted(s.v(f"v{i}")) == expect


# --- edges --------------------------------------------------------------------


def test_from_edges_modes():
    directed = from_edges([("a", "b")], "directed")
    assert directed.v("b") == ("a", "b") and directed.v("a") == ("a",)
    sym = from_edges([("a", "b")], "symmetric")
    assert sym.v("a") == ("a", "b") and sym.v("b") == ("a", "b")


def test_from_edges_empty_is_discrete():
    s = from_edges([], "symmetric", points=["x", "y", "z"])
    assert s.vmax == (1, 2, 4)


def test_from_edges_unknown_vertex():
    with pytest.raises(DocumentError):
        from_edges([("a", "b")], "symmetric", points=["a"])


def test_edges_text_format():
    edges, points = edges_from_text("a b\nc\n# comment\n\nb c\n")
    assert edges == [("a", "b"), ("b", "c")] and "c" in points
    with pytest.raises(DocumentError):
        edges_from_text("a b c\n")


def union_find_components(n, pairs):
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        parent[find(a)] = find(b)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return sorted(frozenset(g) for g in groups.values())


def test_symmetric_edges_components_match_union_find(rng):
    for _ in range(80):
        n = rng.randrange(1, 9)
        names = [f"n{i}" for i in range(n)]
        pairs = [(rng.randrange(n), rng.randrange(n))
                 for _ in range(rng.randrange(0, n + 2))]
        pairs = [(a, b) for a, b in pairs if a != b]
        s = from_edges([(names[a], names[b]) for a, b in pairs],
                       "symmetric", points=names)
        got = sorted(frozenset(mask_bits(m)) for m in components(s))
        assert got == union_find_components(n, pairs)
