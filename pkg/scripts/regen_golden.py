"""Regenerate the shipped example documents and the CLI golden outputs.

Run from the repository root:  python scripts/regen_golden.py
Golden files freeze the byte-exact stdout of every CLI command on the shipped
documents; the test suite replays them and compares.
"""

import contextlib
import io
import math
import pathlib
import sys

from limitspace import cli, documents
from limitspace.core import map_from_names
from limitspace.covering import search_atlas
from limitspace.documents import dumps, from_edges, space_to_doc, map_to_doc, atlas_to_doc

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
GOLDEN = ROOT / "tests" / "golden"


def cycle(n, prefix="v"):
    return from_edges([(f"{prefix}{i}", f"{prefix}{(i + 1) % n}")
                       for i in range(n)], "symmetric")


def write(path: pathlib.Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def make_data():
    cyc8 = cycle(8)
    write(DATA / "eight_cycle.json", dumps(space_to_doc(
        cyc8, {"description": "eight points at unit scale around a circle"})))

    star = from_edges([("c", "l1"), ("c", "l2"), ("c", "l3")], "symmetric")
    write(DATA / "star.json", dumps(space_to_doc(
        star, {"description": "a hub with three spokes"})))

    write(DATA / "two_points.json", dumps(space_to_doc(
        from_edges([], "symmetric", points=["a", "b"]))))

    write(DATA / "raw_table.json", dumps({
        "format": documents.SPACE_FORMAT,
        "points": ["a", "b", "c"],
        "convergence": {"a": [["b"], ["c"]], "b": [], "c": []},
        "metadata": {"description": "raw generators awaiting closure"},
    }))

    write(DATA / "collapse_map.json", dumps({
        "format": documents.MAP_FORMAT,
        "table": {f"v{i}": ("u" if i < 2 else "w") for i in range(8)},
    }))

    # 8 equally spaced points on a circle of circumference 8; the scale sits
    # just above the rounded unit chord and far below the two-step chord
    radius = 8 / (2 * math.pi)
    rows = []
    for i in range(8):
        x = round(radius * math.cos(2 * math.pi * i / 8), 9)
        y = round(radius * math.sin(2 * math.pi * i / 8), 9)
        rows.append(f"v{i},{x:.9f},{y:.9f}")
    write(DATA / "circle8.csv", "\n".join(rows) + "\n")

    write(DATA / "cycle_edges.txt",
          "".join(f"v{i} v{(i + 1) % 8}\n" for i in range(8)))

    cyc16 = cycle(16, "e")
    p = map_from_names(cyc16, cycle(8), {f"e{k}": f"v{k % 8}" for k in range(16)})
    atlas = search_atlas(p)
    write(DATA / "double_cover_atlas.json", dumps(atlas_to_doc(atlas)))
    write(DATA / "double_cover_map.json", dumps(map_to_doc(p)))

    cyc8b = cycle(8)
    ident = map_from_names(cyc8b, cyc8b, {f"v{i}": f"v{i}" for i in range(8)})
    write(DATA / "cycle_inclusion.json", dumps(map_to_doc(ident)))

    write(DATA / "winding_walk.json", dumps({
        "format": documents.WALK_FORMAT,
        "values": [f"v{i}" for i in range(8)] + ["v0"],
        "flags": "L" * 8,
    }))

    write(DATA / "ball_cover.json", dumps({
        "format": documents.COVER_FORMAT,
        "sets": sorted(sorted([f"v{(i - 1) % 8}", f"v{i}", f"v{(i + 1) % 8}"])
                       for i in range(8)),
        "scope": [f"v{i}" for i in range(8)],
    }))


GOLDEN_COMMANDS = [
    ("validate_cycle", ["validate", "data/eight_cycle.json"]),
    ("validate_raw", ["validate", "data/raw_table.json"]),
    ("close_raw", ["close", "data/raw_table.json"]),
    ("close_idempotent", ["close", "data/eight_cycle.json"]),
    ("product_star_two", ["product", "data/star.json", "data/two_points.json"]),
    ("subspace_cycle", ["subspace", "data/eight_cycle.json",
                        "--points", "v0,v1,v2"]),
    ("quotient_limit", ["quotient", "data/eight_cycle.json",
                        "data/collapse_map.json", "--mode", "limit"]),
    ("quotient_pstop", ["quotient", "data/eight_cycle.json",
                        "data/collapse_map.json", "--mode", "pstop"]),
    ("function_space", ["function-space", "data/two_points.json",
                        "data/two_points.json"]),
    ("components_star", ["components", "data/star.json"]),
    ("components_two", ["components", "data/two_points.json"]),
    ("path_components_cycle", ["path-components", "data/eight_cycle.json"]),
    ("is_connected_cycle", ["is-connected", "data/eight_cycle.json"]),
    ("is_connected_two", ["is-connected", "data/two_points.json"]),
    ("chain_cycle", ["chain", "data/eight_cycle.json", "--from", "v0",
                     "--to", "v4", "--cover", "data/ball_cover.json"]),
    ("is_covering_double", ["is-covering", "--atlas",
                            "data/double_cover_atlas.json"]),
    ("search_atlas_double", ["search-atlas", "data/double_cover_map.json"]),
    ("lift_winding", ["lift-path", "data/double_cover_atlas.json",
                      "data/winding_walk.json", "--start", "e0"]),
    ("lift_map_obstructed", ["lift-map", "data/double_cover_atlas.json",
                             "data/cycle_inclusion.json",
                             "--basepoints", "v0,e0"]),
    ("universal_cover_cycle", ["universal-cover", "data/eight_cycle.json",
                               "--base", "v0", "--radius", "12",
                               "--budget", "1000"]),
    ("pi1_cycle", ["pi1", "data/eight_cycle.json", "--base", "v0",
                   "--max-len", "24"]),
    ("pi1_star", ["pi1", "data/star.json", "--base", "c", "--max-len", "6"]),
    ("from_cloud_circle", ["from-cloud", "data/circle8.csv",
                           "--scale", "0.9745"]),
    ("from_edges_cycle", ["from-edges", "data/cycle_edges.txt",
                          "--mode", "symmetric"]),
]


def run_cli(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


def make_golden():
    for name, argv in GOLDEN_COMMANDS:
        code, out = run_cli(argv)
        write(GOLDEN / f"{name}.out", out)
        write(GOLDEN / f"{name}.exit", f"{code}\n")


def main():
    import os

    os.chdir(ROOT)
    make_data()
    make_golden()


if __name__ == "__main__":
    sys.exit(main())
