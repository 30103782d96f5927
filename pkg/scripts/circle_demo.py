"""End-to-end tour on the scaled circle: build the space from a point cloud,
check its connectivity, verify the double cover, lift the winding loop, grow
a universal-cover fragment, and probe the loop classes.

Run from the repository root:  python scripts/circle_demo.py [radius]
"""

import math
import sys

from limitspace.connectivity import ball_cover, is_connected
from limitspace.core import map_from_names
from limitspace.covering import lift_map, lift_path, search_atlas, verify_atlas
from limitspace.documents import ScaledCloud, from_cloud, from_edges, parse_decimal
from limitspace.paths import HomotopySystem, constant_walk, homotopic, walk_from_names
from limitspace.universal import build_fragment, pi1_probe, verify_universal


def scaled_circle(n=8):
    radius = n / (2 * math.pi)
    pts = []
    for i in range(n):
        x = round(radius * math.cos(2 * math.pi * i / n), 9)
        y = round(radius * math.sin(2 * math.pi * i / n), 9)
        pts.append((f"v{i}", (parse_decimal(f"{x:.9f}"), parse_decimal(f"{y:.9f}"))))
    return from_cloud(ScaledCloud(tuple(pts), parse_decimal("0.9745")))


def main():
    radius = int(sys.argv[1]) if len(sys.argv) > 1 else 24
    circle = scaled_circle()
    print("scaled circle, V(v0):", " ".join(circle.v("v0")))
    print("connected:", is_connected(circle))

    double = from_edges([(f"e{k}", f"e{(k + 1) % 16}") for k in range(16)],
                        "symmetric")
    p = map_from_names(double, circle, {f"e{k}": f"v{k % 8}" for k in range(16)})
    atlas = search_atlas(p)
    print("double cover verifies:", verify_atlas(atlas).ok)

    winding = walk_from_names(circle, [f"v{i}" for i in range(8)] + ["v0"])
    print("winding loop lifts to:", " ".join(lift_path(atlas, winding, "e0").names()))

    sys_ = HomotopySystem(circle, ball_cover(circle), budget=1000)
    print("winding vs constant:",
          homotopic(winding, constant_walk(circle, "v0"), sys_).answer)

    frag = build_fragment(circle, "v0", sys_, radius)
    rep = verify_universal(frag, loop_len=16)
    interior = bin(frag.interior).count("1")
    print(f"fragment at radius {radius}: {len(frag.classes)} classes, "
          f"{interior} interior, verification {'ok' if rep.ok else 'FAILED'}")

    probe = pi1_probe(circle, "v0", sys_, radius)
    print(f"loop probe: {len(probe.loop_classes)} classes, "
          f"{len(probe.generators)} generator(s), verdict {probe.verdict}")

    inclusion = map_from_names(circle, circle,
                               {f"v{i}": f"v{i}" for i in range(8)})
    res = lift_map(atlas, inclusion, "v0", "e0", sys_)
    print("lifting the identity through the double cover:", res.status)


if __name__ == "__main__":
    main()
