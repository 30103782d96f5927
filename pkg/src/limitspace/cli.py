"""Command-line surface over JSON documents.

Exit codes: 0 affirmative/success, 1 negative verdict, 2 indeterminate
(homotopy budget exhausted), 3 input error.  All diagnostics go to stderr;
stdout carries exactly one canonical document per invocation.
"""

from __future__ import annotations

import argparse
import sys

from . import connectivity, constructions, covering, documents, universal
from .core import LimitSpace
from .documents import DocumentError
from .paths import HomotopySystem, walk_defect
from .connectivity import LocalCover

OK, NO, UNKNOWN, BAD_INPUT = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_space(path: str) -> documents.SpaceDocument:
    return documents.space_from_doc(documents.loads(_read(path)))


def _emit(doc: dict) -> None:
    sys.stdout.write(documents.dumps(doc))


def _default_cover(space: LimitSpace, path: str | None) -> LocalCover:
    if path is None:
        return connectivity.ball_cover(space)
    return documents.cover_from_doc(documents.loads(_read(path)), space)


def cmd_validate(args) -> int:
    doc = documents.loads(_read(args.space))
    try:
        sd = documents.space_from_doc(doc)
    except DocumentError as exc:
        if doc.get("format") == documents.SPACE_FORMAT and (
                "vmax" in doc or "convergence" in doc):
            _emit({"valid": False, "reason": str(exc)})
            return NO
        raise
    _emit({"valid": True, "closed": sd.closed, "points": len(sd.space)})
    return OK


def cmd_close(args) -> int:
    sd = _load_space(args.space)
    _emit(documents.space_to_doc(sd.space, sd.metadata))
    return OK


def cmd_product(args) -> int:
    spaces = [_load_space(p).space for p in args.spaces]
    prod, _ = constructions.product(spaces)
    _emit(documents.space_to_doc(prod))
    return OK


def cmd_subspace(args) -> int:
    sd = _load_space(args.space)
    names = [n for n in args.points.split(",") if n]
    try:
        mask = sd.space.carrier.mask_of(names)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    _emit(documents.space_to_doc(constructions.subspace(sd.space, mask)))
    return OK


def cmd_quotient(args) -> int:
    sd = _load_space(args.space)
    table = documents.map_table_from_doc(documents.loads(_read(args.map)))
    missing = set(sd.space.carrier.points) - set(table)
    if missing:
        raise DocumentError(f"projection is missing {sorted(missing)}")
    try:
        spec = constructions.quotient_spec_from_names(sd.space, table)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    out = (constructions.quotient_limit(spec) if args.mode == "limit"
           else constructions.quotient_pstop(spec))
    _emit(documents.space_to_doc(out))
    return OK


def cmd_function_space(args) -> int:
    dom = _load_space(args.domain).space
    cod = _load_space(args.codomain).space
    fs = constructions.function_space(dom, cod, bound=args.bound)
    _emit(documents.space_to_doc(fs.space))
    return OK


def cmd_components(args) -> int:
    sd = _load_space(args.space)
    parts = connectivity.components(sd.space)
    _emit({"components": sorted(sorted(sd.space.carrier.names_of(m))
                                for m in parts)})
    return OK


def cmd_path_components(args) -> int:
    from .paths import path_components

    sd = _load_space(args.space)
    parts = path_components(sd.space)
    _emit({"components": sorted(sorted(sd.space.carrier.names_of(m))
                                for m in parts)})
    return OK


def cmd_is_connected(args) -> int:
    sd = _load_space(args.space)
    witness = connectivity.disconnection_witness(sd.space)
    if witness is None:
        _emit({"connected": True})
        return OK
    a, b = witness
    _emit({"connected": False,
           "witness": [sorted(sd.space.carrier.names_of(a)),
                       sorted(sd.space.carrier.names_of(b))]})
    return NO


def cmd_chain(args) -> int:
    sd = _load_space(args.space)
    cover = _default_cover(sd.space, args.cover)
    try:
        chain = connectivity.chain_between(sd.space, args.frm, args.to, cover)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    if chain is None:
        _emit({"chain": None})
        return NO
    _emit({"chain": [sorted(sd.space.carrier.names_of(u)) for u in chain]})
    return OK


def cmd_is_covering(args) -> int:
    atlas = documents.atlas_from_doc(documents.loads(_read(args.atlas)))
    rep = covering.verify_atlas(atlas)
    _emit({"ok": rep.ok, "locally_trivial": rep.locally_trivial,
           "fibers_discrete": rep.fibers_discrete,
           "defects": rep.defects})
    return OK if rep.ok else NO


def cmd_search_atlas(args) -> int:
    m = documents.map_from_doc(documents.loads(_read(args.map)))
    try:
        atlas = covering.search_atlas(m)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    if atlas is None:
        _emit({"found": False})
        return NO
    _emit(documents.atlas_to_doc(atlas))
    return OK


def cmd_lift_path(args) -> int:
    atlas = documents.atlas_from_doc(documents.loads(_read(args.atlas)))
    walk = documents.walk_from_doc(documents.loads(_read(args.walk)), atlas.base)
    if walk_defect(walk) is not None:
        raise DocumentError("the walk is not continuous in the base space")
    try:
        lifted = covering.lift_path(atlas, walk, args.start)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    except (ValueError, covering.AtlasDefect) as exc:
        raise DocumentError(str(exc)) from exc
    _emit(documents.walk_to_doc(lifted))
    return OK


def cmd_lift_map(args) -> int:
    atlas = documents.atlas_from_doc(documents.loads(_read(args.atlas)))
    mdoc = documents.loads(_read(args.map))
    m = documents.map_from_doc(mdoc, codomain=atlas.base)
    try:
        y0, e0 = args.basepoints.split(",")
    except ValueError:
        raise DocumentError("--basepoints takes 'domain_point,total_point'")
    sys_ = HomotopySystem(atlas.base, atlas.cover, budget=args.budget)
    try:
        result = covering.lift_map(atlas, m, y0, e0, sys_)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    if result.status == "lifted":
        _emit({"status": "lifted",
               "map": {p: result.map(p) for p in m.domain.carrier.points}})
        return OK
    body = {"status": result.status, "detail": result.detail}
    if result.obstruction is not None:
        body["obstruction"] = documents.walk_to_doc(result.obstruction)
    _emit(body)
    return NO if result.status == "obstructed" else UNKNOWN


def cmd_universal_cover(args) -> int:
    sd = _load_space(args.space)
    cover = _default_cover(sd.space, args.cover)
    try:
        sys_ = HomotopySystem(sd.space, cover, budget=args.budget)
        frag = universal.build_fragment(sd.space, args.base, sys_, args.radius)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    rep = universal.verify_universal(frag, loop_len=args.loop_len)
    fs = frag.fragment_space()
    names = fs.carrier.points
    classes = []
    for i, c in enumerate(frag.classes):
        classes.append({
            "name": names[i],
            "values": list(c.walk.names()),
            "flags": "".join(c.walk.flags),
            "certified": c.certified,
            "interior": bool(frag.interior >> i & 1),
        })
    _emit({
        "format": documents.FRAGMENT_FORMAT,
        "basepoint": args.base,
        "radius": args.radius,
        "classes": classes,
        "vmax": {names[i]: sorted(fs.carrier.names_of(frag.vmax[i]))
                 for i in range(len(names))},
        "projection": {names[i]: sd.space.carrier.points[c.endpoint]
                       for i, c in enumerate(frag.classes)},
        "report": {
            "ok": rep.ok,
            "charts_ok": rep.charts_ok,
            "sheets_checked": rep.sheets_checked,
            "sheets_skipped": rep.sheets_skipped,
            "projection_continuous": rep.projection_continuous,
            "fibers_discrete": rep.fibers_discrete,
            "loops_checked": rep.loops_checked,
            "loops_trivial": rep.loops_trivial,
            "path_connected": rep.path_connected,
            "stipulating_sets": rep.stipulating_sets,
            "defects": rep.sheet_defects + rep.loop_defects,
        },
    })
    if any(not c.certified for c in frag.classes):
        return UNKNOWN
    return OK if rep.ok else NO


def cmd_pi1(args) -> int:
    sd = _load_space(args.space)
    cover = _default_cover(sd.space, args.cover)
    try:
        sys_ = HomotopySystem(sd.space, cover, budget=args.budget)
        rep = universal.pi1_probe(sd.space, args.base, sys_, args.max_len)
    except KeyError as exc:
        raise DocumentError(f"unknown point {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc
    _emit({
        "basepoint": args.base,
        "max_len": args.max_len,
        "classes": [list(c.walk.names()) for c in rep.loop_classes],
        "generators": len(rep.generators),
        "generator_walks": [list(c.walk.names()) for c in rep.generators],
        "verdict": rep.verdict,
        "shift_evidence": rep.shift_evidence,
        "uncertified": rep.uncertified,
    })
    return UNKNOWN if rep.verdict == "inconclusive" else OK


def cmd_from_cloud(args) -> int:
    cloud = documents.cloud_from_csv(_read(args.csv),
                                     documents.parse_decimal(args.scale))
    _emit(documents.space_to_doc(documents.from_cloud(cloud)))
    return OK


def cmd_from_edges(args) -> int:
    edges, points = documents.edges_from_text(_read(args.edges))
    _emit(documents.space_to_doc(
        documents.from_edges(edges, args.mode, points)))
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitspace",
        description="finite limit-space computations over JSON documents")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("validate", cmd_validate, help="check a space document")
    p.add_argument("space")
    p = add("close", cmd_close, help="close a raw table to a limit space")
    p.add_argument("space")
    p = add("product", cmd_product, help="product of spaces")
    p.add_argument("spaces", nargs="+")
    p = add("subspace", cmd_subspace, help="restrict to a subset")
    p.add_argument("space")
    p.add_argument("--points", required=True, help="comma-separated names")
    p = add("quotient", cmd_quotient, help="quotient by a surjection")
    p.add_argument("space")
    p.add_argument("map")
    p.add_argument("--mode", choices=("limit", "pstop"), default="limit")
    p = add("function-space", cmd_function_space,
            help="space of continuous maps")
    p.add_argument("domain")
    p.add_argument("codomain")
    p.add_argument("--bound", type=int, default=constructions.FUNCTION_SPACE_BOUND)
    p = add("components", cmd_components, help="connected components")
    p.add_argument("space")
    p = add("path-components", cmd_path_components, help="path components")
    p.add_argument("space")
    p = add("is-connected", cmd_is_connected, help="connectedness verdict")
    p.add_argument("space")
    p = add("chain", cmd_chain, help="chain of cover sets between two points")
    p.add_argument("space")
    p.add_argument("--from", dest="frm", required=True)
    p.add_argument("--to", required=True)
    p.add_argument("--cover", default=None)
    p = add("is-covering", cmd_is_covering, help="verify a covering atlas")
    p.add_argument("--atlas", required=True)
    p = add("search-atlas", cmd_search_atlas,
            help="search trivializations for a map document")
    p.add_argument("map")
    p = add("lift-path", cmd_lift_path, help="lift a walk through an atlas")
    p.add_argument("atlas")
    p.add_argument("walk")
    p.add_argument("--start", required=True)
    p = add("lift-map", cmd_lift_map, help="lift a map through an atlas")
    p.add_argument("atlas")
    p.add_argument("map")
    p.add_argument("--basepoints", required=True,
                   help="domain_point,total_point")
    p.add_argument("--budget", type=int, default=1000)
    p = add("universal-cover", cmd_universal_cover,
            help="radius-bounded universal-cover fragment")
    p.add_argument("space")
    p.add_argument("--base", required=True)
    p.add_argument("--cover", default=None)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--loop-len", type=int, default=16)
    p = add("pi1", cmd_pi1, help="loop-class probe at a basepoint")
    p.add_argument("space")
    p.add_argument("--base", required=True)
    p.add_argument("--cover", default=None)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--budget", type=int, default=1000)
    p = add("from-cloud", cmd_from_cloud, help="space from a scaled point cloud")
    p.add_argument("csv")
    p.add_argument("--scale", required=True)
    p = add("from-edges", cmd_from_edges, help="space from an edge list")
    p.add_argument("edges")
    p.add_argument("--mode", choices=("directed", "symmetric"),
                   default="symmetric")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DocumentError, FileNotFoundError,
            constructions.ResourceLimit, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
