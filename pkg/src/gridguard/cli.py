"""gridguard command line: gen, corrupt, build, detect, bench.

Exit codes: 0 clean (or success), 3 corrupted, 1 runtime error, 2 usage error.
MAC key material comes from the GRIDGUARD_KEY environment variable (hex).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .auth import KeyMaterial, KeyMode
from .bench import run_bench, write_csv
from .detectors.compose import SCHEMES, detect, locate_and_spread
from .detectors.outcome import ApproxRegion
from .errors import GridGuardError, MissingKeyError
from .grid import RegionShapeSpec, generate_region, grid_from_bytes, inject_corruption, new_grid, save_grid
from .hashstore import STORE_NAMES, build_store, load_store

EXIT_CLEAN = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CORRUPTED = 3

KEY_ENV = "GRIDGUARD_KEY"
_SHAPES = {"rect": "rectangle", "disc": "disc", "random": "random-connected", "hvconvex": "hv-convex-random"}


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _coord(text: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROW,COL, got {text!r}") from None
    return r, c


def _power_of_two(text: str) -> int:
    value = int(text)
    if value < 2 or value & (value - 1):
        raise argparse.ArgumentTypeError(f"--m must be a power of 2 >= 2, got {value}")
    return value


def _mac_key(required: bool = True) -> KeyMaterial | None:
    raw = os.environ.get(KEY_ENV)
    if not raw:
        if required:
            raise MissingKeyError(f"set {KEY_ENV} to a hex MAC key")
        return None
    try:
        return KeyMaterial.mac(bytes.fromhex(raw.strip()))
    except ValueError:
        raise MissingKeyError(f"{KEY_ENV} is not valid hex") from None


def _read_grid(path: str):
    return grid_from_bytes(Path(path).read_bytes())


def _load_store(path: str):
    with open(path, "rb") as f:
        head = f.read(6)
    mode = KeyMode(head[5]) if len(head) == 6 else KeyMode.MAC
    key = _mac_key(required=True) if mode == KeyMode.MAC else None
    with open(path, "rb") as f:
        return load_store(f, key)


def cmd_gen(args) -> int:
    grid = new_grid(args.m, args.cell_size, args.seed)
    with open(args.out, "wb") as f:
        written = save_grid(grid, f)
    print(f"wrote {args.out}: m={grid.m} N={grid.N} cell_size={grid.cell_size} ({written} bytes)")
    return EXIT_CLEAN


def _shape_spec(args) -> RegionShapeSpec:
    kind = _SHAPES[args.shape]
    at = args.at
    if kind == "rectangle":
        if "x" in args.size:
            rows, cols = (int(v) for v in args.size.lower().split("x"))
        else:
            rows = cols = int(args.size)
        return RegionShapeSpec(kind, at, extents=(rows, cols), seed=args.seed)
    if kind == "disc":
        return RegionShapeSpec(kind, at, radius=int(args.size), seed=args.seed)
    return RegionShapeSpec(kind, at, target=int(args.size), seed=args.seed)


def cmd_corrupt(args) -> int:
    grid = _read_grid(args.grid)
    spec = _shape_spec(args)
    region = generate_region(grid, spec)
    bad = inject_corruption(grid, region, seed=args.seed)
    with open(args.out, "wb") as f:
        save_grid(bad, f)
    manifest = {
        "m": grid.m,
        "shape": args.shape,
        "at": list(args.at),
        "size": args.size,
        "seed": args.seed,
        "count": len(region),
        "cells": [list(c) for c in region],
    }
    manifest_path = args.manifest or f"{args.out}.json"
    Path(manifest_path).write_text(json.dumps(manifest, indent=1) + "\n")
    print(f"wrote {args.out} with {len(region)} corrupted cells; manifest {manifest_path}")
    return EXIT_CLEAN


def cmd_build(args) -> int:
    grid = _read_grid(args.grid)
    if args.mode == "mac":
        key = _mac_key(required=True)
    else:
        if not args.signing_key:
            raise MissingKeyError("--mode sig needs --signing-key FILE (hex Ed25519 seed)")
        key = KeyMaterial.signature(bytes.fromhex(Path(args.signing_key).read_text().strip()))
    store = build_store(args.store, grid, key)
    with open(args.out, "wb") as f:
        store.save(f)
    print(len(store))
    return EXIT_CLEAN


def _describe(outcome) -> list[str]:
    lines = [f"verdict: {outcome.verdict.value}"]
    if outcome.found_cell is not None:
        lines.append(f"found cell: {outcome.found_cell.row},{outcome.found_cell.col}")
    if isinstance(outcome.region, ApproxRegion):
        r0, c0, r1, c1 = outcome.region.bounds()
        lines.append(f"approximate region: rows {r0}..{r1} cols {c0}..{c1} ({len(outcome.region)} candidate cells)")
    elif outcome.region is not None:
        lines.append(f"region size: {len(outcome.region)}")
    if outcome.trials is not None:
        lines.append(f"trials: {outcome.trials}")
    mt = outcome.meter
    lines.append(f"sig_verifications: {mt.sig_verifications}")
    lines.append(f"cells_touched: {mt.cells_touched}")
    lines.append(f"hash_computations: {mt.hash_computations}")
    return lines


def cmd_detect(args) -> int:
    actual = _read_grid(args.grid)
    stores = [_load_store(p) for p in args.store]
    original = _read_grid(args.original) if args.original else None
    run = detect if args.no_spread else locate_and_spread
    outcome = run(actual, args.scheme, stores, original=original, seed=args.seed)
    if args.json:
        print(json.dumps(outcome.to_dict(), sort_keys=True))
    else:
        print("\n".join(_describe(outcome)))
    return EXIT_CORRUPTED if outcome.corrupted else EXIT_CLEAN


def cmd_bench(args) -> int:
    key = _mac_key(required=False)
    records = run_bench(args.m_list, args.c_list, args.shapes, args.runs, args.schemes,
                        seed=args.seed, key=key, timing=args.wall_time)
    if args.out:
        with open(args.out, "w", newline="") as f:
            write_csv(records, f)
    else:
        write_csv(records, sys.stdout)
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gridguard", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a seeded random grid")
    p.add_argument("--m", type=_power_of_two, required=True)
    p.add_argument("--cell-size", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("corrupt", help="inject a connected corrupted region")
    p.add_argument("--grid", required=True)
    p.add_argument("--shape", choices=sorted(_SHAPES), required=True)
    p.add_argument("--at", type=_coord, default=(0, 0), help="ROW,COL anchor")
    p.add_argument("--size", required=True, help="rect: HxW or S; disc: radius; random/hvconvex: cell count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest", help="manifest path (default: OUT.json)")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("build", help="build a signed-hash store for a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--store", choices=list(STORE_NAMES), required=True)
    p.add_argument("--mode", choices=("mac", "sig"), default="mac")
    p.add_argument("--signing-key", help="file holding a hex Ed25519 seed (sig mode)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("detect", help="locate corruption in a grid")
    p.add_argument("--grid", required=True)
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--store", action="append", default=[], help="store file (repeat for hybrid)")
    p.add_argument("--original", help="trusted original grid (scheme prob)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-spread", action="store_true", help="stop at the first found cell")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("bench", help="emit a CSV cost sweep")
    p.add_argument("--m-list", type=_int_list, default=[64])
    p.add_argument("--c-list", type=_int_list, default=[1, 4, 16, 64, 256, 1024])
    p.add_argument("--shapes", type=_str_list, default=["rect", "disc"])
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--schemes", type=_str_list, default=["improved", "sift", "hybrid"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wall-time", action="store_true", help="fill wall_ms (output no longer reproducible)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GridGuardError, OSError, ValueError) as exc:
        print(f"gridguard: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
