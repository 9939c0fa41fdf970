"""Seeded cost sweeps over schemes, sizes and region shapes, emitted as CSV."""

from __future__ import annotations

import csv
import math
import time
from dataclasses import astuple, dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .auth import KeyMaterial
from .detectors.compose import SCHEMES, detect
from .errors import GridGuardError, NonConformingSizeError, RegionError
from .grid import Region, RegionShapeSpec, disc_cells, generate_region, inject_corruption, new_grid
from .hashstore import adaptive_height, build_store

CSV_HEADER = ("scheme", "m", "N", "shape", "C", "seed", "sig_verifications", "cells_touched",
              "hash_computations", "trials", "wall_ms")
BENCH_SHAPES = ("rect", "disc", "random", "hvconvex")
DEFAULT_BENCH_KEY = b"gridguard-bench-key"

_SCHEME_STORES = {
    "prob": (),
    "quad": ("quad",),
    "improved": ("boundary",),
    "sift": ("sift",),
    "hybrid": ("boundary", "sift"),
    "sieve": ("sieve",),
    "adaptive": ("adaptive",),
}


@dataclass(frozen=True)
class BenchRecord:
    scheme: str
    m: int
    N: int
    shape: str
    C: int
    seed: int
    sig_verifications: int
    cells_touched: int
    hash_computations: int
    trials: int | None
    wall_ms: float | None

    def row(self) -> list:
        return ["" if v is None else v for v in astuple(self)]


def _rect_extents(count: int, m: int) -> tuple[int, int]:
    h = max(d for d in range(1, math.isqrt(count) + 1) if count % d == 0)
    w = count // h
    if w > m:
        raise RegionError(f"no rectangle of {count} cells fits a {m}x{m} grid")
    return h, w


def _disc_radius(count: int) -> int:
    best, best_err, r = 0, count - 1, 0
    while True:
        n = len(disc_cells((0, 0), r))
        if abs(n - count) < best_err:
            best, best_err = r, abs(n - count)
        if n >= count:
            return best
        r += 1


def make_region(m: int, shape: str, count: int, seed: int) -> Region:
    """A region of roughly ``count`` cells at a seeded random position."""
    rng = np.random.default_rng([seed, m, count, BENCH_SHAPES.index(shape)])
    if shape == "rect":
        h, w = _rect_extents(count, m)
        r0 = int(rng.integers(0, m - h + 1))
        c0 = int(rng.integers(0, m - w + 1))
        return generate_region(m, RegionShapeSpec("rectangle", (r0, c0), (h, w)))
    if shape == "disc":
        radius = _disc_radius(count)
        if 2 * radius + 1 > m:
            raise RegionError(f"no disc of ~{count} cells fits a {m}x{m} grid")
        center = (int(rng.integers(radius, m - radius)), int(rng.integers(radius, m - radius)))
        return generate_region(m, RegionShapeSpec("disc", center, radius=radius))
    if shape in ("random", "hvconvex"):
        kind = "random-connected" if shape == "random" else "hv-convex-random"
        anchor = (int(rng.integers(0, m)), int(rng.integers(0, m)))
        return generate_region(m, RegionShapeSpec(kind, anchor, target=count, seed=int(rng.integers(2**31))))
    raise RegionError(f"unknown bench shape {shape!r}")


def run_bench(m_list: Sequence[int], c_list: Sequence[int], shapes: Sequence[str] = ("rect",),
              runs: int = 1, schemes: Sequence[str] = ("improved", "sift"), seed: int = 0,
              key: KeyMaterial | None = None, timing: bool = False) -> list[BenchRecord]:
    """Run every (scheme, m, shape, C, run) combination; rows in sorted order.

    Run r uses seed ``seed + r`` for placement, injection and sampling.
    ``wall_ms`` is filled only when ``timing`` is set so that untimed
    output is byte-reproducible.
    """
    for s in schemes:
        if s not in SCHEMES:
            raise GridGuardError(f"unknown scheme {s!r}")
    for shape in shapes:
        if shape not in BENCH_SHAPES:
            raise GridGuardError(f"unknown shape {shape!r}")
    if not (m_list and c_list and shapes and schemes) or runs < 1:
        raise GridGuardError("empty sweep")
    key = key if key is not None else KeyMaterial.mac(DEFAULT_BENCH_KEY)
    records = []
    for m in m_list:
        grid = new_grid(m, seed=seed)
        active = list(schemes)
        if "adaptive" in active:
            try:
                adaptive_height(m * m)
            except NonConformingSizeError:
                active.remove("adaptive")
        needed = {name for s in active for name in _SCHEME_STORES[s]}
        stores = {name: build_store(name, grid, key) for name in sorted(needed)}
        for shape in shapes:
            for count in c_list:
                if count > m * m:
                    continue
                for r in range(runs):
                    run_seed = seed + r
                    try:
                        region = make_region(m, shape, count, run_seed)
                    except RegionError:
                        continue
                    actual = inject_corruption(grid, region, seed=run_seed)
                    for scheme in active:
                        chosen = [stores[n] for n in _SCHEME_STORES[scheme]]
                        t0 = time.perf_counter()
                        outcome = detect(actual, scheme, chosen, original=grid, seed=run_seed)
                        wall = (time.perf_counter() - t0) * 1000.0 if timing else None
                        mt = outcome.meter
                        records.append(BenchRecord(
                            scheme, m, m * m, shape, len(region), run_seed, mt.sig_verifications,
                            mt.cells_touched, mt.hash_computations, outcome.trials,
                            round(wall, 3) if wall is not None else None,
                        ))
    order = {s: i for i, s in enumerate(SCHEMES)}
    records.sort(key=lambda rec: (order[rec.scheme], rec.m, rec.shape, rec.C, rec.seed))
    if not records:
        raise GridGuardError("empty sweep: no instance fits the requested sizes")
    return records


def write_csv(records: Iterable[BenchRecord], sink: TextIO) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.row())
