"""Staged sifting: check positions at multiples of L/2^k, finer each stage."""

from __future__ import annotations

from typing import Sequence

from ..auth import CostMeter, KeyMaterial, RegionDescriptor, SignedDigest, as_payload
from ..errors import StoreIntegrityError
from ..grid import CellCoord, Grid
from ..hashstore import SiftStore
from .engine import drive
from .outcome import DetectionOutcome, Verdict


def sift_order(length: int) -> list[tuple[int, int]]:
    """(stage, 0-based index) pairs in checking order.

    Positions are 1-based multiples of length/2^k; position p is index p-1,
    so "position L" is the last index.
    """
    if length == 1:
        return [(1, 0)]
    out = []
    k = 1
    spacing = length // 2
    while spacing >= 1:
        for p in range(spacing, length + 1, spacing):
            if k == 1 or p % (2 * spacing):
                out.append((k, p - 1))
        spacing //= 2
        k += 1
    return out


def sift_line_search(cell_digests: Sequence[SignedDigest], trace: dict | None = None):
    trace = trace if trace is not None else {}
    checked = 0
    for stage, idx in sift_order(len(cell_digests)):
        checked += 1
        trace["line_stage"] = stage
        trace["line_checks"] = checked
        if not (yield cell_digests[idx]):
            return idx
    return None


def detect_sift_1d(line_payload, cell_digests: Sequence[SignedDigest], key: KeyMaterial,
                   meter: CostMeter | None = None) -> CellCoord | None:
    """Sift one line given its per-cell digests (in line order); None means clean."""
    meter = meter if meter is not None else CostMeter()
    trace: dict = {}
    idx = drive(sift_line_search(cell_digests, trace), key, as_payload(line_payload), meter)
    meter.reach_stage(trace.get("line_stage", 0))
    if idx is None:
        return None
    r, c = cell_digests[idx].descriptor.geometry[:2]
    return CellCoord(r, c)


def sign_line_cells(payload, key: KeyMaterial, cells: Sequence[tuple[int, int]]) -> list[SignedDigest]:
    from ..auth import sign_region

    payload = as_payload(payload)
    return [sign_region(key, payload, RegionDescriptor.cell(r, c)) for r, c in cells]


def sift_search(store: SiftStore, meter: CostMeter, trace: dict | None = None):
    trace = trace if trace is not None else {}
    m = store.m
    trace["column_checks"] = 0
    for stage, col in sift_order(m):
        meter.reach_stage(stage)
        trace["column_checks"] += 1
        if not (yield store.digest(store.column(col))):
            trace["column"] = col
            cells = [store.digest(RegionDescriptor.cell(r, col)) for r in range(m)]
            row = yield from sift_line_search(cells, trace)
            if row is None:
                raise StoreIntegrityError(f"column {col} fails but all its cells verify")
            return CellCoord(row, col)
    return None


def detect_sift_2d(actual: Grid, store: SiftStore, meter: CostMeter | None = None) -> DetectionOutcome:
    store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    trace: dict = {}
    cell = drive(sift_search(store, meter, trace), store.key, actual.cells, meter)
    verdict = Verdict.CLEAN if cell is None else Verdict.CORRUPTED
    return DetectionOutcome("sift", verdict, cell, meter=meter.snapshot(), info=trace)
