from __future__ import annotations

from ..auth import CostMeter
from ..errors import StoreIntegrityError
from ..grid import CellCoord, Grid
from ..hashstore import QuadStore
from .engine import drive
from .outcome import DetectionOutcome, Verdict


def quad_search(store: QuadStore, meter: CostMeter):
    """Root check, then all four quadrants per level; descend into the first failing one."""
    if (yield store.digest(store.root)):
        return None
    r0 = c0 = 0
    side = store.m
    level = 0
    while True:
        level += 1
        meter.reach_stage(level)
        failing = None
        for quadrant in store.quadrants(r0, c0, side):
            ok = yield store.digest(quadrant)
            if not ok and failing is None:
                failing = quadrant
        if failing is None:
            raise StoreIntegrityError(f"node ({r0}, {c0}, {side}) failed but none of its quadrants do")
        r0, c0, side, _ = failing.geometry
        if side == 1:
            return CellCoord(r0, c0)


def detect_quad(actual: Grid, store: QuadStore, meter: CostMeter | None = None) -> DetectionOutcome:
    store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    cell = drive(quad_search(store, meter), store.key, actual.cells, meter)
    verdict = Verdict.CLEAN if cell is None else Verdict.CORRUPTED
    return DetectionOutcome("quad", verdict, cell, meter=meter.snapshot())
