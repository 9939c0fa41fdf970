"""Quadrant descent that switches to 1-D binary search on median lines."""

from __future__ import annotations

from ..auth import CostMeter, as_payload
from ..errors import CleanLineError, ConvexityViolationError, StoreIntegrityError
from ..grid import CellCoord, Grid
from ..hashstore import BoundaryStore, DyadicLineTree
from .engine import drive
from .outcome import DetectionOutcome, Verdict

NW, NE, SW, SE = range(4)


def binary_search_1d(tree: DyadicLineTree, trace: dict | None = None, confirm: bool = False):
    """Halve the line until both halves fail (return the middle cell) or one cell is left.

    The middle cell is the last cell of the left half. With ``confirm`` it is
    verified first and, failing that, the first cell of the right half; this
    costs extra checks and only matters when the run is not contiguous.
    """
    trace = trace if trace is not None else {}
    line = tree.line
    lo, n = 0, line.length
    iterations = 0
    if n == 1:
        trace["iterations"] = 1
        if (yield tree.digest(0, 1)):
            raise CleanLineError(f"line {line} is clean")
        return line.cell(0)
    while n > 1:
        iterations += 1
        trace["iterations"] = iterations
        half = n // 2
        left_ok = yield tree.digest(lo, half)
        right_ok = yield tree.digest(lo + half, half)
        if not left_ok and not right_ok:
            mid = lo + half - 1
            if not confirm:
                return line.cell(mid)
            if not (yield tree.digest(mid, 1)):
                return line.cell(mid)
            if not (yield tree.digest(mid + 1, 1)):
                return line.cell(mid + 1)
            raise ConvexityViolationError(f"both halves around offset {mid} fail but neither middle cell does")
        if left_ok and right_ok:
            if iterations == 1:
                raise CleanLineError(f"line {line} is clean")
            raise StoreIntegrityError(f"failing interval at offset {lo} has two clean halves")
        if right_ok:
            n = half
        else:
            lo, n = lo + half, half
    return line.cell(lo)


def detect_1d_binary(line_payload, tree: DyadicLineTree, meter: CostMeter | None = None,
                     confirm: bool = False) -> CellCoord:
    """Find one corrupted cell of a line whose corrupted cells form one run.

    ``meter.stage`` receives the number of halving iterations.
    """
    meter = meter if meter is not None else CostMeter()
    trace: dict = {}
    try:
        return drive(binary_search_1d(tree, trace, confirm), tree.key, as_payload(line_payload), meter)
    finally:
        meter.reach_stage(trace.get("iterations", 0))


def boundary_shape(failing: list[int]) -> str:
    """Name of the union of boundaries between the failing quadrants."""
    if len(failing) == 4:
        return "+"
    if len(failing) == 3:
        return "T"
    pair = set(failing)
    if pair in ({NW, NE}, {SW, SE}):
        return "I"
    if pair in ({NW, SW}, {NE, SE}):
        return "-"
    return "+"


def improved_search(store: BoundaryStore, meter: CostMeter, trace: dict | None = None):
    trace = trace if trace is not None else {}
    r0 = c0 = 0
    side = store.m
    level = 0
    while True:
        meter.reach_stage(level + 1)
        quadrants = store.quadrants(r0, c0, side)
        failing = []
        for i, quadrant in enumerate(quadrants):
            if not (yield store.digest(quadrant)):
                failing.append(i)
        if not failing:
            if level == 0:
                return None
            raise StoreIntegrityError(f"node ({r0}, {c0}, {side}) failed but none of its quadrants do")
        first = quadrants[failing[0]]
        if side == 2:
            return CellCoord(first.geometry[0], first.geometry[1])
        if len(failing) == 1:
            r0, c0, side, _ = first.geometry
            level += 1
            continue

        trace["switch_level"] = level
        trace["boundary"] = boundary_shape(failing)
        vertical, horizontal = store.line_trees(r0, c0, side)
        lines = []
        if {i % 2 for i in failing} == {0, 1}:
            lines.append(vertical)
        if {i // 2 for i in failing} == {0, 1}:
            lines.append(horizontal)
        for tree in lines:
            try:
                cell = yield from binary_search_1d(tree, trace)
            except CleanLineError:
                continue
            trace["line"] = tree.line.orientation
            return cell
        raise ConvexityViolationError(
            f"quadrants {failing} of node ({r0}, {c0}, {side}) fail but every boundary line is clean"
        )


def detect_improved(actual: Grid, store: BoundaryStore, meter: CostMeter | None = None) -> DetectionOutcome:
    store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    trace: dict = {}
    cell = drive(improved_search(store, meter, trace), store.key, actual.cells, meter)
    verdict = Verdict.CLEAN if cell is None else Verdict.CORRUPTED
    return DetectionOutcome("improved", verdict, cell, meter=meter.snapshot(), info=trace)
