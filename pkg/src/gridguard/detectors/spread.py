from __future__ import annotations

from collections import deque
from typing import Callable

from ..auth import CostMeter
from ..errors import NotCorruptedError
from ..grid import CellCoord, Grid, Region, neighbors4

CellTest = Callable[[CellCoord], bool]


def comparison_test(actual: Grid, original: Grid, meter: CostMeter) -> CellTest:
    """Per-cell test by byte comparison with a trusted original."""

    def is_corrupted(cell) -> bool:
        meter.cells_touched += 1
        r, c = cell
        return bool((actual.cells[r, c] != original.cells[r, c]).any())

    return is_corrupted


def spread_region(actual: Grid, is_corrupted: CellTest, seed_cell: tuple[int, int],
                  meter: CostMeter | None = None) -> Region:
    """Breadth-first recovery of the corrupted 4-connected component of ``seed_cell``.

    Every cell is tested at most once, so tests <= 1 + 4t.
    """
    meter = meter if meter is not None else CostMeter()
    seed_cell = CellCoord(*seed_cell)
    meter.cell_tests += 1
    if not is_corrupted(seed_cell):
        raise NotCorruptedError(f"seed cell {tuple(seed_cell)} is not corrupted")
    tested = {seed_cell}
    found = {seed_cell}
    queue = deque([seed_cell])
    while queue:
        cell = queue.popleft()
        for nb in neighbors4(cell, actual.m):
            if nb in tested:
                continue
            tested.add(nb)
            meter.cell_tests += 1
            meter.neighbor_probes += 1
            if is_corrupted(nb):
                found.add(nb)
                queue.append(nb)
    return Region(found)
