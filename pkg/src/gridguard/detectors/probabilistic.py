"""Direct comparison against a trusted original by uniform sampling."""

from __future__ import annotations

import numpy as np

from ..auth import CostMeter
from ..errors import GridError
from ..grid import CellCoord, Grid
from .outcome import DetectionOutcome, Verdict


def expected_trials(n_cells: int, corrupted: int) -> float:
    """Exact mean of the first-hit index when sampling without replacement."""
    if corrupted == 0:
        return float(n_cells)
    return (n_cells + 1) / (corrupted + 1)


def detect_probabilistic(actual: Grid, original: Grid, seed: int = 0,
                         meter: CostMeter | None = None) -> DetectionOutcome:
    if actual.m != original.m or actual.cell_size != original.cell_size:
        raise GridError(f"dimension mismatch: {actual!r} vs {original!r}")
    meter = meter if meter is not None else CostMeter()
    n_cells = actual.N
    a = actual.cells.reshape(n_cells, actual.cell_size)
    o = original.cells.reshape(n_cells, original.cell_size)
    order = np.random.default_rng(seed).permutation(n_cells)
    for trial, idx in enumerate(order.tolist(), start=1):
        meter.cells_touched += 1
        meter.cell_tests += 1
        if (a[idx] != o[idx]).any():
            cell = CellCoord(*divmod(idx, actual.m))
            return DetectionOutcome("prob", Verdict.CORRUPTED, cell, trials=trial, meter=meter.snapshot())
    return DetectionOutcome("prob", Verdict.CLEAN, trials=n_cells, meter=meter.snapshot())
