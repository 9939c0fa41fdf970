"""Brute-force ground truth, independent of every detector code path."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .auth import CostMeter, RegionDescriptor
from .errors import GridError
from .grid import Grid, Region, is_hv_convex
from .hashstore import SiftStore

_FOUR_NEIGHBOUR = ndimage.generate_binary_structure(2, 1)


@dataclass(frozen=True)
class DiffReport:
    corrupted: Region
    components: tuple[Region, ...]
    hv_convex: tuple[bool, ...]

    @property
    def clean(self) -> bool:
        return len(self.corrupted) == 0

    def component_of(self, cell) -> Region | None:
        for comp in self.components:
            if cell in comp:
                return comp
        return None


def _report(mask: np.ndarray) -> DiffReport:
    labels, count = ndimage.label(mask, structure=_FOUR_NEIGHBOUR)
    components = []
    for label in range(1, count + 1):
        rr, cc = np.nonzero(labels == label)
        components.append(Region(zip(rr.tolist(), cc.tolist())))
    components.sort(key=lambda comp: min(comp.cells))
    rr, cc = np.nonzero(mask)
    corrupted = Region(zip(rr.tolist(), cc.tolist()))
    return DiffReport(corrupted, tuple(components), tuple(is_hv_convex(c) for c in components))


def brute_force_diff(actual: Grid, original: Grid) -> DiffReport:
    if actual.m != original.m or actual.cell_size != original.cell_size:
        raise GridError(f"dimension mismatch: {actual!r} vs {original!r}")
    return _report((actual.cells != original.cells).any(axis=2))


def brute_force_store_scan(actual: Grid, store: SiftStore, meter: CostMeter | None = None) -> DiffReport:
    """Verify every per-cell digest (exactly N verifications)."""
    store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    mask = np.zeros((store.m, store.m), dtype=bool)
    for r in range(store.m):
        for c in range(store.m):
            mask[r, c] = not store.verify(actual, RegionDescriptor.cell(r, c), meter)
    return _report(mask)
