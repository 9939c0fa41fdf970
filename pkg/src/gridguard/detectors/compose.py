from __future__ import annotations

from typing import Iterable

from ..auth import CostMeter
from ..errors import GridGuardError
from ..grid import Grid
from ..hashstore import AdaptiveTree, BoundaryStore, HashStore, LayerSieveStore, QuadStore, SiftStore
from .adaptive import detect_adaptive
from .hybrid import detect_hybrid
from .improved import detect_improved
from .outcome import DetectionOutcome
from .probabilistic import detect_probabilistic
from .quad import detect_quad
from .sieve import detect_sieve
from .sift import detect_sift_2d
from .spread import comparison_test, spread_region

SCHEMES = ("prob", "quad", "improved", "sift", "hybrid", "sieve", "adaptive")


def _find(stores: Iterable[HashStore], cls, scheme: str):
    for s in stores:
        if isinstance(s, cls):
            return s
    raise GridGuardError(f"scheme {scheme!r} needs a {cls.__name__}")


def detect(actual: Grid, scheme: str, stores: Iterable[HashStore] = (), original: Grid | None = None,
           seed: int = 0, meter: CostMeter | None = None) -> DetectionOutcome:
    """Run one scheme without spreading."""
    stores = list(stores)
    meter = meter if meter is not None else CostMeter()
    if scheme == "prob":
        if original is None:
            raise GridGuardError("scheme 'prob' needs the original grid")
        return detect_probabilistic(actual, original, seed, meter)
    if scheme == "quad":
        return detect_quad(actual, _find(stores, QuadStore, scheme), meter)
    if scheme == "improved":
        return detect_improved(actual, _find(stores, BoundaryStore, scheme), meter)
    if scheme == "sift":
        return detect_sift_2d(actual, _find(stores, SiftStore, scheme), meter)
    if scheme == "hybrid":
        return detect_hybrid(actual, _find(stores, BoundaryStore, scheme), _find(stores, SiftStore, scheme), meter)
    if scheme == "sieve":
        return detect_sieve(actual, _find(stores, LayerSieveStore, scheme), meter)
    if scheme == "adaptive":
        return detect_adaptive(actual, _find(stores, AdaptiveTree, scheme), meter)
    raise GridGuardError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")


_CELL_STORE = {"quad": QuadStore, "improved": BoundaryStore, "sift": SiftStore,
               "hybrid": SiftStore, "adaptive": AdaptiveTree}


def locate_and_spread(actual: Grid, scheme: str, stores: Iterable[HashStore] = (),
                      original: Grid | None = None, seed: int = 0,
                      meter: CostMeter | None = None) -> DetectionOutcome:
    """Find one corrupted cell, then recover its whole component.

    The sieve returns its approximate region as-is. Per-cell tests use the
    original grid for ``prob`` and single-cell digests otherwise.
    """
    stores = list(stores)
    meter = meter if meter is not None else CostMeter()
    outcome = detect(actual, scheme, stores, original, seed, meter)
    if scheme == "sieve" or not outcome.corrupted:
        return outcome
    if scheme == "prob":
        test = comparison_test(actual, original, meter)
    else:
        test = _find(stores, _CELL_STORE[scheme], scheme).cell_test(actual, meter)
    outcome.info["locate_cells"] = meter.cells_touched
    outcome.region = spread_region(actual, test, outcome.found_cell, meter)
    outcome.meter = meter.snapshot()
    return outcome
