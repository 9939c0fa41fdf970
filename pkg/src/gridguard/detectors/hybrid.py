"""Run the improved scheme and the sifting scheme side by side.

Both run as Steppers under strict alternation, one touched cell per turn,
improved scheme first. The first to find a corrupted cell wins.
"""

from __future__ import annotations

from ..auth import CostMeter
from ..errors import ConvexityViolationError
from ..grid import Grid
from ..hashstore import BoundaryStore, SiftStore
from .engine import StepStatus, Stepper
from .improved import improved_search
from .outcome import DetectionOutcome, Verdict
from .sift import sift_search


def improved_stepper(actual: Grid, store: BoundaryStore, trace: dict | None = None) -> Stepper:
    meter = CostMeter()
    return Stepper(improved_search(store, meter, trace), store.key, actual.cells, meter)


def sift_stepper(actual: Grid, store: SiftStore, trace: dict | None = None) -> Stepper:
    meter = CostMeter()
    return Stepper(sift_search(store, meter, trace), store.key, actual.cells, meter)


def detect_hybrid(actual: Grid, boundary_store: BoundaryStore, sift_store: SiftStore,
                  meter: CostMeter | None = None) -> DetectionOutcome:
    boundary_store.matches(actual)
    sift_store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    traces = {"improved": {}, "sift": {}}
    steppers = {
        "improved": improved_stepper(actual, boundary_store, traces["improved"]),
        "sift": sift_stepper(actual, sift_store, traces["sift"]),
    }
    failed: dict[str, str] = {}

    def live():
        return [name for name, s in steppers.items() if not s.done and name not in failed]

    def guarded_step(name, units=1):
        try:
            return steppers[name].step(units)
        except ConvexityViolationError as exc:
            failed[name] = str(exc)
            return None

    for name in list(steppers):
        try:
            steppers[name].prime()
        except ConvexityViolationError as exc:
            failed[name] = str(exc)

    winner = None
    while winner is None:
        names = live()
        if not names:
            break
        if len(names) == 2:
            # skip ahead while neither verification can complete; same as alternating
            bulk = min(steppers[n].pending_units for n in names) - 1
            if bulk > 0:
                for n in names:
                    guarded_step(n, bulk)
            for n in names:
                res = guarded_step(n)
                if res is not None and res.status == StepStatus.FOUND:
                    winner = n
                    break
        else:
            n = names[0]
            res = guarded_step(n, max(1, steppers[n].pending_units))
            if res is not None and res.status == StepStatus.FOUND:
                winner = n

    for s in steppers.values():
        meter.add(s.meter)
    info = {
        "improved_cells": steppers["improved"].meter.cells_touched,
        "sift_cells": steppers["sift"].meter.cells_touched,
        "winner": winner,
    }
    info.update({f"{name}_error": msg for name, msg in failed.items()})
    if winner is None:
        return DetectionOutcome("hybrid", Verdict.CLEAN, meter=meter.snapshot(), info=info)
    cell = steppers[winner].result.cell
    return DetectionOutcome("hybrid", Verdict.CORRUPTED, cell, meter=meter.snapshot(), info=info)
