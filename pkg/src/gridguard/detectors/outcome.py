from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..auth import CostMeter
from ..grid import CellCoord, Region


class Verdict(str, Enum):
    CLEAN = "clean"
    CORRUPTED = "corrupted"


@dataclass(frozen=True)
class ApproxRegion:
    """Failing rows x failing columns; a superset of the true corrupted set."""

    corrupted_rows: frozenset
    corrupted_cols: frozenset

    @property
    def candidates(self) -> Region:
        return Region((r, c) for r in self.corrupted_rows for c in self.corrupted_cols)

    def __len__(self):
        return len(self.corrupted_rows) * len(self.corrupted_cols)

    def __contains__(self, cell):
        return cell[0] in self.corrupted_rows and cell[1] in self.corrupted_cols

    def bounds(self) -> tuple[int, int, int, int]:
        return (min(self.corrupted_rows), min(self.corrupted_cols),
                max(self.corrupted_rows), max(self.corrupted_cols))


@dataclass
class DetectionOutcome:
    scheme: str
    verdict: Verdict
    found_cell: CellCoord | None = None
    region: Region | ApproxRegion | None = None
    trials: int | None = None
    meter: CostMeter = field(default_factory=CostMeter)
    info: dict = field(default_factory=dict)

    @property
    def corrupted(self) -> bool:
        return self.verdict == Verdict.CORRUPTED

    def to_dict(self) -> dict:
        out = {
            "scheme": self.scheme,
            "verdict": self.verdict.value,
            "found_cell": list(self.found_cell) if self.found_cell is not None else None,
            "region": None,
            "trials": self.trials,
            "meter": self.meter.as_dict(),
            "info": {k: v for k, v in self.info.items() if isinstance(v, (int, str, float, bool, type(None)))},
        }
        if isinstance(self.region, ApproxRegion):
            r0, c0, r1, c1 = self.region.bounds()
            out["region"] = {
                "kind": "approximate",
                "size": len(self.region),
                "rows": sorted(self.region.corrupted_rows),
                "cols": sorted(self.region.corrupted_cols),
                "bounds": [r0, c0, r1, c1],
            }
        elif isinstance(self.region, Region):
            out["region"] = {
                "kind": "exact",
                "size": len(self.region),
                "cells": [list(c) for c in self.region],
            }
        return out


OUTCOME_FIELDS = ("scheme", "verdict", "found_cell", "region", "trials", "meter", "info")
