"""Running search generators, either in one go or one cell-touch at a time.

A search is a generator that yields the ``SignedDigest`` it wants checked,
receives ``True`` (matches) or ``False`` (corrupted) back, and finally
returns the found ``CellCoord`` or ``None`` for a clean verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Generator

from ..auth import CostMeter, KeyMaterial, SignedDigest, check_region
from ..grid import CellCoord

Search = Generator[SignedDigest, bool, "CellCoord | None"]


def drive(search: Search, key: KeyMaterial, payload, meter: CostMeter) -> CellCoord | None:
    try:
        request = next(search)
        while True:
            ok = check_region(key, payload, request)
            meter.charge_verification(request.size)
            request = search.send(ok)
    except StopIteration as stop:
        return stop.value


class StepStatus(Enum):
    NEED_MORE_WORK = "need-more-work"
    FOUND = "found"
    CLEAN = "clean"


@dataclass(frozen=True)
class StepResult:
    status: StepStatus
    cell: CellCoord | None = None


NEED_MORE_WORK = StepResult(StepStatus.NEED_MORE_WORK)
CLEAN = StepResult(StepStatus.CLEAN)


class Stepper:
    """Resumable execution of a search where each step touches one cell.

    A verification of a region of size s spans s steps; its answer is fed
    back to the search when the last of them is consumed.
    """

    def __init__(self, search: Search, key: KeyMaterial, payload, meter: CostMeter | None = None):
        self.meter = meter if meter is not None else CostMeter()
        self._search = search
        self._key = key
        self._payload = payload
        self._pending: SignedDigest | None = None
        self._remaining = 0
        self._started = False
        self.result: StepResult | None = None

    @property
    def done(self) -> bool:
        return self.result is not None

    @property
    def pending_units(self) -> int:
        return self._remaining

    def _resume(self, answer) -> None:
        try:
            if self._started:
                request = self._search.send(answer)
            else:
                self._started = True
                request = next(self._search)
        except StopIteration as stop:
            self._pending = None
            self._remaining = 0
            self.result = CLEAN if stop.value is None else StepResult(StepStatus.FOUND, stop.value)
            return
        self._pending = request
        self._remaining = request.size

    def prime(self) -> None:
        if not self._started:
            self._resume(None)

    def step(self, units: int = 1) -> StepResult:
        """Consume ``units`` cells of the current verification (at most its remainder)."""
        if self.result is not None:
            return self.result
        self.prime()
        if self.result is not None:
            return self.result
        units = max(1, min(units, self._remaining))
        self._remaining -= units
        self.meter.cells_touched += units
        if self._remaining == 0:
            ok = check_region(self._key, self._payload, self._pending)
            self.meter.sig_verifications += 1
            self.meter.hash_computations += 1
            self._resume(ok)
            if self.result is not None:
                return self.result
        return NEED_MORE_WORK

    def run(self) -> StepResult:
        self.prime()
        while self.result is None:
            self.step(self._remaining)
        return self.result
