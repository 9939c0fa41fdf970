from __future__ import annotations

from ..auth import CostMeter
from ..errors import StoreIntegrityError
from ..grid import Grid
from ..hashstore import LayerSieveStore
from .outcome import ApproxRegion, DetectionOutcome, Verdict


def detect_sieve(actual: Grid, store: LayerSieveStore, meter: CostMeter | None = None) -> DetectionOutcome:
    """Check every row and column digest; failing rows x failing columns covers C.

    Always exactly 2m verifications. The verdict carries no single found
    cell because no member of the product is individually certified.
    """
    store.matches(actual)
    meter = meter if meter is not None else CostMeter()
    rows = frozenset(r for r in range(store.m) if not store.verify(actual, store.row(r), meter))
    cols = frozenset(c for c in range(store.m) if not store.verify(actual, store.column(c), meter))
    meter.reach_stage(1)
    if not rows and not cols:
        return DetectionOutcome("sieve", Verdict.CLEAN, meter=meter.snapshot())
    if not rows or not cols:
        raise StoreIntegrityError(
            f"{len(rows)} rows but {len(cols)} columns fail; the layers disagree"
        )
    approx = ApproxRegion(rows, cols)
    return DetectionOutcome("sieve", Verdict.CORRUPTED, region=approx, meter=meter.snapshot(),
                            info={"approx_size": len(approx)})
