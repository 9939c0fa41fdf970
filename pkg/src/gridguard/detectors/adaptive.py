from __future__ import annotations

from ..auth import CostMeter, as_payload
from ..grid import CellCoord
from ..hashstore import AdaptiveTree
from .engine import drive
from .outcome import DetectionOutcome, Verdict


def adaptive_search(tree: AdaptiveTree, meter: CostMeter):
    """Root check, then at each depth scan children left to right.

    The last child is never checked: when all its siblings verify it must
    be the failing one, since children tile their parent.
    """
    if (yield tree.digest(tree.root)):
        return None
    start, length = 0, tree.N
    for depth in range(tree.height):
        meter.reach_stage(depth + 1)
        children = tree.children(start, length, depth)
        chosen = children[-1]
        for s, n in children[:-1]:
            if not (yield tree.digest(tree.node(s, n))):
                chosen = (s, n)
                break
        start, length = chosen
    return CellCoord(*divmod(start, tree.shape[1]))


def detect_adaptive(actual, tree: AdaptiveTree, meter: CostMeter | None = None) -> DetectionOutcome:
    tree.matches(actual)
    meter = meter if meter is not None else CostMeter()
    cell = drive(adaptive_search(tree, meter), tree.key, as_payload(actual), meter)
    verdict = Verdict.CLEAN if cell is None else Verdict.CORRUPTED
    return DetectionOutcome("adaptive", verdict, cell, meter=meter.snapshot())
