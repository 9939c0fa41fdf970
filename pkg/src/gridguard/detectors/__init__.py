"""Detection schemes; each reports its cost through a CostMeter."""

from .adaptive import adaptive_search, detect_adaptive
from .compose import SCHEMES, detect, locate_and_spread
from .engine import StepResult, StepStatus, Stepper, drive
from .hybrid import detect_hybrid, improved_stepper, sift_stepper
from .improved import binary_search_1d, boundary_shape, detect_1d_binary, detect_improved, improved_search
from .outcome import OUTCOME_FIELDS, ApproxRegion, DetectionOutcome, Verdict
from .probabilistic import detect_probabilistic, expected_trials
from .quad import detect_quad, quad_search
from .sieve import detect_sieve
from .sift import detect_sift_1d, detect_sift_2d, sift_order, sift_search, sign_line_cells
from .spread import comparison_test, spread_region

__all__ = [
    "ApproxRegion", "DetectionOutcome", "OUTCOME_FIELDS", "SCHEMES", "StepResult", "StepStatus",
    "Stepper", "Verdict", "adaptive_search", "binary_search_1d", "boundary_shape", "comparison_test",
    "detect", "detect_1d_binary", "detect_adaptive", "detect_hybrid", "detect_improved",
    "detect_probabilistic", "detect_quad", "detect_sieve", "detect_sift_1d", "detect_sift_2d", "drive",
    "expected_trials", "improved_search", "improved_stepper", "locate_and_spread", "quad_search",
    "sift_order", "sift_search", "sift_stepper", "sign_line_cells", "spread_region",
]
