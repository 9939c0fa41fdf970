"""Localize a corrupted connected region of an authenticated 2-D grid."""

from .auth import (
    CostMeter,
    DescriptorKind,
    KeyMaterial,
    KeyMode,
    RegionDescriptor,
    SignedDigest,
    canonical_bytes,
    check_region,
    sign_region,
    verify_region,
)
from .detectors import (
    SCHEMES,
    ApproxRegion,
    DetectionOutcome,
    Stepper,
    Verdict,
    detect,
    detect_1d_binary,
    detect_adaptive,
    detect_hybrid,
    detect_improved,
    detect_probabilistic,
    detect_quad,
    detect_sieve,
    detect_sift_1d,
    detect_sift_2d,
    locate_and_spread,
    spread_region,
)
from .grid import (
    CellCoord,
    Grid,
    Region,
    RegionShapeSpec,
    generate_region,
    inject_corruption,
    is_connected,
    is_hv_convex,
    load_grid,
    new_grid,
    save_grid,
)
from .hashstore import (
    AdaptiveTree,
    BoundaryStore,
    DyadicLineTree,
    LayerSieveStore,
    LineSpec,
    QuadStore,
    SiftStore,
    build_adaptive_tree,
    build_boundary_store,
    build_layer_sieve,
    build_quad_store,
    build_sift_store,
    load_store,
    save_store,
    store_size,
)
from .oracle import DiffReport, brute_force_diff, brute_force_store_scan

__version__ = "0.1.0"
