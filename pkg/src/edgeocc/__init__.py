"""Fast edge-aware occlusion detection on disparity maps for camera arrays."""

from .core import (
    DirectionSpec,
    DisparityError,
    DisparityMap,
    OcclusionMask,
    disparity_stats,
    eight_directions,
    fuse_median,
    random_rects_scene,
    square_scene,
    step_scene,
    synth_scene,
)
from .detector import (
    DetectorConfig,
    ScanLine,
    build_scanline,
    count_occlusions,
    detect,
    detect_array,
    rasterize,
    scan_length,
    warp_and_sort,
)
from .edges import EdgeField, compute_edge_fields, select_candidates
from .evaluation import ConfusionStats, confusion, metrics, render_confusion
from .oracle import OracleConfig, oracle_array, oracle_detect

__version__ = "0.1.0"
