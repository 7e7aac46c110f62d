"""Edge-aware scan-line occlusion detector.

Only pixels near disparity edges can become occluded, so the detector
scans short 1D lines through the edge candidates instead of warping the
whole map. Each line is warped (``w = g + v``), stably sorted by warped
position, and an entry is marked occluded when one of its ``N`` nearest
sorted neighbours lands within ``t_dist`` and is closer to the camera by
more than ``t_disp``.

:func:`build_scanline`, :func:`warp_and_sort`, :func:`count_occlusions` and
:func:`rasterize` are the step-by-step reference; :func:`detect` runs the
same steps fused in a compiled kernel.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._kernels import scan_candidates
from .core import DirectionSpec, OcclusionMask, as_disparity, disparity_stats
from .edges import EdgeField, compute_edge_fields, select_candidates

CHUNK = 4096


@dataclass(frozen=True)
class DetectorConfig:
    t_edge: float = 1.0
    t_dist: float = 2.0
    t_disp: float = 0.5
    neighbors: int = 8
    max_scan_length: int = 4096

    def __post_init__(self):
        if not self.t_edge > 0:
            raise ValueError(f"t_edge must be > 0, got {self.t_edge}")
        if not self.t_dist > 0:
            raise ValueError(f"t_dist must be > 0, got {self.t_dist}")
        if not self.t_disp >= 0:
            raise ValueError(f"t_disp must be >= 0, got {self.t_disp}")
        if self.neighbors < 2 or self.neighbors % 2:
            raise ValueError(f"neighbors must be an even integer >= 2, got {self.neighbors}")
        if self.max_scan_length < 1:
            raise ValueError(f"max_scan_length must be positive, got {self.max_scan_length}")


@dataclass
class ScanLine:
    candidate: tuple[int, int]
    g: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    v: np.ndarray
    w: np.ndarray
    sort_idx: np.ndarray | None = None
    occl_count: np.ndarray | None = None

    def __len__(self):
        return len(self.g)


@dataclass(frozen=True)
class DetectionStats:
    baseline_degrees: float
    candidates: int
    scan_length: int
    occluded: int


def scan_length(d_min: float, d_max: float, cap: int = 4096) -> int:
    """Total scan-line length: twice the disparity range, capped."""
    if d_max < d_min:
        raise ValueError(f"d_max {d_max} < d_min {d_min}")
    return int(min(cap, math.ceil((d_max - d_min) * 2)))


def round_half_away(t):
    t = np.asarray(t, dtype=np.float64)
    return (np.sign(t) * np.floor(np.abs(t) + 0.5)).astype(np.int64)


def build_scanline(candidate, direction: DirectionSpec, L: int, d) -> ScanLine:
    if L <= 0:
        raise ValueError("no scan needed")
    values = as_disparity(d).values
    h, w = values.shape
    cx, cy = int(candidate[0]), int(candidate[1])
    if not (0 <= cx < w and 0 <= cy < h):
        raise ValueError(f"candidate {candidate} outside a {w}x{h} map")
    ux, uy = direction.displacement_unit
    half = L // 2
    g = np.arange(-half, half + 1, dtype=np.int64)
    sx = cx + round_half_away(g * ux)
    sy = cy + round_half_away(g * uy)
    keep = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    g, sx, sy = g[keep], sx[keep], sy[keep]
    v = values[sy, sx]
    return ScanLine((cx, cy), g, sx, sy, v, g + v)


def warp_and_sort(line: ScanLine) -> ScanLine:
    line.sort_idx = np.argsort(line.w, kind="stable")
    return line


def count_occlusions(line: ScanLine, cfg: DetectorConfig) -> ScanLine:
    """Count, per entry, sorted neighbours that hide it (stored in line order)."""
    if line.sort_idx is None:
        raise ValueError("line is not sorted; call warp_and_sort first")
    ws = line.w[line.sort_idx]
    vs = line.v[line.sort_idx]
    n = len(ws)
    counts = np.zeros(n, dtype=np.int64)
    for off in range(1, cfg.neighbors // 2 + 1):
        if off >= n:
            break
        # pairs (i, i + off) in sorted order, checked in both roles
        close = np.abs(ws[off:] - ws[:-off]) < cfg.t_dist
        counts[:-off] += close & (vs[off:] - vs[:-off] > cfg.t_disp)
        counts[off:] += close & (vs[:-off] - vs[off:] > cfg.t_disp)
    line.occl_count = np.empty(n, dtype=np.int64)
    line.occl_count[line.sort_idx] = counts
    return line


def rasterize(line: ScanLine, mask: np.ndarray) -> None:
    """Set the mask at every occluded entry of ``line``; never clears bits."""
    if line.occl_count is None:
        raise ValueError("occlusions not counted; call count_occlusions first")
    hit = line.occl_count > 0
    mask[line.sy[hit], line.sx[hit]] = True


@dataclass
class _Plan:
    values: np.ndarray
    edges: EdgeField
    L: int
    cfg: DetectorConfig


def _plan(d, cfg: DetectorConfig) -> _Plan:
    dm = as_disparity(d)
    lo, hi = disparity_stats(dm)
    return _Plan(dm.values, compute_edge_fields(dm), scan_length(lo, hi, cfg.max_scan_length), cfg)


def _run_direction(plan: _Plan, direction: DirectionSpec, pool: ThreadPoolExecutor | None):
    cands = select_candidates(plan.edges, direction, plan.cfg.t_edge)
    h, w = plan.values.shape
    mask = np.zeros((h, w), dtype=np.uint8)
    half = plan.L // 2
    if half == 0 or len(cands) == 0:
        return mask, len(cands)
    ux, uy = direction.displacement_unit
    cfg = plan.cfg
    args = (plan.values, ux, uy, half, cfg.t_dist, cfg.t_disp, cfg.neighbors // 2)
    if pool is None or len(cands) <= CHUNK:
        scan_candidates(cands, *args, mask)
        return mask, len(cands)

    def work(chunk):
        local = np.zeros((h, w), dtype=np.uint8)
        scan_candidates(chunk, *args, local)
        return local

    chunks = [cands[i:i + CHUNK] for i in range(0, len(cands), CHUNK)]
    for local in pool.map(work, chunks):
        mask |= local
    return mask, len(cands)


def detect_array_stats(d, dirs: Sequence[DirectionSpec], cfg: DetectorConfig | None = None,
                       threads: int = 1) -> list[tuple[OcclusionMask, DetectionStats]]:
    """Run the detector for every direction, sharing edge fields and scan length."""
    cfg = cfg or DetectorConfig()
    dirs = list(dirs)
    if not dirs:
        raise ValueError("at least one direction is required")
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    plan = _plan(d, cfg)
    out = []
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for direction in dirs:
            bits, n_cands = _run_direction(plan, direction, pool)
            m = OcclusionMask(bits.astype(bool))
            out.append((m, DetectionStats(direction.degrees, n_cands, plan.L, m.count())))
    finally:
        if pool is not None:
            pool.shutdown()
    return out


def detect_array(d, dirs: Sequence[DirectionSpec], cfg: DetectorConfig | None = None,
                 threads: int = 1) -> list[OcclusionMask]:
    return [m for m, _ in detect_array_stats(d, dirs, cfg, threads)]


def detect(d, direction: DirectionSpec, cfg: DetectorConfig | None = None, threads: int = 1) -> OcclusionMask:
    return detect_array(d, [direction], cfg, threads)[0]


def detect_reference(d, direction: DirectionSpec, cfg: DetectorConfig | None = None) -> OcclusionMask:
    """Uncompiled detector built from the per-line steps; slow, for cross-checks."""
    cfg = cfg or DetectorConfig()
    plan = _plan(d, cfg)
    mask = np.zeros(plan.values.shape, dtype=bool)
    if plan.L == 0:
        return OcclusionMask(mask)
    for c in select_candidates(plan.edges, direction, cfg.t_edge):
        line = build_scanline(c, direction, plan.L, plan.values)
        rasterize(count_occlusions(warp_and_sort(line), cfg), mask)
    return OcclusionMask(mask)


def scanlines(d, direction: DirectionSpec, cfg: DetectorConfig | None = None) -> list[ScanLine]:
    """All fully processed scan lines of one direction (reference path)."""
    cfg = cfg or DetectorConfig()
    plan = _plan(d, cfg)
    if plan.L == 0:
        return []
    return [count_occlusions(warp_and_sort(build_scanline(c, direction, plan.L, plan.values)), cfg)
            for c in select_candidates(plan.edges, direction, cfg.t_edge)]
