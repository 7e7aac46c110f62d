"""Dense brute-force occlusion reference.

Every pixel ``p`` is compared against every pixel ``q`` on the line through
``p`` along the displacement direction (``q = p + round(g * u)`` for integer
arc offsets ``g``). ``p`` is hidden when some ``q`` warps onto the same
position (``|g + D(q) - D(p)| <= overlap_radius``) and is in front of it
(``D(q) - D(p) > t_disp``). This uses no edge information and no sorting,
so it checks the scan-line detector independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DirectionSpec, OcclusionMask, as_disparity


@dataclass(frozen=True)
class OracleConfig:
    overlap_radius: float = 0.5
    t_disp: float = 0.5

    def __post_init__(self):
        if not self.overlap_radius > 0:
            raise ValueError(f"overlap_radius must be > 0, got {self.overlap_radius}")
        if not self.t_disp >= 0:
            raise ValueError(f"t_disp must be >= 0, got {self.t_disp}")


def _round_half_away(t: float) -> int:
    return int(math.copysign(math.floor(abs(t) + 0.5), t))


def _offset_range(values: np.ndarray, cfg: OracleConfig, full_trace: bool) -> range:
    h, w = values.shape
    if full_trace:
        reach = h + w
    else:
        # |g + D(q) - D(p)| <= r needs |g| <= (max - min) + r; farther
        # offsets can never match, so skipping them leaves the result unchanged.
        reach = int(math.floor(float(values.max() - values.min()) + cfg.overlap_radius))
    return range(-reach, reach + 1)


def oracle_detect(d, direction: DirectionSpec, cfg: OracleConfig | None = None,
                  full_trace: bool = False) -> OcclusionMask:
    """Dense occlusion mask for one direction.

    ``full_trace=True`` walks each line across the whole image instead of
    the reachable window; both give identical masks.
    """
    cfg = cfg or OracleConfig()
    v = as_disparity(d).values
    h, w = v.shape
    ux, uy = direction.displacement_unit
    out = np.zeros((h, w), dtype=bool)
    for g in _offset_range(v, cfg, full_trace):
        if g == 0:
            continue
        dx = _round_half_away(g * ux)
        dy = _round_half_away(g * uy)
        if abs(dx) >= w or abs(dy) >= h:
            continue
        # p ranges over the region whose partner q = p + (dx, dy) is in-bounds
        py = slice(max(0, -dy), h - max(0, dy))
        px = slice(max(0, -dx), w - max(0, dx))
        qy = slice(max(0, dy), h - max(0, -dy))
        qx = slice(max(0, dx), w - max(0, -dx))
        diff = v[qy, qx] - v[py, px]
        out[py, px] |= (np.abs(g + diff) <= cfg.overlap_radius) & (diff > cfg.t_disp)
    return OcclusionMask(out)


def oracle_array(d, dirs: Sequence[DirectionSpec], cfg: OracleConfig | None = None,
                 full_trace: bool = False) -> list[OcclusionMask]:
    dm = as_disparity(d)
    return [oracle_detect(dm, direction, cfg, full_trace) for direction in dirs]
