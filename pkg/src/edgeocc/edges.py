"""Forward-difference edge fields and occlusion candidate selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DirectionSpec, DisparityError, _frozen, as_disparity


@dataclass(frozen=True, eq=False)
class EdgeField:
    """Per-pixel derivatives of a disparity map.

    ``ex[y, x] = D[y, x+1] - D[y, x]`` and ``ey[y, x] = D[y+1, x] - D[y, x]``;
    the last column of ``ex`` and the last row of ``ey`` are zero. ``angle``
    is ``atan2(ey, ex)`` in (-pi, pi].
    """

    ex: np.ndarray
    ey: np.ndarray
    magnitude: np.ndarray
    angle: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.ex.shape


def compute_edge_fields(d) -> EdgeField:
    v = as_disparity(d).values
    h, w = v.shape
    if h < 2 or w < 2:
        raise DisparityError(f"edge fields need at least a 2x2 map, got {w}x{h}")
    ex = np.zeros_like(v)
    ey = np.zeros_like(v)
    ex[:, :-1] = v[:, 1:] - v[:, :-1]
    ey[:-1, :] = v[1:, :] - v[:-1, :]
    mag = np.hypot(ex, ey)
    ang = np.arctan2(ey, ex)
    # atan2 yields -pi for (-0.0, negative); fold onto +pi
    ang[ang == -math.pi] = math.pi
    return EdgeField(_frozen(ex), _frozen(ey), _frozen(mag), _frozen(ang))


def circular_distance(a, b):
    """Absolute angular difference wrapped into [0, pi]."""
    diff = np.mod(np.asarray(a, dtype=np.float64) - b, 2 * math.pi)
    return np.minimum(diff, 2 * math.pi - diff)


def facing_mask(e: EdgeField, direction: DirectionSpec) -> np.ndarray:
    """True where the gradient lies strictly within pi/2 of the baseline angle.

    Evaluated from the gradient components against the baseline unit vector,
    so a gradient exactly perpendicular to the baseline is reliably excluded.
    """
    c, s = direction.baseline_unit
    return e.ex * c + e.ey * s > 0.0


def candidate_mask(e: EdgeField, direction: DirectionSpec, t_edge: float) -> np.ndarray:
    if not t_edge > 0:
        raise ValueError(f"t_edge must be positive, got {t_edge}")
    return (e.magnitude > t_edge) & facing_mask(e, direction)


def select_candidates(e: EdgeField, direction: DirectionSpec, t_edge: float) -> np.ndarray:
    """Edge pixels that can cause occlusion toward ``direction``.

    Returns an ``(n, 2)`` int array of ``(x, y)`` positions in row-major order.
    """
    ys, xs = np.nonzero(candidate_mask(e, direction, t_edge))
    return np.stack([xs, ys], axis=1).astype(np.int64)
