"""Grid types, disparity statistics, median fusion and synthetic scenes.

Coordinates are image coordinates throughout: origin at the top-left pixel,
x to the right, y downward, angles measured from +x toward +y. Arrays are
indexed ``[y, x]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

TWO_PI = 2.0 * math.pi
_SQRT_HALF = math.sqrt(0.5)


class DisparityError(ValueError):
    """Raised for malformed disparity input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DisparityMap:
    """Dense disparity grid in pixels, stored as read-only float64 ``[y, x]``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2 or v.size == 0:
            raise DisparityError("empty input" if v.size == 0 else f"expected a 2D grid, got shape {v.shape}")
        if not np.issubdtype(v.dtype, np.number) or np.iscomplexobj(v):
            raise DisparityError(f"non-numeric disparity dtype {v.dtype}")
        v = v.astype(np.float64, copy=True)
        if not np.isfinite(v).all():
            raise DisparityError(
                f"{int((~np.isfinite(v)).sum())} non-finite disparities (use sanitize to repair)"
            )
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_array(cls, values, sanitize: bool = False) -> "DisparityMap":
        v = np.asarray(values, dtype=np.float64)
        if sanitize:
            v = sanitize_nonfinite(v)
        return cls(v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, DisparityMap):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class OcclusionMask:
    """Binary grid in center-view coordinates; True = hidden in the peripheral view."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2:
            raise ValueError(f"expected a 2D mask, got shape {b.shape}")
        object.__setattr__(self, "bits", _frozen(b.astype(bool, copy=True)))

    @classmethod
    def zeros(cls, height: int, width: int) -> "OcclusionMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, OcclusionMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)


def as_disparity(d) -> DisparityMap:
    return d if isinstance(d, DisparityMap) else DisparityMap(d)


def sanitize_nonfinite(values: np.ndarray) -> np.ndarray:
    """Replace inf/NaN entries by the value of the nearest finite pixel."""
    v = np.asarray(values, dtype=np.float64)
    bad = ~np.isfinite(v)
    if not bad.any():
        return v.copy()
    if bad.all():
        raise DisparityError("no finite disparities to sanitize from")
    _, (iy, ix) = ndimage.distance_transform_edt(bad, return_distances=True, return_indices=True)
    return v[iy, ix]


def _unit(angle: float) -> tuple[float, float]:
    # Exact values on the 45-degree lattice keep opposite and rotated
    # directions bit-symmetric, which the rounding of scan samples relies on.
    octant = angle / (math.pi / 4)
    k = round(octant)
    if abs(octant - k) < 1e-9:
        table = (
            (1.0, 0.0), (_SQRT_HALF, _SQRT_HALF), (0.0, 1.0), (-_SQRT_HALF, _SQRT_HALF),
            (-1.0, 0.0), (-_SQRT_HALF, -_SQRT_HALF), (0.0, -1.0), (_SQRT_HALF, -_SQRT_HALF),
        )
        return table[k % 8]
    return math.cos(angle), math.sin(angle)


def normalize_angle(a: float) -> float:
    a = math.fmod(a, TWO_PI)
    if a < 0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class DirectionSpec:
    """Direction from the center camera toward one peripheral camera.

    ``baseline_angle`` points from center to peripheral camera. Center-view
    pixels move along ``displacement_angle = baseline_angle + pi`` when warped
    into the peripheral view.
    """

    baseline_angle: float

    def __post_init__(self):
        if not math.isfinite(self.baseline_angle):
            raise ValueError("baseline angle must be finite")
        object.__setattr__(self, "baseline_angle", normalize_angle(self.baseline_angle))

    @classmethod
    def from_degrees(cls, degrees: float) -> "DirectionSpec":
        return cls(math.radians(degrees))

    @property
    def displacement_angle(self) -> float:
        return normalize_angle(self.baseline_angle + math.pi)

    @property
    def baseline_unit(self) -> tuple[float, float]:
        return _unit(self.baseline_angle)

    @property
    def displacement_unit(self) -> tuple[float, float]:
        c, s = self.baseline_unit
        return -c + 0.0, -s + 0.0

    @property
    def degrees(self) -> float:
        return math.degrees(self.baseline_angle)


def eight_directions() -> list[DirectionSpec]:
    """The 3x3 array layout: one peripheral camera every 45 degrees."""
    return [DirectionSpec.from_degrees(a) for a in range(0, 360, 45)]


def disparity_stats(d) -> tuple[float, float]:
    v = as_disparity(d).values
    return float(v.min()), float(v.max())


def fuse_median(stack: Sequence) -> DisparityMap:
    """Pixel-wise median of several disparity estimates of the center view.

    Even stack sizes take the mean of the two middle values.
    """
    maps = [as_disparity(m) for m in stack]
    if not maps:
        raise DisparityError("empty stack")
    shape = maps[0].shape
    for k, m in enumerate(maps[1:], start=1):
        if m.shape != shape:
            raise DisparityError(f"dimension mismatch: map {k} is {m.shape}, expected {shape}")
    return DisparityMap(np.median(np.stack([m.values for m in maps]), axis=0))


# synthetic scenes ------------------------------------------------------------

SCENE_KINDS = ("step", "square", "random_rects")


def step_scene(bg: float = 0.0, fg: float = 8.0, col: int = 64, width: int = 128, height: int = 128) -> DisparityMap:
    """Vertical step: ``fg`` for ``x < col``, ``bg`` for ``x >= col``."""
    if width < 1 or height < 1 or not 0 <= col <= width:
        raise DisparityError(f"invalid step parameters col={col} size={width}x{height}")
    v = np.full((height, width), float(bg))
    v[:, :col] = fg
    return DisparityMap(v)


def square_scene(bg: float = 0.0, fg: float = 6.0, rect: Iterable[int] = (32, 32, 64, 64),
                 width: int = 128, height: int = 128) -> DisparityMap:
    """Constant ``fg`` inside ``rect = (x0, y0, x1, y1)`` (half-open), ``bg`` elsewhere."""
    x0, y0, x1, y1 = (int(r) for r in rect)
    if not (0 <= x0 < x1 <= width and 0 <= y0 < y1 <= height):
        raise DisparityError(f"rectangle {rect} does not fit a {width}x{height} image")
    v = np.full((height, width), float(bg))
    v[y0:y1, x0:x1] = fg
    return DisparityMap(v)


def random_rects_scene(seed: int, width: int = 128, height: int = 128, n_rects: int = 4,
                       min_jump: int = 2, max_disparity: int = 24, spacing: int | None = None,
                       min_size: int = 8, max_size: int = 32, margin: int | None = None,
                       max_background: int = 4) -> DisparityMap:
    """Piecewise-constant integer disparities: rectangles on a flat background.

    Rectangles never overlap and keep at least ``spacing`` pixels between each
    other (default ``2 * max_disparity``) so that their occlusion bands cannot
    interact, and stay ``margin`` pixels (default ``max_disparity + 2``) away
    from the image border so every band lies inside the image. Every
    rectangle differs from the background by at least ``min_jump``. At least
    one rectangle is always placed.
    """
    if spacing is None:
        spacing = 2 * max_disparity
    if margin is None:
        margin = max_disparity + 2
    if min_jump < 1 or max_background + min_jump > max_disparity:
        raise DisparityError("min_jump/max_disparity leave no room for a jump")
    if min_size < 1 or max_size < min_size or max_size + 2 * margin > min(width, height):
        raise DisparityError("rectangle size range does not fit the image")
    rng = np.random.default_rng(seed)
    bg = int(rng.integers(0, max_background + 1))
    v = np.full((height, width), float(bg))
    placed: list[tuple[int, int, int, int]] = []
    for _ in range(n_rects * 50):
        if len(placed) >= n_rects:
            break
        w = int(rng.integers(min_size, max_size + 1))
        h = int(rng.integers(min_size, max_size + 1))
        x0 = int(rng.integers(margin, width - margin - w + 1))
        y0 = int(rng.integers(margin, height - margin - h + 1))
        r = (x0, y0, x0 + w, y0 + h)
        if all(_gap(r, q) >= spacing for q in placed):
            placed.append(r)
            fg = bg + int(rng.integers(min_jump, max_disparity - bg + 1))
            v[r[1]:r[3], r[0]:r[2]] = fg
    return DisparityMap(v)


def _gap(a, b) -> int:
    dx = max(b[0] - a[2], a[0] - b[2], 0)
    dy = max(b[1] - a[3], a[1] - b[3], 0)
    return max(dx, dy)


def synth_scene(kind: str, params: dict | None = None, seed: int = 0) -> DisparityMap:
    params = dict(params or {})
    builders = {"step": step_scene, "square": square_scene,
                "random_rects": lambda **kw: random_rects_scene(seed=seed, **kw)}
    if kind not in builders:
        raise DisparityError(f"unknown scene kind {kind!r}; expected one of {SCENE_KINDS}")
    try:
        return builders[kind](**params)
    except TypeError as exc:
        raise DisparityError(f"invalid {kind} parameters: {exc}") from None
