"""Confusion counts, precision/recall/F1, and confusion-map rendering."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import ndimage

from .core import OcclusionMask

CSV_HEADER = ("name", "tp", "fp", "fn", "tn", "precision", "recall", "f1")

# class codes of a confusion image
TN, TP, FP, FN = 0, 1, 2, 3
COLORS = {
    TP: (255, 0, 0),      # red
    FN: (255, 255, 0),    # yellow
    FP: (128, 0, 128),    # purple
    TN: (0, 0, 0),        # black
}


@dataclass(frozen=True)
class ConfusionStats:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionStats") -> "ConfusionStats":
        return ConfusionStats(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True, eq=False)
class ConfusionImage:
    classes: np.ndarray  # uint8 codes TN/TP/FP/FN, [y, x]

    @property
    def shape(self):
        return self.classes.shape

    def to_rgb(self) -> np.ndarray:
        lut = np.zeros((4, 3), dtype=np.uint8)
        for code, rgb in COLORS.items():
            lut[code] = rgb
        return lut[self.classes]


def _bits(m) -> np.ndarray:
    return m.bits if isinstance(m, OcclusionMask) else np.asarray(m, dtype=bool)


def _pair(pred, gt):
    p, g = _bits(pred), _bits(gt)
    if p.shape != g.shape:
        raise ValueError(f"dimension mismatch: prediction {p.shape} vs ground truth {g.shape}")
    return p, g


def confusion(pred, gt) -> ConfusionStats:
    """Pixel counts with occluded as the positive class."""
    p, g = _pair(pred, gt)
    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    return ConfusionStats(tp, fp, fn, p.size - tp - fp - fn)


def _ratio(num: int, den: int) -> float:
    # 0/0 counts as perfect so empty masks do not drag averages down
    return 1.0 if den == 0 else num / den


def metrics(s: ConfusionStats) -> Metrics:
    return Metrics(
        precision=_ratio(s.tp, s.tp + s.fp),
        recall=_ratio(s.tp, s.tp + s.fn),
        f1=_ratio(2 * s.tp, 2 * s.tp + s.fp + s.fn),
    )


def macro_average(stats: Iterable[ConfusionStats]) -> Metrics:
    ms = [metrics(s) for s in stats]
    if not ms:
        raise ValueError("nothing to average")
    return Metrics(*(float(np.mean([getattr(m, k) for m in ms])) for k in ("precision", "recall", "f1")))


def micro_average(stats: Iterable[ConfusionStats]) -> Metrics:
    total = ConfusionStats(0, 0, 0, 0)
    for s in stats:
        total = total + s
    return metrics(total)


def boundary_zone(mask, radius: int) -> np.ndarray:
    """Pixels within ``radius`` (Chebyshev) of the mask's inside/outside boundary."""
    m = _bits(mask)
    if radius < 1:
        return np.zeros_like(m)
    st = np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
    return ndimage.binary_dilation(m, st) & ~ndimage.binary_erosion(m, st, border_value=0)


def band_tolerant_confusion(pred, ref, radius: int) -> ConfusionStats:
    """Confusion counts that forgive disagreements near the reference band edge.

    A pixel where ``pred`` and ``ref`` disagree but which lies within
    ``radius`` of the boundary of ``ref`` is counted as agreement (as a true
    negative if ``ref`` is clear there, a true positive otherwise).
    """
    p, r = _pair(pred, ref)
    forgive = (p ^ r) & boundary_zone(r, radius)
    return confusion(np.where(forgive, r, p), r)


def render_confusion(pred, gt) -> ConfusionImage:
    p, g = _pair(pred, gt)
    classes = np.full(p.shape, TN, dtype=np.uint8)
    classes[p & g] = TP
    classes[p & ~g] = FP
    classes[~p & g] = FN
    return ConfusionImage(classes)


def csv_rows(rows: Iterable[tuple[str, ConfusionStats]]) -> str:
    """Metric rows under the fixed header, LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for name, s in rows:
        m = metrics(s)
        w.writerow([name, s.tp, s.fp, s.fn, s.tn, f"{m.precision:.6f}", f"{m.recall:.6f}", f"{m.f1:.6f}"])
    return buf.getvalue()
