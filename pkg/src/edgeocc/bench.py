"""Wall-clock comparison of the scan-line detector and the dense oracle."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .core import DirectionSpec, DisparityMap, eight_directions, random_rects_scene
from .detector import DetectorConfig, detect_array
from .edges import compute_edge_fields
from .oracle import OracleConfig, oracle_array

BENCH_HEADER = ("method", "width", "height", "directions", "repeat", "min_s", "median_s", "speedup")


def bench_scene(width: int = 1600, height: int = 1200, seed: int = 1) -> DisparityMap:
    """Sparse-edge camera-array sized scene (about 1% edge pixels at 1600x1200)."""
    return random_rects_scene(seed, width=width, height=height, n_rects=60,
                              min_size=40, max_size=200)


def edge_fraction(d, t_edge: float = 1.0) -> float:
    return float((compute_edge_fields(d).magnitude > t_edge).mean())


@dataclass(frozen=True)
class Timing:
    method: str
    runs: tuple[float, ...]

    @property
    def min(self) -> float:
        return min(self.runs)

    @property
    def median(self) -> float:
        return statistics.median(self.runs)


def time_runs(fn: Callable[[], object], repeat: int, warmup: int = 1) -> tuple[float, ...]:
    # warm-up absorbs one-off JIT compilation and cache loading
    for _ in range(warmup):
        fn()
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - t0)
    return tuple(runs)


def run_bench(d, dirs: Sequence[DirectionSpec] | None = None, repeat: int = 3,
              cfg: DetectorConfig | None = None, oracle: bool = True, threads: int = 1,
              oracle_cfg: OracleConfig | None = None) -> list[Timing]:
    if repeat < 1:
        raise ValueError(f"repeat must be >= 1, got {repeat}")
    dirs = list(dirs or eight_directions())
    out = [Timing("detector", time_runs(lambda: detect_array(d, dirs, cfg, threads), repeat))]
    if oracle:
        # the oracle has nothing to compile, so no warm-up pass
        out.append(Timing("oracle", time_runs(lambda: oracle_array(d, dirs, oracle_cfg), repeat, warmup=0)))
    return out


def bench_csv(timings: Sequence[Timing], width: int, height: int, n_dirs: int) -> str:
    base = next((t for t in timings if t.method == "detector"), None)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_HEADER)
    for t in timings:
        speedup = t.min / base.min if base is not None and base.min > 0 else float("nan")
        w.writerow([t.method, width, height, n_dirs, len(t.runs), f"{t.min:.6f}", f"{t.median:.6f}", f"{speedup:.3f}"])
    return buf.getvalue()
