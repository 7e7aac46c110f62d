"""Compiled inner loop of the scan-line detector."""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _round_half_away(t):
    if t >= 0.0:
        return int(math.floor(t + 0.5))
    return -int(math.floor(-t + 0.5))


@njit(cache=True, nogil=True)
def scan_candidates(cands, values, ux, uy, half, t_dist, t_disp, nb_half, mask):
    """Build, warp, sort and test one scan line per candidate; set hits in ``mask``.

    ``cands`` is ``(n, 2)`` of ``(x, y)``. Mask writes are set-only, so callers
    may split candidates across workers and OR the results.
    """
    h, w = values.shape
    size = 2 * half + 1
    xs = np.empty(size, np.int64)
    ys = np.empty(size, np.int64)
    vs = np.empty(size, np.float64)
    ws = np.empty(size, np.float64)
    idx = np.empty(size, np.int64)
    ox = np.empty(size, np.int64)
    oy = np.empty(size, np.int64)
    for k in range(size):
        g = k - half
        ox[k] = _round_half_away(g * ux)
        oy[k] = _round_half_away(g * uy)

    for c in range(cands.shape[0]):
        cx = cands[c, 0]
        cy = cands[c, 1]
        n = 0
        for k in range(size):
            x = cx + ox[k]
            y = cy + oy[k]
            if x < 0 or x >= w or y < 0 or y >= h:
                continue
            xs[n] = x
            ys[n] = y
            v = values[y, x]
            vs[n] = v
            ws[n] = (k - half) + v
            n += 1

        # stable insertion sort of indices by warped position
        for i in range(n):
            j = i
            while j > 0 and ws[idx[j - 1]] > ws[i]:
                idx[j] = idx[j - 1]
                j -= 1
            idx[j] = i

        for i in range(n):
            a = idx[i]
            if mask[ys[a], xs[a]]:
                continue
            hit = False
            for off in range(1, nb_half + 1):
                for j in (i - off, i + off):
                    if j < 0 or j >= n:
                        continue
                    b = idx[j]
                    if abs(ws[a] - ws[b]) < t_dist and vs[b] - vs[a] > t_disp:
                        hit = True
                        break
                if hit:
                    break
            if hit:
                mask[ys[a], xs[a]] = 1
