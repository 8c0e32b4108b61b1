"""Exact Euclidean projection onto the capped simplex {0 <= x <= cap, sum x = 1}."""

from __future__ import annotations

import numpy as np


def project_box_simplex(y, cap: float, total: float = 1.0) -> np.ndarray:
    """Projection is clip(y - tau, 0, cap) for the shift tau that makes the
    coordinates sum to `total`; tau is found exactly from the sorted
    breakpoints of the piecewise-linear clipped sum."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n * cap < total:
        raise ValueError(f"infeasible: n*cap = {n * cap} < {total}")
    ys = np.sort(y)
    prefix = np.concatenate([[0.0], np.cumsum(ys)])

    def clipped_sum(tau: np.ndarray) -> np.ndarray:
        # sum over {y_i - tau >= cap} of cap + sum over middle of (y_i - tau)
        hi = n - np.searchsorted(ys, tau + cap, side="left")
        lo_edge = np.searchsorted(ys, tau, side="right")
        hi_edge = n - hi
        mid_sum = prefix[hi_edge] - prefix[lo_edge]
        mid_cnt = hi_edge - lo_edge
        return cap * hi + mid_sum - mid_cnt * tau

    bps = np.sort(np.concatenate([ys, ys - cap]))
    vals = clipped_sum(bps)  # nonincreasing in tau
    # find the segment [bps[j], bps[j+1]] where the sum crosses `total`
    j = int(np.searchsorted(-vals, -total, side="left"))
    if j == 0:
        tau = bps[0] - (total - vals[0]) / n
    else:
        lo, hi = bps[j - 1], bps[j]
        flo, fhi = vals[j - 1], vals[j]
        tau = lo if flo == fhi else lo + (flo - total) * (hi - lo) / (flo - fhi)
    out = np.clip(y - tau, 0.0, cap)
    # absorb the last-ulp residual on unclamped coordinates
    free = (out > 0.0) & (out < cap)
    if np.any(free):
        out[free] += (total - out.sum()) / np.count_nonzero(free)
        out = np.clip(out, 0.0, cap)
    return out
