"""Numba kernels for the hot training loops.

Pure-numpy reference implementations of the same steps live in projection.py
and ocsvm.sgd_epoch; tests assert the two agree.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def capped_simplex_projection(y, cap, total):
    """clip(y - tau, 0, cap) with tau chosen so the result sums to `total`."""
    n = y.shape[0]
    ys = np.sort(y)
    prefix = np.zeros(n + 1)
    for i in range(n):
        prefix[i + 1] = prefix[i] + ys[i]
    bps = np.sort(np.concatenate((ys, ys - cap)))

    def clipped_sum(tau):
        hi = n - np.searchsorted(ys, tau + cap, side="left")
        lo_edge = np.searchsorted(ys, tau, side="right")
        hi_edge = n - hi
        return cap * hi + (prefix[hi_edge] - prefix[lo_edge]) - (hi_edge - lo_edge) * tau

    # clipped_sum is nonincreasing in tau; find the crossing segment
    j = 2 * n
    for idx in range(2 * n):
        if clipped_sum(bps[idx]) <= total:
            j = idx
            break
    if j == 0:
        tau = bps[0] - (total - clipped_sum(bps[0])) / n
    elif j == 2 * n:
        tau = bps[2 * n - 1]
    else:
        lo, hi = bps[j - 1], bps[j]
        flo, fhi = clipped_sum(lo), clipped_sum(hi)
        tau = lo if flo == fhi else lo + (flo - total) * (hi - lo) / (flo - fhi)
    out = np.empty(n)
    for i in range(n):
        out[i] = min(max(y[i] - tau, 0.0), cap)
    # absorb the last-ulp residual on unclamped coordinates
    free = 0
    for i in range(n):
        if 0.0 < out[i] < cap:
            free += 1
    if free > 0:
        fix = (total - out.sum()) / free
        for i in range(n):
            if 0.0 < out[i] < cap:
                out[i] = min(max(out[i] + fix, 0.0), cap)
    return out


@njit(cache=True)
def gauss_seidel_sweep(a, K, eta, cap):
    """One in-place box-clamped coordinate sweep; mutates and returns a."""
    n = a.shape[0]
    s = K @ a
    for k in range(n):
        new = a[k] + eta * (1.0 - s[k])
        new = min(max(new, 0.0), cap)
        delta = new - a[k]
        if delta != 0.0:
            a[k] = new
            s += delta * K[k]
    return a


@njit(cache=True)
def anneal_train(K, nu, eta0, epsilon, phase_cap, phases):
    """Annealed projected sweeps: each phase runs box-clamped sweeps followed
    by an exact capped-simplex projection until the displacement falls below
    10 * epsilon * eta, then halves eta. Returns the final multipliers."""
    n = K.shape[0]
    cap = 1.0 / (nu * n)
    a = capped_simplex_projection(np.full(n, 1.0 / n), cap, 1.0)
    eta = eta0
    for _ in range(phases):
        tol = 10.0 * epsilon * eta
        for _ in range(phase_cap):
            prev = a.copy()
            a = gauss_seidel_sweep(a, K, eta, cap)
            a = capped_simplex_projection(a, cap, 1.0)
            if np.linalg.norm(a - prev) <= tol:
                break
        eta *= 0.5
    return a


@njit(cache=True)
def projected_gradient_solve(K, cap, step, tol, max_iters):
    """Full-gradient ascent with exact capped-simplex projection; returns
    (alpha, converged)."""
    n = K.shape[0]
    a = capped_simplex_projection(np.full(n, 1.0 / n), cap, 1.0)
    for _ in range(max_iters):
        grad = 1.0 - K @ a
        nxt = capped_simplex_projection(a + step * grad, cap, 1.0)
        d = np.linalg.norm(nxt - a)
        a = nxt
        if d <= tol:
            return a, True
    return a, False
