"""Reference solver for the box-and-simplex constrained dual; test-only API."""

from __future__ import annotations

import numpy as np

from ._fast import projected_gradient_solve
from .kernel import KernelMatrix
from .ocsvm import AlphaVector, box_cap

MAX_ITERS = 200_000
TOL = 1e-10


def solve_dual_reference(K: KernelMatrix, nu: float) -> AlphaVector:
    """Projected gradient ascent on J(a) = sum a - 1/2 a'Ka over the capped
    simplex {0 <= a_i <= 1/(nu n), sum a_i = 1}.

    Fixed step 1/L with L the largest eigenvalue of K, exact projection each
    step, run to a 1e-10 displacement; deterministic.
    """
    if not 0 < nu < 1:
        raise ValueError(f"nu must be in (0, 1), got {nu}")
    n = K.n
    if n > 200:
        raise ValueError("reference solver is desk-scale only (n <= 200)")
    cap = box_cap(n, nu)
    L = float(np.max(np.linalg.eigvalsh(K.entries)))
    step = 1.0 / max(L, 1e-12)
    a, ok = projected_gradient_solve(np.ascontiguousarray(K.entries), cap, step, TOL, MAX_ITERS)
    if not ok:
        raise RuntimeError(f"reference solver did not converge in {MAX_ITERS} iterations")
    return a
