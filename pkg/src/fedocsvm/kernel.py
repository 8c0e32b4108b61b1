"""Gaussian kernel evaluation and dense Gram-matrix construction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KernelConfig:
    """Gaussian bandwidth, in feature-space units."""

    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class KernelMatrix:
    """Dense symmetric Gram matrix with unit diagonal."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def gaussian_kernel(x, y, cfg: KernelConfig) -> float:
    """k(x, y) = exp(-||x - y||^2 / (2 sigma^2)), in (0, 1]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    d2 = float(np.sum((x - y) ** 2))
    return float(np.exp(-d2 / (2.0 * cfg.sigma**2)))


def median_sigma(X) -> float:
    """Median-heuristic bandwidth: sqrt(median pairwise squared distance / 2)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need at least 2 rows")
    d2 = _sq_dists(X)
    iu = np.triu_indices(X.shape[0], k=1)
    med = float(np.median(d2[iu]))
    if med <= 0:
        raise ValueError("median pairwise distance is zero (all rows identical)")
    return float(np.sqrt(med / 2.0))


def kernel_matrix(X, cfg: KernelConfig) -> KernelMatrix:
    """Gram matrix K[i, j] = gaussian_kernel(X[i], X[j]); exactly symmetric."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("X must be a non-empty 2D sample matrix")
    d2 = _sq_dists(X)
    K = np.exp(-d2 / (2.0 * cfg.sigma**2))
    # upper triangle mirrored so K[i, j] == K[j, i] bit-for-bit
    K = np.triu(K, 1)
    K = K + K.T
    np.fill_diagonal(K, 1.0)
    return KernelMatrix(entries=K)


def _sq_dists(X: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - X[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)
