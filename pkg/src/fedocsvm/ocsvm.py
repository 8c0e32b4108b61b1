"""One-class SVM on the dual, trained by projected coordinate SGD, plus scoring."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._fast import anneal_train
from .kernel import KernelConfig, KernelMatrix, kernel_matrix

# Lagrange multipliers and kernel-space coefficients are plain 1-D float arrays.
AlphaVector = np.ndarray
CoefficientVector = np.ndarray

SUPPORT_THRESHOLD = 1e-8
MARGIN_SLACK = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    nu: float = 0.05
    eta: float = 0.05
    epsilon: float = 1e-5
    max_epochs: int = 1000

    def __post_init__(self) -> None:
        if not 0 < self.nu < 1:
            raise ValueError(f"nu must be in (0, 1), got {self.nu}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_epochs < 1:
            raise ValueError(f"max_epochs must be >= 1, got {self.max_epochs}")


@dataclass(frozen=True)
class OcsvmModel:
    """Deployable detector: retained points with their multipliers and offset."""

    support_points: np.ndarray
    alphas: np.ndarray
    rho: float
    kernel: KernelConfig
    nu: float

    def __post_init__(self) -> None:
        if self.support_points.shape[0] != self.alphas.shape[0]:
            raise ValueError("alphas must align with support_points rows")
        if not np.all(self.alphas > 0):
            raise ValueError("stored alphas must all be positive")
        if not np.isfinite(self.rho):
            raise ValueError("rho must be finite")


def box_cap(n: int, nu: float) -> float:
    return 1.0 / (nu * n)


def init_alpha(n: int, cfg: TrainConfig) -> AlphaVector:
    """Uniform start on the simplex: alpha_i = 1/n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full(n, 1.0 / n)


def project_box(a: float, n: int, nu: float) -> float:
    return float(min(max(a, 0.0), box_cap(n, nu)))


def sgd_epoch(alpha: AlphaVector, K: KernelMatrix, cfg: TrainConfig) -> AlphaVector:
    """One in-place coordinate sweep k = 1..n with per-coordinate box clamping.

    Each update uses the freshest alpha (Gauss-Seidel order); the running
    kernel sums are maintained incrementally so a sweep costs O(n^2).
    """
    n = K.n
    if alpha.shape[0] != n:
        raise ValueError(f"alpha length {alpha.shape[0]} != matrix size {n}")
    Km = K.entries
    cap = box_cap(n, cfg.nu)
    a = np.array(alpha, dtype=float)
    s = Km @ a  # s[k] = sum_i a_i K[i, k]
    for k in range(n):
        new = a[k] + cfg.eta * (1.0 - s[k])
        new = min(max(new, 0.0), cap)
        delta = new - a[k]
        if delta != 0.0:
            a[k] = new
            s += delta * Km[k]
    return a


ANNEAL_PHASES = 14


def train_local(X, kcfg: KernelConfig, cfg: TrainConfig) -> tuple[AlphaVector, KernelMatrix]:
    """Train by annealed projected sweeps.

    Each epoch is one box-clamped coordinate sweep followed by an exact
    projection back onto the capped simplex (sum alpha = 1); the step size is
    halved whenever the sweep displacement falls below 10 * epsilon * eta, up to
    ANNEAL_PHASES times with at most max_epochs sweeps per phase. The
    projection and annealing are needed for the multipliers to converge to
    the constrained dual optimum rather than a box-only fixed point."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValueError("X must be non-empty")
    K = kernel_matrix(X, kcfg)
    a = anneal_train(K.entries, cfg.nu, cfg.eta, cfg.epsilon, cfg.max_epochs, ANNEAL_PHASES)
    return a, K


def compute_w(alpha: AlphaVector, K: KernelMatrix) -> CoefficientVector:
    """w_k = sum_i alpha_i K[i, k]."""
    if alpha.shape[0] != K.n:
        raise ValueError("alpha / kernel size mismatch")
    return K.entries @ alpha


def dual_objective(alpha: AlphaVector, K: KernelMatrix) -> float:
    """J(alpha) = sum alpha_i - 1/2 sum_ij alpha_i alpha_j K[i, j]."""
    if alpha.shape[0] != K.n:
        raise ValueError("alpha / kernel size mismatch")
    return float(np.sum(alpha) - 0.5 * alpha @ K.entries @ alpha)


def local_loss(alpha: AlphaVector, K: KernelMatrix) -> float:
    """Client loss reported to the server; lower is better."""
    return -dual_objective(alpha, K)


def compute_rho(alpha: AlphaVector, K: KernelMatrix, cfg: TrainConfig) -> float:
    """Offset from margin support vectors (strictly inside the box), falling
    back to all positive-alpha points when none are strictly interior."""
    alpha = np.asarray(alpha, dtype=float)
    if not np.any(alpha > 0):
        raise ValueError("degenerate model: all alphas are zero")
    cap = box_cap(alpha.shape[0], cfg.nu)
    w = compute_w(alpha, K)
    margin = (alpha > MARGIN_SLACK) & (alpha < cap - MARGIN_SLACK)
    idx = margin if np.any(margin) else alpha > 0
    return float(np.mean(w[idx]))


def build_model(X, alpha: AlphaVector, K: KernelMatrix, kcfg: KernelConfig, cfg: TrainConfig) -> OcsvmModel:
    """Assemble a detector from a trained alpha: keep rows with alpha_i > 0."""
    X = np.asarray(X, dtype=float)
    rho = compute_rho(alpha, K, cfg)
    keep = alpha > SUPPORT_THRESHOLD
    if not np.any(keep):
        keep = alpha > 0
    return OcsvmModel(
        support_points=X[keep].copy(),
        alphas=np.asarray(alpha)[keep].copy(),
        rho=rho,
        kernel=kcfg,
        nu=cfg.nu,
    )


def decision(model: OcsvmModel, x) -> float:
    """g(x) = sum_i alpha_i k(sv_i, x) - rho."""
    x = np.asarray(x, dtype=float)
    if x.shape[0] != model.support_points.shape[1]:
        raise ValueError("query dimension does not match support points")
    d2 = np.sum((model.support_points - x) ** 2, axis=1)
    k = np.exp(-d2 / (2.0 * model.kernel.sigma**2))
    return float(model.alphas @ k - model.rho)


def decision_batch(model: OcsvmModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    diff = X[:, None, :] - model.support_points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    k = np.exp(-d2 / (2.0 * model.kernel.sigma**2))
    return k @ model.alphas - model.rho


def classify(model: OcsvmModel, x) -> int:
    """sign(g(x)); exact-boundary points count as healthy (+1)."""
    return 1 if decision(model, x) >= 0 else -1
