"""Prune support vectors to edge support vectors via k-NN tangent planes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import kernel_matrix
from .ocsvm import OcsvmModel, TrainConfig, compute_rho

DEGENERACY_EPS = 1e-9


@dataclass(frozen=True)
class EdgeConfig:
    k: int = 10
    gamma: float = 0.05  # tolerated off-side neighbor ratio

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0 < self.gamma < 0.5:
            raise ValueError(f"gamma must be in (0, 0.5), got {self.gamma}")


@dataclass(frozen=True)
class EdgeVerdict:
    sv_index: int
    l: float
    is_edge: bool
    degenerate: bool


@dataclass(frozen=True)
class PersonalizeResult:
    model: OcsvmModel
    verdicts: tuple[EdgeVerdict, ...]
    fallback: bool  # pruning would have emptied the model; input returned

    @property
    def n_edge(self) -> int:
        return sum(v.is_edge for v in self.verdicts)


def knn(points, query_index: int, k: int) -> np.ndarray:
    """Indices of the k nearest points to points[query_index], excluding the
    query itself; distance ties broken by lower index."""
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if k >= n:
        raise ValueError(f"k={k} must be smaller than the point count {n}")
    d2 = np.sum((points - points[query_index]) ** 2, axis=1)
    d2[query_index] = np.inf
    order = np.argsort(d2, kind="stable")
    return order[:k]


def norm_vector(x, neighbors) -> tuple[np.ndarray, bool]:
    """Sum of unit vectors from x toward each neighbor.

    Neighbors coinciding with x have no direction and are skipped; the second
    return value flags whether any were."""
    x = np.asarray(x, dtype=float)
    neighbors = np.asarray(neighbors, dtype=float)
    diffs = neighbors - x
    norms = np.linalg.norm(diffs, axis=1)
    ok = norms > 0
    v = np.zeros_like(x) if not np.any(ok) else (diffs[ok] / norms[ok, None]).sum(axis=0)
    return v, bool(np.any(~ok))


def edge_ratio(x, neighbors, v) -> float:
    """Fraction of neighbors on the non-negative side of the plane normal v."""
    x = np.asarray(x, dtype=float)
    neighbors = np.asarray(neighbors, dtype=float)
    if neighbors.shape[0] == 0:
        raise ValueError("neighbors must be non-empty")
    diffs = neighbors - x
    norms = np.linalg.norm(diffs, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    units = diffs / safe[:, None]  # coincident rows become zero vectors
    theta = units @ np.asarray(v, dtype=float)
    return float(np.mean(theta >= 0))


def classify_edge(points, sv_index: int, cfg: EdgeConfig) -> EdgeVerdict:
    """Edge iff at least a 1-gamma fraction of neighbors sit on one side of
    the tangent plane and the normal is not degenerate (balanced neighborhood)."""
    points = np.asarray(points, dtype=float)
    idx = knn(points, sv_index, cfg.k)
    neigh = points[idx]
    x = points[sv_index]
    v, _coincident = norm_vector(x, neigh)
    degenerate = float(np.linalg.norm(v)) < DEGENERACY_EPS * cfg.k
    l = edge_ratio(x, neigh, v)
    is_edge = (not degenerate) and l >= 1.0 - cfg.gamma
    return EdgeVerdict(sv_index=sv_index, l=l, is_edge=is_edge, degenerate=degenerate)


def _locate_rows(rows: np.ndarray, X: np.ndarray) -> list[int]:
    out = []
    for row in rows:
        hits = np.flatnonzero(np.all(X == row, axis=1))
        if hits.size == 0:
            raise ValueError("support vector not found in the local training set")
        out.append(int(hits[0]))
    return out


def personalize_model(
    model: OcsvmModel, local_X, cfg: EdgeConfig, tcfg: TrainConfig
) -> PersonalizeResult:
    """Keep only edge support vectors, renormalize their multipliers to the
    pre-pruning total, and recompute the offset on the retained set.

    Neighbor search runs over the full local training set. If every support
    vector would be pruned, the input model is returned unchanged."""
    local_X = np.asarray(local_X, dtype=float)
    if model.support_points.shape[0] < 1:
        raise ValueError("model has no support vectors")
    if cfg.k >= local_X.shape[0]:
        raise ValueError("k must be smaller than the local sample count")
    sv_indices = _locate_rows(model.support_points, local_X)
    verdicts = tuple(classify_edge(local_X, i, cfg) for i in sv_indices)
    keep = np.array([v.is_edge for v in verdicts], dtype=bool)
    if not np.any(keep):
        return PersonalizeResult(model=model, verdicts=verdicts, fallback=True)
    pts = model.support_points[keep]
    alphas = model.alphas[keep] * (model.alphas.sum() / model.alphas[keep].sum())
    K = kernel_matrix(pts, model.kernel)
    rho = compute_rho(alphas, K, tcfg)
    pruned = OcsvmModel(
        support_points=pts, alphas=alphas, rho=rho, kernel=model.kernel, nu=model.nu
    )
    return PersonalizeResult(model=pruned, verdicts=verdicts, fallback=False)
