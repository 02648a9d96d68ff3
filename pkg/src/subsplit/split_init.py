"""Subcluster initialization strategies: Random, 2-means, SplitNet.

Each strategy maps a cluster's points to a bit per point (0 -> left
subcluster, 1 -> right).  The sampler treats these as interchangeable; only
the quality of the proposed split differs.

The 2-means variant is permutation equivariant: all random index choices are
made in a canonical row order (lexicographic), so permuting the input rows
permutes the output bits.  Because seeding probabilities are scale free,
rescaling the data by any c > 0 leaves the partition unchanged as well.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateCluster, DimensionMismatch, InvalidData
from .settransformer import set_transformer_forward
from .weights_io import StWeights

KMEANS_MAX_ITER = 100
KMEANS_REL_TOL = 1e-6


def init_random(n_points: int, rng: np.random.Generator) -> np.ndarray:
    """Fair-coin bit per point."""
    if n_points < 1:
        raise InvalidData("cannot split an empty cluster")
    return rng.integers(0, 2, size=n_points).astype(np.int8)


def _pairwise_sq(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def init_kmeans2(points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Lloyd's algorithm with K=2 and k-means++ seeding.

    Index choices happen in canonical (lexicographic) row order and the
    seeding stream is keyed by a single draw from `rng`, so the partition is
    a function of the point multiset, not the row order.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidData("2-means needs an N x D matrix with N >= 2")
    if np.all(pts == pts[0]):
        raise DegenerateCluster("all points identical; 2-means has no split")
    n = pts.shape[0]
    order = np.lexsort(pts.T[::-1])
    canon = pts[order]

    local = np.random.default_rng(int(rng.integers(np.iinfo(np.int64).max)))
    first = int(local.integers(n))
    d2 = ((canon - canon[first]) ** 2).sum(axis=1)
    second = int(local.choice(n, p=d2 / d2.sum()))
    centers = np.stack([canon[first], canon[second]])

    prev_inertia = np.inf
    for _ in range(KMEANS_MAX_ITER):
        dists = _pairwise_sq(canon, centers)
        assign = dists.argmin(axis=1)
        for side in (0, 1):
            if not np.any(assign == side):
                other = 1 - side
                assign[int(np.argmax(dists[:, other] * (assign == other)))] = side
        inertia = dists[np.arange(n), assign].sum()
        for side in (0, 1):
            centers[side] = canon[assign == side].mean(axis=0)
        if prev_inertia - inertia <= KMEANS_REL_TOL * max(inertia, 1e-300):
            break
        prev_inertia = inertia

    dists = _pairwise_sq(pts, centers)
    bits = dists.argmin(axis=1).astype(np.int8)
    if bits.min() == bits.max():
        # centers collapsed; peel the point farthest from the occupied center
        side = int(bits[0])
        far_canon = int(np.argmax(_pairwise_sq(canon, centers)[:, side]))
        bits[order[far_canon]] = 1 - side
    return bits


def init_splitnet(points: np.ndarray, weights: StWeights) -> np.ndarray:
    """Threshold the network's per-point logits at probability 0.5.

    Input is standardized per dimension first (std floored at 1e-8, so a
    constant column is harmless).  If the thresholded assignment leaves one
    side empty, the single most borderline point is flipped across.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise DimensionMismatch(f"points must be 2-d, got shape {pts.shape}")
    if pts.shape[1] != weights.meta.dim_in:
        raise DimensionMismatch(
            f"data dim {pts.shape[1]} != network input dim {weights.meta.dim_in}")
    std = np.maximum(pts.std(axis=0), 1e-8)
    logits = set_transformer_forward((pts - pts.mean(axis=0)) / std, weights)
    bits = (logits >= 0.0).astype(np.int8)  # sigmoid(l) >= 0.5  <=>  l >= 0
    if len(bits) >= 2:
        if bits.all():
            bits[int(np.argmin(logits))] = 0
        elif not bits.any():
            bits[int(np.argmax(logits))] = 1
    return bits


class RandomInit:
    name = "random"

    def __call__(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return init_random(len(points), rng)


class KMeans2Init:
    name = "kmeans"

    def __call__(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if len(points) < 2:
            return init_random(len(points), rng)
        try:
            return init_kmeans2(points, rng)
        except DegenerateCluster:
            return init_random(len(points), rng)


class SplitNetInit:
    name = "splitnet"

    def __init__(self, weights: StWeights):
        self.weights = weights

    def __call__(self, points: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        if len(points) < 2:
            return init_random(len(points), rng)
        return init_splitnet(points, self.weights)


def make_initializer(kind: str, weights: StWeights | None = None):
    """Factory for the three strategies; `weights` is required for splitnet."""
    if kind == "random":
        return RandomInit()
    if kind == "kmeans":
        return KMeans2Init()
    if kind == "splitnet":
        if weights is None:
            raise InvalidData("splitnet strategy needs a loaded weight file")
        return SplitNetInit(weights)
    raise InvalidData(f"unknown split strategy {kind!r}")
