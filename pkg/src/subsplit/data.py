"""Synthetic Gaussian-mixture data and the CSV formats used by the CLI.

Two generators:

* gen_gmm: a k-component finite mixture with Dirichlet weights and
  NIW-sampled component parameters; the workhorse for clustering benchmarks.
* gen_split_pair: exactly two components, rejected until their ground-truth
  split scores log H > 1, so every emitted pair is worth splitting; this is
  the training/evaluation generator for split strategies.

File formats: points are headerless CSV (one row per point, full float64
round-trip precision); labels are one integer per row.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidData, InvalidParams, UnsplittablePrior
from .niw import NiwParams, sample_niw, suffstats_from_points
from .sampler import split_log_hastings

SPLIT_FILTER_ATTEMPTS = 100


@dataclass(frozen=True)
class GmmSpec:
    """Recipe for one synthetic mixture dataset."""

    k: int
    d: int
    n: int
    alpha_dir: float
    niw: NiwParams
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParams("k must be >= 1")
        if self.n < self.k:
            raise InvalidParams("n must be >= k")
        if self.alpha_dir <= 0:
            raise InvalidParams("alpha_dir must be positive")
        if self.niw.dim != self.d:
            raise InvalidParams(f"prior dim {self.niw.dim} != d {self.d}")


@dataclass
class LabeledData:
    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.points) != len(self.labels):
            raise InvalidData("points and labels disagree in length")


def _component_counts(weights: np.ndarray, n: int) -> np.ndarray:
    counts = np.ceil(weights * n).astype(int)
    # ceil overshoots by at most k-1; shave the excess off the largest
    while counts.sum() > n:
        counts[int(np.argmax(counts))] -= 1
    return counts


def _sample_component(params, count: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((count, params.dim))
    return params.mu + z @ params.chol.T


def gen_gmm(spec: GmmSpec) -> LabeledData:
    """Draw one dataset; deterministic given spec.seed."""
    rng = np.random.default_rng(spec.seed)
    weights = rng.dirichlet(np.full(spec.k, spec.alpha_dir))
    counts = _component_counts(weights, spec.n)
    blocks = []
    for j in range(spec.k):
        params = sample_niw(spec.niw, rng)
        blocks.append(_sample_component(params, counts[j], rng))
    return LabeledData(points=np.vstack(blocks),
                       labels=np.repeat(np.arange(spec.k), counts))


def gen_split_pair(niw: NiwParams, alpha_dir: float, n_max: int,
                   prior_for_h: NiwParams, alpha: float,
                   rng: np.random.Generator) -> LabeledData:
    """Two NIW components worth splitting (ground-truth log H > 1).

    Candidate pairs are drawn and rejected until the filter passes; labels
    are the block vector [0...0, 1...1].
    """
    if n_max < 4:
        raise InvalidParams("n_max must be >= 4")
    for _ in range(SPLIT_FILTER_ATTEMPTS):
        p = rng.dirichlet([alpha_dir, alpha_dir])
        n0, n1 = int(np.ceil(p[0] * n_max)), int(np.ceil(p[1] * n_max))
        part0 = _sample_component(sample_niw(niw, rng), n0, rng)
        part1 = _sample_component(sample_niw(niw, rng), n1, rng)
        stats0 = suffstats_from_points(part0)
        stats1 = suffstats_from_points(part1)
        if split_log_hastings(stats0 + stats1, stats0, stats1,
                              alpha, prior_for_h) > 1.0:
            return LabeledData(points=np.vstack([part0, part1]),
                               labels=np.repeat([0, 1], [n0, n1]))
    raise UnsplittablePrior(
        f"no splittable pair in {SPLIT_FILTER_ATTEMPTS} attempts; "
        "the difficulty knobs and the filter prior are inconsistent")


def save_points(path, points: np.ndarray) -> None:
    np.savetxt(path, np.asarray(points, dtype=np.float64),
               fmt="%.17g", delimiter=",")


def load_points(path) -> np.ndarray:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)  # empty file warns before we raise
            pts = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise InvalidData(f"{path}: {exc}") from exc
    if pts.size == 0:
        raise InvalidData(f"{path}: no data rows")
    if not np.all(np.isfinite(pts)):
        raise InvalidData(f"{path}: non-finite values")
    return pts


def save_labels(path, labels: np.ndarray) -> None:
    np.savetxt(path, np.asarray(labels, dtype=np.int64), fmt="%d")


def load_labels(path) -> np.ndarray:
    try:
        raw = np.loadtxt(path, ndmin=1)
    except ValueError as exc:
        raise InvalidData(f"{path}: {exc}") from exc
    labels = raw.astype(np.int64)
    if np.any(labels != raw):
        raise InvalidData(f"{path}: labels must be integers")
    return labels
