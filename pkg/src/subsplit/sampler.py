"""Subcluster-augmented Gibbs sampler for a DP Gaussian mixture.

The restricted sweep resamples weights, component parameters, labels and
sublabels but never changes the number of clusters (beyond dropping ones
that empty out).  Cluster creation and destruction happen only through
Metropolis-Hastings split and merge moves: each cluster carries a pair of
subclusters from which a split is proposed, and the acceptance ratio
compares the marginal evidence of the pair against the parent.

Randomness comes from a counter-based (Philox) generator.  Sequential
phases draw from the master stream; the two data-parallel phases (label and
sublabel sampling) draw from per-chunk streams keyed by (iteration entropy,
chunk index, phase), so a run is bit-reproducible for a fixed seed and
thread count, and the label phase can be sharded across threads without a
shared mutable generator.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from .errors import EmptySubcluster, InvalidConfig, InvalidData, NumericalFailure
from .metrics import ari as _ari
from .metrics import log_posterior as _log_posterior
from .metrics import nmi as _nmi
from .niw import (
    GaussianParams,
    NiwParams,
    SuffStats,
    log_gaussian_pdf_rows,
    log_marginal_likelihood,
    niw_posterior,
    sample_niw,
    suffstats_from_points,
)
from .split_init import RandomInit

_PHASE_LABELS = 0
_PHASE_SUBLABELS = 1
_TINY = 1e-300


@dataclass
class SubclusterPair:
    """The two-way refinement a cluster proposes to split into."""

    params_l: GaussianParams
    params_r: GaussianParams
    weights: np.ndarray  # 2-simplex
    stats_l: SuffStats
    stats_r: SuffStats


@dataclass
class Cluster:
    params: GaussianParams
    stats: SuffStats
    sub: SubclusterPair


@dataclass
class ModelState:
    clusters: list
    weights: np.ndarray  # (K,), renormalized over live clusters
    labels: np.ndarray  # (N,) int64 cluster index per point
    sublabels: np.ndarray  # (N,) int8, 0 -> left, 1 -> right
    alpha: float
    prior: NiwParams

    @property
    def k(self) -> int:
        return len(self.clusters)


@dataclass
class SamplerConfig:
    iters: int
    split_period: int = 2
    merge_enabled: bool = True
    initial_k: int = 1
    rng_seed: int = 0
    threads: int = 1
    strategy: object = field(default_factory=RandomInit)

    def __post_init__(self):
        if self.iters < 0:
            raise InvalidConfig("iters must be >= 0")
        if self.split_period < 1:
            raise InvalidConfig("split_period must be >= 1")
        if self.initial_k < 1:
            raise InvalidConfig("initial_k must be >= 1")
        if self.threads < 1:
            raise InvalidConfig("threads must be >= 1")


@dataclass
class IterationStats:
    """One trace entry; nmi/ari/k_mae stay None without ground truth."""

    iteration: int
    k: int
    log_posterior: float
    elapsed_ms: float
    splits_proposed: int = 0
    splits_accepted: int = 0
    merges_proposed: int = 0
    merges_accepted: int = 0
    nmi: float | None = None
    ari: float | None = None
    k_mae: float | None = None


def master_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def _chunk_bounds(n: int, threads: int) -> list:
    edges = np.linspace(0, n, threads + 1).astype(int)
    return [(int(edges[t]), int(edges[t + 1])) for t in range(threads)]


def _chunk_rng(entropy: int, chunk: int, phase: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=entropy, spawn_key=(chunk, phase))
    return np.random.Generator(np.random.Philox(seq))


def _run_chunks(fn, n: int, threads: int) -> None:
    bounds = _chunk_bounds(n, threads)
    if threads == 1:
        fn(0, *bounds[0])
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(lambda args: fn(*args),
                      [(t, lo, hi) for t, (lo, hi) in enumerate(bounds)]))


def _sample_cluster_weights(counts: np.ndarray, alpha: float,
                            rng: np.random.Generator) -> np.ndarray:
    # Dirichlet over (N_1..N_K, alpha); the remainder stick is dropped and
    # the instantiated entries renormalized
    draw = rng.dirichlet(np.append(counts.astype(float), alpha))
    w = draw[:-1]
    return w / max(w.sum(), _TINY)


def _sample_sub_weights(c0: float, c1: float, alpha: float,
                        rng: np.random.Generator) -> np.ndarray:
    return rng.dirichlet([c0 + alpha / 2.0, c1 + alpha / 2.0])


def _posterior_draw(prior: NiwParams, stats: SuffStats, rng, where: str) -> GaussianParams:
    try:
        return sample_niw(niw_posterior(prior, stats), rng)
    except NumericalFailure as exc:
        raise NumericalFailure(f"{where}: {exc}") from exc


def _make_sub(points: np.ndarray, bits: np.ndarray, alpha: float, prior: NiwParams,
              rng: np.random.Generator, where: str) -> SubclusterPair:
    stats_l = suffstats_from_points(points[bits == 0])
    stats_r = suffstats_from_points(points[bits == 1])
    return SubclusterPair(
        params_l=_posterior_draw(prior, stats_l, rng, where),
        params_r=_posterior_draw(prior, stats_r, rng, where),
        weights=_sample_sub_weights(stats_l.m, stats_r.m, alpha, rng),
        stats_l=stats_l,
        stats_r=stats_r,
    )


def init_state(data: np.ndarray, alpha: float, prior: NiwParams,
               config: SamplerConfig, rng: np.random.Generator) -> ModelState:
    """Uniform random labels over initial_k clusters, then per-cluster
    parameters and strategy-initialized subclusters."""
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidData("data must be an N x D matrix with N >= 2")
    if not np.all(np.isfinite(pts)):
        raise InvalidData("data contains non-finite values")
    n = pts.shape[0]
    if n < config.initial_k:
        raise InvalidConfig(f"initial_k={config.initial_k} exceeds N={n}")
    if alpha <= 0:
        raise InvalidConfig("alpha must be positive")

    labels = rng.integers(0, config.initial_k, size=n)
    live, labels = np.unique(labels, return_inverse=True)
    k = len(live)
    counts = np.bincount(labels, minlength=k)
    weights = _sample_cluster_weights(counts, alpha, rng)

    sublabels = np.zeros(n, dtype=np.int8)
    clusters = []
    for idx in range(k):
        members = labels == idx
        cluster_pts = pts[members]
        stats = suffstats_from_points(cluster_pts)
        params = _posterior_draw(prior, stats, rng, f"init cluster {idx}")
        bits = np.asarray(config.strategy(cluster_pts, rng), dtype=np.int8)
        sublabels[members] = bits
        clusters.append(Cluster(
            params=params, stats=stats,
            sub=_make_sub(cluster_pts, bits, alpha, prior, rng, f"init cluster {idx}")))
    return ModelState(clusters=clusters, weights=weights, labels=labels,
                      sublabels=sublabels, alpha=alpha, prior=prior)


def _recompute_stats(state: ModelState, data: np.ndarray) -> None:
    for idx, cluster in enumerate(state.clusters):
        members = state.labels == idx
        bits = state.sublabels[members]
        cluster_pts = data[members]
        stats_l = suffstats_from_points(cluster_pts[bits == 0])
        stats_r = suffstats_from_points(cluster_pts[bits == 1])
        cluster.sub.stats_l = stats_l
        cluster.sub.stats_r = stats_r
        cluster.stats = stats_l + stats_r


def _drop_empty_clusters(state: ModelState) -> None:
    counts = np.bincount(state.labels, minlength=state.k)
    if np.all(counts > 0):
        return
    keep = counts > 0
    remap = np.cumsum(keep) - 1
    state.labels = remap[state.labels]
    state.clusters = [c for c, flag in zip(state.clusters, keep) if flag]
    w = state.weights[keep]
    state.weights = w / max(w.sum(), _TINY)


def restricted_gibbs_iteration(state: ModelState, data: np.ndarray,
                               rng: np.random.Generator, threads: int = 1) -> ModelState:
    """One full sweep; K can only decrease (empty clusters are dropped)."""
    pts = np.asarray(data, dtype=np.float64)
    n = pts.shape[0]
    alpha, prior = state.alpha, state.prior

    # (a) cluster weights from current counts
    counts = np.array([c.stats.m for c in state.clusters], dtype=float)
    state.weights = _sample_cluster_weights(counts, alpha, rng)

    # (b) cluster parameters from current stats
    for idx, cluster in enumerate(state.clusters):
        cluster.params = _posterior_draw(prior, cluster.stats, rng, f"cluster {idx}")

    # (c) labels: per-point categorical over live clusters via Gumbel argmax
    logp = np.column_stack([log_gaussian_pdf_rows(pts, c.params) for c in state.clusters])
    logp += np.log(np.maximum(state.weights, _TINY))
    labels = np.empty(n, dtype=np.int64)
    entropy = int(rng.integers(np.iinfo(np.int64).max))

    def label_chunk(chunk, lo, hi):
        g = _chunk_rng(entropy, chunk, _PHASE_LABELS).gumbel(size=(hi - lo, state.k))
        labels[lo:hi] = np.argmax(logp[lo:hi] + g, axis=1)

    _run_chunks(label_chunk, n, threads)
    state.labels = labels
    _drop_empty_clusters(state)
    # refresh stats so (d) conditions on the membership just sampled, not on
    # the previous iteration's; points that switched clusters must be visible
    # to the subcluster updates below
    _recompute_stats(state, pts)

    # (d) subcluster weights/parameters from current sub stats, then sublabels
    for idx, cluster in enumerate(state.clusters):
        sub = cluster.sub
        cluster.sub = replace(
            sub,
            weights=_sample_sub_weights(sub.stats_l.m, sub.stats_r.m, alpha, rng),
            params_l=_posterior_draw(prior, sub.stats_l, rng, f"cluster {idx} sub l"),
            params_r=_posterior_draw(prior, sub.stats_r, rng, f"cluster {idx} sub r"),
        )
    log_p_right = np.empty(n)
    for idx, cluster in enumerate(state.clusters):
        members = state.labels == idx
        member_pts = pts[members]
        sub = cluster.sub
        lo_l = np.log(max(sub.weights[0], _TINY)) + log_gaussian_pdf_rows(member_pts, sub.params_l)
        lo_r = np.log(max(sub.weights[1], _TINY)) + log_gaussian_pdf_rows(member_pts, sub.params_r)
        log_p_right[members] = lo_r - np.logaddexp(lo_l, lo_r)
    sublabels = np.empty(n, dtype=np.int8)

    def sublabel_chunk(chunk, lo, hi):
        u = _chunk_rng(entropy, chunk, _PHASE_SUBLABELS).random(hi - lo)
        sublabels[lo:hi] = np.log(u) < log_p_right[lo:hi]

    _run_chunks(sublabel_chunk, n, threads)
    state.sublabels = sublabels

    # (e) refresh stats; revive empty subclusters with one Bernoulli reshuffle
    _recompute_stats(state, pts)
    for idx, cluster in enumerate(state.clusters):
        sub = cluster.sub
        if sub.stats_l.m > 0 and sub.stats_r.m > 0:
            continue
        if sub.stats_l.m == 0:
            sub.params_l = _posterior_draw(prior, SuffStats.empty(prior.dim), rng,
                                           f"cluster {idx} sub l")
        if sub.stats_r.m == 0:
            sub.params_r = _posterior_draw(prior, SuffStats.empty(prior.dim), rng,
                                           f"cluster {idx} sub r")
        members = state.labels == idx
        # fresh symmetric weight draw: the stored counts-based draw is ~(1, 0)
        # for a large cluster, which would make the empty state absorbing
        sub.weights = rng.dirichlet([alpha / 2.0, alpha / 2.0])
        fresh = (rng.random(int(members.sum())) < sub.weights[1]).astype(np.int8)
        state.sublabels[members] = fresh
        member_pts = pts[members]
        sub.stats_l = suffstats_from_points(member_pts[fresh == 0])
        sub.stats_r = suffstats_from_points(member_pts[fresh == 1])
    return state


def split_log_hastings(stats_parent: SuffStats, stats_l: SuffStats, stats_r: SuffStats,
                       alpha: float, prior: NiwParams) -> float:
    """log of the split acceptance ratio for a parent and its two parts."""
    if stats_l.m < 1 or stats_r.m < 1:
        raise EmptySubcluster("split proposal with an empty side")
    return (np.log(alpha)
            + gammaln(stats_l.m) + log_marginal_likelihood(prior, stats_l)
            + gammaln(stats_r.m) + log_marginal_likelihood(prior, stats_r)
            - gammaln(stats_parent.m) - log_marginal_likelihood(prior, stats_parent))


def propose_splits(state: ModelState, data: np.ndarray, strategy,
                   rng: np.random.Generator) -> list:
    """One split proposal per cluster; accepted splits are applied in place.

    Returns the (pre-split) indices of accepted clusters.  The left part
    replaces the parent slot and the right part is appended, so clusters
    created this round are never themselves proposed.
    """
    pts = np.asarray(data, dtype=np.float64)
    alpha, prior = state.alpha, state.prior
    accepted = []
    # iterate the slots present at entry; an accepted split rewrites its own
    # slot with the left child and appends the right child, so clusters born
    # this round are never proposed
    for idx in range(len(state.clusters)):
        cluster = state.clusters[idx]
        try:
            log_h = split_log_hastings(cluster.stats, cluster.sub.stats_l,
                                       cluster.sub.stats_r, alpha, prior)
        except EmptySubcluster:
            continue
        if np.log(rng.random()) >= log_h:
            continue
        accepted.append(idx)
        members = np.flatnonzero(state.labels == idx)
        bits = state.sublabels[members]
        new_idx = len(state.clusters)
        state.labels[members[bits == 1]] = new_idx
        sub = cluster.sub
        left = Cluster(params=_posterior_draw(prior, sub.stats_l, rng, f"split {idx} l"),
                       stats=sub.stats_l, sub=None)
        right = Cluster(params=_posterior_draw(prior, sub.stats_r, rng, f"split {idx} r"),
                        stats=sub.stats_r, sub=None)
        for child, child_members in ((left, members[bits == 0]), (right, members[bits == 1])):
            child_pts = pts[child_members]
            child_bits = np.asarray(strategy(child_pts, rng), dtype=np.int8)
            state.sublabels[child_members] = child_bits
            child.sub = _make_sub(child_pts, child_bits, alpha, prior, rng, "split child")
        state.clusters[idx] = left
        state.clusters.append(right)
        w_parent = state.weights[idx]
        state.weights = np.append(state.weights, w_parent * sub.weights[1])
        state.weights[idx] = w_parent * sub.weights[0]
    return accepted


def apply_merge(state: ModelState, i: int, j: int, rng: np.random.Generator) -> int:
    """Unconditionally fold cluster j into cluster i (the reverse of a
    split): the merged cluster keeps the lower index and adopts the two
    former clusters as its subcluster pair.  Returns the merged index."""
    keep, drop = (i, j) if i < j else (j, i)
    ckeep, cdrop = state.clusters[keep], state.clusters[drop]
    merged_stats = ckeep.stats + cdrop.stats
    merged = Cluster(
        params=_posterior_draw(state.prior, merged_stats, rng, f"merge {i},{j}"),
        stats=merged_stats,
        sub=SubclusterPair(
            params_l=ckeep.params, params_r=cdrop.params,
            weights=np.array([ckeep.stats.m, cdrop.stats.m], dtype=float) / merged_stats.m,
            stats_l=ckeep.stats, stats_r=cdrop.stats))
    keep_members = state.labels == keep
    drop_members = state.labels == drop
    state.sublabels[keep_members] = 0
    state.sublabels[drop_members] = 1
    state.labels[drop_members] = keep
    state.labels[state.labels > drop] -= 1
    state.clusters[keep] = merged
    del state.clusters[drop]
    w = state.weights
    w[keep] += w[drop]
    state.weights = np.delete(w, drop)
    return keep


def propose_merges(state: ModelState, data: np.ndarray,
                   rng: np.random.Generator) -> list:
    """Random disjoint pairs; each merge is the reverse of the corresponding
    split, accepted with probability min(1, 1/H).  Returns accepted pairs
    (indices as of proposal time)."""
    alpha, prior = state.alpha, state.prior
    k = state.k
    if k < 2:
        return []
    perm = rng.permutation(k)
    pairs = [(int(perm[2 * t]), int(perm[2 * t + 1])) for t in range(k // 2)]
    current = list(range(k))  # original index -> live index
    accepted = []
    for a, b in pairs:
        i, j = current[a], current[b]
        ci, cj = state.clusters[i], state.clusters[j]
        log_h = split_log_hastings(ci.stats + cj.stats, ci.stats, cj.stats, alpha, prior)
        if np.log(rng.random()) >= -log_h:
            continue
        accepted.append((a, b))
        drop = max(i, j)
        apply_merge(state, i, j, rng)
        current = [c - 1 if c is not None and c > drop else c for c in current]
        current[a] = current[b] = None
    return accepted


def fit(data: np.ndarray, alpha: float, prior: NiwParams, config: SamplerConfig,
        gt_labels: np.ndarray | None = None, callback=None):
    """Run the full sampler; returns (final state, per-iteration trace).

    `gt_labels` enables NMI/ARI/K-error columns in the trace; `callback`,
    if given, is invoked as callback(state, IterationStats) each iteration.
    """
    pts = np.asarray(data, dtype=np.float64)
    rng = master_rng(config.rng_seed)
    state = init_state(pts, alpha, prior, config, rng)
    k_true = len(np.unique(gt_labels)) if gt_labels is not None else None
    trace = []
    for iteration in range(1, config.iters + 1):
        start = time.perf_counter()
        try:
            restricted_gibbs_iteration(state, pts, rng, threads=config.threads)
            splits_p = splits_a = merges_p = merges_a = 0
            if iteration % config.split_period == 0:
                splits_p = state.k
                splits_a = len(propose_splits(state, pts, config.strategy, rng))
                if config.merge_enabled:
                    merges_p = state.k // 2
                    merges_a = len(propose_merges(state, pts, rng))
        except NumericalFailure as exc:
            raise NumericalFailure(f"iteration {iteration}: {exc}") from exc
        row = IterationStats(
            iteration=iteration, k=state.k, log_posterior=_log_posterior(state),
            elapsed_ms=(time.perf_counter() - start) * 1e3,
            splits_proposed=splits_p, splits_accepted=splits_a,
            merges_proposed=merges_p, merges_accepted=merges_a)
        if gt_labels is not None:
            row.nmi = _nmi(state.labels, gt_labels)
            row.ari = _ari(state.labels, gt_labels)
            row.k_mae = float(abs(state.k - k_true))
        trace.append(row)
        if callback is not None:
            callback(state, row)
    return state, trace
