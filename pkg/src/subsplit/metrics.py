"""Clustering agreement metrics and the collapsed partition log posterior."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidData
from .niw import log_marginal_likelihood


def _contingency(labels_a, labels_b):
    a = np.asarray(labels_a).reshape(-1)
    b = np.asarray(labels_b).reshape(-1)
    if a.shape != b.shape:
        raise InvalidData(f"label lengths differ: {a.shape[0]} vs {b.shape[0]}")
    if a.size == 0:
        raise InvalidData("empty labelings")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def nmi(labels_a, labels_b) -> float:
    """Normalized mutual information, I(A;B) / mean(H(A), H(B)).

    Two constant labelings describe the same one-block partition and score 1;
    one constant labeling against a non-constant one scores 0.
    """
    table = _contingency(labels_a, labels_b)
    n = table.sum()
    pa = table.sum(axis=1) / n
    pb = table.sum(axis=0) / n
    h_a = -np.sum(pa * np.log(pa, where=pa > 0, out=np.zeros_like(pa)))
    h_b = -np.sum(pb * np.log(pb, where=pb > 0, out=np.zeros_like(pb)))
    denom = 0.5 * (h_a + h_b)
    if denom <= 0:
        return 1.0
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(pa, pb)[nz]
    info = np.sum(pij * np.log(pij / outer))
    return float(np.clip(max(info, 0.0) / denom, 0.0, 1.0))


def ari(labels_a, labels_b) -> float:
    """Adjusted Rand index from the pair-counting contingency table."""
    table = _contingency(labels_a, labels_b)
    n = table.sum()
    if n < 2:
        raise InvalidData("ARI needs at least two points")

    def comb2(x):
        return x * (x - 1) / 2.0

    index = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    total = comb2(n)
    expected = sum_a * sum_b / total
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        # both partitions trivial (all singletons or a single block) and equal
        return 1.0
    return float((index - expected) / (max_index - expected))


def log_posterior(state) -> float:
    """Collapsed CRP partition log posterior of a fitted model state.

    K log(alpha) + sum_k [log Gamma(N_k) + logml(prior, stats_k)]
    + log Gamma(alpha) - log Gamma(alpha + N)

    Depends on the state only through its partition, the NIW prior, and the
    concentration, so traces are comparable across split strategies.
    """
    alpha = state.alpha
    n = sum(c.stats.m for c in state.clusters)
    total = len(state.clusters) * np.log(alpha) + gammaln(alpha) - gammaln(alpha + n)
    for c in state.clusters:
        total += gammaln(c.stats.m) + log_marginal_likelihood(state.prior, c.stats)
    return float(total)


@dataclass
class MetricsRow:
    """One trace line of a benchmark or fit run."""

    iter: int
    k_inferred: int
    log_posterior: float
    nmi: float
    ari: float
    k_mae: float
    elapsed_ms: float
    splits_accepted: int
    merges_accepted: int

    COLUMNS = ("iter", "k_inferred", "log_posterior", "nmi", "ari", "k_mae",
               "elapsed_ms", "splits_accepted", "merges_accepted")

    def as_csv_row(self) -> list[str]:
        vals = [getattr(self, c) for c in self.COLUMNS]
        out = []
        for v in vals:
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(repr(float(v)))
            else:
                out.append(str(v))
        return out


def write_trace_csv(path, rows) -> None:
    """Write per-iteration sampler trace rows in the MetricsRow layout.

    `rows` are duck-typed iteration records (iteration, k, log_posterior,
    nmi, ari, k_mae, elapsed_ms, splits_accepted, merges_accepted).
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MetricsRow.COLUMNS)
        for r in rows:
            writer.writerow(MetricsRow(
                iter=r.iteration, k_inferred=r.k, log_posterior=r.log_posterior,
                nmi=r.nmi, ari=r.ari, k_mae=r.k_mae, elapsed_ms=r.elapsed_ms,
                splits_accepted=r.splits_accepted,
                merges_accepted=r.merges_accepted).as_csv_row())
