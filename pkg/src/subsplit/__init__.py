"""Split/merge sampling for Dirichlet process Gaussian mixtures.

The package clusters points without fixing the number of components ahead
of time.  A restricted Gibbs sweep refines the current clustering while
split and merge moves, scored by a marginal-likelihood Hastings ratio,
change the number of clusters.  Each cluster carries a two-way subcluster
assignment from which splits are proposed; how those subclusters are
seeded is pluggable (random coin flips, a small k-means, or a learned set
transformer loaded from a binary weight file).

Typical use:

    from subsplit import SamplerConfig, data_driven_prior, fit

    prior = data_driven_prior(points)
    state, trace = fit(points, alpha=1.0, prior=prior,
                       config=SamplerConfig(iters=200, rng_seed=0))
    labels = state.labels
"""

from .data import (
    GmmSpec,
    LabeledData,
    gen_gmm,
    gen_split_pair,
    load_labels,
    load_points,
    save_labels,
    save_points,
)
from .errors import (
    BadMagic,
    CorruptTensor,
    DegenerateCluster,
    DimensionMismatch,
    EmptySubcluster,
    InvalidConfig,
    InvalidData,
    InvalidParams,
    InvalidWeights,
    NumericalFailure,
    ShapeMismatch,
    SubsplitError,
    UnsplittablePrior,
    WeightFileError,
)
from .metrics import MetricsRow, ari, log_posterior, nmi, write_trace_csv
from .niw import (
    GaussianParams,
    NiwParams,
    SuffStats,
    data_driven_prior,
    log_marginal_likelihood,
    niw_posterior,
    sample_niw,
    suffstats_from_points,
)
from .sampler import (
    Cluster,
    IterationStats,
    ModelState,
    SamplerConfig,
    SubclusterPair,
    fit,
    propose_merges,
    propose_splits,
    restricted_gibbs_iteration,
    split_log_hastings,
)
from .settransformer import set_transformer_forward
from .split_init import (
    KMeans2Init,
    RandomInit,
    SplitNetInit,
    init_kmeans2,
    init_random,
    init_splitnet,
    make_initializer,
)
from .weights_io import (
    StMeta,
    StWeights,
    load_weights,
    random_weights,
    save_weights,
)
from .bench import RunResult, StrategySpec, SuiteSpec, parse_suite, run_benchmark

__version__ = "0.1.0"

__all__ = [
    "BadMagic",
    "Cluster",
    "CorruptTensor",
    "DegenerateCluster",
    "DimensionMismatch",
    "EmptySubcluster",
    "GaussianParams",
    "GmmSpec",
    "InvalidConfig",
    "InvalidData",
    "InvalidParams",
    "InvalidWeights",
    "IterationStats",
    "KMeans2Init",
    "LabeledData",
    "MetricsRow",
    "ModelState",
    "NiwParams",
    "NumericalFailure",
    "RandomInit",
    "RunResult",
    "SamplerConfig",
    "ShapeMismatch",
    "SplitNetInit",
    "StMeta",
    "StWeights",
    "StrategySpec",
    "SubclusterPair",
    "SubsplitError",
    "SuffStats",
    "SuiteSpec",
    "UnsplittablePrior",
    "WeightFileError",
    "ari",
    "data_driven_prior",
    "fit",
    "gen_gmm",
    "gen_split_pair",
    "init_kmeans2",
    "init_random",
    "init_splitnet",
    "load_labels",
    "load_points",
    "load_weights",
    "log_marginal_likelihood",
    "log_posterior",
    "make_initializer",
    "niw_posterior",
    "nmi",
    "parse_suite",
    "propose_merges",
    "propose_splits",
    "random_weights",
    "restricted_gibbs_iteration",
    "run_benchmark",
    "sample_niw",
    "save_labels",
    "save_points",
    "save_weights",
    "set_transformer_forward",
    "split_log_hastings",
    "suffstats_from_points",
    "write_trace_csv",
]
