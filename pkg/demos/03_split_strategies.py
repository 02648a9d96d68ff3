"""Random vs 2-means subcluster initialization on a packed scene.

On well-separated data the two strategies converge to the same answer.
This script builds the regime where they differ: twenty overlapping
components in 2-D.  Randomly initialized subclusters tend to converge to
boundary cuts that the acceptance test keeps rejecting, while 2-means
starts from a data-aware bipartition and gets its proposals accepted.
"""

import numpy as np

from subsplit import (
    GmmSpec,
    NiwParams,
    SamplerConfig,
    data_driven_prior,
    fit,
    gen_gmm,
    make_initializer,
    nmi,
)


def main():
    gen = NiwParams(np.zeros(2), 0.05, np.eye(2), 6.0)
    data = gen_gmm(GmmSpec(k=20, d=2, n=10000, alpha_dir=3.0, niw=gen, seed=3004))
    prior = data_driven_prior(data.points)
    print(f"packed scene: {data.points.shape[0]} points, "
          f"{len(np.unique(data.labels))} true components\n")

    print(f"{'strategy':<10} {'K':>4} {'NMI':>7} {'accepted splits (first 50 iters)':>34}")
    for strategy in ("random", "kmeans"):
        config = SamplerConfig(iters=100, split_period=2, rng_seed=4,
                               strategy=make_initializer(strategy))
        state, trace = fit(data.points, alpha=1.0, prior=prior, config=config,
                           gt_labels=data.labels)
        early = sum(t.splits_accepted for t in trace[:50])
        print(f"{strategy:<10} {trace[-1].k:>4} "
              f"{nmi(data.labels, state.labels):>7.3f} {early:>34}")

    print("\nBoth chains target the same posterior; the difference is purely")
    print("how often a proposed bipartition survives the accept/reject step.")


if __name__ == "__main__":
    main()
