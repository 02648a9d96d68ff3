"""Define and run a small benchmark suite, then read the aggregates.

Suites are INI files pairing synthetic datasets with split strategies; the
runner writes one trace CSV per run plus summary and aggregate tables.
The same suite file works with `subsplit bench --suite ... --out-dir ...`.
"""

import csv
from pathlib import Path

from subsplit import parse_suite, run_benchmark

OUT = Path(__file__).parent / "out"

SUITE = """\
[suite]
repeats = 3
iters = 60
vary = seed           ; same data each repeat, different chain seeds
alpha = 1.0
split-period = 2

[dataset separated]
k = 8
d = 2
n = 3000
alpha-dir = 5.0
kappa = 0.001
nu = 8.0
seed = 21

[dataset packed]
k = 12
d = 2
n = 3000
alpha-dir = 3.0
kappa = 0.05
nu = 6.0
seed = 22

[strategy random]
init = random

[strategy km]
init = kmeans
"""


def main():
    OUT.mkdir(exist_ok=True)
    suite_file = OUT / "demo_suite.ini"
    suite_file.write_text(SUITE)

    suite = parse_suite(suite_file)
    results = run_benchmark(suite, OUT / "bench")
    ok = sum(r.status == "ok" for r in results)
    print(f"ran {len(results)} fits ({ok} ok); artifacts in {OUT}/bench/\n")

    with open(OUT / "bench" / "aggregates.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    print(f"{'dataset':<12} {'strategy':<10} {'median NMI':>12} {'median K':>10}")
    for row in rows:
        print(f"{row['dataset']:<12} {row['strategy']:<10} "
              f"{float(row['median_final_nmi']):>12.3f} "
              f"{float(row['median_final_k']):>10.1f}")


if __name__ == "__main__":
    main()
