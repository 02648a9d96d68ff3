"""Benchmark suites: an INI-style suite file crossed over datasets,
strategies and repeats, executed in a worker pool.

Suite file layout (configparser syntax)::

    [suite]
    repeats = 10          ; runs per (dataset, strategy)
    iters = 200
    split-period = 2
    alpha = 1.0
    threads = 1
    base-seed = 0
    vary = seed           ; "seed": fixed dataset, sampler seed varies;
                          ; "dataset": the dataset seed varies per repeat too
    workers = 1           ; process pool size
    prior-kappa = 1.0
    prior-psi-scale = 1.0
    ; prior-nu = 5.0      ; optional, defaults to D+3

    [dataset easy10]
    k = 10
    d = 2
    n = 20000
    alpha-dir = 10
    kappa = 0.01          ; generator NIW knobs (mu0 = 0, psi = I * psi-scale)
    nu = 8
    psi-scale = 1.0
    seed = 7

    [strategy kmeans]
    init = kmeans         ; random | kmeans | splitnet
    ; weights = w.bin     ; required for splitnet

Every run writes a per-iteration trace CSV; summary.csv collects final-row
metrics per run (failures included with their error text), and
aggregates.csv reduces those per (dataset, strategy).
"""

from __future__ import annotations

import configparser
import csv
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import GmmSpec, gen_gmm
from .errors import InvalidConfig
from .metrics import write_trace_csv
from .niw import NiwParams, data_driven_prior
from .sampler import SamplerConfig, fit
from .split_init import make_initializer
from .weights_io import load_weights

_NAME_RE = re.compile(r"^[A-Za-z0-9_-]+$")

SUMMARY_COLUMNS = ("dataset", "strategy", "repeat", "status", "final_k",
                   "final_nmi", "final_ari", "final_log_posterior",
                   "trace_file", "error")
AGGREGATE_COLUMNS = ("dataset", "strategy", "runs_ok", "runs_failed",
                     "median_final_nmi", "mean_final_ari", "median_final_k")


@dataclass(frozen=True)
class StrategySpec:
    name: str
    kind: str
    weights_path: str | None = None


@dataclass(frozen=True)
class SuiteSpec:
    datasets: tuple  # (name, GmmSpec) pairs
    strategies: tuple  # StrategySpec
    repeats: int
    iters: int
    split_period: int
    alpha: float
    threads: int
    base_seed: int
    vary: str
    workers: int
    prior_kappa: float
    prior_nu: float | None
    prior_psi_scale: float


@dataclass
class RunResult:
    dataset: str
    strategy: str
    repeat: int
    status: str  # ok | failed
    final_k: int | None = None
    final_nmi: float | None = None
    final_ari: float | None = None
    final_log_posterior: float | None = None
    trace_file: str | None = None
    error: str | None = None


def _checked_name(section: str, name: str) -> str:
    if not _NAME_RE.match(name):
        raise InvalidConfig(f"[{section}] name {name!r} must match [A-Za-z0-9_-]+")
    return name


def parse_suite(path) -> SuiteSpec:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise InvalidConfig(f"cannot read suite file {path}")
    if "suite" not in parser:
        raise InvalidConfig("suite file needs a [suite] section")
    try:
        s = parser["suite"]
        vary = s.get("vary", "seed")
        if vary not in ("seed", "dataset"):
            raise InvalidConfig(f"vary must be 'seed' or 'dataset', got {vary!r}")
        datasets = []
        strategies = []
        for section in parser.sections():
            if section.startswith("dataset "):
                name = _checked_name(section, section.split(" ", 1)[1])
                d = parser[section]
                dim = d.getint("d")
                niw = NiwParams(np.full(dim, d.getfloat("mu0", 0.0)),
                                d.getfloat("kappa"),
                                np.eye(dim) * d.getfloat("psi-scale", 1.0),
                                d.getfloat("nu"))
                datasets.append((name, GmmSpec(
                    k=d.getint("k"), d=dim, n=d.getint("n"),
                    alpha_dir=d.getfloat("alpha-dir", 1.0), niw=niw,
                    seed=d.getint("seed", 0))))
            elif section.startswith("strategy "):
                name = _checked_name(section, section.split(" ", 1)[1])
                st = parser[section]
                kind = st.get("init")
                if kind not in ("random", "kmeans", "splitnet"):
                    raise InvalidConfig(f"[{section}] init must be "
                                        f"random|kmeans|splitnet, got {kind!r}")
                weights = st.get("weights", None)
                if kind == "splitnet" and not weights:
                    raise InvalidConfig(f"[{section}] splitnet needs weights=")
                strategies.append(StrategySpec(name, kind, weights))
            elif section != "suite":
                raise InvalidConfig(f"unknown section [{section}]")
        if not datasets:
            raise InvalidConfig("suite defines no [dataset ...] sections")
        if not strategies:
            raise InvalidConfig("suite defines no [strategy ...] sections")
        return SuiteSpec(
            datasets=tuple(datasets), strategies=tuple(strategies),
            repeats=s.getint("repeats", 1), iters=s.getint("iters", 100),
            split_period=s.getint("split-period", 2),
            alpha=s.getfloat("alpha", 1.0), threads=s.getint("threads", 1),
            base_seed=s.getint("base-seed", 0), vary=vary,
            workers=s.getint("workers", 1),
            prior_kappa=s.getfloat("prior-kappa", 1.0),
            prior_nu=s.getfloat("prior-nu", None),
            prior_psi_scale=s.getfloat("prior-psi-scale", 1.0))
    except (ValueError, KeyError, configparser.Error) as exc:
        raise InvalidConfig(f"bad suite file: {exc}") from exc


def _run_one(suite: SuiteSpec, ds_name: str, spec: GmmSpec,
             strat: StrategySpec, repeat: int, out_dir: str) -> RunResult:
    result = RunResult(dataset=ds_name, strategy=strat.name, repeat=repeat,
                       status="failed")
    try:
        data_seed = spec.seed + repeat if suite.vary == "dataset" else spec.seed
        data = gen_gmm(GmmSpec(spec.k, spec.d, spec.n, spec.alpha_dir,
                               spec.niw, data_seed))
        prior = data_driven_prior(data.points, kappa=suite.prior_kappa,
                                  nu=suite.prior_nu,
                                  psi_scale=suite.prior_psi_scale)
        weights = load_weights(strat.weights_path) if strat.kind == "splitnet" else None
        cfg = SamplerConfig(
            iters=suite.iters, split_period=suite.split_period,
            rng_seed=suite.base_seed + repeat, threads=suite.threads,
            strategy=make_initializer(strat.kind, weights))
        _, trace = fit(data.points, suite.alpha, prior, cfg,
                       gt_labels=data.labels)
        trace_file = f"{ds_name}_{strat.name}_r{repeat}.csv"
        write_trace_csv(Path(out_dir) / trace_file, trace)
        last = trace[-1] if trace else None
        result.status = "ok"
        result.trace_file = trace_file
        if last is not None:
            result.final_k = last.k
            result.final_nmi = last.nmi
            result.final_ari = last.ari
            result.final_log_posterior = last.log_posterior
    except Exception as exc:  # a failed run is recorded, not fatal
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def run_benchmark(suite: SuiteSpec, out_dir) -> list:
    """Execute the full cross product; returns RunResults in deterministic
    (dataset, strategy, repeat) order and writes summary/aggregate CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(suite, ds_name, spec, strat, repeat, str(out))
            for ds_name, spec in suite.datasets
            for strat in suite.strategies
            for repeat in range(suite.repeats)]
    if suite.workers > 1:
        with ProcessPoolExecutor(max_workers=suite.workers) as pool:
            results = list(pool.map(_run_one_star, jobs))
    else:
        results = [_run_one(*job) for job in jobs]

    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in results:
            writer.writerow(["" if getattr(r, c) is None else getattr(r, c)
                             for c in SUMMARY_COLUMNS])

    with open(out / "aggregates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_COLUMNS)
        for ds_name, _ in suite.datasets:
            for strat in suite.strategies:
                rows = [r for r in results
                        if r.dataset == ds_name and r.strategy == strat.name]
                ok = [r for r in rows if r.status == "ok" and r.final_nmi is not None]
                writer.writerow([
                    ds_name, strat.name, len(ok), len(rows) - len(ok),
                    float(np.median([r.final_nmi for r in ok])) if ok else "",
                    float(np.mean([r.final_ari for r in ok])) if ok else "",
                    float(np.median([r.final_k for r in ok])) if ok else ""])
    return results


def _run_one_star(job):
    return _run_one(*job)
