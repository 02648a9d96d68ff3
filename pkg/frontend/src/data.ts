/**
 * Synthetic two-component training sets.
 *
 * Each example is a pair of NIW-sampled Gaussian components that passed the
 * same "worth splitting" filter the engine applies (log acceptance ratio of
 * the ground-truth split > 1 under the standard filter prior), so the
 * network never trains on cuts the sampler would reject anyway.  Difficulty
 * is controlled by the generating NIW: small kappa spreads component means
 * apart, larger kappa packs them together.
 */

import {
  NiwParams, SuffStats, addStats, sampleGaussian, sampleNiw,
  splitLogHastings, standardFilterPrior, suffStats,
} from './niw.js';
import { Rng } from './rng.js';

const FILTER_ATTEMPTS = 500;

export interface TrainExample {
  points: number[][]; // N x D
  labels: number[];   // N entries of 0 | 1, block layout
}

export interface PairGenConfig {
  niw: NiwParams;
  alphaDirLo: number; // component-balance concentration drawn per pair
  alphaDirHi: number;
  nMin: number;
  nMax: number;
}

export function genSplitPair(cfg: PairGenConfig, rng: Rng): TrainExample {
  const d = cfg.niw.mu0.length;
  const filterPrior = standardFilterPrior(d);
  for (let attempt = 0; attempt < FILTER_ATTEMPTS; attempt++) {
    const n = rng.int(cfg.nMin, cfg.nMax);
    const aDir = cfg.alphaDirLo + rng.uniform() * (cfg.alphaDirHi - cfg.alphaDirLo);
    const p = rng.dirichlet([aDir, aDir]);
    const n0 = Math.ceil(p[0] * n);
    const n1 = Math.ceil(p[1] * n);
    const part0 = sampleGaussian(sampleNiw(cfg.niw, rng), n0, rng);
    const part1 = sampleGaussian(sampleNiw(cfg.niw, rng), n1, rng);
    const s0 = suffStats(part0);
    const s1 = suffStats(part1);
    if (splitLogHastings(addStats(s0, s1), s0, s1, 1.0, filterPrior) > 1.0) {
      return {
        points: part0.concat(part1),
        labels: new Array(n0).fill(0).concat(new Array(n1).fill(1)),
      };
    }
  }
  throw new Error(
    `no splittable pair in ${FILTER_ATTEMPTS} attempts; ` +
    'the difficulty setting and the filter prior are inconsistent');
}

/**
 * Per-set standardization identical to the engine's inference path: center
 * each dimension and divide by its std, floored at 1e-8.
 */
export function standardize(points: number[][]): number[][] {
  const n = points.length;
  const d = points[0].length;
  const mean = new Array<number>(d).fill(0);
  for (const x of points) for (let j = 0; j < d; j++) mean[j] += x[j] / n;
  const varSum = new Array<number>(d).fill(0);
  for (const x of points) {
    for (let j = 0; j < d; j++) varSum[j] += (x[j] - mean[j]) ** 2;
  }
  const std = varSum.map((v) => Math.max(Math.sqrt(v / n), 1e-8));
  return points.map((x) => x.map((v, j) => (v - mean[j]) / std[j]));
}

/** Fraction of the pool regenerated at each curriculum checkpoint. */
export const POOL_REPLACE_FRACTION = 0.25;

export class ExamplePool {
  examples: TrainExample[] = [];

  constructor(private readonly base: Omit<PairGenConfig, 'niw'>,
              private readonly size: number) {}

  fill(niw: NiwParams, rng: Rng): void {
    this.examples = [];
    for (let i = 0; i < this.size; i++) {
      this.examples.push(genSplitPair({ ...this.base, niw }, rng));
    }
  }

  /** Replace a random quarter of the pool with examples at the given prior. */
  refresh(niw: NiwParams, rng: Rng): void {
    const count = Math.ceil(this.size * POOL_REPLACE_FRACTION);
    const order = rng.shuffle([...this.examples.keys()]);
    for (const idx of order.slice(0, count)) {
      this.examples[idx] = genSplitPair({ ...this.base, niw }, rng);
    }
  }
}
