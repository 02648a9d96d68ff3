import { describe, expect, it } from 'vitest';
import { cholesky } from '../src/linalg.js';
import {
  NiwParams, addStats, interpolateNiw, logMarginalLikelihood, niwPosterior,
  sampleGaussian, sampleNiw, splitLogHastings, standardFilterPrior, suffStats,
} from '../src/niw.js';
import { Rng } from '../src/rng.js';

function randomPrior(d: number, rng: Rng): NiwParams {
  const mu0 = Array.from({ length: d }, () => rng.normal());
  // random SPD scale matrix via A A^T + ridge
  const a = Array.from({ length: d }, () =>
    Array.from({ length: d }, () => rng.normal() * 0.7));
  const psi = Array.from({ length: d }, (_, i) =>
    Array.from({ length: d }, (_, j) => {
      let s = i === j ? 0.5 : 0;
      for (let k = 0; k < d; k++) s += a[i][k] * a[j][k];
      return s;
    }));
  return { mu0, kappa: 0.2 + rng.uniform() * 3, psi, nu: d + 1 + rng.uniform() * 4 };
}

function randomPoints(n: number, d: number, rng: Rng): number[][] {
  return Array.from({ length: n }, () =>
    Array.from({ length: d }, () => rng.normal() * (1 + rng.uniform())));
}

describe('conjugate NIW math', () => {
  it('marginal likelihood obeys the chain rule', () => {
    // logml(A and B) = logml(A) + logml(B | posterior after A)
    const rng = new Rng(501);
    let worst = 0;
    for (let c = 0; c < 50; c++) {
      const d = 1 + (c % 3);
      const prior = randomPrior(d, rng);
      const a = randomPoints(2 + rng.int(0, 8), d, rng);
      const b = randomPoints(1 + rng.int(0, 8), d, rng);
      const sa = suffStats(a);
      const sb = suffStats(b);
      const joint = logMarginalLikelihood(prior, addStats(sa, sb));
      const chained = logMarginalLikelihood(prior, sa) +
        logMarginalLikelihood(niwPosterior(prior, sa), sb);
      worst = Math.max(worst, Math.abs(joint - chained));
    }
    expect(worst).toBeLessThan(1e-8);
  });

  it('posterior updates the closed-form parameters', () => {
    const rng = new Rng(502);
    const prior = randomPrior(2, rng);
    const pts = randomPoints(12, 2, rng);
    const s = suffStats(pts);
    const post = niwPosterior(prior, s);
    expect(post.kappa).toBeCloseTo(prior.kappa + 12, 12);
    expect(post.nu).toBeCloseTo(prior.nu + 12, 12);
    const xbar = [0, 1].map((j) =>
      pts.reduce((acc, x) => acc + x[j], 0) / 12);
    for (let j = 0; j < 2; j++) {
      const want = (prior.kappa * prior.mu0[j] + 12 * xbar[j]) / (prior.kappa + 12);
      expect(post.mu0[j]).toBeCloseTo(want, 10);
    }
    // posterior scale matrix must stay SPD
    expect(() => cholesky(post.psi)).not.toThrow();
  });

  it('empty stats leave the prior unchanged and cost nothing', () => {
    const prior = standardFilterPrior(3);
    const empty = suffStats([]);
    expect(niwPosterior(prior, empty)).toBe(prior);
    expect(logMarginalLikelihood(prior, empty)).toBe(0);
  });

  it('separated blobs justify a split, one Gaussian does not', () => {
    const rng = new Rng(503);
    const prior = standardFilterPrior(2);
    let negatives = 0;
    const trials = 40;
    for (let c = 0; c < trials; c++) {
      const left = randomPoints(60, 2, rng).map((x) => [x[0] - 8, x[1]]);
      const right = randomPoints(60, 2, rng).map((x) => [x[0] + 8, x[1]]);
      const sl = suffStats(left);
      const sr = suffStats(right);
      expect(splitLogHastings(addStats(sl, sr), sl, sr, 1.0, prior))
        .toBeGreaterThan(1);

      const one = randomPoints(120, 2, rng);
      const cut = new Rng(600 + c).shuffle([...one.keys()]);
      const sa = suffStats(cut.slice(0, 60).map((i) => one[i]));
      const sb = suffStats(cut.slice(60).map((i) => one[i]));
      if (splitLogHastings(addStats(sa, sb), sa, sb, 1.0, prior) < 0) negatives++;
    }
    expect(negatives).toBeGreaterThanOrEqual(trials - 2);
  });

  it('rejects a split with an empty side', () => {
    const s = suffStats(randomPoints(10, 2, new Rng(504)));
    expect(() => splitLogHastings(s, s, suffStats([]), 1.0, standardFilterPrior(2)))
      .toThrow(/empty/);
  });

  it('niw sampling produces covariances consistent with the prior scale', () => {
    // E[Sigma] = Psi / (nu - D - 1) for an inverse-Wishart draw
    const rng = new Rng(505);
    const d = 2;
    const nu = 12;
    const prior: NiwParams = {
      mu0: [0, 0], kappa: 1,
      psi: [[3, 0.5], [0.5, 1]], nu,
    };
    const mean = [[0, 0], [0, 0]];
    const draws = 4000;
    for (let c = 0; c < draws; c++) {
      const g = sampleNiw(prior, rng);
      for (let i = 0; i < d; i++) {
        for (let j = 0; j < d; j++) {
          let s = 0;
          for (let k = 0; k < d; k++) s += g.cholSigma[i][k] * g.cholSigma[j][k];
          mean[i][j] += s / draws;
        }
      }
    }
    for (let i = 0; i < d; i++) {
      for (let j = 0; j < d; j++) {
        const want = prior.psi[i][j] / (nu - d - 1);
        expect(Math.abs(mean[i][j] - want)).toBeLessThan(0.05);
      }
    }
  });

  it('gaussian sampling matches its requested moments', () => {
    const rng = new Rng(506);
    const chol = cholesky([[2, 0.6], [0.6, 1]]);
    const pts = sampleGaussian({ mu: [3, -1], cholSigma: chol }, 30000, rng);
    const mean = [0, 1].map((j) => pts.reduce((a, x) => a + x[j], 0) / pts.length);
    expect(Math.abs(mean[0] - 3)).toBeLessThan(0.05);
    expect(Math.abs(mean[1] + 1)).toBeLessThan(0.05);
    let cov01 = 0;
    for (const x of pts) cov01 += (x[0] - mean[0]) * (x[1] - mean[1]) / pts.length;
    expect(Math.abs(cov01 - 0.6)).toBeLessThan(0.06);
  });

  it('interpolation hits the endpoints and stays valid between them', () => {
    const easy = standardFilterPrior(2);
    const hard: NiwParams = {
      mu0: [1, -2], kappa: 0.5, psi: [[2, 0.3], [0.3, 4]], nu: 9,
    };
    expect(interpolateNiw(easy, hard, 0)).toEqual(easy);
    expect(interpolateNiw(easy, hard, 1)).toEqual(hard);
    const mid = interpolateNiw(easy, hard, 0.5);
    expect(mid.kappa).toBeCloseTo((easy.kappa + hard.kappa) / 2, 12);
    expect(mid.nu).toBeCloseTo((easy.nu + hard.nu) / 2, 12);
    expect(mid.psi[0][1]).toBeCloseTo(0.15, 12);
    expect(() => cholesky(mid.psi)).not.toThrow();
    // out-of-range t clamps
    expect(interpolateNiw(easy, hard, 1.7)).toEqual(hard);
    expect(interpolateNiw(easy, hard, -0.2)).toEqual(easy);
  });
});
