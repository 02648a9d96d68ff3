/**
 * Normal-inverse-Wishart conjugate math, float64.
 *
 * Same closed forms as the clustering engine uses to accept or reject
 * splits: posterior updates, the marginal likelihood of a point set with
 * the Gaussian integrated out, and prior sampling via the Bartlett
 * decomposition.  The generator filter below must agree with the engine's
 * accept/reject arithmetic, so the formulas mirror it term for term.
 */

import {
  Mat, cholesky, eye, invLower, lgamma, lmvgamma, logDetFromChol,
  matAdd, matMul, matScale, matVec, outer, transpose, zeros,
} from './linalg.js';
import { Rng } from './rng.js';

export interface NiwParams {
  mu0: number[];
  kappa: number;
  psi: Mat;
  nu: number;
}

export interface SuffStats {
  m: number;
  sumX: number[];
  sumXxt: Mat;
}

export function checkNiw(p: NiwParams): NiwParams {
  const d = p.mu0.length;
  if (p.kappa <= 0) throw new Error(`kappa must be positive, got ${p.kappa}`);
  if (!(p.nu > d - 1)) throw new Error(`nu must exceed D-1=${d - 1}, got ${p.nu}`);
  if (p.psi.length !== d || p.psi[0].length !== d) {
    throw new Error('psi shape does not match mu0');
  }
  cholesky(p.psi); // SPD check
  return p;
}

export function suffStats(points: number[][]): SuffStats {
  if (points.length === 0) return { m: 0, sumX: [], sumXxt: [] };
  const d = points[0].length;
  const sumX = new Array<number>(d).fill(0);
  const sumXxt = zeros(d, d);
  for (const x of points) {
    for (let i = 0; i < d; i++) {
      sumX[i] += x[i];
      for (let j = 0; j < d; j++) sumXxt[i][j] += x[i] * x[j];
    }
  }
  return { m: points.length, sumX, sumXxt };
}

export function addStats(a: SuffStats, b: SuffStats): SuffStats {
  if (a.m === 0) return b;
  if (b.m === 0) return a;
  return {
    m: a.m + b.m,
    sumX: a.sumX.map((v, i) => v + b.sumX[i]),
    sumXxt: matAdd(a.sumXxt, b.sumXxt),
  };
}

function scatter(s: SuffStats): Mat {
  // sum (x - xbar)(x - xbar)^T = sum x x^T - m xbar xbar^T
  const xbar = s.sumX.map((v) => v / s.m);
  return matAdd(s.sumXxt, matScale(outer(xbar, xbar), -s.m));
}

export function niwPosterior(prior: NiwParams, s: SuffStats): NiwParams {
  if (s.m === 0) return prior;
  const m = s.m;
  const xbar = s.sumX.map((v) => v / m);
  const kappaM = prior.kappa + m;
  const muM = xbar.map((v, i) => (prior.kappa * prior.mu0[i] + m * v) / kappaM);
  const diff = xbar.map((v, i) => v - prior.mu0[i]);
  let psiM = matAdd(matAdd(prior.psi, scatter(s)),
                    matScale(outer(diff, diff), (prior.kappa * m) / kappaM));
  psiM = matScale(matAdd(psiM, transpose(psiM)), 0.5);
  return { mu0: muM, kappa: kappaM, psi: psiM, nu: prior.nu + m };
}

/**
 * Log marginal likelihood of the points behind `s` under the NIW prior:
 *
 *   -(mD/2) log pi + lmvgamma(nu_m/2) - lmvgamma(nu/2)
 *   + (nu/2) log|psi| - (nu_m/2) log|psi_m| + (D/2)(log kappa - log kappa_m)
 *
 * Empty statistics give exactly 0.
 */
export function logMarginalLikelihood(prior: NiwParams, s: SuffStats): number {
  if (s.m === 0) return 0;
  const d = prior.mu0.length;
  const post = niwPosterior(prior, s);
  return (
    -0.5 * s.m * d * Math.log(Math.PI)
    + lmvgamma(d, 0.5 * post.nu)
    - lmvgamma(d, 0.5 * prior.nu)
    + 0.5 * prior.nu * logDetFromChol(cholesky(prior.psi))
    - 0.5 * post.nu * logDetFromChol(cholesky(post.psi))
    + 0.5 * d * (Math.log(prior.kappa) - Math.log(post.kappa))
  );
}

/** Log acceptance ratio for splitting a parent set into two given parts. */
export function splitLogHastings(parent: SuffStats, left: SuffStats,
                                 right: SuffStats, alpha: number,
                                 prior: NiwParams): number {
  if (left.m < 1 || right.m < 1) throw new Error('split with an empty side');
  return (
    Math.log(alpha)
    + lgamma(left.m) + logMarginalLikelihood(prior, left)
    + lgamma(right.m) + logMarginalLikelihood(prior, right)
    - lgamma(parent.m) - logMarginalLikelihood(prior, parent)
  );
}

export interface GaussianParams {
  mu: number[];
  cholSigma: Mat; // lower factor of the covariance
}

/** Draw (mu, Sigma) ~ NIW(params); Sigma is returned via its Cholesky factor. */
export function sampleNiw(params: NiwParams, rng: Rng): GaussianParams {
  const d = params.mu0.length;
  // Bartlett: A A^T ~ Wishart(I, nu) with chi-square diagonal
  const a = zeros(d, d);
  for (let i = 0; i < d; i++) {
    a[i][i] = Math.sqrt(rng.chiSquare(params.nu - i));
    for (let j = 0; j < i; j++) a[i][j] = rng.normal();
  }
  // M = chol(psi^-1) A has M M^T ~ Wishart(psi^-1, nu); Sigma = (M M^T)^-1,
  // so B = chol(psi) A^-T satisfies B B^T = Sigma.
  const lPsi = cholesky(params.psi);
  const b = matMul(lPsi, transpose(invLower(a)));
  const z = Array.from(rng.normals(d));
  const scaled = matVec(b, z).map((v) => v / Math.sqrt(params.kappa));
  const mu = params.mu0.map((v, i) => v + scaled[i]);
  // refactor B B^T so callers get a proper lower-triangular square root
  const sigma = matMul(b, transpose(b));
  const sym = matScale(matAdd(sigma, transpose(sigma)), 0.5);
  return { mu, cholSigma: cholesky(sym) };
}

/** n draws from N(mu, Sigma) given the Cholesky factor. */
export function sampleGaussian(params: GaussianParams, n: number,
                               rng: Rng): number[][] {
  const d = params.mu.length;
  const out: number[][] = [];
  for (let k = 0; k < n; k++) {
    const z = rng.normals(d);
    const row = new Array<number>(d);
    for (let i = 0; i < d; i++) {
      let v = params.mu[i];
      for (let j = 0; j <= i; j++) v += params.cholSigma[i][j] * z[j];
      row[i] = v;
    }
    out.push(row);
  }
  return out;
}

/** Standard filter prior the engine pairs with alpha=1 when scoring splits. */
export function standardFilterPrior(d: number): NiwParams {
  return { mu0: new Array<number>(d).fill(0), kappa: 1, psi: eye(d), nu: d + 3 };
}

/** Entrywise linear interpolation between two NIW parameter sets. */
export function interpolateNiw(easy: NiwParams, hard: NiwParams,
                               t: number): NiwParams {
  const w = Math.min(1, Math.max(0, t));
  // hit the endpoints exactly; a + w*(b-a) rounds at w=1
  const lerp = (a: number, b: number) => (w === 0 ? a : w === 1 ? b : a + w * (b - a));
  return checkNiw({
    mu0: easy.mu0.map((v, i) => lerp(v, hard.mu0[i])),
    kappa: lerp(easy.kappa, hard.kappa),
    psi: easy.psi.map((row, i) => row.map((v, j) => lerp(v, hard.psi[i][j]))),
    nu: lerp(easy.nu, hard.nu),
  });
}
