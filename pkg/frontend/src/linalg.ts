/**
 * Dense float64 helpers for the small matrices (D x D, D <= ~20) used by
 * the data generator.  Matrices are arrays of row arrays.
 */

export type Mat = number[][];

export function zeros(rows: number, cols: number): Mat {
  return Array.from({ length: rows }, () => new Array<number>(cols).fill(0));
}

export function eye(n: number, scale = 1): Mat {
  const m = zeros(n, n);
  for (let i = 0; i < n; i++) m[i][i] = scale;
  return m;
}

export function matAdd(a: Mat, b: Mat): Mat {
  return a.map((row, i) => row.map((v, j) => v + b[i][j]));
}

export function matScale(a: Mat, s: number): Mat {
  return a.map((row) => row.map((v) => v * s));
}

export function outer(u: number[], v: number[]): Mat {
  return u.map((ui) => v.map((vj) => ui * vj));
}

export function matMul(a: Mat, b: Mat): Mat {
  const n = a.length;
  const k = b.length;
  const m = b[0].length;
  const out = zeros(n, m);
  for (let i = 0; i < n; i++) {
    for (let l = 0; l < k; l++) {
      const ail = a[i][l];
      if (ail === 0) continue;
      for (let j = 0; j < m; j++) out[i][j] += ail * b[l][j];
    }
  }
  return out;
}

export function transpose(a: Mat): Mat {
  return a[0].map((_, j) => a.map((row) => row[j]));
}

export function matVec(a: Mat, v: number[]): number[] {
  return a.map((row) => row.reduce((s, x, j) => s + x * v[j], 0));
}

/** Lower-triangular Cholesky factor; throws if the matrix is not SPD. */
export function cholesky(a: Mat): Mat {
  const n = a.length;
  const l = zeros(n, n);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j <= i; j++) {
      let sum = a[i][j];
      for (let k = 0; k < j; k++) sum -= l[i][k] * l[j][k];
      if (i === j) {
        if (sum <= 0) throw new Error('matrix is not positive definite');
        l[i][i] = Math.sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  return l;
}

/** Solve L x = b for lower-triangular L. */
export function solveLower(l: Mat, b: number[]): number[] {
  const n = l.length;
  const x = new Array<number>(n).fill(0);
  for (let i = 0; i < n; i++) {
    let sum = b[i];
    for (let k = 0; k < i; k++) sum -= l[i][k] * x[k];
    x[i] = sum / l[i][i];
  }
  return x;
}

/** Inverse of a lower-triangular matrix. */
export function invLower(l: Mat): Mat {
  const n = l.length;
  const inv = zeros(n, n);
  for (let j = 0; j < n; j++) {
    const e = new Array<number>(n).fill(0);
    e[j] = 1;
    const col = solveLower(l, e);
    for (let i = 0; i < n; i++) inv[i][j] = col[i];
  }
  return inv;
}

export function logDetFromChol(l: Mat): number {
  let s = 0;
  for (let i = 0; i < l.length; i++) s += Math.log(l[i][i]);
  return 2 * s;
}

const LANCZOS_G = 7;
const LANCZOS_COEF = [
  0.99999999999980993, 676.5203681218851, -1259.1392167224028,
  771.32342877765313, -176.61502916214059, 12.507343278686905,
  -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
];

/** Log-gamma via the Lanczos approximation (g=7, n=9), ~1e-13 relative. */
export function lgamma(x: number): number {
  if (x < 0.5) {
    // reflection keeps the approximation in its accurate range
    return Math.log(Math.PI / Math.sin(Math.PI * x)) - lgamma(1 - x);
  }
  const z = x - 1;
  let acc = LANCZOS_COEF[0];
  for (let i = 1; i < LANCZOS_COEF.length; i++) acc += LANCZOS_COEF[i] / (z + i);
  const t = z + LANCZOS_G + 0.5;
  return 0.5 * Math.log(2 * Math.PI) + (z + 0.5) * Math.log(t) - t + Math.log(acc);
}

/** Log of the d-dimensional multivariate gamma function. */
export function lmvgamma(d: number, a: number): number {
  let s = (d * (d - 1) / 4) * Math.log(Math.PI);
  for (let j = 1; j <= d; j++) s += lgamma(a + (1 - j) / 2);
  return s;
}
