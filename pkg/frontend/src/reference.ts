/**
 * Plain float64 implementation of the same forward pass and loss.
 *
 * Used as a numerics oracle in tests: finite-difference gradients computed
 * here are accurate to ~1e-10, far beyond what differencing the float32
 * graph could give, and the forward doubles as an independent check that
 * the tf graph computes what it is supposed to.
 */

import { Mat, matMul, transpose } from './linalg.js';
import { StMeta, TensorMap, expectedShapes } from './model.js';

export type F64Tensors = Record<string, { shape: number[]; data: Float64Array }>;

export function toF64(tensors: TensorMap): F64Tensors {
  const out: F64Tensors = {};
  for (const [name, t] of Object.entries(tensors)) {
    out[name] = { shape: t.shape.slice(), data: Float64Array.from(t.data) };
  }
  return out;
}

function asMat(t: { shape: number[]; data: Float64Array }): Mat {
  const [rows, cols] = t.shape.length === 2 ? t.shape : [1, t.shape[0]];
  const m: Mat = [];
  for (let i = 0; i < rows; i++) {
    m.push(Array.from(t.data.subarray(i * cols, (i + 1) * cols)));
  }
  return m;
}

function addBias(x: Mat, b: number[]): Mat {
  return x.map((row) => row.map((v, j) => v + b[j]));
}

function softmaxRows(scores: Mat): Mat {
  return scores.map((row) => {
    const top = Math.max(...row);
    const e = row.map((v) => Math.exp(v - top));
    const total = e.reduce((s, v) => s + v, 0);
    return e.map((v) => v / total);
  });
}

function attention(q: Mat, k: Mat, v: Mat): Mat {
  const scale = 1 / Math.sqrt(q[0].length);
  const scores = matMul(q, transpose(k)).map((row) => row.map((s) => s * scale));
  return matMul(softmaxRows(scores), v);
}

function multihead(q: Mat, kv: Mat, t: F64Tensors, prefix: string,
                   heads: number): Mat {
  const dH = t[`${prefix}.wq`].shape[0];
  const dHead = dH / heads;
  const slice = (m: Mat, h: number) =>
    m.map((row) => row.slice(h * dHead, (h + 1) * dHead));
  const qProj = matMul(q, asMat(t[`${prefix}.wq`]));
  const kProj = matMul(kv, asMat(t[`${prefix}.wk`]));
  const vProj = matMul(kv, asMat(t[`${prefix}.wv`]));
  const concat: Mat = q.map(() => []);
  for (let h = 0; h < heads; h++) {
    const att = attention(slice(qProj, h), slice(kProj, h), slice(vProj, h));
    for (let i = 0; i < att.length; i++) concat[i].push(...att[i]);
  }
  return matMul(concat, asMat(t[`${prefix}.wo`]));
}

function rff(x: Mat, t: F64Tensors, prefix: string): Mat {
  const b = Array.from(t[`${prefix}.b`].data);
  return addBias(matMul(x, asMat(t[`${prefix}.w`])), b)
    .map((row) => row.map((v) => Math.max(v, 0)));
}

function mab(x: Mat, y: Mat, t: F64Tensors, prefix: string, heads: number): Mat {
  const att = rff(multihead(x, y, t, prefix, heads), t, `${prefix}.rff1`);
  const h = x.map((row, i) => row.map((v, j) => v + att[i][j]));
  const ff = rff(h, t, `${prefix}.rff2`);
  return h.map((row, i) => row.map((v, j) => v + ff[i][j]));
}

function isab(x: Mat, t: F64Tensors, prefix: string, heads: number): Mat {
  const induced = mab(asMat(t[`${prefix}.ind`]), x, t, `${prefix}.mab_inner`, heads);
  return mab(x, induced, t, `${prefix}.mab_outer`, heads);
}

export function referenceForward(points: number[][], meta: StMeta,
                                 t: F64Tensors): number[] {
  const missing = Object.keys(expectedShapes(meta)).filter((n) => !(n in t));
  if (missing.length) throw new Error(`missing tensors: ${missing}`);
  let h = addBias(matMul(points, asMat(t['embed.w'])),
                  Array.from(t['embed.b'].data));
  for (let i = 0; i < meta.depth; i++) h = isab(h, t, `enc.isab${i}`, meta.heads);
  const pooled = mab(asMat(t['dec.pma.seed']), h, t, 'dec.pma.mab', meta.heads);
  const decoded = mab(h, pooled, t, 'dec.mab', meta.heads);
  const headW = asMat(t['dec.head.w']);
  const headB = t['dec.head.b'].data[0];
  return decoded.map((row) => row.reduce((s, v, j) => s + v * headW[j][0], 0) + headB);
}

const CLAMP = 1e-7;

/** Label-switch-invariant mean binary cross entropy, float64. */
export function referenceLoss(labels: number[], logits: number[]): number {
  const n = labels.length;
  let direct = 0;
  let flipped = 0;
  for (let i = 0; i < n; i++) {
    const p = Math.min(Math.max(1 / (1 + Math.exp(-logits[i])), CLAMP), 1 - CLAMP);
    direct += -(labels[i] * Math.log(p) + (1 - labels[i]) * Math.log(1 - p));
    flipped += -((1 - labels[i]) * Math.log(p) + labels[i] * Math.log(1 - p));
  }
  return Math.min(direct / n, flipped / n);
}
