/**
 * Set-transformer split predictor, matching the engine's forward pass
 * operation for operation: linear embed, a stack of induced self-attention
 * blocks, attention pooling over two learned seeds, one decoder block, and
 * a per-point linear head.  No layer normalization anywhere; residual
 * stages use single-affine ReLU feed-forwards; attention scales by
 * 1/sqrt(d_head).
 *
 * Tensor names follow the engine's canonical scheme exactly so a trained
 * model exports into its weight-file format without translation.
 */

import * as tf from '@tensorflow/tfjs';
import { Rng } from './rng.js';

export interface StMeta {
  dimIn: number;
  dimHidden: number;
  heads: number;
  inducing: number;
  depth: number;
  seeds: number; // always 2: one pooled summary row per subcluster
}

export function checkMeta(meta: StMeta): StMeta {
  for (const [key, value] of Object.entries(meta)) {
    if (!Number.isInteger(value) || value < 1) {
      throw new Error(`meta field ${key} must be a positive integer, got ${value}`);
    }
  }
  if (meta.dimHidden % meta.heads !== 0) {
    throw new Error(`hidden dim ${meta.dimHidden} not divisible by ${meta.heads} heads`);
  }
  if (meta.seeds !== 2) {
    throw new Error(`exactly 2 pooling seeds are supported, got ${meta.seeds}`);
  }
  return meta;
}

function mabShapes(prefix: string, dH: number): Record<string, number[]> {
  return {
    [`${prefix}.wq`]: [dH, dH],
    [`${prefix}.wk`]: [dH, dH],
    [`${prefix}.wv`]: [dH, dH],
    [`${prefix}.wo`]: [dH, dH],
    [`${prefix}.rff1.w`]: [dH, dH],
    [`${prefix}.rff1.b`]: [dH],
    [`${prefix}.rff2.w`]: [dH, dH],
    [`${prefix}.rff2.b`]: [dH],
  };
}

/** Canonical name -> shape map; iteration order is the export order. */
export function expectedShapes(meta: StMeta): Record<string, number[]> {
  const dH = meta.dimHidden;
  const shapes: Record<string, number[]> = {
    'embed.w': [meta.dimIn, dH],
    'embed.b': [dH],
  };
  for (let i = 0; i < meta.depth; i++) {
    shapes[`enc.isab${i}.ind`] = [meta.inducing, dH];
    Object.assign(shapes, mabShapes(`enc.isab${i}.mab_inner`, dH));
    Object.assign(shapes, mabShapes(`enc.isab${i}.mab_outer`, dH));
  }
  shapes['dec.pma.seed'] = [meta.seeds, dH];
  Object.assign(shapes, mabShapes('dec.pma.mab', dH));
  Object.assign(shapes, mabShapes('dec.mab', dH));
  shapes['dec.head.w'] = [dH, 1];
  shapes['dec.head.b'] = [1];
  return shapes;
}

export type TensorMap = Record<string, { shape: number[]; data: Float32Array }>;

export class SplitNet {
  // tf registers variable names globally, so each instance gets a scope
  private static instances = 0;

  readonly meta: StMeta;
  readonly scope: string;
  readonly vars: Record<string, tf.Variable>;

  private constructor(meta: StMeta, vars: Record<string, tf.Variable>,
                      scope: string) {
    this.meta = meta;
    this.vars = vars;
    this.scope = scope;
  }

  /** Gaussian weights scaled by `scale`, zero biases, from the given rng. */
  static init(meta: StMeta, rng: Rng, scale = 0.2): SplitNet {
    checkMeta(meta);
    const scope = `splitnet${SplitNet.instances++}`;
    const vars: Record<string, tf.Variable> = {};
    for (const [name, shape] of Object.entries(expectedShapes(meta))) {
      const size = shape.reduce((a, b) => a * b, 1);
      const data = new Float32Array(size);
      if (!name.endsWith('.b')) {
        for (let i = 0; i < size; i++) data[i] = rng.normal() * scale;
      }
      vars[name] = tf.variable(tf.tensor(data, shape, 'float32'), true,
                               `${scope}/${name}`);
    }
    return new SplitNet(meta, vars, scope);
  }

  static fromTensors(meta: StMeta, tensors: TensorMap): SplitNet {
    checkMeta(meta);
    const want = expectedShapes(meta);
    // validate everything before registering any variable
    for (const [name, shape] of Object.entries(want)) {
      const entry = tensors[name];
      if (!entry) throw new Error(`missing tensor ${name}`);
      if (entry.shape.join(',') !== shape.join(',')) {
        throw new Error(`tensor ${name}: shape [${entry.shape}], expected [${shape}]`);
      }
    }
    const extra = Object.keys(tensors).filter((n) => !(n in want));
    if (extra.length) throw new Error(`unexpected tensors: ${extra.sort()}`);
    const scope = `splitnet${SplitNet.instances++}`;
    const vars: Record<string, tf.Variable> = {};
    for (const [name, shape] of Object.entries(want)) {
      vars[name] = tf.variable(
        tf.tensor(tensors[name].data, shape, 'float32'), true, `${scope}/${name}`);
    }
    return new SplitNet(meta, vars, scope);
  }

  trainable(): tf.Variable[] {
    return Object.values(this.vars);
  }

  /** Copy out all weights as plain arrays (for checkpoints and export). */
  snapshot(): TensorMap {
    const out: TensorMap = {};
    for (const [name, v] of Object.entries(this.vars)) {
      out[name] = { shape: v.shape.slice(), data: new Float32Array(v.dataSync()) };
    }
    return out;
  }

  restore(tensors: TensorMap): void {
    for (const [name, v] of Object.entries(this.vars)) {
      const entry = tensors[name];
      if (!entry) throw new Error(`snapshot is missing tensor ${name}`);
      v.assign(tf.tensor(entry.data, entry.shape, 'float32'));
    }
  }

  dispose(): void {
    for (const v of Object.values(this.vars)) v.dispose();
  }

  private multihead(q: tf.Tensor2D, kv: tf.Tensor2D, prefix: string): tf.Tensor2D {
    const heads = this.meta.heads;
    const dH = this.meta.dimHidden;
    const dHead = dH / heads;
    const split = (x: tf.Tensor2D, w: tf.Variable) =>
      tf.matMul(x, w as unknown as tf.Tensor2D)
        .reshape([x.shape[0], heads, dHead])
        .transpose([1, 0, 2]) as tf.Tensor3D;
    const qh = split(q, this.vars[`${prefix}.wq`]);
    const kh = split(kv, this.vars[`${prefix}.wk`]);
    const vh = split(kv, this.vars[`${prefix}.wv`]);
    const scores = tf.matMul(qh, kh, false, true).div(Math.sqrt(dHead));
    const att = tf.matMul(tf.softmax(scores, -1), vh) as tf.Tensor3D;
    const concat = att.transpose([1, 0, 2]).reshape([q.shape[0], dH]) as tf.Tensor2D;
    return tf.matMul(concat, this.vars[`${prefix}.wo`] as unknown as tf.Tensor2D);
  }

  private rff(x: tf.Tensor2D, prefix: string): tf.Tensor2D {
    return tf.relu(tf.add(
      tf.matMul(x, this.vars[`${prefix}.w`] as unknown as tf.Tensor2D),
      this.vars[`${prefix}.b`])) as tf.Tensor2D;
  }

  private mab(x: tf.Tensor2D, y: tf.Tensor2D, prefix: string): tf.Tensor2D {
    const h = tf.add(x, this.rff(this.multihead(x, y, prefix), `${prefix}.rff1`)) as tf.Tensor2D;
    return tf.add(h, this.rff(h, `${prefix}.rff2`)) as tf.Tensor2D;
  }

  private isab(x: tf.Tensor2D, prefix: string): tf.Tensor2D {
    const ind = this.vars[`${prefix}.ind`] as unknown as tf.Tensor2D;
    const induced = this.mab(ind, x, `${prefix}.mab_inner`);
    return this.mab(x, induced, `${prefix}.mab_outer`);
  }

  /** Per-point logits for one standardized set; shape [N]. */
  forward(x: tf.Tensor2D): tf.Tensor1D {
    let h = tf.add(
      tf.matMul(x, this.vars['embed.w'] as unknown as tf.Tensor2D),
      this.vars['embed.b']) as tf.Tensor2D;
    for (let i = 0; i < this.meta.depth; i++) h = this.isab(h, `enc.isab${i}`);
    const seed = this.vars['dec.pma.seed'] as unknown as tf.Tensor2D;
    const pooled = this.mab(seed, h, 'dec.pma.mab');
    const decoded = this.mab(h, pooled, 'dec.mab');
    const logits = tf.add(
      tf.matMul(decoded, this.vars['dec.head.w'] as unknown as tf.Tensor2D),
      this.vars['dec.head.b']);
    return logits.reshape([x.shape[0]]) as tf.Tensor1D;
  }

  /** Forward on a plain array set; returns plain logits. */
  predict(points: number[][]): number[] {
    return tf.tidy(() => {
      const x = tf.tensor2d(points, undefined, 'float32');
      return Array.from(this.forward(x).dataSync());
    });
  }
}
