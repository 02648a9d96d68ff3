/**
 * Training loss: mean binary cross entropy, taken as the minimum over the
 * two ways of mapping predicted sides to true components.  A bipartition
 * has no preferred labeling, so the loss must score [0,1,0] and [1,0,1]
 * identically; taking the min over the label swap does exactly that.
 */

import * as tf from '@tensorflow/tfjs';

const CLAMP = 1e-7;

export function splitnetLoss(labels: number[], logits: tf.Tensor1D): tf.Scalar {
  return tf.tidy(() => {
    const z = tf.tensor1d(labels, 'float32');
    const p = tf.clipByValue(tf.sigmoid(logits), CLAMP, 1 - CLAMP);
    const logP = tf.log(p);
    const logQ = tf.log(tf.sub(1, p));
    const direct = tf.neg(tf.mean(
      tf.add(tf.mul(z, logP), tf.mul(tf.sub(1, z), logQ))));
    const flipped = tf.neg(tf.mean(
      tf.add(tf.mul(tf.sub(1, z), logP), tf.mul(z, logQ))));
    return tf.minimum(direct, flipped) as tf.Scalar;
  });
}

/** Accuracy of thresholded logits, best over the two label mappings. */
export function bestSwapAccuracy(labels: number[], logits: number[]): number {
  let hits = 0;
  for (let i = 0; i < labels.length; i++) {
    if ((logits[i] >= 0 ? 1 : 0) === labels[i]) hits++;
  }
  const frac = hits / labels.length;
  return Math.max(frac, 1 - frac);
}
