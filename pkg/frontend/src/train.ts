/**
 * Curriculum training of the split predictor.
 *
 * The pool starts at the easy generating prior.  Every `curriculumPeriod`
 * epochs, the generating NIW moves along the straight line from easy to
 * hard (reaching hard exactly at the last checkpoint) and a quarter of the
 * pool is regenerated at the new difficulty, so easy examples remain
 * present throughout.  Validation tracks held-out easy, medium, and hard
 * sets; the exported model is the best-validation checkpoint, not the
 * final one.
 */

import * as tf from '@tensorflow/tfjs';
import { ExamplePool, TrainExample, genSplitPair, standardize } from './data.js';
import { bestSwapAccuracy, splitnetLoss } from './loss.js';
import { SplitNet, StMeta, TensorMap, checkMeta } from './model.js';
import { NiwParams, checkNiw, interpolateNiw } from './niw.js';
import { Rng } from './rng.js';

export interface TrainConfig {
  meta: StMeta;
  epochs: number;
  batchSize: number;
  learningRate: number;
  easy: NiwParams;
  hard: NiwParams;
  curriculumPeriod: number; // epochs between difficulty updates
  alphaDirLo: number;
  alphaDirHi: number;
  nMin: number;
  nMax: number;
  poolSize: number;
  valSize: number; // held-out sets per difficulty level
  seed: number;
}

export function defaultConfig(dim: number): TrainConfig {
  const mkNiw = (kappa: number, nuExtra: number): NiwParams => ({
    mu0: new Array<number>(dim).fill(0),
    kappa,
    psi: Array.from({ length: dim }, (_, i) =>
      Array.from({ length: dim }, (_, j) => (i === j ? 1 : 0))),
    nu: dim + nuExtra,
  });
  return {
    meta: { dimIn: dim, dimHidden: 16, heads: 2, inducing: 8, depth: 1, seeds: 2 },
    epochs: 20,
    batchSize: 32,
    learningRate: 1e-3,
    easy: mkNiw(0.01, 6),
    hard: mkNiw(0.5, 3),
    curriculumPeriod: 2,
    alphaDirLo: 1.5,
    alphaDirHi: 5.0,
    nMin: 64,
    nMax: 256,
    poolSize: 256,
    valSize: 24,
    seed: 0,
  };
}

export function checkConfig(cfg: TrainConfig): TrainConfig {
  checkMeta(cfg.meta);
  checkNiw(cfg.easy);
  checkNiw(cfg.hard);
  if (cfg.epochs < 1) throw new Error('epochs must be >= 1');
  if (cfg.curriculumPeriod < 1) throw new Error('curriculumPeriod must be >= 1');
  if (cfg.batchSize < 1) throw new Error('batchSize must be >= 1');
  if (!(cfg.nMin >= 4 && cfg.nMax >= cfg.nMin)) {
    throw new Error('need nMax >= nMin >= 4');
  }
  if (cfg.easy.mu0.length !== cfg.meta.dimIn) {
    throw new Error('prior dimension does not match meta.dimIn');
  }
  return cfg;
}

export interface EpochLog {
  epoch: number;
  loss: number;
  accEasy: number;
  accMed: number;
  accHard: number;
}

export interface TrainResult {
  model: SplitNet; // restored to the best-validation checkpoint
  log: EpochLog[];
  best: TensorMap;
  bestScore: number;
}

function meanAccuracy(model: SplitNet, sets: TrainExample[]): number {
  let total = 0;
  for (const ex of sets) {
    total += bestSwapAccuracy(ex.labels, model.predict(standardize(ex.points)));
  }
  return total / sets.length;
}

export function train(cfg: TrainConfig,
                      onEpoch?: (row: EpochLog) => void): TrainResult {
  checkConfig(cfg);
  const rng = new Rng(cfg.seed);
  const genBase = {
    alphaDirLo: cfg.alphaDirLo, alphaDirHi: cfg.alphaDirHi,
    nMin: cfg.nMin, nMax: cfg.nMax,
  };

  // held-out validation at the two endpoints and the midpoint
  const valSets = [0, 0.5, 1].map((t) => {
    const niw = interpolateNiw(cfg.easy, cfg.hard, t);
    return Array.from({ length: cfg.valSize },
                      () => genSplitPair({ ...genBase, niw }, rng));
  });

  const pool = new ExamplePool(genBase, cfg.poolSize);
  pool.fill(cfg.easy, rng);

  const model = SplitNet.init(cfg.meta, rng);
  const optimizer = tf.train.adam(cfg.learningRate);
  // difficulty reaches 1 at the last checkpoint the epoch grid actually hits
  const lastCheckpoint =
    cfg.curriculumPeriod * Math.floor((cfg.epochs - 1) / cfg.curriculumPeriod);

  const log: EpochLog[] = [];
  let best: TensorMap = model.snapshot();
  let bestScore = -Infinity;

  for (let epoch = 0; epoch < cfg.epochs; epoch++) {
    if (epoch > 0 && epoch % cfg.curriculumPeriod === 0) {
      const t = lastCheckpoint > 0 ? epoch / lastCheckpoint : 0;
      pool.refresh(interpolateNiw(cfg.easy, cfg.hard, t), rng);
    }

    const order = rng.shuffle([...pool.examples.keys()]);
    let lossSum = 0;
    let steps = 0;
    for (let start = 0; start < order.length; start += cfg.batchSize) {
      const batch = order.slice(start, start + cfg.batchSize)
        .map((i) => pool.examples[i]);
      const cost = optimizer.minimize(() => {
        const perSet = batch.map((ex) => splitnetLoss(
          ex.labels,
          model.forward(tf.tensor2d(standardize(ex.points), undefined, 'float32'))));
        return tf.mean(tf.stack(perSet)) as tf.Scalar;
      }, true, model.trainable());
      const value = cost!.dataSync()[0];
      cost!.dispose();
      if (!Number.isFinite(value)) {
        throw new Error(`training diverged: loss ${value} at epoch ${epoch}`);
      }
      lossSum += value;
      steps++;
    }

    const [accEasy, accMed, accHard] = valSets.map((s) => meanAccuracy(model, s));
    const row: EpochLog = {
      epoch, loss: lossSum / Math.max(steps, 1), accEasy, accMed, accHard,
    };
    log.push(row);
    onEpoch?.(row);

    const score = (accEasy + accMed + accHard) / 3;
    if (score > bestScore) {
      bestScore = score;
      best = model.snapshot();
    }
  }

  optimizer.dispose();
  model.restore(best);
  return { model, log, best, bestScore };
}

export function logToCsv(log: EpochLog[]): string {
  const lines = ['epoch,loss,acc_easy,acc_med,acc_hard'];
  for (const row of log) {
    lines.push([row.epoch, row.loss, row.accEasy, row.accMed, row.accHard]
      .map((v) => String(v)).join(','));
  }
  return lines.join('\n') + '\n';
}
