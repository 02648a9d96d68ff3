#!/usr/bin/env node
/**
 * splitnet-train: fit a split predictor and export engine-loadable weights.
 *
 *   splitnet-train --dim 2 --epochs 20 --out weights.bin
 *
 * The curriculum interpolates the generating prior from --easy-kappa to
 * --hard-kappa over the run; the exported file is the best-validation
 * checkpoint in the engine's binary weight format.
 */

import { writeFileSync } from 'node:fs';
import { pathToFileURL } from 'node:url';
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';
import { NiwParams } from './niw.js';
import { TrainConfig, defaultConfig, logToCsv, train } from './train.js';
import { saveWeights } from './weights.js';

function priorAt(dim: number, kappa: number, nuExtra: number): NiwParams {
  return {
    mu0: new Array<number>(dim).fill(0),
    kappa,
    psi: Array.from({ length: dim }, (_, i) =>
      Array.from({ length: dim }, (_, j) => (i === j ? 1 : 0))),
    nu: dim + nuExtra,
  };
}

export function buildConfig(argv: Record<string, unknown>): TrainConfig {
  const dim = argv.dim as number;
  const cfg = defaultConfig(dim);
  cfg.epochs = argv.epochs as number;
  cfg.seed = argv.seed as number;
  cfg.curriculumPeriod = argv.curriculumPeriod as number;
  cfg.easy = priorAt(dim, argv.easyKappa as number, 6);
  cfg.hard = priorAt(dim, argv.hardKappa as number, 3);
  cfg.meta = {
    dimIn: dim,
    dimHidden: argv.hidden as number,
    heads: argv.heads as number,
    inducing: argv.inducing as number,
    depth: argv.depth as number,
    seeds: 2,
  };
  cfg.nMax = argv.nMax as number;
  cfg.poolSize = argv.poolSize as number;
  cfg.batchSize = argv.batchSize as number;
  cfg.learningRate = argv.lr as number;
  if (argv.valSize !== undefined) cfg.valSize = argv.valSize as number;
  return cfg;
}

export async function main(args: string[]): Promise<number> {
  const argv = await yargs(hideBin(args))
    .usage('splitnet-train --dim D --epochs E --out weights.bin')
    .option('dim', { type: 'number', demandOption: true, describe: 'data dimension' })
    .option('epochs', { type: 'number', demandOption: true, describe: 'training epochs' })
    .option('out', { type: 'string', demandOption: true, describe: 'weight file to write' })
    .option('easy-kappa', { type: 'number', default: 0.01, describe: 'curriculum start prior kappa' })
    .option('hard-kappa', { type: 'number', default: 0.5, describe: 'curriculum end prior kappa' })
    .option('curriculum-period', { type: 'number', default: 2, describe: 'epochs between difficulty steps' })
    .option('seed', { type: 'number', default: 0, describe: 'RNG seed' })
    .option('hidden', { type: 'number', default: 16, describe: 'hidden width' })
    .option('heads', { type: 'number', default: 2, describe: 'attention heads' })
    .option('inducing', { type: 'number', default: 8, describe: 'inducing points per block' })
    .option('depth', { type: 'number', default: 1, describe: 'encoder blocks' })
    .option('n-max', { type: 'number', default: 256, describe: 'largest training set size' })
    .option('pool-size', { type: 'number', default: 256, describe: 'example pool size' })
    .option('batch-size', { type: 'number', default: 32 })
    .option('lr', { type: 'number', default: 1e-3 })
    .option('val-size', { type: 'number', describe: 'validation sets per difficulty' })
    .option('log', { type: 'string', describe: 'training log CSV (default <out>.log.csv)' })
    .strict()
    .parse();

  const cfg = buildConfig(argv as Record<string, unknown>);
  const outPath = argv.out as string;
  const logPath = (argv.log as string | undefined) ?? `${outPath}.log.csv`;

  console.log(`training d=${cfg.meta.dimIn} hidden=${cfg.meta.dimHidden} ` +
    `heads=${cfg.meta.heads} epochs=${cfg.epochs} seed=${cfg.seed}`);
  const started = Date.now();
  const result = train(cfg, (row) => {
    console.log(`epoch ${row.epoch}: loss=${row.loss.toFixed(4)} ` +
      `acc easy/med/hard=${row.accEasy.toFixed(3)}/` +
      `${row.accMed.toFixed(3)}/${row.accHard.toFixed(3)}`);
  });

  saveWeights(outPath, cfg.meta, result.best);
  writeFileSync(logPath, logToCsv(result.log));
  console.log(`best validation accuracy ${result.bestScore.toFixed(3)}; ` +
    `wrote ${outPath} and ${logPath} in ${((Date.now() - started) / 1000).toFixed(1)}s`);
  result.model.dispose();
  return 0;
}

const entry = process.argv[1] ? pathToFileURL(process.argv[1]).href : '';
if (import.meta.url === entry) {
  main(process.argv).then(
    (code) => { process.exitCode = code; },
    (err) => { console.error(`error: ${(err as Error).message}`); process.exitCode = 1; },
  );
}
