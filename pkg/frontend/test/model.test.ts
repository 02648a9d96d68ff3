import { describe, expect, it } from 'vitest';
import { standardize } from '../src/data.js';
import { SplitNet, StMeta, checkMeta } from '../src/model.js';
import { referenceForward, toF64 } from '../src/reference.js';
import { Rng } from '../src/rng.js';

function randomSet(n: number, d: number, rng: Rng): number[][] {
  return Array.from({ length: n }, () =>
    Array.from({ length: d }, () => rng.normal() * 2));
}

describe('set-transformer forward', () => {
  it('agrees with the float64 reference implementation', () => {
    const rng = new Rng(741);
    let worst = 0;
    for (let c = 0; c < 20; c++) {
      const heads = [1, 2, 4][c % 3];
      const meta: StMeta = {
        dimIn: 1 + (c % 3), dimHidden: heads * (2 + (c % 3)),
        heads, inducing: 2 + (c % 4), depth: 1 + (c % 2), seeds: 2,
      };
      const net = SplitNet.init(meta, rng);
      const x = randomSet(5 + rng.int(0, 20), meta.dimIn, rng);
      const got = net.predict(x);
      const want = referenceForward(x, meta, toF64(net.snapshot()));
      for (let i = 0; i < got.length; i++) {
        worst = Math.max(worst, Math.abs(got[i] - want[i]));
      }
      net.dispose();
    }
    expect(worst).toBeLessThan(1e-4);
  });

  it('is permutation equivariant', () => {
    const rng = new Rng(742);
    const meta: StMeta = { dimIn: 2, dimHidden: 16, heads: 2, inducing: 8, depth: 2, seeds: 2 };
    const net = SplitNet.init(meta, rng);
    for (let c = 0; c < 10; c++) {
      const x = randomSet(30, 2, rng);
      const perm = rng.shuffle([...x.keys()]);
      const base = net.predict(x);
      const permuted = net.predict(perm.map((i) => x[i]));
      for (let i = 0; i < perm.length; i++) {
        expect(Math.abs(permuted[i] - base[perm[i]])).toBeLessThan(1e-5);
      }
    }
    net.dispose();
  });

  it('gives identical points identical logits', () => {
    const rng = new Rng(743);
    const meta: StMeta = { dimIn: 3, dimHidden: 8, heads: 2, inducing: 4, depth: 1, seeds: 2 };
    const net = SplitNet.init(meta, rng);
    const x = randomSet(12, 3, rng);
    x[11] = [...x[0]];
    const logits = net.predict(x);
    expect(Math.abs(logits[11] - logits[0])).toBeLessThan(1e-6);
    net.dispose();
  });

  it('init is deterministic in the seed', () => {
    const meta: StMeta = { dimIn: 2, dimHidden: 8, heads: 2, inducing: 4, depth: 1, seeds: 2 };
    const a = SplitNet.init(meta, new Rng(7));
    const b = SplitNet.init(meta, new Rng(7));
    const x = randomSet(9, 2, new Rng(8));
    expect(a.predict(x)).toEqual(b.predict(x));
    a.dispose();
    b.dispose();
  });

  it('standardization centers and scales each dimension', () => {
    const rng = new Rng(744);
    const x = randomSet(40, 3, rng).map((p) => [p[0] * 10 + 5, p[1], p[2] * 0.01]);
    const z = standardize(x);
    for (let j = 0; j < 3; j++) {
      const mean = z.reduce((a, p) => a + p[j], 0) / z.length;
      const variance = z.reduce((a, p) => a + (p[j] - mean) ** 2, 0) / z.length;
      expect(Math.abs(mean)).toBeLessThan(1e-10);
      expect(Math.abs(variance - 1)).toBeLessThan(1e-10);
    }
    // constant column survives via the std floor
    const flat = standardize(x.map((p) => [p[0], 2.5, p[2]]));
    for (const p of flat) expect(p[1]).toBe(0);
  });

  it('rejects malformed metadata and tensor sets', () => {
    expect(() => checkMeta({ dimIn: 2, dimHidden: 9, heads: 2, inducing: 4, depth: 1, seeds: 2 }))
      .toThrow(/divisible/);
    expect(() => checkMeta({ dimIn: 2, dimHidden: 8, heads: 2, inducing: 4, depth: 1, seeds: 3 }))
      .toThrow(/seeds/);
    const meta: StMeta = { dimIn: 2, dimHidden: 8, heads: 2, inducing: 4, depth: 1, seeds: 2 };
    const net = SplitNet.init(meta, new Rng(1));
    const snap = net.snapshot();
    net.dispose();
    const bad = { ...snap, 'embed.w': { shape: [3, 8], data: new Float32Array(24) } };
    expect(() => SplitNet.fromTensors(meta, bad)).toThrow(/embed\.w/);
    delete (snap as Record<string, unknown>)['dec.mab.wq'];
    expect(() => SplitNet.fromTensors(meta, snap)).toThrow(/dec\.mab\.wq/);
  });
});
