/**
 * Reader/writer for the engine's binary weight-file format.
 *
 * Layout, little-endian throughout:
 *
 *   8 bytes   ASCII magic "SPLTNET1"
 *   6 x u32   meta: input dim, hidden dim, heads, inducing, depth, seeds
 *   u32       tensor count
 *   per tensor: u16 name length, UTF-8 name, u8 rank, rank x u32 dims,
 *               float32 row-major payload
 *
 * Tensors are emitted in canonical declaration order so files produced
 * here are byte-identical to the engine's own writer for equal weights.
 */

import { readFileSync, writeFileSync } from 'node:fs';
import { StMeta, TensorMap, checkMeta, expectedShapes } from './model.js';

const MAGIC = 'SPLTNET1';

export function encodeWeights(meta: StMeta, tensors: TensorMap): Uint8Array {
  checkMeta(meta);
  const want = expectedShapes(meta);
  const names = Object.keys(want);
  const missing = names.filter((n) => !(n in tensors));
  const extra = Object.keys(tensors).filter((n) => !(n in want));
  if (missing.length || extra.length) {
    throw new Error(`tensor set mismatch: missing [${missing}], unexpected [${extra}]`);
  }
  const encoder = new TextEncoder();
  const encodedNames = names.map((n) => encoder.encode(n));
  let size = 8 + 6 * 4 + 4;
  names.forEach((name, i) => {
    const t = tensors[name];
    if (t.shape.join(',') !== want[name].join(',')) {
      throw new Error(`tensor ${name}: shape [${t.shape}], expected [${want[name]}]`);
    }
    if (!t.data.every(Number.isFinite)) {
      throw new Error(`tensor ${name} contains non-finite values`);
    }
    size += 2 + encodedNames[i].length + 1 + 4 * t.shape.length + 4 * t.data.length;
  });

  const buffer = new ArrayBuffer(size);
  const view = new DataView(buffer);
  const bytes = new Uint8Array(buffer);
  let off = 0;
  bytes.set(encoder.encode(MAGIC), off);
  off += 8;
  for (const v of [meta.dimIn, meta.dimHidden, meta.heads, meta.inducing,
                   meta.depth, meta.seeds]) {
    view.setUint32(off, v, true);
    off += 4;
  }
  view.setUint32(off, names.length, true);
  off += 4;
  names.forEach((name, i) => {
    const t = tensors[name];
    view.setUint16(off, encodedNames[i].length, true);
    off += 2;
    bytes.set(encodedNames[i], off);
    off += encodedNames[i].length;
    view.setUint8(off, t.shape.length);
    off += 1;
    for (const dim of t.shape) {
      view.setUint32(off, dim, true);
      off += 4;
    }
    for (const v of t.data) {
      view.setFloat32(off, v, true);
      off += 4;
    }
  });
  return bytes;
}

export function saveWeights(path: string, meta: StMeta, tensors: TensorMap): void {
  writeFileSync(path, encodeWeights(meta, tensors));
}

export function loadWeights(path: string): { meta: StMeta; tensors: TensorMap } {
  const raw = readFileSync(path);
  const bytes = new Uint8Array(raw.buffer, raw.byteOffset, raw.byteLength);
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  if (bytes.length < 8 + 6 * 4 + 4
      || new TextDecoder().decode(bytes.subarray(0, 8)) !== MAGIC) {
    throw new Error(`${path}: not a ${MAGIC} weight file`);
  }
  let off = 8;
  const header: number[] = [];
  for (let i = 0; i < 6; i++) {
    header.push(view.getUint32(off, true));
    off += 4;
  }
  const meta: StMeta = {
    dimIn: header[0], dimHidden: header[1], heads: header[2],
    inducing: header[3], depth: header[4], seeds: header[5],
  };
  checkMeta(meta);
  const count = view.getUint32(off, true);
  off += 4;
  const tensors: TensorMap = {};
  const decoder = new TextDecoder();
  for (let i = 0; i < count; i++) {
    const nameLen = view.getUint16(off, true);
    off += 2;
    const name = decoder.decode(bytes.subarray(off, off + nameLen));
    off += nameLen;
    const rank = view.getUint8(off);
    off += 1;
    const shape: number[] = [];
    for (let r = 0; r < rank; r++) {
      shape.push(view.getUint32(off, true));
      off += 4;
    }
    const numel = shape.reduce((a, b) => a * b, 1);
    if (off + 4 * numel > bytes.length) {
      throw new Error(`${path}: truncated payload for tensor ${name}`);
    }
    const data = new Float32Array(numel);
    for (let j = 0; j < numel; j++) {
      data[j] = view.getFloat32(off, true);
      off += 4;
    }
    tensors[name] = { shape, data };
  }
  const want = expectedShapes(meta);
  const missing = Object.keys(want).filter((n) => !(n in tensors));
  const extra = Object.keys(tensors).filter((n) => !(n in want));
  if (missing.length || extra.length) {
    throw new Error(`${path}: tensor set mismatch: missing [${missing}], `
                    + `unexpected [${extra}]`);
  }
  return { meta, tensors };
}
