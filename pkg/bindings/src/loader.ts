/**
 * Example dataset loader: iterate a make-dataset manifest and yield
 * (lrTensor, hrTensor) training pairs.
 *
 * The LR side is the toolkit's own preprocessing (crop, normalize, 2x
 * upsample, flatten). The HR target is the center 2S x 2S blocks of the HR
 * luma coefficients, normalized and flattened here; the affine map is
 * val = (x + 1024) / 2040 * 2 - 1, the toolkit's coefficient range.
 *
 *   node dist/loader.js path/to/manifest.json [patchBlocks]
 */
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';

import { decodeToDctBytes, preprocessLrBytes, FreqTensor } from './index.js';

export interface ManifestPair {
  name: string;
  lr: string;
  hr: string;
}

export interface Manifest {
  schema_version: number;
  scale: number;
  pairs: ManifestPair[];
}

export interface TrainingPair {
  name: string;
  lrTensor: FreqTensor;
  hrTensor: FreqTensor;
}

const ORIG_MIN = -1024;
const ORIG_MAX = 1016;

function normalize(x: number): number {
  return -1 + ((x - ORIG_MIN) / (ORIG_MAX - ORIG_MIN)) * 2;
}

/** Center-crop S x S blocks of a [bh, bw, 8, 8] plane, normalized and flattened to [S, S, 64]. */
export function hrTarget(plane: { dims: number[]; data: Int32Array }, sizeBlocks: number): FreqTensor {
  const [rows, cols] = plane.dims;
  if (sizeBlocks > rows || sizeBlocks > cols) {
    throw new RangeError(`crop ${sizeBlocks} exceeds plane ${rows}x${cols}`);
  }
  const r0 = Math.floor((rows - sizeBlocks) / 2);
  const c0 = Math.floor((cols - sizeBlocks) / 2);
  const out = new Float64Array(sizeBlocks * sizeBlocks * 64);
  let k = 0;
  for (let r = r0; r < r0 + sizeBlocks; r++) {
    for (let c = c0; c < c0 + sizeBlocks; c++) {
      const base = (r * cols + c) * 64;
      for (let i = 0; i < 64; i++) out[k++] = normalize(plane.data[base + i]);
    }
  }
  return { dims: [sizeBlocks, sizeBlocks, 64], data: out };
}

/** Yield (lrTensor, hrTensor) pairs for every manifest entry. */
export function* iteratePairs(manifestPath: string, patchBlocks: number): Generator<TrainingPair> {
  const manifest: Manifest = JSON.parse(readFileSync(manifestPath, 'utf-8'));
  const base = dirname(manifestPath);
  for (const pair of manifest.pairs) {
    const lrTensor = preprocessLrBytes(readFileSync(join(base, pair.lr)), patchBlocks);
    const hr = decodeToDctBytes(readFileSync(join(base, pair.hr)));
    yield { name: pair.name, lrTensor, hrTensor: hrTarget(hr.y, 2 * patchBlocks) };
  }
}

const invokedDirectly = process.argv[1]?.endsWith('loader.js');
if (invokedDirectly) {
  const [manifestPath, blocks] = process.argv.slice(2);
  if (!manifestPath) {
    console.error('usage: node dist/loader.js manifest.json [patchBlocks]');
    process.exit(1);
  }
  const s = blocks ? parseInt(blocks, 10) : 8;
  for (const { name, lrTensor, hrTensor } of iteratePairs(manifestPath, s)) {
    console.log(`${name}: lr [${lrTensor.dims}] hr [${hrTensor.dims}]`);
  }
}
