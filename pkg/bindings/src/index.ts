/**
 * Loader-side bindings for the freqsr toolkit.
 *
 * Each call writes the JPEG buffer to a scratch file, runs the freqsr CLI
 * (override the executable with FREQSR_BIN), and parses the DCTT / P6 output
 * back into typed arrays with a single copy. Semantics are byte-identical to
 * the toolkit's own decode surface because the CLI *is* that surface.
 */
import { spawnSync } from 'node:child_process';
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { DcttTensor, parseDctt } from './dctt.js';

export { DcttTensor, parseDctt } from './dctt.js';

/** Raised when the toolkit rejects the input (malformed or unsupported JPEG). */
export class DecodeError extends Error {}

export interface CoefficientPlane {
  /** [blockRows, blockCols, 8, 8], dequantized integer coefficients. */
  dims: number[];
  data: Int32Array;
}

export interface DctImage {
  y: CoefficientPlane;
  cb: CoefficientPlane | null;
  cr: CoefficientPlane | null;
  dims: {
    pixelWidth: number;
    pixelHeight: number;
    subsampling: string;
    planes: string[];
  };
}

export interface FreqTensor {
  /** [blockRows, blockCols, 64] */
  dims: number[];
  data: Float64Array;
}

export interface RgbImage {
  width: number;
  height: number;
  /** Interleaved RGB, height * width * 3 bytes. */
  data: Uint8Array;
}

function cliBin(): string {
  return process.env.FREQSR_BIN ?? 'freqsr';
}

function runCli(args: string[]): void {
  const r = spawnSync(cliBin(), args, { encoding: 'utf-8' });
  if (r.error) {
    throw new Error(`failed to launch ${cliBin()}: ${r.error.message}`);
  }
  if (r.status !== 0) {
    throw new DecodeError(r.stderr.trim() || `${cliBin()} exited with ${r.status}`);
  }
}

function withScratch<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), 'freqsr-'));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function asPlane(t: DcttTensor): CoefficientPlane {
  if (t.dtype !== 'i32' || t.dims.length !== 4) {
    throw new DecodeError(`unexpected coefficient tensor: ${t.dtype} ${t.dims}`);
  }
  return { dims: t.dims, data: t.data as Int32Array };
}

/**
 * Decode a baseline JPEG buffer into dequantized DCT coefficient planes,
 * shapes [blockRows, blockCols, 8, 8]; cb/cr are null for grayscale input.
 */
export function decodeToDctBytes(buffer: Uint8Array): DctImage {
  return withScratch((dir) => {
    const input = join(dir, 'in.jpg');
    const out = join(dir, 'out.dctt');
    writeFileSync(input, buffer);
    runCli(['decode', input, '--mode', 'dct', '--out', out]);
    const tensors = parseDctt(readFileSync(out));
    const meta = JSON.parse(readFileSync(out + '.json', 'utf-8'));
    return {
      y: asPlane(tensors[0]),
      cb: tensors.length > 1 ? asPlane(tensors[1]) : null,
      cr: tensors.length > 2 ? asPlane(tensors[2]) : null,
      dims: {
        pixelWidth: meta.pixel_width,
        pixelHeight: meta.pixel_height,
        subsampling: meta.subsampling,
        planes: meta.planes,
      },
    };
  });
}

/**
 * Run the full network-input preprocessing on the luma plane of a JPEG
 * buffer: center crop to S x S blocks, range normalization, 2x DCT-domain
 * upsampling, and flattening to [2S, 2S, 64].
 */
export function preprocessLrBytes(buffer: Uint8Array, patchBlocks: number, scale = 2): FreqTensor {
  if (scale !== 2) throw new RangeError(`only scale 2 is supported, got ${scale}`);
  if (!Number.isInteger(patchBlocks) || patchBlocks < 1) {
    throw new RangeError(`patchBlocks must be a positive integer, got ${patchBlocks}`);
  }
  return withScratch((dir) => {
    const input = join(dir, 'in.jpg');
    const out = join(dir, 'pre.dctt');
    writeFileSync(input, buffer);
    runCli(['preprocess', input, '--out', out, '--patch-blocks', String(patchBlocks)]);
    const t = parseDctt(readFileSync(out))[0];
    if (t.dtype !== 'f64' || t.dims.length !== 3) {
      throw new DecodeError(`unexpected preprocess tensor: ${t.dtype} ${t.dims}`);
    }
    return { dims: t.dims, data: t.data as Float64Array };
  });
}

/**
 * Full RGB reconstruction of a JPEG buffer (the toolkit's baseline decode
 * path), returned as an interleaved 8-bit raster.
 */
export function reconstructRgbBytes(buffer: Uint8Array): RgbImage {
  return withScratch((dir) => {
    const input = join(dir, 'in.jpg');
    const out = join(dir, 'out.ppm');
    writeFileSync(input, buffer);
    runCli(['decode', input, '--mode', 'rgb', '--out', out]);
    return parsePpm(readFileSync(out));
  });
}

/** Parse a binary P6 (maxval 255) raster. */
export function parsePpm(buf: Uint8Array): RgbImage {
  const text = Buffer.from(buf.subarray(0, 64)).toString('latin1');
  const m = /^P6\s+(\d+)\s+(\d+)\s+255\s/.exec(text);
  if (!m) throw new Error('not a maxval-255 P6 file');
  const width = parseInt(m[1], 10);
  const height = parseInt(m[2], 10);
  const offset = m[0].length;
  const need = width * height * 3;
  if (buf.byteLength < offset + need) throw new Error('truncated P6 payload');
  return { width, height, data: new Uint8Array(buf.subarray(offset, offset + need)) };
}
